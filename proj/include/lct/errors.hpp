#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lct {

// Base of every error thrown by the library. The `category` maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Category { Config = 1, Admissibility = 2, Numerical = 3, Schema = 4 };

    Error(Category category, const std::string& what) : std::runtime_error(what), category_(category) {}

    [[nodiscard]] Category category() const noexcept { return category_; }

private:
    Category category_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(Category::Config, what + " at offset " + std::to_string(offset)), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public Error {
public:
    explicit UnknownIdentifierError(const std::string& name)
        : Error(Category::Config, "unknown identifier '" + name + "'"), name_(name) {}

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error(Category::Numerical, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Category::Config, what) {}
};

class AdmissibilityError : public Error {
public:
    explicit AdmissibilityError(const std::string& what) : Error(Category::Admissibility, what) {}
};

class DegenerateZeroError : public Error {
public:
    explicit DegenerateZeroError(const std::string& what) : Error(Category::Numerical, what) {}
};

class CrossCheckError : public Error {
public:
    explicit CrossCheckError(const std::string& what) : Error(Category::Numerical, what) {}
};

class StepUnderflowError : public Error {
public:
    StepUnderflowError(const std::string& what, double time)
        : Error(Category::Numerical, what + " at t=" + std::to_string(time)), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(const std::string& what) : Error(Category::Numerical, what) {}
};

class SingularJacobianError : public Error {
public:
    explicit SingularJacobianError(const std::string& what) : Error(Category::Numerical, what) {}
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(Category::Schema, what) {}
};

}  // namespace lct

#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lct {

/// Immutable scalar expression over a fixed, ordered list of variable names.
///
/// Grammar: decimal literals, variables, `pi`, binary `+ - * / ^`, unary minus and the
/// functions `sin cos exp log abs`. Precedence from tightest: `^` (right-assoc), unary minus,
/// `* /`, `+ -` (both left-assoc). Variables are resolved to slots at parse time, so the
/// positional `eval` overload is the fast path used by the integrator.
class Expr {
public:
    enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Abs };

    struct Node {
        Kind kind;
        double value = 0.0;  // Number
        int slot = -1;       // Variable
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

    Expr(NodePtr root, std::vector<std::string> variables);

    /// Evaluates with values given in the order of `variables()`.
    /// Throws EvalError on any non-finite intermediate or final value.
    [[nodiscard]] double eval(std::span<const double> values) const;
    [[nodiscard]] double eval(const std::map<std::string, double>& bindings) const;

    [[nodiscard]] const std::vector<std::string>& variables() const noexcept { return variables_; }
    [[nodiscard]] const NodePtr& root() const noexcept { return root_; }

    /// Fully parenthesised text that parses back to an equivalent tree.
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] bool depends_on(std::string_view name) const;
    [[nodiscard]] bool is_constant() const;

private:
    NodePtr root_;
    std::vector<std::string> variables_;
};

/// Parses `text`; any identifier that is neither a function, `pi`, nor in `allowed_vars` is rejected.
[[nodiscard]] Expr parse(std::string_view text, const std::vector<std::string>& allowed_vars);

/// Exact symbolic partial derivative with light constant folding.
[[nodiscard]] Expr diff(const Expr& e, std::string_view var);

}  // namespace lct

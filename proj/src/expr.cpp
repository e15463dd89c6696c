#include "lct/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lct/errors.hpp"

namespace lct {

namespace {

using Kind = Expr::Kind;
using NodePtr = Expr::NodePtr;

NodePtr make_number(double v) { return std::make_shared<const Expr::Node>(Expr::Node{Kind::Number, v, -1, nullptr, nullptr}); }

NodePtr make_variable(int slot) { return std::make_shared<const Expr::Node>(Expr::Node{Kind::Variable, 0.0, slot, nullptr, nullptr}); }

NodePtr make_node(Kind k, NodePtr lhs, NodePtr rhs = nullptr) {
    return std::make_shared<const Expr::Node>(Expr::Node{k, 0.0, -1, std::move(lhs), std::move(rhs)});
}

bool is_number(const NodePtr& n, double v) { return n->kind == Kind::Number && n->value == v; }

// Constructors with the folding diff() relies on to keep derivative trees small.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    if (a->kind == Kind::Number && b->kind == Kind::Number) return make_number(a->value + b->value);
    return make_node(Kind::Add, std::move(a), std::move(b));
}

NodePtr negate(NodePtr a) {
    if (a->kind == Kind::Number) return make_number(-a->value);
    if (a->kind == Kind::Negate) return a->lhs;
    return make_node(Kind::Negate, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return negate(std::move(b));
    if (a->kind == Kind::Number && b->kind == Kind::Number) return make_number(a->value - b->value);
    return make_node(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (a->kind == Kind::Number && b->kind == Kind::Number) return make_number(a->value * b->value);
    return make_node(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return make_number(0.0);
    if (is_number(b, 1.0)) return a;
    return make_node(Kind::Div, std::move(a), std::move(b));
}

bool depends(const NodePtr& n, int slot) {
    if (!n) return false;
    if (n->kind == Kind::Variable) return slot < 0 || n->slot == slot;
    return depends(n->lhs, slot) || depends(n->rhs, slot);
}

double checked(double v, const char* op) {
    if (!std::isfinite(v)) throw EvalError(std::string("non-finite value in ") + op);
    return v;
}

double eval_node(const Expr::Node& n, std::span<const double> values) {
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::Variable: return values[static_cast<std::size_t>(n.slot)];
        case Kind::Negate: return -eval_node(*n.lhs, values);
        case Kind::Add: return checked(eval_node(*n.lhs, values) + eval_node(*n.rhs, values), "addition");
        case Kind::Sub: return checked(eval_node(*n.lhs, values) - eval_node(*n.rhs, values), "subtraction");
        case Kind::Mul: return checked(eval_node(*n.lhs, values) * eval_node(*n.rhs, values), "product");
        case Kind::Div: {
            const double den = eval_node(*n.rhs, values);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(eval_node(*n.lhs, values) / den, "division");
        }
        case Kind::Pow: {
            const double base = eval_node(*n.lhs, values);
            const double expo = eval_node(*n.rhs, values);
            if (base < 0.0 && expo != std::trunc(expo)) throw EvalError("negative base with non-integer exponent");
            return checked(std::pow(base, expo), "power");
        }
        case Kind::Sin: return std::sin(eval_node(*n.lhs, values));
        case Kind::Cos: return std::cos(eval_node(*n.lhs, values));
        case Kind::Exp: return checked(std::exp(eval_node(*n.lhs, values)), "exp");
        case Kind::Log: {
            const double arg = eval_node(*n.lhs, values);
            if (arg <= 0.0) throw EvalError("log of non-positive value");
            return std::log(arg);
        }
        case Kind::Abs: return std::abs(eval_node(*n.lhs, values));
    }
    throw EvalError("corrupt expression node");
}

const char* function_name(Kind k) {
    switch (k) {
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Exp: return "exp";
        case Kind::Log: return "log";
        case Kind::Abs: return "abs";
        default: return nullptr;
    }
}

void print_node(std::ostream& os, const Expr::Node& n, const std::vector<std::string>& vars) {
    switch (n.kind) {
        case Kind::Number: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
            // Negative literals only arise from folding; wrap so they re-parse as unary minus.
            if (n.value < 0) os << '(' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ')';
            else os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
            return;
        }
        case Kind::Variable: os << vars[static_cast<std::size_t>(n.slot)]; return;
        case Kind::Negate: os << "(-"; print_node(os, *n.lhs, vars); os << ')'; return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
        case Kind::Pow: {
            static constexpr char ops[] = {'+', '-', '*', '/', '^'};
            const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
            os << '(';
            print_node(os, *n.lhs, vars);
            os << op;
            print_node(os, *n.rhs, vars);
            os << ')';
            return;
        }
        default:
            os << function_name(n.kind) << '(';
            print_node(os, *n.lhs, vars);
            os << ')';
    }
}

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    NodePtr run() {
        skip_ws();
        if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_here(const char* expected) {
        if (pos_ >= text_.size()) throw ParseError(std::string("unexpected end of input, expected ") + expected, pos_);
        throw ParseError(std::string("unexpected '") + text_[pos_] + "', expected " + expected, pos_);
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make_node(Kind::Add, lhs, parse_product());
            else if (accept('-')) lhs = make_node(Kind::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_node(Kind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_node(Kind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Kind::Negate, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        // Exponent goes through parse_unary: right-associative and allows `2^-1`.
        if (accept('^')) return make_node(Kind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail_here("operand");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!accept(')')) fail_here("')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail_here("operand");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double v = 0.0;
        const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v, std::chars_format::general);
        if (res.ec != std::errc{} || !std::isfinite(v)) throw ParseError("malformed number", start);
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        return make_number(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            static const std::map<std::string, Kind, std::less<>> functions = {
                {"sin", Kind::Sin}, {"cos", Kind::Cos}, {"exp", Kind::Exp}, {"log", Kind::Log}, {"abs", Kind::Abs}};
            const auto it = functions.find(name);
            if (it == functions.end()) throw UnknownIdentifierError(name);
            ++pos_;
            NodePtr arg = parse_sum();
            if (!accept(')')) fail_here("')'");
            return make_node(it->second, std::move(arg));
        }
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it != vars_.end()) return make_variable(static_cast<int>(it - vars_.begin()));
        if (name == "pi") return make_number(std::numbers::pi);
        throw UnknownIdentifierError(name);
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

NodePtr diff_node(const NodePtr& n, int slot) {
    if (!depends(n, slot)) return make_number(0.0);
    switch (n->kind) {
        case Kind::Number: return make_number(0.0);
        case Kind::Variable: return make_number(1.0);
        case Kind::Negate: return negate(diff_node(n->lhs, slot));
        case Kind::Add: return add(diff_node(n->lhs, slot), diff_node(n->rhs, slot));
        case Kind::Sub: return sub(diff_node(n->lhs, slot), diff_node(n->rhs, slot));
        case Kind::Mul:
            return add(mul(diff_node(n->lhs, slot), n->rhs), mul(n->lhs, diff_node(n->rhs, slot)));
        case Kind::Div: {
            // (f/g)' = f'/g - f g'/g^2
            NodePtr first = div(diff_node(n->lhs, slot), n->rhs);
            NodePtr second = div(mul(n->lhs, diff_node(n->rhs, slot)), mul(n->rhs, n->rhs));
            return sub(first, second);
        }
        case Kind::Pow: {
            const NodePtr& f = n->lhs;
            const NodePtr& g = n->rhs;
            if (!depends(g, slot)) {
                // g f^(g-1) f'
                return mul(mul(g, make_node(Kind::Pow, f, sub(g, make_number(1.0)))), diff_node(f, slot));
            }
            // f^g (g' log f + g f'/f)
            NodePtr inner = add(mul(diff_node(g, slot), make_node(Kind::Log, f)), div(mul(g, diff_node(f, slot)), f));
            return mul(n, inner);
        }
        case Kind::Sin: return mul(make_node(Kind::Cos, n->lhs), diff_node(n->lhs, slot));
        case Kind::Cos: return mul(negate(make_node(Kind::Sin, n->lhs)), diff_node(n->lhs, slot));
        case Kind::Exp: return mul(n, diff_node(n->lhs, slot));
        case Kind::Log: return div(diff_node(n->lhs, slot), n->lhs);
        case Kind::Abs:
            // u'·u/|u|; undefined (division by zero) at u = 0.
            return mul(diff_node(n->lhs, slot), div(n->lhs, n));
    }
    return make_number(0.0);
}

}  // namespace

Expr::Expr(NodePtr root, std::vector<std::string> variables) : root_(std::move(root)), variables_(std::move(variables)) {}

double Expr::eval(std::span<const double> values) const {
    if (values.size() < variables_.size()) throw EvalError("too few variable values");
    return checked(eval_node(*root_, values), "expression");
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
    std::vector<double> values(variables_.size(), 0.0);
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const auto it = bindings.find(variables_[i]);
        if (it != bindings.end()) {
            values[i] = it->second;
        } else if (depends(root_, static_cast<int>(i))) {
            throw EvalError("unbound variable '" + variables_[i] + "'");
        }
    }
    return eval(values);
}

std::string Expr::to_string() const {
    std::ostringstream os;
    print_node(os, *root_, variables_);
    return os.str();
}

bool Expr::depends_on(std::string_view name) const {
    const auto it = std::find(variables_.begin(), variables_.end(), name);
    return it != variables_.end() && depends(root_, static_cast<int>(it - variables_.begin()));
}

bool Expr::is_constant() const { return !depends(root_, -1); }

Expr parse(std::string_view text, const std::vector<std::string>& allowed_vars) {
    return Expr(Parser(text, allowed_vars).run(), allowed_vars);
}

Expr diff(const Expr& e, std::string_view var) {
    const auto& vars = e.variables();
    const auto it = std::find(vars.begin(), vars.end(), var);
    if (it == vars.end()) throw UnknownIdentifierError(std::string(var));
    return Expr(diff_node(e.root(), static_cast<int>(it - vars.begin())), vars);
}

}  // namespace lct

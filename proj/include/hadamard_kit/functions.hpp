#pragma once

// Expression language for holomorphic functions: AST, parser, printer, evaluator,
// principal dilogarithm, and function definitions paired with declared singular sets.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hadamard_kit/errors.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace ast {
struct Const { cplx value; };
struct Var {};
struct Add { ExprPtr lhs, rhs; };
struct Sub { ExprPtr lhs, rhs; };
struct Mul { ExprPtr lhs, rhs; };
struct Div { ExprPtr lhs, rhs; };
struct Neg { ExprPtr arg; };
struct PowInt { ExprPtr base; long k; };
struct Exp { ExprPtr arg; };
struct LogP { ExprPtr arg; };
struct Log1p { ExprPtr arg; };
struct Li2 { ExprPtr arg; };
struct Laurent { std::vector<cplx> coeffs; long n_min; };
}  // namespace ast

struct Expr {
    using Node = std::variant<ast::Const, ast::Var, ast::Add, ast::Sub, ast::Mul, ast::Div, ast::Neg, ast::PowInt,
                              ast::Exp, ast::LogP, ast::Log1p, ast::Li2, ast::Laurent>;
    Node node;
};

template <class T>
ExprPtr make_expr(T node) {
    return std::make_shared<const Expr>(Expr{Expr::Node(std::move(node))});
}

inline ExprPtr constant(cplx c) { return make_expr(ast::Const{c}); }
inline ExprPtr variable() { return make_expr(ast::Var{}); }

/// Structural equality.
inline bool same_expr(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, ast::Const>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, ast::Var>) return true;
            else if constexpr (std::is_same_v<T, ast::Add> || std::is_same_v<T, ast::Sub> ||
                               std::is_same_v<T, ast::Mul> || std::is_same_v<T, ast::Div>)
                return same_expr(x.lhs, y.lhs) && same_expr(x.rhs, y.rhs);
            else if constexpr (std::is_same_v<T, ast::PowInt>) return x.k == y.k && same_expr(x.base, y.base);
            else if constexpr (std::is_same_v<T, ast::Laurent>) return x.n_min == y.n_min && x.coeffs == y.coeffs;
            else return same_expr(x.arg, y.arg);
        },
        a->node);
}

// ---------------------------------------------------------------------------
// Affine analysis
// ---------------------------------------------------------------------------

/// (a, b) with expr == a z + b, when the expression is affine in z.
inline std::optional<std::pair<cplx, cplx>> affine_coeffs(const ExprPtr& e) {
    using R = std::optional<std::pair<cplx, cplx>>;
    return std::visit(
        [](const auto& x) -> R {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Const>) return std::pair{cplx(0.0), x.value};
            else if constexpr (std::is_same_v<T, ast::Var>) return std::pair{cplx(1.0), cplx(0.0)};
            else if constexpr (std::is_same_v<T, ast::Add> || std::is_same_v<T, ast::Sub>) {
                auto l = affine_coeffs(x.lhs), r = affine_coeffs(x.rhs);
                if (!l || !r) return std::nullopt;
                double s = std::is_same_v<T, ast::Add> ? 1.0 : -1.0;
                return std::pair{l->first + s * r->first, l->second + s * r->second};
            } else if constexpr (std::is_same_v<T, ast::Mul>) {
                auto l = affine_coeffs(x.lhs), r = affine_coeffs(x.rhs);
                if (!l || !r) return std::nullopt;
                if (l->first != cplx(0.0) && r->first != cplx(0.0)) return std::nullopt;
                return std::pair{l->first * r->second + r->first * l->second, l->second * r->second};
            } else if constexpr (std::is_same_v<T, ast::Div>) {
                auto l = affine_coeffs(x.lhs), r = affine_coeffs(x.rhs);
                if (!l || !r || r->first != cplx(0.0) || r->second == cplx(0.0)) return std::nullopt;
                return std::pair{l->first / r->second, l->second / r->second};
            } else if constexpr (std::is_same_v<T, ast::Neg>) {
                auto a = affine_coeffs(x.arg);
                if (!a) return std::nullopt;
                return std::pair{-a->first, -a->second};
            } else if constexpr (std::is_same_v<T, ast::PowInt>) {
                if (x.k == 0) return std::pair{cplx(0.0), cplx(1.0)};
                if (x.k == 1) return affine_coeffs(x.base);
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, ast::Laurent>) {
                cplx a{0.0}, b{0.0};
                for (std::size_t i = 0; i < x.coeffs.size(); ++i) {
                    long n = x.n_min + static_cast<long>(i);
                    if (x.coeffs[i] == cplx(0.0)) continue;
                    if (n == 0) b += x.coeffs[i];
                    else if (n == 1) a += x.coeffs[i];
                    else return std::nullopt;
                }
                return std::pair{a, b};
            } else {
                return std::nullopt;
            }
        },
        e->node);
}

/// Principal log of an affine argument; log(1 + z) becomes Log1p(z).
inline ExprPtr make_log(const ExprPtr& arg) {
    auto ab = affine_coeffs(arg);
    if (!ab) fail(ErrorKind::RejectedExpression, "log accepts only arguments affine in z");
    if (ab->first == cplx(0.0)) fail(ErrorKind::RejectedExpression, "log of a constant");
    if (ab->first == cplx(1.0) && ab->second == cplx(1.0)) return make_expr(ast::Log1p{variable()});
    return make_expr(ast::LogP{arg});
}

inline ExprPtr make_log1p(const ExprPtr& arg) {
    auto ab = affine_coeffs(arg);
    if (!ab) fail(ErrorKind::RejectedExpression, "log1p accepts only arguments affine in z");
    if (ab->first == cplx(0.0)) fail(ErrorKind::RejectedExpression, "log1p of a constant");
    return make_expr(ast::Log1p{arg});
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_complex(cplx c) {
    if (c.imag() == 0.0) return format_real(c.real());
    if (c.real() == 0.0) return format_real(c.imag()) + "i";
    std::string im = format_real(std::abs(c.imag())) + "i";
    return "(" + format_real(c.real()) + (c.imag() < 0 ? " - " : " + ") + im + ")";
}

/// Fully parenthesized text that reparses to the same tree.
inline std::string to_text(const ExprPtr& e) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Const>) return format_complex(x.value);
            else if constexpr (std::is_same_v<T, ast::Var>) return "z";
            else if constexpr (std::is_same_v<T, ast::Add>) return "(" + to_text(x.lhs) + " + " + to_text(x.rhs) + ")";
            else if constexpr (std::is_same_v<T, ast::Sub>) return "(" + to_text(x.lhs) + " - " + to_text(x.rhs) + ")";
            else if constexpr (std::is_same_v<T, ast::Mul>) return "(" + to_text(x.lhs) + " * " + to_text(x.rhs) + ")";
            else if constexpr (std::is_same_v<T, ast::Div>) return "(" + to_text(x.lhs) + " / " + to_text(x.rhs) + ")";
            else if constexpr (std::is_same_v<T, ast::Neg>) return "(-" + to_text(x.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::PowInt>) return "(" + to_text(x.base) + "^" + std::to_string(x.k) + ")";
            else if constexpr (std::is_same_v<T, ast::Exp>) return "exp(" + to_text(x.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::LogP>) return "log(" + to_text(x.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::Log1p>) return "log1p(" + to_text(x.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::Li2>) return "li2(" + to_text(x.arg) + ")";
            else {
                std::string s = "laurent([";
                for (std::size_t i = 0; i < x.coeffs.size(); ++i) s += (i ? ", " : "") + format_complex(x.coeffs[i]);
                return s + "], " + std::to_string(x.n_min) + ")";
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    ExprPtr parse_all() {
        ExprPtr e = expr();
        skip();
        if (pos_ != s_.size()) error({"+", "-", "*", "/", "^", "end of input"}, "unexpected character");
        return e;
    }

private:
    [[noreturn]] void error(std::vector<std::string> expected, const std::string& what) {
        // Reported positions are 1-based columns.
        throw ParseError(pos_ + 1, std::move(expected), what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) error({std::string(1, c)}, std::string("expected '") + c + "'");
    }

    static bool is_const(const ExprPtr& e) { return std::holds_alternative<ast::Const>(e->node); }
    static cplx value(const ExprPtr& e) { return std::get<ast::Const>(e->node).value; }

    // Operations on two constants fold into a constant.
    template <class Op>
    static ExprPtr binary(ExprPtr l, ExprPtr r) {
        if (is_const(l) && is_const(r)) {
            cplx a = value(l), b = value(r);
            if constexpr (std::is_same_v<Op, ast::Add>) return constant(a + b);
            else if constexpr (std::is_same_v<Op, ast::Sub>) return constant(a - b);
            else if constexpr (std::is_same_v<Op, ast::Mul>) return constant(a * b);
            else if (b != cplx(0.0)) return constant(a / b);
        }
        return make_expr(Op{std::move(l), std::move(r)});
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (true) {
            if (accept('+')) lhs = binary<ast::Add>(lhs, term());
            else if (accept('-')) lhs = binary<ast::Sub>(lhs, term());
            else return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (true) {
            if (accept('*')) lhs = binary<ast::Mul>(lhs, factor());
            else if (accept('/')) lhs = binary<ast::Div>(lhs, factor());
            else return lhs;
        }
    }

    ExprPtr factor() {
        if (accept('-')) {
            ExprPtr a = factor();
            if (is_const(a)) return constant(-value(a));
            return make_expr(ast::Neg{a});
        }
        ExprPtr base = atom();
        if (accept('^')) {
            long k = integer();
            if (is_const(base)) {
                cplx b = value(base);
                if (b != cplx(0.0) || k >= 0) return constant(ipow(b, k));
            }
            return make_expr(ast::PowInt{base, k});
        }
        return base;
    }

    long integer() {
        skip();
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error({"integer"}, "expected an integer");
        long v = std::stol(std::string(s_.substr(start, pos_ - start)));
        return neg ? -v : v;
    }

public:
    static cplx ipow(cplx b, long k) {
        if (k < 0) return cplx(1.0) / ipow(b, -k);
        cplx r{1.0, 0.0};
        while (k > 0) {
            if (k & 1) r *= b;
            b *= b;
            k >>= 1;
        }
        return r;
    }

private:
    ExprPtr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            std::size_t digits = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (digits == pos_) pos_ = save;
        }
        std::string tok(s_.substr(start, pos_ - start));
        if (tok == ".") {
            pos_ = start;
            error({"number"}, "malformed number");
        }
        double v = std::stod(tok);
        if (pos_ < s_.size() && s_[pos_] == 'i' && !ident_char_at(pos_ + 1)) {
            ++pos_;
            return constant(cplx(0.0, v));
        }
        return constant(cplx(v, 0.0));
    }

    bool ident_char_at(std::size_t p) const {
        return p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_');
    }

    ExprPtr call_arg() {
        expect('(');
        ExprPtr a = expr();
        expect(')');
        return a;
    }

    ExprPtr laurent() {
        expect('(');
        expect('[');
        std::vector<cplx> coeffs;
        skip();
        if (!accept(']')) {
            do {
                std::size_t at = pos_;
                ExprPtr c = expr();
                if (!is_const(c)) {
                    pos_ = at;
                    error({"constant"}, "laurent coefficients must be constants");
                }
                coeffs.push_back(value(c));
            } while (accept(','));
            expect(']');
        }
        expect(',');
        long n_min = integer();
        expect(')');
        return make_expr(ast::Laurent{std::move(coeffs), n_min});
    }

    ExprPtr atom() {
        static const std::vector<std::string> kAtomStart = {"number", "z", "(", "exp", "log", "log1p", "li2", "laurent", "-"};
        skip();
        if (pos_ >= s_.size()) error(kAtomStart, "unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (ident_char_at(pos_)) ++pos_;
            std::string id(s_.substr(start, pos_ - start));
            if (id == "z") return variable();
            if (id == "i") return constant(cplx(0.0, 1.0));
            if (id == "exp") return make_expr(ast::Exp{call_arg()});
            if (id == "li2") return make_expr(ast::Li2{call_arg()});
            if (id == "laurent") return laurent();
            if (id == "log" || id == "log1p") {
                std::size_t at = pos_;
                ExprPtr a = call_arg();
                try {
                    return id == "log" ? make_log(a) : make_log1p(a);
                } catch (const Error&) {
                    pos_ = at;
                    throw;
                }
            }
            pos_ = start;
            error(kAtomStart, "unknown identifier '" + id + "'");
        }
        error(kAtomStart, std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expr(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Dilogarithm
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kPiSq6 = kPi * kPi / 6.0;
inline constexpr std::size_t kBernoulliTerms = 40;

/// c_n = B_n / (n+1)!, so Li2(w) = sum c_n u^(n+1) with u = -log(1-w).
inline const std::array<double, kBernoulliTerms>& li2_bernoulli_coeffs() {
    static const std::array<double, kBernoulliTerms> coeffs = [] {
        // a_n = B_n / n! from sum_{k<=n} a_k / (n+1-k)! = 0.
        std::array<long double, kBernoulliTerms> a{};
        std::array<long double, kBernoulliTerms + 2> inv_fact{};
        inv_fact[0] = 1.0L;
        for (std::size_t n = 1; n < inv_fact.size(); ++n) inv_fact[n] = inv_fact[n - 1] / static_cast<long double>(n);
        a[0] = 1.0L;
        for (std::size_t n = 1; n < kBernoulliTerms; ++n) {
            long double s = 0.0L;
            for (std::size_t k = 0; k < n; ++k) s += a[k] * inv_fact[n + 1 - k];
            a[n] = -s;
            if (n >= 3 && n % 2 == 1) a[n] = 0.0L;
        }
        std::array<double, kBernoulliTerms> c{};
        for (std::size_t n = 0; n < kBernoulliTerms; ++n) c[n] = static_cast<double>(a[n] / static_cast<long double>(n + 1));
        return c;
    }();
    return coeffs;
}

inline cplx li2_series(cplx z) {
    cplx sum{0.0, 0.0};
    cplx p = z;
    for (int n = 1; n < 200; ++n) {
        cplx term = p / double(n * n);
        sum += term;
        if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum)) * 0.1 || std::abs(term) < 1e-18) break;
        p *= z;
    }
    return sum;
}

inline cplx li2_bernoulli(cplx z) {
    const auto& c = li2_bernoulli_coeffs();
    cplx u = -std::log(cplx(1.0) - z);
    cplx sum{0.0, 0.0};
    cplx p = u;
    for (std::size_t n = 0; n < kBernoulliTerms; ++n) {
        sum += c[n] * p;
        p *= u;
    }
    return sum;
}

inline bool on_cut_right(cplx z, double lower) {
    return z.real() > lower && std::abs(z.imag()) <= 1e-13 * std::abs(z.real());
}

}  // namespace detail

/// Principal dilogarithm, holomorphic off [1, +inf).
inline cplx li2(cplx z) {
    if (z == cplx(1.0, 0.0)) return detail::kPiSq6;
    if (detail::on_cut_right(z, 1.0)) fail(ErrorKind::BranchCut, "li2 argument on (1, +inf)");
    const double r = std::abs(z);
    if (r <= 0.5) return detail::li2_series(z);
    if (r > 1.0) {
        cplx l = std::log(-z);
        return -li2(cplx(1.0) / z) - detail::kPiSq6 - 0.5 * l * l;
    }
    if (z.real() > 0.5) {
        return detail::kPiSq6 - std::log(z) * std::log(cplx(1.0) - z) - li2(cplx(1.0) - z);
    }
    return detail::li2_bernoulli(z);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline bool on_negative_axis(cplx w) {
    return w.real() <= 0.0 && std::abs(w.imag()) <= 1e-13 * std::max(1.0, std::abs(w.real()));
}

}  // namespace detail

/// Raw evaluation of an expression tree (no singular-set check).
inline cplx eval_expr(const ExprPtr& e, cplx z) {
    return std::visit(
        [&](const auto& x) -> cplx {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Const>) return x.value;
            else if constexpr (std::is_same_v<T, ast::Var>) return z;
            else if constexpr (std::is_same_v<T, ast::Add>) return eval_expr(x.lhs, z) + eval_expr(x.rhs, z);
            else if constexpr (std::is_same_v<T, ast::Sub>) return eval_expr(x.lhs, z) - eval_expr(x.rhs, z);
            else if constexpr (std::is_same_v<T, ast::Mul>) return eval_expr(x.lhs, z) * eval_expr(x.rhs, z);
            else if constexpr (std::is_same_v<T, ast::Div>) {
                cplx d = eval_expr(x.rhs, z);
                if (d == cplx(0.0)) fail(ErrorKind::SingularPoint, "division by zero");
                return eval_expr(x.lhs, z) / d;
            } else if constexpr (std::is_same_v<T, ast::Neg>) return -eval_expr(x.arg, z);
            else if constexpr (std::is_same_v<T, ast::PowInt>) {
                cplx b = eval_expr(x.base, z);
                if (b == cplx(0.0) && x.k < 0) fail(ErrorKind::SingularPoint, "negative power of zero");
                return detail::Parser::ipow(b, x.k);
            } else if constexpr (std::is_same_v<T, ast::Exp>) return std::exp(eval_expr(x.arg, z));
            else if constexpr (std::is_same_v<T, ast::LogP>) {
                cplx w = eval_expr(x.arg, z);
                if (detail::on_negative_axis(w)) fail(ErrorKind::BranchCut, "log argument on (-inf, 0]");
                return std::log(w);
            } else if constexpr (std::is_same_v<T, ast::Log1p>) {
                cplx w = eval_expr(x.arg, z);
                cplx u = cplx(1.0) + w;
                if (detail::on_negative_axis(u)) fail(ErrorKind::BranchCut, "log1p argument on (-inf, -1]");
                if (u == cplx(1.0)) return w;
                return std::log(u) * (w / (u - cplx(1.0)));
            } else if constexpr (std::is_same_v<T, ast::Li2>) return li2(eval_expr(x.arg, z));
            else {
                if (z == cplx(0.0)) {
                    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
                        if (x.n_min + long(i) < 0 && x.coeffs[i] != cplx(0.0))
                            fail(ErrorKind::SingularPoint, "laurent pole at 0");
                    long idx = -x.n_min;
                    return idx >= 0 && idx < long(x.coeffs.size()) ? x.coeffs[std::size_t(idx)] : cplx(0.0);
                }
                cplx acc{0.0, 0.0};
                for (auto it = x.coeffs.rbegin(); it != x.coeffs.rend(); ++it) acc = acc * z + *it;
                return acc * detail::Parser::ipow(z, x.n_min);
            }
        },
        e->node);
}

/// Singular set of a builtin: log1p, li2, log (principal), exp.
inline StarSet builtin_singular_set(std::string_view name) {
    if (name == "log1p") return StarSet({LogPolarBox(0.0, kInf, Arc::point(kPi))}, "(-inf,-1]");
    if (name == "li2") return StarSet({LogPolarBox(0.0, kInf, Arc::point(0.0))}, "[1,+inf)");
    if (name == "log") return StarSet({LogPolarBox(-kInf, kInf, Arc::point(kPi))}, "(-inf,0)");
    if (name == "exp") return StarSet({}, "empty");
    fail(ErrorKind::UnknownBuiltin, std::string(name));
}

/// Cut {z : a z + b in (-inf, 0]} of log(a z + b), when it is a union of radial boxes.
inline StarSet affine_log_cut(cplx a, cplx b) {
    if (a == cplx(0.0)) fail(ErrorKind::RejectedExpression, "log of a constant");
    if (std::abs(b.imag()) > 1e-15 * std::abs(b))
        fail(ErrorKind::UnrepresentableSet, "log cut is not a radial ray");
    const double angle_out = std::arg(-cplx(1.0) / a);
    const double br = b.real();
    if (br == 0.0) return StarSet({LogPolarBox(-kInf, kInf, Arc::point(angle_out))}, "log cut");
    const double rho = std::log(std::abs(br) / std::abs(a));
    if (br > 0.0) return StarSet({LogPolarBox(rho, kInf, Arc::point(angle_out))}, "log cut");
    return StarSet({LogPolarBox(-kInf, rho, Arc::point(std::arg(cplx(1.0) / a))),
                    LogPolarBox(-kInf, kInf, Arc::point(angle_out))},
                   "log cut");
}

// ---------------------------------------------------------------------------
// Function definitions
// ---------------------------------------------------------------------------

struct FunctionDef {
    ExprPtr expr;
    StarSet singular;
    bool vanishes_at_inf = false;
    double membership_tol = kDefaultMembershipTol;
};

/// Pointwise evaluation, refusing points of (or within tol of) the declared singular set.
inline cplx eval(const FunctionDef& f, cplx z) {
    if (z == cplx(0.0)) {
        if (f.singular.closure_has_zero()) fail(ErrorKind::SingularPoint, "0 lies in the closure of the singular set");
    } else if (set_contains(f.singular, z, f.membership_tol)) {
        fail(ErrorKind::SingularPoint, "point in declared singular set " + f.singular.label);
    }
    return eval_expr(f.expr, z);
}

namespace detail {

inline double data_rho_max(const StarSet& s) {
    double m = 0.0;
    for (const auto& b : s.boxes) {
        if (std::isfinite(b.rho_hi)) m = std::max(m, b.rho_hi);
        if (std::isfinite(b.rho_lo)) m = std::max(m, b.rho_lo);
    }
    return m;
}

}  // namespace detail

inline constexpr double kInfinityAgreement = 1e-8;

/// lim f(z) as z -> inf, from values at |z| = 1e4, 1e5, 1e6 (scaled past the set data),
/// Richardson-extrapolated and cross-checked along two directions.
inline cplx value_at_infinity(const FunctionDef& f) {
    if (f.singular.closure_has_inf()) fail(ErrorKind::InfinityInSingularSet, f.singular.label);
    const double scale = std::exp(detail::data_rho_max(f.singular));
    std::vector<cplx> estimates;
    for (double theta : {0.7, 0.7 + kPi}) {
        std::array<cplx, 3> v{};
        try {
            for (int k = 0; k < 3; ++k) v[k] = eval(f, std::polar(scale * std::pow(10.0, 4 + k), theta));
        } catch (const Error& e) {
            fail(ErrorKind::NoLimit, std::string("evaluation failed near infinity: ") + e.what());
        }
        for (const auto& x : v)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) fail(ErrorKind::NoLimit, "values diverge");
        estimates.push_back((10.0 * v[1] - v[0]) / 9.0);
        estimates.push_back((10.0 * v[2] - v[1]) / 9.0);
    }
    const cplx best = estimates.back();
    for (const auto& e : estimates)
        if (std::abs(e - best) >= kInfinityAgreement * std::max(1.0, std::abs(best)))
            fail(ErrorKind::NoLimit, "values near infinity do not settle");
    return 0.5 * (estimates[1] + estimates[3]);
}

struct FunctionCheckOptions {
    std::uint64_t seed = 20240601;
    int smoke_points = 64;
    double smoke_distance = 0.05;
};

/// Builds a FunctionDef, smoke-testing evaluation off the singular set and checking the
/// vanishes_at_inf flag whenever infinity is off the closure.
inline FunctionDef make_function(ExprPtr expr, StarSet singular, bool vanishes_at_inf,
                                 const FunctionCheckOptions& opts = {}) {
    FunctionDef f{std::move(expr), std::move(singular), vanishes_at_inf};
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> rho(-3.0, 3.0), theta(0.0, kTwoPi);
    for (int k = 0; k < opts.smoke_points; ++k) {
        cplx z = std::polar(std::exp(rho(rng)), theta(rng));
        if (set_distance(f.singular, z) <= opts.smoke_distance) continue;
        try {
            cplx v = eval(f, z);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(ErrorKind::InvalidFunctionDef, "non-finite value off the singular set");
        } catch (const Error& e) {
            fail(ErrorKind::InvalidFunctionDef, "evaluation fails off the declared singular set at " +
                                                    format_complex(z) + ": " + e.what());
        }
    }
    if (!f.singular.closure_has_inf()) {
        std::optional<cplx> limit;
        try {
            limit = value_at_infinity(f);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoLimit || vanishes_at_inf) throw;
        }
        if (limit) {
            bool zero = std::abs(*limit) < kInfinityAgreement;
            if (zero != vanishes_at_inf)
                fail(ErrorKind::InvalidFunctionDef, vanishes_at_inf ? "declared to vanish at infinity but f(inf) = " +
                                                                          format_complex(*limit)
                                                                    : "f vanishes at infinity but the flag is false");
        }
    }
    return f;
}

inline FunctionDef make_function(std::string_view text, StarSet singular, bool vanishes_at_inf,
                                 const FunctionCheckOptions& opts = {}) {
    return make_function(parse_expr(text), std::move(singular), vanishes_at_inf, opts);
}

// ---------------------------------------------------------------------------
// Power series
// ---------------------------------------------------------------------------

/// a_0..a_N by trapezoid rule on |z| = r, doubling the node count until stable to 1e-12.
inline std::vector<cplx> taylor_coeffs(const FunctionDef& f, double r, std::size_t n) {
    if (!(r > 0.0)) fail(ErrorKind::PreconditionViolated, "radius must be positive");
    StarSet circle({LogPolarBox(std::log(r), std::log(r), Arc::full())});
    if (set_distance(f.singular, circle) <= f.membership_tol)
        fail(ErrorKind::CircleMeetsSingularSet, "|z| = r meets " + f.singular.label);
    for (const auto& b : f.singular.boxes)
        if (b.rho_lo < std::log(r))
            fail(ErrorKind::PreconditionViolated, "the disk |z| <= r is not inside the domain of holomorphy");

    auto run = [&](std::size_t m) {
        std::vector<cplx> a(n + 1, cplx(0.0));
        for (std::size_t j = 0; j < m; ++j) {
            double t = kTwoPi * double(j) / double(m);
            cplx fz = eval(f, std::polar(r, t));
            for (std::size_t k = 0; k <= n; ++k) a[k] += fz * std::polar(std::pow(r, -double(k)), -double(k) * t);
        }
        for (auto& x : a) x /= double(m);
        return a;
    };
    std::size_t m = std::max<std::size_t>(8 * (n + 1), 64);
    std::vector<cplx> prev = run(m);
    for (int it = 0; it < 16; ++it) {
        m *= 2;
        std::vector<cplx> next = run(m);
        double diff = 0.0, scale = 1.0;
        for (std::size_t k = 0; k <= n; ++k) {
            diff = std::max(diff, std::abs(next[k] - prev[k]));
            scale = std::max(scale, std::abs(next[k]));
        }
        if (diff < 1e-12 * scale) return next;
        prev = std::move(next);
    }
    fail(ErrorKind::ToleranceNotMet, "trapezoid coefficients did not stabilize");
}

/// Termwise product of coefficient lists (shorter list padded with zeros).
inline std::vector<cplx> series_hadamard(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(std::max(a.size(), b.size()), cplx(0.0));
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) out[k] = a[k] * b[k];
    return out;
}

inline cplx eval_series(const std::vector<cplx>& a, cplx z) {
    cplx acc{0.0, 0.0};
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * z + *it;
    return acc;
}

}  // namespace hadamard_kit

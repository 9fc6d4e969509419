// Text form of ScalarField, used by config files and manifests.
//
//   field  := piece ('|' piece)*
//   piece  := region ':' expr
//   region := '[' num ',' num ']' ('x' '[' num ',' num ']')?
//   expr   := [num '*'] ( 'exp(' poly ')' | 'sqrt(' poly ')' | 'pow(' poly ',' num ')' | '(' poly ')' )
//           | poly
//   poly   := ['-'] mono (('+' | '-') mono)*      mono := factor ('*' factor)*
//   factor := num | 'x' ['^' int] | 'y' ['^' int]

#include "sdd/csv.hpp"
#include "sdd/error.hpp"
#include "sdd/model.hpp"

#include <cctype>
#include <cmath>

namespace sdd {

namespace {

struct Token {
    enum class Type { number, ident, symbol, end } type;
    std::string text;
    double value = 0.0;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < s.size()) {
                const char d = s[j];
                if (std::isdigit(static_cast<unsigned char>(d)) || d == '.') {
                    ++j;
                } else if ((d == 'e' || d == 'E') && j + 1 < s.size() &&
                           (std::isdigit(static_cast<unsigned char>(s[j + 1])) || s[j + 1] == '-' || s[j + 1] == '+')) {
                    j += 2;
                } else {
                    break;
                }
            }
            const std::string text = s.substr(i, j - i);
            out.push_back({Token::Type::number, text, parse_double(text)});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Type::ident, s.substr(i, j - i)});
            i = j;
        } else {
            out.push_back({Token::Type::symbol, std::string(1, c)});
            ++i;
        }
    }
    out.push_back({Token::Type::end, ""});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text), toks_(tokenize(text)) {}

    ScalarField field() {
        std::vector<Piece> pieces;
        int dim = 0;
        for (;;) {
            Region r = region();
            if (dim == 0) dim = r.dim;
            if (r.dim != dim) fail("pieces of mixed dimension");
            expect(":");
            pieces.push_back({r, expr()});
            if (peek_symbol("|")) {
                next();
                continue;
            }
            break;
        }
        if (peek().type != Token::Type::end) fail("trailing input");
        return ScalarField(dim, std::move(pieces));
    }

    Region region() {
        auto [a, b] = interval();
        if (peek().type == Token::Type::ident && peek().text == "x") {
            next();
            auto [c, d] = interval();
            return Region::rect(a, b, c, d);
        }
        return Region::interval(a, b);
    }

    Region region_only() {
        Region r = region();
        if (peek().type != Token::Type::end) fail("trailing input");
        return r;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool peek_symbol(const char* s, std::size_t k = 0) const {
        return peek(k).type == Token::Type::symbol && peek(k).text == s;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::parse_error, why + " in field '" + text_ + "'");
    }
    void expect(const char* s) {
        if (!peek_symbol(s)) fail(std::string("expected '") + s + "'");
        next();
    }
    double signed_number() {
        double sign = 1.0;
        if (peek_symbol("-")) {
            next();
            sign = -1.0;
        } else if (peek_symbol("+")) {
            next();
        }
        if (peek().type != Token::Type::number) fail("expected a number");
        return sign * next().value;
    }
    std::pair<double, double> interval() {
        expect("[");
        const double a = signed_number();
        expect(",");
        const double b = signed_number();
        expect("]");
        return {a, b};
    }

    static bool is_function(const Token& t) {
        return t.type == Token::Type::ident && (t.text == "exp" || t.text == "sqrt" || t.text == "pow");
    }

    Expression expr() {
        // Optional "[-]num *" scale in front of a function call or parenthesized polynomial.
        std::size_t k = 0;
        if (peek_symbol("-")) k = 1;
        if (peek(k).type == Token::Type::number && peek_symbol("*", k + 1) &&
            (is_function(peek(k + 2)) || peek_symbol("(", k + 2))) {
            const double scale = signed_number();
            expect("*");
            return call(scale);
        }
        if (is_function(peek()) || peek_symbol("(")) return call(1.0);
        return Expression::polynomial(poly());
    }

    Expression call(double scale) {
        if (peek_symbol("(")) {
            next();
            Polynomial p = poly();
            expect(")");
            return Expression::power(scale, std::move(p), 1.0);
        }
        const std::string name = next().text;
        expect("(");
        Polynomial p = poly();
        Expression e;
        if (name == "exp") {
            if (p.degree() > 2) fail("exp() takes a polynomial of degree <= 2");
            e = Expression::exp_quadratic(scale, std::move(p));
        } else if (name == "sqrt") {
            e = Expression::power(scale, std::move(p), 0.5);
        } else {
            expect(",");
            e = Expression::power(scale, std::move(p), signed_number());
        }
        expect(")");
        return e;
    }

    Polynomial poly() {
        std::vector<Monomial> terms;
        double sign = 1.0;
        if (peek_symbol("-")) {
            next();
            sign = -1.0;
        } else if (peek_symbol("+")) {
            next();
        }
        for (;;) {
            Monomial m = mono();
            m.coef *= sign;
            terms.push_back(m);
            if (peek_symbol("+")) {
                sign = 1.0;
            } else if (peek_symbol("-")) {
                sign = -1.0;
            } else {
                break;
            }
            next();
        }
        return Polynomial(std::move(terms));
    }

    Monomial mono() {
        Monomial m{1.0, 0, 0};
        for (;;) {
            const Token& t = next();
            if (t.type == Token::Type::number) {
                m.coef *= t.value;
            } else if (t.type == Token::Type::ident && (t.text == "x" || t.text == "y")) {
                int power = 1;
                if (peek_symbol("^")) {
                    next();
                    if (peek().type != Token::Type::number) fail("expected an integer exponent");
                    const double e = next().value;
                    if (e != std::floor(e) || e < 0) fail("exponents must be nonnegative integers");
                    power = static_cast<int>(e);
                }
                (t.text == "x" ? m.px : m.py) += power;
            } else {
                fail("unexpected '" + t.text + "'");
            }
            if (!peek_symbol("*")) break;
            next();
        }
        return m;
    }

    std::string text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string format_poly(const Polynomial& p) {
    if (p.terms().empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : p.terms()) {
        double c = t.coef;
        if (first) {
            if (c < 0) {
                s += "-";
                c = -c;
            }
        } else {
            s += c < 0 ? " - " : " + ";
            c = std::abs(c);
        }
        first = false;
        s += format_double(c);
        if (t.px > 0) s += t.px == 1 ? "*x" : "*x^" + std::to_string(t.px);
        if (t.py > 0) s += t.py == 1 ? "*y" : "*y^" + std::to_string(t.py);
    }
    return s;
}

std::string format_expr(const Expression& e) {
    const std::string scale = format_double(e.scale());
    if (e.kind() == Expression::Kind::exp) return scale + "*exp(" + format_poly(e.poly()) + ")";
    if (e.is_constant()) return format_double(e(Vec2{}));
    if (e.exponent() == 1.0) return scale + "*(" + format_poly(e.poly()) + ")";
    return scale + "*pow(" + format_poly(e.poly()) + ", " + format_double(e.exponent()) + ")";
}

} // namespace

std::string format_region(const Region& r) {
    std::string s = "[" + format_double(r.lo[0]) + ", " + format_double(r.hi[0]) + "]";
    if (r.dim == 2) s += "x[" + format_double(r.lo[1]) + ", " + format_double(r.hi[1]) + "]";
    return s;
}

Region parse_region(const std::string& text) {
    return Parser(text).region_only();
}

ScalarField ScalarField::parse(const std::string& text) {
    return Parser(text).field();
}

std::string ScalarField::to_string() const {
    std::string s;
    for (const auto& p : pieces_) {
        if (!s.empty()) s += " | ";
        s += format_region(p.region) + ": " + format_expr(p.expr);
    }
    return s;
}

} // namespace sdd

#include "ultralab/euclidean.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace ultralab {

namespace {

std::string format_coeff(double c) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    return buf;
}

} // namespace

EuclideanScalar::EuclideanScalar(double real_value, int trunc) : trunc_(trunc) {
    if (real_value != 0.0) terms_.push_back({Rational(0), real_value});
}

EuclideanScalar EuclideanScalar::monomial(double coeff, const Rational& exponent, int trunc) {
    EuclideanScalar s;
    s.trunc_ = trunc;
    if (coeff != 0.0) s.terms_.push_back({exponent, coeff});
    return s;
}

EuclideanScalar EuclideanScalar::alpha(int trunc) { return monomial(1.0, Rational(1), trunc); }

EuclideanScalar EuclideanScalar::from_terms(std::vector<Term> terms, int trunc) {
    EuclideanScalar s;
    s.trunc_ = trunc;
    s.terms_ = std::move(terms);
    s.normalize();
    return s;
}

void EuclideanScalar::normalize() {
    // ties broken by coefficient so merge order (and hence rounding) does not
    // depend on how the term list was enumerated
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
        if (a.exponent != b.exponent) return a.exponent > b.exponent;
        return a.coeff < b.coeff;
    });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const Term& t : terms_) {
        if (!merged.empty() && merged.back().exponent == t.exponent)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    terms_.clear();
    for (const Term& t : merged) {
        if (t.coeff != 0.0 && static_cast<int>(terms_.size()) < trunc_) terms_.push_back(t);
    }
}

std::optional<Term> EuclideanScalar::leading() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.front();
}

double EuclideanScalar::coeff_at(const Rational& e) const {
    for (const Term& t : terms_)
        if (t.exponent == e) return t.coeff;
    return 0.0;
}

EuclideanScalar EuclideanScalar::operator-() const {
    EuclideanScalar r = *this;
    for (Term& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

EuclideanScalar add(const EuclideanScalar& x, const EuclideanScalar& y) {
    std::vector<Term> ts = x.terms_;
    ts.insert(ts.end(), y.terms_.begin(), y.terms_.end());
    return EuclideanScalar::from_terms(std::move(ts), std::max(x.trunc_, y.trunc_));
}

EuclideanScalar sub(const EuclideanScalar& x, const EuclideanScalar& y) { return add(x, -y); }

EuclideanScalar mul(const EuclideanScalar& x, const EuclideanScalar& y) {
    std::vector<Term> ts;
    ts.reserve(x.terms_.size() * y.terms_.size());
    for (const Term& a : x.terms_)
        for (const Term& b : y.terms_)
            ts.push_back({a.exponent + b.exponent, a.coeff * b.coeff});
    return EuclideanScalar::from_terms(std::move(ts), std::max(x.trunc_, y.trunc_));
}

EuclideanScalar invert(const EuclideanScalar& x) {
    if (x.is_zero()) throw std::domain_error("invert: zero scalar has no inverse");
    const Term lead = x.terms_.front();
    const int K = x.trunc_;

    // Tail relative to the leading term lives on the lattice -g*{1,2,...}.
    Rational g(0);
    for (std::size_t i = 1; i < x.terms_.size(); ++i)
        g = rational_gcd(g, lead.exponent - x.terms_[i].exponent);

    if (g.is_zero()) {  // monomial
        return EuclideanScalar::monomial(1.0 / lead.coeff, -lead.exponent, K);
    }

    // x = c0 a^e0 (1 + r), r = sum b_j a^(-j g).  Invert the unit factor by the
    // convolution recurrence u_0 = 1, u_j = -sum_{i>=1} b_i u_{j-i}, j < K.
    std::vector<double> b(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 1; i < x.terms_.size(); ++i) {
        const Rational depth = (lead.exponent - x.terms_[i].exponent) / g;
        if (!depth.is_integer() || depth.num() <= 0) continue;  // cannot happen for a gcd lattice
        if (depth.num() < K) b[static_cast<std::size_t>(depth.num())] = x.terms_[i].coeff / lead.coeff;
    }
    std::vector<double> u(static_cast<std::size_t>(K), 0.0);
    u[0] = 1.0;
    for (int j = 1; j < K; ++j) {
        double s = 0.0;
        for (int i = 1; i <= j; ++i) s += b[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j - i)];
        u[static_cast<std::size_t>(j)] = -s;
    }

    std::vector<Term> ts;
    for (int j = 0; j < K; ++j) {
        if (u[static_cast<std::size_t>(j)] == 0.0) continue;
        ts.push_back({-lead.exponent - g * Rational(j), u[static_cast<std::size_t>(j)] / lead.coeff});
    }
    return EuclideanScalar::from_terms(std::move(ts), K);
}

std::partial_ordering compare(const EuclideanScalar& x, const EuclideanScalar& y) {
    const EuclideanScalar d = sub(x, y);
    if (d.is_zero()) return std::partial_ordering::equivalent;
    return d.terms_.front().coeff > 0.0 ? std::partial_ordering::greater
                                        : std::partial_ordering::less;
}

double EuclideanScalar::standard_part() const {
    if (terms_.empty()) return 0.0;
    const Term& lead = terms_.front();
    if (lead.exponent > Rational(0))
        return lead.coeff > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
    return coeff_at(Rational(0));
}

OrderClass EuclideanScalar::classify() const {
    if (terms_.empty()) return {OrderTag::infinitesimal, std::nullopt};
    const Rational e = terms_.front().exponent;
    OrderTag tag = e < Rational(0) ? OrderTag::infinitesimal
                 : e > Rational(0) ? OrderTag::infinite
                                   : OrderTag::finite_nonzero_st;
    return {tag, e};
}

bool EuclideanScalar::is_finite() const {
    return terms_.empty() || !(terms_.front().exponent > Rational(0));
}

Relation relate(const EuclideanScalar& x, const EuclideanScalar& y) {
    switch (sub(x, y).classify().tag) {
        case OrderTag::infinitesimal: return Relation::infinitely_close;
        case OrderTag::finite_nonzero_st: return Relation::finitely_separated;
        case OrderTag::infinite: break;
    }
    return Relation::infinitely_separated;
}

std::string EuclideanScalar::render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : terms_) {
        double c = t.coeff;
        if (first) {
            if (c < 0 || std::signbit(c)) { out += "-"; c = -c; }
        } else {
            out += (c < 0 || std::signbit(c)) ? " - " : " + ";
            c = std::abs(c);
        }
        out += format_coeff(c);
        if (!t.exponent.is_zero()) {
            out += "*a";
            if (!(t.exponent == Rational(1))) out += "^" + t.exponent.str();
        }
        first = false;
    }
    return out;
}

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;
    int trunc;

    explicit Parser(const std::string& text, int k) : s(text), trunc(k) {}

    void skip() { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; }

    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("scalar parse error at position " + std::to_string(i) + ": " + what);
    }

    double number() {
        skip();
        std::size_t end = 0;
        double v;
        try {
            v = std::stod(s.substr(i), &end);
        } catch (const std::exception&) {
            fail("expected number");
        }
        if (end == 0) fail("expected number");
        i += end;
        return v;
    }

    Rational rational_literal() {
        skip();
        bool neg = eat('-');
        skip();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start) fail("expected exponent");
        std::int64_t p = std::stoll(s.substr(start, i - start));
        std::int64_t q = 1;
        if (i < s.size() && s[i] == '/') {
            ++i;
            start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i == start) fail("expected exponent denominator");
            q = std::stoll(s.substr(start, i - start));
        }
        return Rational(neg ? -p : p, q);
    }

    std::string ident() {
        skip();
        std::size_t start = i;
        while (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
        return s.substr(start, i - start);
    }

    EuclideanScalar expr() {
        EuclideanScalar v = term();
        for (;;) {
            skip();
            if (eat('+')) v = add(v, term());
            else if (eat('-')) v = sub(v, term());
            else return v;
        }
    }

    EuclideanScalar term() {
        EuclideanScalar v = factor();
        for (;;) {
            skip();
            if (eat('*')) v = mul(v, factor());
            else if (eat('/')) v = mul(v, invert(factor()));
            else return v;
        }
    }

    EuclideanScalar factor() {
        skip();
        if (eat('-')) return -factor();
        return power();
    }

    EuclideanScalar power() {
        EuclideanScalar base = atom();
        skip();
        if (!eat('^')) return base;
        skip();
        bool paren = eat('(');
        Rational e = rational_literal();
        if (paren && !eat(')')) fail("expected ')'");
        // a^q is a monomial; a general base takes integer powers only.
        if (base.size() == 1 && base.terms().front().coeff == 1.0) {
            return EuclideanScalar::monomial(1.0, base.terms().front().exponent * e, trunc);
        }
        if (!e.is_integer()) fail("fractional power of a non-monomial scalar");
        std::int64_t n = e.num();
        const bool inv_result = n < 0;
        if (inv_result) n = -n;
        EuclideanScalar r(1.0, trunc);
        for (std::int64_t k = 0; k < n; ++k) r = mul(r, base);
        return inv_result ? invert(r) : r;
    }

    EuclideanScalar atom() {
        skip();
        if (i >= s.size()) fail("unexpected end of input");
        if (eat('(')) {
            EuclideanScalar v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return EuclideanScalar(number(), trunc);
        }
        std::string name = ident();
        if (name.empty()) fail(std::string("unexpected character '") + c + "'");
        if (name == "a") return EuclideanScalar::alpha(trunc);
        if (!eat('(')) fail("expected '(' after function " + name);
        EuclideanScalar arg = expr();
        if (!eat(')')) fail("expected ')'");
        if (name == "st") {
            const double st = arg.standard_part();
            if (std::isinf(st)) fail("st of an infinite scalar is not a scalar");
            return EuclideanScalar(st, trunc);
        }
        if (name == "inv") return invert(arg);
        fail("unknown function " + name);
    }
};

} // namespace

EuclideanScalar EuclideanScalar::parse(const std::string& text, int trunc) {
    Parser p(text, trunc);
    EuclideanScalar v = p.expr();
    p.skip();
    if (p.i != text.size()) p.fail("trailing input");
    return v;
}

EuclideanScalar eval_scalar_expression(const std::string& text, int trunc) {
    return EuclideanScalar::parse(text, trunc);
}

} // namespace ultralab

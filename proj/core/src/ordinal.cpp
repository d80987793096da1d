#include "ordcalc/ordinal.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ordcalc {

Ordinal::Ordinal(unsigned long long n) {
    if (n != 0) terms_.push_back({Ordinal(), BigNat(n)});
}

Ordinal::Ordinal(const BigNat& n) {
    if (n < 0) throw OrdinalError("negative natural");
    if (n != 0) terms_.push_back({Ordinal(), n});
}

Ordinal Ordinal::top() {
    Ordinal o;
    o.top_ = true;
    return o;
}

Ordinal Ordinal::omega() {
    Ordinal o;
    o.terms_.push_back({Ordinal(1), BigNat(1)});
    return o;
}

Ordinal Ordinal::omega_pow(const Ordinal& e) {
    if (e.is_top()) return top();  // omega^W = W
    if (e.is_zero()) return Ordinal(1);
    Ordinal o;
    o.terms_.push_back({e, BigNat(1)});
    return o;
}

bool Ordinal::is_finite() const {
    if (top_) return false;
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

BigNat Ordinal::finite_value() const {
    if (!is_finite()) throw OrdinalError("not a finite ordinal: " + str());
    return terms_.empty() ? BigNat(0) : terms_[0].coeff;
}

bool Ordinal::is_limit() const {
    if (top_ || terms_.empty()) return true;  // 0 counts as a limit
    return !terms_.back().exponent.is_zero();
}

bool Ordinal::is_successor() const {
    return !top_ && !terms_.empty() && terms_.back().exponent.is_zero();
}

Ordinal Ordinal::predecessor() const {
    if (!is_successor()) throw OrdinalError("no predecessor: " + str());
    Ordinal r = *this;
    if (--r.terms_.back().coeff == 0) r.terms_.pop_back();
    return r;
}

const Ordinal& Ordinal::leading_exponent() const {
    if (top_ || terms_.empty()) throw OrdinalError("no leading exponent: " + str());
    return terms_[0].exponent;
}

std::strong_ordering Ordinal::operator<=>(const Ordinal& other) const {
    if (top_ || other.top_) {
        if (top_ && other.top_) return std::strong_ordering::equal;
        return top_ ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    const size_t n = std::min(terms_.size(), other.terms_.size());
    for (size_t i = 0; i < n; ++i) {
        auto c = terms_[i].exponent <=> other.terms_[i].exponent;
        if (c != 0) return c;
        if (terms_[i].coeff != other.terms_[i].coeff)
            return terms_[i].coeff < other.terms_[i].coeff ? std::strong_ordering::less
                                                          : std::strong_ordering::greater;
    }
    if (terms_.size() == other.terms_.size()) return std::strong_ordering::equal;
    return terms_.size() < other.terms_.size() ? std::strong_ordering::less
                                               : std::strong_ordering::greater;
}

bool Ordinal::operator==(const Ordinal& other) const { return (*this <=> other) == 0; }

Ordinal operator+(const Ordinal& a, const Ordinal& b) {
    if (b.is_top()) return Ordinal::top();  // x + W = W
    if (a.is_top()) {
        if (b.is_zero()) return a;
        throw OrdinalError("W + x is not representable for x > 0");
    }
    if (b.is_zero()) return a;
    Ordinal r;
    const Ordinal& e = b.terms_[0].exponent;
    size_t i = 0;
    while (i < a.terms_.size() && a.terms_[i].exponent > e) r.terms_.push_back(a.terms_[i++]);
    if (i < a.terms_.size() && a.terms_[i].exponent == e) {
        r.terms_.push_back({e, a.terms_[i].coeff + b.terms_[0].coeff});
    } else {
        r.terms_.push_back(b.terms_[0]);
    }
    r.terms_.insert(r.terms_.end(), b.terms_.begin() + 1, b.terms_.end());
    return r;
}

Ordinal operator*(const Ordinal& a, const Ordinal& b) {
    if (a.is_zero() || b.is_zero()) return Ordinal();
    if (a.is_top()) {
        if (b == Ordinal(1)) return a;
        throw OrdinalError("W * x is not representable for x > 1");
    }
    if (b.is_top()) return Ordinal::top();  // x * W = W for 0 < x < W
    Ordinal r;
    for (const auto& t : b.terms_) {
        if (!t.exponent.is_zero()) {
            r.terms_.push_back({a.terms_[0].exponent + t.exponent, t.coeff});
        } else {
            // multiplication by a finite part scales the leading coefficient
            r.terms_.push_back({a.terms_[0].exponent, a.terms_[0].coeff * t.coeff});
            r.terms_.insert(r.terms_.end(), a.terms_.begin() + 1, a.terms_.end());
        }
    }
    return r;
}

Ordinal left_sub(const Ordinal& a, const Ordinal& b) {
    if (a > b) throw OrdinalError("left_sub requires a <= b: " + a.str() + " > " + b.str());
    if (b.is_top()) return a.is_top() ? Ordinal() : Ordinal::top();
    size_t i = 0;
    while (i < a.terms_.size() && i < b.terms_.size() && a.terms_[i].exponent == b.terms_[i].exponent &&
           a.terms_[i].coeff == b.terms_[i].coeff)
        ++i;
    Ordinal r;
    if (i < b.terms_.size()) {
        if (i < a.terms_.size() && a.terms_[i].exponent == b.terms_[i].exponent) {
            BigNat d = b.terms_[i].coeff - a.terms_[i].coeff;
            if (d > 0) r.terms_.push_back({b.terms_[i].exponent, d});
            // d == 0 handled by the prefix loop; d < 0 contradicts a <= b
        } else {
            r.terms_.push_back(b.terms_[i]);
        }
        r.terms_.insert(r.terms_.end(), b.terms_.begin() + i + 1, b.terms_.end());
    }
    return r;
}

OrdinalClass classify(const Ordinal& a) {
    if (a.is_zero()) return {OrdinalKind::Zero, std::nullopt, true};
    if (a.is_successor()) return {OrdinalKind::Successor, a.predecessor(), false};
    return {OrdinalKind::Limit, std::nullopt, true};
}

namespace {

// n-th approximant of omega^e from below, e > 0.
Ordinal power_approx(const Ordinal& e, unsigned n) {
    if (e.is_successor())
        return Ordinal::omega_pow(e.predecessor()) * Ordinal(n);
    return Ordinal::omega_pow(fundamental_sequence(e, n));
}

}  // namespace

Ordinal fundamental_sequence(const Ordinal& limit, unsigned n) {
    if (limit.is_top() || limit.is_zero() || !limit.is_limit())
        throw OrdinalError("fundamental sequence requires a limit in (0, W): " + limit.str());
    const auto& terms = limit.terms();
    const auto& last = terms.back();
    Ordinal prefix;
    for (size_t i = 0; i + 1 < terms.size(); ++i)
        prefix = prefix + Ordinal::omega_pow(terms[i].exponent) * Ordinal(terms[i].coeff);
    if (last.coeff > 1)
        prefix = prefix + Ordinal::omega_pow(last.exponent) * Ordinal(last.coeff - 1);
    return prefix + power_approx(last.exponent, n);
}

// ---------------------------------------------------------------------------
// notation

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw OrdinalError("ordinal syntax error at position " + std::to_string(pos) + ": " + msg);
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    BigNat nat() {
        skip_ws();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected number");
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        return BigNat(s.substr(start, pos - start));
    }

    // A parsed summand: either W, or a single CNF term omega^e * c.
    struct Summand {
        bool is_top = false;
        Ordinal exponent;
        BigNat coeff;
    };

    Summand term() {
        Summand t;
        char c = peek();
        if (c == 'W') {
            ++pos;
            t.is_top = true;
            return t;
        }
        if (c == 'w') {
            ++pos;
            if (eat('^')) {
                if (!eat('(')) fail("expected '(' after '^'");
                t.exponent = expr();
                if (!eat(')')) fail("expected ')'");
                if (t.exponent.is_top()) fail("W is not a valid exponent");
            } else {
                t.exponent = Ordinal(1);
            }
            t.coeff = 1;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            t.exponent = Ordinal();
            t.coeff = nat();
            if (eat('*')) fail("a plain number takes no coefficient");
            return t;
        } else {
            fail("expected 'w', 'W' or a number");
        }
        if (eat('*')) t.coeff = nat();
        if (t.coeff == 0) fail("zero coefficient");
        return t;
    }

    Ordinal expr() {
        std::vector<Summand> parts;
        parts.push_back(term());
        while (eat('+')) parts.push_back(term());
        if (parts[0].is_top) {
            if (parts.size() > 1) fail("no ordinal lies above W");
            return Ordinal::top();
        }
        Ordinal r;
        for (size_t i = 0; i < parts.size(); ++i) {
            const auto& p = parts[i];
            if (p.is_top) fail("W may only appear alone");
            if (p.coeff == 0) {
                if (parts.size() > 1) fail("'0' may only appear alone");
                return Ordinal();
            }
            if (i > 0 && !(p.exponent < parts[i - 1].exponent)) fail("exponents must strictly decrease");
            r = r + Ordinal::omega_pow(p.exponent) * Ordinal(p.coeff);
        }
        return r;
    }
};

}  // namespace

Ordinal parse_ordinal(const std::string& text) {
    Parser p(text);
    Ordinal r = p.expr();
    p.skip_ws();
    if (p.pos != p.s.size()) p.fail("trailing input");
    return r;
}

std::string Ordinal::str() const {
    if (top_) return "W";
    if (terms_.empty()) return "0";
    std::ostringstream out;
    for (size_t i = 0; i < terms_.size(); ++i) {
        if (i) out << " + ";
        const auto& t = terms_[i];
        if (t.exponent.is_zero()) {
            out << t.coeff;
            continue;
        }
        if (t.exponent == Ordinal(1))
            out << "w";
        else
            out << "w^(" << t.exponent.str() << ")";
        if (t.coeff != 1) out << "*" << t.coeff;
    }
    return out.str();
}

std::string format_ordinal(const Ordinal& a) { return a.str(); }

// ---------------------------------------------------------------------------
// monotone search

namespace {

// Exponent bound: an exponent e with pred true at omega^e, derived from a
// value bound at which pred already holds.
Ordinal exponent_bound(const Ordinal& value_bound) {
    if (value_bound.is_top() || value_bound.is_zero()) return Ordinal::top();
    return value_bound.leading_exponent() + Ordinal(1);
}

Ordinal least_sat_impl(const std::function<bool(const Ordinal&)>& pred, const Ordinal& bound) {
    // pred upward-closed, pred(bound) true. Build the least satisfier digit
    // by digit; pi is always the largest known non-satisfier.
    if (pred(Ordinal())) return Ordinal();
    Ordinal pi;
    for (;;) {
        if (pred(pi + Ordinal(1))) return pi + Ordinal(1);
        // least exponent x with pred(pi + omega^x); x >= 1 since pi + 1 fails
        auto pred_e = [&](const Ordinal& x) { return pred(pi + Ordinal::omega_pow(x)); };
        Ordinal ebound = exponent_bound(bound);
        if (ebound.is_top())
            throw OrdinalError("monotone search needs a CNF bound");
        Ordinal e0 = least_sat_impl(pred_e, ebound);
        if (e0.is_limit()) return pi + Ordinal::omega_pow(e0);
        Ordinal e = e0.predecessor();
        Ordinal step = Ordinal::omega_pow(e);
        // Largest coefficient c with !pred(pi + omega^e * c): doubling then
        // bisect. When every finite coefficient fails, the satisfying set
        // starts exactly at the limit pi + omega^(e+1) (which is known to
        // satisfy pred); a threshold coefficient beyond 2^64 is treated as
        // "never" — see the tameness note on least_satisfying.
        BigNat lo = 1, hicoeff = 2;
        bool unbounded = true;
        for (int d = 0; d < 64; ++d) {
            if (pred(pi + step * Ordinal(hicoeff))) {
                unbounded = false;
                break;
            }
            lo = hicoeff;
            hicoeff *= 2;
        }
        if (unbounded) return pi + Ordinal::omega_pow(e0);
        while (lo + 1 < hicoeff) {
            BigNat mid = (lo + hicoeff) / 2;
            if (pred(pi + step * Ordinal(mid)))
                hicoeff = mid;
            else
                lo = mid;
        }
        pi = pi + step * Ordinal(lo);
    }
}

}  // namespace

std::optional<Ordinal> least_satisfying(const std::function<bool(const Ordinal&)>& pred,
                                        const Ordinal& hi) {
    if (!pred(hi)) return std::nullopt;
    if (hi.is_top()) {
        // Search below W first; the satisfying set may start at W itself.
        // Probe a tower of countable bounds; if none satisfies, answer W.
        for (const Ordinal& b :
             {Ordinal(1), Ordinal::omega(), Ordinal::omega_pow(Ordinal::omega()),
              Ordinal::omega_pow(Ordinal::omega_pow(Ordinal::omega()))}) {
            if (pred(b)) return least_sat_impl(pred, b);
        }
        return Ordinal::top();
    }
    return least_sat_impl(pred, hi);
}

std::optional<Ordinal> greatest_satisfying(const std::function<bool(const Ordinal&)>& pred,
                                           const Ordinal& hi) {
    if (pred(hi)) return hi;
    auto not_pred = [&](const Ordinal& x) { return !pred(x); };
    Ordinal least_bad = *least_satisfying(not_pred, hi);
    if (least_bad.is_zero()) return std::nullopt;
    if (least_bad.is_successor()) return least_bad.predecessor();
    return least_bad;  // supremum of the satisfying segment; caller re-checks
}

// ---------------------------------------------------------------------------
// shape-stabilized suprema

std::optional<Ordinal> stabilized_sup(const std::vector<Ordinal>& probes) {
    if (probes.size() < 3) return std::nullopt;
    for (const auto& p : probes)
        if (p.is_top()) return std::nullopt;
    for (size_t i = 1; i < probes.size(); ++i)
        if (!(probes[i - 1] < probes[i])) return std::nullopt;

    // Strip the maximal common CNF prefix.
    size_t prefix_len = 0;
    for (;; ++prefix_len) {
        bool common = true;
        for (const auto& p : probes) {
            if (prefix_len >= p.terms().size() ||
                !(p.terms()[prefix_len].exponent == probes[0].terms()[prefix_len].exponent) ||
                p.terms()[prefix_len].coeff != probes[0].terms()[prefix_len].coeff) {
                common = false;
                break;
            }
        }
        if (!common) break;
    }
    Ordinal prefix;
    for (size_t i = 0; i < prefix_len; ++i)
        prefix = prefix + Ordinal::omega_pow(probes[0].terms()[i].exponent) *
                              Ordinal(probes[0].terms()[i].coeff);

    std::vector<Ordinal> rest;
    rest.reserve(probes.size());
    for (const auto& p : probes) {
        Ordinal r;
        for (size_t i = prefix_len; i < p.terms().size(); ++i)
            r = r + Ordinal::omega_pow(p.terms()[i].exponent) * Ordinal(p.terms()[i].coeff);
        rest.push_back(r);
    }
    for (const auto& r : rest)
        if (r.is_zero()) return std::nullopt;  // would contradict strict increase

    // Compare the leading terms of the remainders.
    const Ordinal& e0 = rest[0].leading_exponent();
    bool same_exp = true, inc_exp = true;
    for (size_t i = 0; i < rest.size(); ++i) {
        if (!(rest[i].leading_exponent() == e0)) same_exp = false;
        if (i > 0 && !(rest[i - 1].leading_exponent() < rest[i].leading_exponent())) inc_exp = false;
    }
    if (same_exp) {
        for (size_t i = 1; i < rest.size(); ++i)
            if (!(rest[i - 1].terms()[0].coeff < rest[i].terms()[0].coeff)) return std::nullopt;
        return prefix + Ordinal::omega_pow(e0 + Ordinal(1));
    }
    if (inc_exp) {
        std::vector<Ordinal> exps;
        for (const auto& r : rest) exps.push_back(r.leading_exponent());
        auto esup = stabilized_sup(exps);
        if (!esup) return std::nullopt;
        return prefix + Ordinal::omega_pow(*esup);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// rationals

std::string format_rational(const Rational& q) {
    std::ostringstream out;
    out << q;
    return out.str();
}

Rational parse_rational(const std::string& text) {
    std::string t = text;
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }),
            t.end());
    if (t.empty()) throw OrdinalError("empty rational");
    try {
        return Rational(t);
    } catch (const std::exception&) {
        throw OrdinalError("bad rational: " + text);
    }
}

}  // namespace ordcalc

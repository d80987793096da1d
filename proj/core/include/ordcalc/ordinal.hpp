#ifndef ORDCALC_ORDINAL_HPP
#define ORDCALC_ORDINAL_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ordcalc {

using BigNat = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct OrdinalError : std::runtime_error {
    explicit OrdinalError(const std::string& what) : std::runtime_error(what) {}
};

/// An ordinal below epsilon_0 in Cantor normal form, extended by the top
/// element W (the first uncountable ordinal). CNF terms are stored with
/// strictly decreasing exponents and positive coefficients; the empty term
/// list is 0. W is a distinct flag, never a CNF exponent.
struct OrdTerm;

class Ordinal {
public:
    using Term = OrdTerm;

    Ordinal() = default;                       // zero
    Ordinal(unsigned long long n);             // finite ordinal
    explicit Ordinal(const BigNat& n);

    static Ordinal top();                      // W, i.e. omega_1
    static Ordinal omega();
    static Ordinal omega_pow(const Ordinal& e);

    bool is_top() const { return top_; }
    bool is_zero() const { return !top_ && terms_.empty(); }
    bool is_finite() const;
    /// Finite value; throws if not finite.
    BigNat finite_value() const;

    /// True if the ordinal has no immediate predecessor. By the convention
    /// used throughout, 0 counts as a limit; so does W.
    bool is_limit() const;
    bool is_successor() const;
    /// Predecessor of a successor ordinal; throws otherwise.
    Ordinal predecessor() const;

    const std::vector<Term>& terms() const { return terms_; }
    /// Leading exponent; throws on 0 and W.
    const Ordinal& leading_exponent() const;

    std::strong_ordering operator<=>(const Ordinal& other) const;
    bool operator==(const Ordinal& other) const;

    friend Ordinal operator+(const Ordinal& a, const Ordinal& b);
    friend Ordinal operator*(const Ordinal& a, const Ordinal& b);

    std::string str() const;

private:
    bool top_ = false;
    std::vector<Term> terms_;

    friend Ordinal left_sub(const Ordinal& a, const Ordinal& b);
};

struct OrdTerm {
    Ordinal exponent;
    BigNat coeff;
};

/// The unique d with a + d = b; requires a <= b.
Ordinal left_sub(const Ordinal& a, const Ordinal& b);

enum class OrdinalKind { Zero, Successor, Limit };

struct OrdinalClass {
    OrdinalKind kind;
    std::optional<Ordinal> predecessor;  // present iff Successor
    /// Per the convention that 0 is a limit ordinal, this is true for
    /// Zero and Limit alike; the Zero kind keeps the distinction visible.
    bool limit_by_convention;
};

OrdinalClass classify(const Ordinal& a);

/// n-th member of the canonical (Wainer-style) fundamental sequence of a
/// limit ordinal: strictly increasing in n with supremum the given limit.
/// Rejects 0, W and successors.
Ordinal fundamental_sequence(const Ordinal& limit, unsigned n);

Ordinal parse_ordinal(const std::string& text);
std::string format_ordinal(const Ordinal& a);

inline std::string to_string(const Ordinal& a) { return a.str(); }

/// Least tau <= hi satisfying an upward-closed predicate, found by digitwise
/// search on the CNF of tau. Returns nullopt when even hi fails. The
/// predicate must be monotone: pred(x) and x <= y imply pred(y).
/// Tameness assumption: a satisfying set whose boundary has a CNF coefficient
/// above 2^64 is indistinguishable, by probing, from one starting at the next
/// omega-power limit; coefficient search stops there. All predicates arising
/// in this codebase come from CNF expressions whose coefficients stay far
/// below that.
std::optional<Ordinal> least_satisfying(const std::function<bool(const Ordinal&)>& pred,
                                        const Ordinal& hi);

/// Supremum of the satisfying initial segment {tau <= hi : pred(tau)} of a
/// downward-closed predicate; nullopt when pred(0) fails. The result itself
/// satisfies pred unless the segment is [0, lambda) for a limit lambda, in
/// which case lambda is returned; callers that need a member re-check.
std::optional<Ordinal> greatest_satisfying(const std::function<bool(const Ordinal&)>& pred,
                                           const Ordinal& hi);

/// Estimate the supremum of a strictly increasing sequence of ordinals from
/// finitely many probes by CNF shape stabilization. Returns nullopt when no
/// stable pattern is recognized; never guesses beyond the recognized forms
/// (coefficient growth in a fixed position, or exponent growth).
std::optional<Ordinal> stabilized_sup(const std::vector<Ordinal>& probes);

std::string format_rational(const Rational& q);
Rational parse_rational(const std::string& text);

}  // namespace ordcalc

#endif

#ifndef ORDCALC_IDEALS_HPP
#define ORDCALC_IDEALS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ordcalc/operator.hpp"

namespace ordcalc {

struct MembershipCertificate {
    std::string ideal;  // "M" | "X" | "plumbing"
    std::string operator_text;
    bool verdict = false;
    std::string witness;  // human-readable evidence
    std::optional<Ordinal> witness_point;
    std::optional<StepFunction> witness_generator;
    std::vector<std::string> checked;  // clauses examined

    /// Structured text report including a replay command.
    std::string str() const;
};

/// The Loy--Willis ideal M: T is a member iff the final column k_W is
/// continuous at W, i.e. eventually constant with the same value at W.
MembershipCertificate in_loy_willis(const OperatorExpr& T);

struct SeparableRangeResult {
    bool separable = false;
    std::optional<Ordinal> sigma;                    // least verified candidate
    std::optional<StepFunction> witness_generator;   // separates T from Pt T Pt
    MembershipCertificate certificate;
};

/// The separable-range ideal X: T is a member iff T = Pt_s T Pt_s for some
/// countable s. Candidates are the operator's boundary constants
/// (successor-adjusted); class operators are tail-determined by those
/// constants, which is recorded as an assumption in the certificate.
SeparableRangeResult separable_range(const OperatorExpr& T);

/// Least countable xi >= zeta with P_eta S (I - P_xi) = 0, computed as the
/// sup of row supports over [0, eta]. Requires column(S, W) = 0; the
/// identity is re-verified before returning.
Ordinal lemma44_bound(const OperatorExpr& S, const Ordinal& zeta, const Ordinal& eta);

struct DisjointFamily {
    bool applicable = false;
    std::string reason;
    Rational epsilon;                   // every member has |T f| >= epsilon
    std::vector<StepFunction> members;  // norm-1, pairwise disjoint supports
};

/// First n members of the transfinite family behind the separable-range
/// dichotomy: unit vectors with strictly increasing disjoint supports (each
/// support also clears the previous image support) whose images under T
/// keep norm >= epsilon. Applicable on the branch T in M with
/// non-separable range.
DisjointFamily disjoint_family(const OperatorExpr& T, size_t n);

/// V = I - comp(1, phi_H) where phi_H(b) is the least member of
/// H = {w^l : l a limit ordinal in [w, W]} (with w^W read as W) that is
/// >= b. V annihilates generators 1_{[0,h]} for h in H and sends 1_{[0,a]}
/// to the indicator of (greatest H-element below a, a] otherwise.
OperatorExpr build_V();

struct Decomposition {
    bool applicable = false;
    Ordinal sigma;
    OperatorExpr separable_part;  // Pt_sigma T; separable range, verified
    OperatorExpr remainder;       // (I - Pt_sigma) T
};

/// Split T = Pt_s T + (I - Pt_s) T with the first summand of separable
/// range, searching candidates s over boundary constants.
Decomposition decompose_X_plus_G(const OperatorExpr& T);

}  // namespace ordcalc

#endif

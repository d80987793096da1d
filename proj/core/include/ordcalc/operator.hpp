#ifndef ORDCALC_OPERATOR_HPP
#define ORDCALC_OPERATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "ordcalc/pwmap.hpp"
#include "ordcalc/stepfn.hpp"

namespace ordcalc {

/// Finitely supported functional: sum of c_i * (point evaluation at p_i).
struct Functional {
    std::vector<std::pair<Ordinal, Rational>> atoms;  // sorted, distinct, nonzero

    static Functional point(const Ordinal& p, const Rational& c = Rational(1));
    Rational operator()(const StepFunction& f) const;
    Rational coeff(const Ordinal& p) const;
    Rational norm() const;  // sum of |c_i|
    bool is_zero() const { return atoms.empty(); }
    bool operator==(const Functional& o) const { return atoms == o.atoms; }

    friend Functional operator+(const Functional& a, const Functional& b);
    friend Functional operator*(const Rational& c, const Functional& m);

    /// Sort by point, merge duplicates, drop zeros.
    void normalize();

    std::string str() const;
};

Functional parse_functional(const std::string& text);

/// An operator on C([0, W]) in the closed class: a finite sum of weighted
/// composition terms (Tf)(a) = w(a) * f(phi(a)) and tensor terms
/// (Tf)(a) = g(a) * mu(f). The class is closed under addition, scaling and
/// composition; every row is finitely supported and every column is a step
/// function.
class OperatorExpr {
public:
    struct CompTerm {
        StepFunction w;
        PwMap phi;
    };
    struct TensorTerm {
        StepFunction g;
        Functional mu;
    };

    OperatorExpr() = default;  // zero operator

    static OperatorExpr zero() { return OperatorExpr(); }
    static OperatorExpr identity();
    /// P(s): multiplication by 1_{[0,s]}; s countable.
    static OperatorExpr P(const Ordinal& s);
    /// Pt(s) = P(s) + 1_{[s+1, W]} (x) eps_W; s countable.
    static OperatorExpr Ptilde(const Ordinal& s);
    static OperatorExpr comp(StepFunction w, PwMap phi);
    static OperatorExpr tensor(StepFunction g, Functional mu);

    const std::vector<CompTerm>& comp_terms() const { return comps_; }
    const std::vector<TensorTerm>& tensor_terms() const { return tensors_; }
    /// True when every composition map is plain (no schemes, no lazy
    /// compositions); norm and equality are decided exactly in that case.
    bool is_plain() const;

    StepFunction apply(const StepFunction& f) const;
    Rational matrix_entry(const Ordinal& a, const Ordinal& b) const;
    Functional row(const Ordinal& a) const;
    StepFunction column(const Ordinal& b) const;

    /// S after T (matrix product S*T).
    static OperatorExpr compose(const OperatorExpr& S, const OperatorExpr& T);
    friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
    friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
    friend OperatorExpr operator*(const Rational& c, const OperatorExpr& T);
    OperatorExpr operator-() const { return Rational(-1) * *this; }

    /// Exact operator norm: the supremum of row 1-norms over a candidate set
    /// that provably contains a maximizing point for plain operators. For
    /// schematic operators the result is certified by matching the exact
    /// upper bound sum |w_i| + |g_j|*|mu_j|; when the bound is not attained
    /// on the candidate set an error is thrown rather than guessing.
    Rational norm() const;

    /// Union of weight cuts, tensor support points and (sampled) map
    /// boundaries — the interesting inputs for validators.
    std::vector<Ordinal> sample_boundaries() const;

    std::string str() const;

private:
    std::vector<CompTerm> comps_;
    std::vector<TensorTerm> tensors_;
    void prune();
};

struct EqualsReport {
    bool equal = true;
    /// true: structural decision over the full space (plain operators);
    /// false: verified on the generator/probe set only (schematic operators).
    bool exact = true;
    std::optional<Ordinal> witness_point;            // row that differs
    std::optional<StepFunction> witness_generator;   // input separating S and T
};

EqualsReport op_equals(const OperatorExpr& S, const OperatorExpr& T);

/// A point with a nonzero row of D, witnessing D != 0; nullopt means D = 0.
/// Exact for plain operators (this is the engine behind op_equals).
std::optional<Ordinal> nonzero_row_witness(const OperatorExpr& D);

struct RudinReport {
    bool rows_summable = true;                     // rows finitely supported with finite sums
    std::optional<Ordinal> discontinuous_column;   // column at 0/successor not continuous
    std::optional<Ordinal> column_jump_at_top;     // countable column discontinuous at W
    bool final_column_ok = true;                   // k_W continuous on [0, W)
    Rational final_column_limit;                   // lim of k_W at W
    bool all_pass() const {
        return rows_summable && !discontinuous_column && !column_jump_at_top && final_column_ok;
    }
    std::string str() const;
};

/// Checks the four matrix-representation clauses on all sampled boundaries
/// plus their successors.
RudinReport rudin_validate(const OperatorExpr& T);

/// sup over a' <= a of sup supp(row(T, a')), possibly unattained. Exact for
/// plain operators (weight supports are intersected with map pieces); for
/// schematic maps a certified upper bound via the image sup.
Ordinal row_support_sup(const OperatorExpr& T, const Ordinal& a);

/// sup over b' <= b of sup supp(column(T, b')), possibly unattained;
/// computed per term (a sup that ignores cross-term cancellation, hence an
/// upper bound — exact whenever supports do not cancel).
Ordinal column_support_sup(const OperatorExpr& T, const Ordinal& b);

OperatorExpr parse_operator(const std::string& text);

}  // namespace ordcalc

#endif

#ifndef ORDCALC_STEPFN_HPP
#define ORDCALC_STEPFN_HPP

#include <optional>
#include <string>
#include <vector>

#include "ordcalc/ordinal.hpp"

namespace ordcalc {

/// Closed interval [lower, upper] inside [0, W].
struct OrdinalInterval {
    Ordinal lower;
    Ordinal upper;
    bool contains(const Ordinal& a) const { return lower <= a && a <= upper; }
    std::string str() const { return "[" + lower.str() + ", " + upper.str() + "]"; }
};

/// A scalar (rational) function on [0, W] that is constant on each member of
/// a finite partition into intervals. Internally the partition is stored as
/// cut points 0 < c_1 < ... < c_n <= W: the function takes values()[i] on
/// [c_i, c_{i+1}) and values()[n] on [c_n, W]. Cuts (rather than closed
/// pieces) make half-open pieces such as [0, w) representable, which closed
/// upper endpoints cannot express below a limit ordinal.
class StepFunction {
public:
    StepFunction() : values_{Rational(0)} {}  // constant zero

    static StepFunction constant(const Rational& v);
    /// 1 on [lo, hi], 0 elsewhere.
    static StepFunction indicator(const Ordinal& lo, const Ordinal& hi);
    /// 1 on [0, s].
    static StepFunction initial_indicator(const Ordinal& s) { return indicator(Ordinal(), s); }
    /// 1 on [0, s), 0 from s on; s = 0 gives the zero function.
    static StepFunction below_indicator(const Ordinal& s);
    /// Validating constructor from raw cut/value data; merges equal neighbors.
    static StepFunction from_cuts(std::vector<Ordinal> cuts, std::vector<Rational> values);

    Rational operator()(const Ordinal& a) const;
    const std::vector<Ordinal>& cuts() const { return cuts_; }
    const std::vector<Rational>& values() const { return values_; }

    bool is_zero() const { return cuts_.empty() && values_[0] == 0; }
    bool operator==(const StepFunction& o) const { return cuts_ == o.cuts_ && values_ == o.values_; }

    /// Supremum norm.
    Rational sup_abs() const;

    /// Value approached from the left at a limit ordinal > 0.
    Rational left_limit(const Ordinal& lambda) const;

    /// Least limit ordinal where the function is discontinuous, if any.
    std::optional<Ordinal> continuity_witness() const;

    /// Supremum of {a : f(a) != 0}; not necessarily attained (it is attained
    /// unless it is a limit that bounds a half-open nonzero piece).
    /// nullopt for the zero function.
    std::optional<Ordinal> support_sup() const;

    friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
    friend StepFunction operator-(const StepFunction& a, const StepFunction& b);
    friend StepFunction operator*(const StepFunction& a, const StepFunction& b);  // pointwise
    friend StepFunction operator*(const Rational& c, const StepFunction& f);
    StepFunction operator-() const { return Rational(-1) * *this; }

    /// Serialized as comma-separated pieces `[lo, hi] -> v` (closed form when
    /// the piece has a greatest element) or `[lo, hi) -> v` (when it does
    /// not, i.e. the piece ends just below a limit).
    std::string str() const;

private:
    std::vector<Ordinal> cuts_;       // strictly increasing, in (0, W]
    std::vector<Rational> values_;    // size cuts_.size() + 1
    void normalize();
    size_t region_of(const Ordinal& a) const;
};

StepFunction parse_step(const std::string& text);

}  // namespace ordcalc

#endif

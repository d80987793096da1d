#ifndef ORDCALC_SEQUENCE_HPP
#define ORDCALC_SEQUENCE_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ordcalc/ordinal.hpp"

namespace ordcalc {

/// An ordinal-valued function of one ordinal variable: a closed-form
/// expression built from constants, the variable, +, ·, omega-power and
/// piecewise cases, or an opaque evaluator (used for memoized recursions).
/// Monotonicity and limit-continuity are checked on a standard sample when
/// the expression is built and recorded as flags; opaque evaluators declare
/// their flags (the internal builders only declare what they can justify).
class SequenceExpr {
public:
    SequenceExpr() : SequenceExpr(constant(Ordinal())) {}

    static SequenceExpr constant(const Ordinal& c);
    static SequenceExpr var();
    static SequenceExpr add(const SequenceExpr& a, const SequenceExpr& b);
    static SequenceExpr mul(const SequenceExpr& a, const SequenceExpr& b);
    static SequenceExpr omega_power(const SequenceExpr& e);
    /// Piecewise: entries (threshold t_i, expr e_i) with t_0 = 0 and strictly
    /// increasing thresholds; e_i applies on [t_i, t_{i+1}).
    static SequenceExpr cases(std::vector<std::pair<Ordinal, SequenceExpr>> entries);
    static SequenceExpr opaque(std::function<Ordinal(const Ordinal&)> fn, std::string name,
                               bool strictly_increasing, bool continuous);

    Ordinal operator()(const Ordinal& s) const;

    /// Checked/declared flags; see class comment.
    bool strictly_increasing() const;
    bool continuous() const;

    std::string str() const;

    struct Node;  // implementation detail, opaque outside the .cpp

private:
    std::shared_ptr<const Node> node_;
    explicit SequenceExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

/// sup{ s(t) : t < limit } for a monotone sequence expression.
/// - limit = W: requires s strictly increasing (then s(t) >= t, so the sup
///   is W).
/// - countable limit: s(limit) when s is recorded continuous and strictly
///   increasing; otherwise the limit of probes along the fundamental
///   sequence, detected by CNF shape stabilization (constant probes mean an
///   eventually constant sequence). Failure to stabilize throws — it is
///   never guessed.
Ordinal seq_sup(const SequenceExpr& s, const Ordinal& limit, int probe_depth = 8);

}  // namespace ordcalc

#endif

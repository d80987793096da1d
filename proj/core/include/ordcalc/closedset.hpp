#ifndef ORDCALC_CLOSEDSET_HPP
#define ORDCALC_CLOSEDSET_HPP

#include <optional>
#include <string>
#include <vector>

#include "ordcalc/pwmap.hpp"
#include "ordcalc/sequence.hpp"
#include "ordcalc/stepfn.hpp"

namespace ordcalc {

/// A subset of [0, W] given as a finite union of closed intervals, an
/// optional schematic family of blocks {[lower(s), upper(s)] : s in
/// [idx_lo, idx_hi)}, and a membership flag for W. This covers exactly the
/// shapes the engine produces (block unions with sequence-expression
/// endpoints); it is not a general set representation.
struct ClosedSetExpr {
    std::vector<OrdinalInterval> intervals;  // sorted, pairwise disjoint
    struct Blocks {
        Ordinal idx_lo;
        Ordinal idx_hi;  // exclusive; W allowed
        SequenceExpr lower, upper;
    };
    std::optional<Blocks> blocks;
    bool contains_top = false;

    bool contains(const Ordinal& a) const;
    bool uncountable() const { return blocks && blocks->idx_hi.is_top(); }
    std::string str() const;
};

struct ClosednessReport {
    bool closed;
    std::optional<Ordinal> witness;  // least limit of members found outside the set
};

/// Closedness in the order topology. Finite interval unions are always
/// closed; for schematic families the accumulation points (suprema of the
/// blocks below each limit index, and the supremum of the whole family) are
/// computed symbolically and tested for membership. Limit indices are
/// sampled; the shapes produced by the engine have index-uniform behavior,
/// so a failure at any limit index shows up at the sampled ones.
ClosednessReport is_closed(const ClosedSetExpr& H);

/// The order isomorphism psi of [0, T] onto H (T = order type of H), as a
/// piecewise map; block families require a constant block order type. The
/// map is extended beyond T by the constant max(H) so that it is total on
/// [0, W]; when H is uncountable (family up to W) the domain is all of
/// [0, W] and no extension happens. Throws (with the witness in the message)
/// when H is not closed.
PwMap order_iso(const ClosedSetExpr& H);

}  // namespace ordcalc

#endif

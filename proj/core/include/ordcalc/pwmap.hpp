#ifndef ORDCALC_PWMAP_HPP
#define ORDCALC_PWMAP_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ordcalc/sequence.hpp"
#include "ordcalc/stepfn.hpp"

namespace ordcalc {

/// A self-map of [0, W] that is piecewise constant or a translate. Pieces
/// come in two forms:
///  - Plain pieces with explicit ordinal endpoints.
///  - Schemes: families of pieces indexed by an ordinal parameter with
///    SequenceExpr endpoints, one piece per index. These carry the
///    transfinitely many pieces of maps like the block-collapse map of a
///    strictly increasing sequence, which no finite plain list can express.
/// A map may also be a lazy composition of two maps (composing scheme maps
/// symbolically is not closed-form in general); evaluation and pullback work
/// through compositions exactly.
class PwMap {
public:
    /// Plain piece on [lo, end) — end absent means "through W inclusive".
    /// Constant: a |-> value. Translate: a |-> value + (a - lo).
    struct Plain {
        Ordinal lo;
        std::optional<Ordinal> end;
        bool is_const;
        Ordinal value;
    };

    /// Piece family: for each index s in [idx_lo, idx_hi) (idx_hi = W allowed)
    /// a piece on [dom_lo(s), dom_end(s)). dom_lo must be strictly
    /// increasing; instance domains must be pairwise disjoint, but instances
    /// of *different* schemes may interleave (e.g. successor-step pieces with
    /// limit-gap pieces). Constant: a |-> value(s). Translate:
    /// a |-> value(s) + (a - dom_lo(s)); translate images must be
    /// non-overlapping and increasing in s.
    struct Scheme {
        Ordinal idx_lo;
        Ordinal idx_hi;
        SequenceExpr dom_lo;
        SequenceExpr dom_end;
        bool is_const;
        SequenceExpr value;
    };

    PwMap() : PwMap(identity()) {}

    static PwMap identity();
    static PwMap constant_map(const Ordinal& c);
    /// Validating constructor; pieces must tile [0, W] (spot-checked at
    /// sample points; every eval asserts unique coverage).
    static PwMap make(std::vector<Plain> plains, std::vector<Scheme> schemes = {});

    Ordinal operator()(const Ordinal& a) const;

    /// phi(psi(a)); concrete piece arithmetic when both maps are plain,
    /// otherwise a lazy composition node.
    static PwMap compose(const PwMap& phi, const PwMap& psi);

    /// f o phi as a StepFunction — exact, including through schemes and
    /// compositions. For schemes this inverts the finitely many crossings of
    /// f's cuts through the instance values with monotone search.
    StepFunction pullback(const StepFunction& f) const;

    /// Least limit point where the map is discontinuous. Exact for plain
    /// maps. For schemes, instance boundaries are checked at a sample of
    /// indices (small ordinals, limit indices, and the scheme ends) and the
    /// accumulation points of instances are checked via symbolic suprema.
    std::optional<Ordinal> continuity_witness() const;

    bool is_plain() const;
    const std::vector<Plain>& plains() const { return plains_; }
    const std::vector<Scheme>& schemes() const { return schemes_; }

    /// Interesting points for sampling: plain boundaries, instance
    /// boundaries at sampled indices, and W.
    std::vector<Ordinal> sample_boundaries() const;

    /// sup of the image of [0, a] (possibly unattained). Exact for plain
    /// maps; for schemes it relies on the instance-image monotonicity
    /// invariant, and for lazy compositions it composes the bounds (an upper
    /// bound that is exact when the inner sup is attained).
    Ordinal image_sup_up_to(const Ordinal& a) const;

    /// Plain pieces print as `[lo, hi] -> const c` / `[lo, hi] -> base a + @ - a'`;
    /// schemes print descriptively (they are not part of the input grammar).
    std::string str() const;

private:
    std::vector<Plain> plains_;    // sorted by lo
    std::vector<Scheme> schemes_;
    std::shared_ptr<const PwMap> outer_, inner_;  // set iff lazy composition

    struct Located {
        bool found = false;
        bool is_const = false;
        Ordinal piece_lo;   // domain start of the piece/instance
        Ordinal value;      // constant value or image of piece_lo
    };
    Located locate(const Ordinal& a) const;

    struct raw_tag {};
    explicit PwMap(raw_tag) {}
};

/// Plain-map parser for the `[lo, hi] -> const c` / `[lo, hi] -> base a + @ - a'`
/// comma-separated form emitted by str().
PwMap parse_map(const std::string& text);

}  // namespace ordcalc

#endif

#include "ordcalc/closedset.hpp"

#include <algorithm>
#include <sstream>

namespace ordcalc {

bool ClosedSetExpr::contains(const Ordinal& a) const {
    if (a.is_top()) return contains_top;
    for (const auto& iv : intervals)
        if (iv.contains(a)) return true;
    if (blocks) {
        const auto& b = *blocks;
        auto pred = [&](const Ordinal& i) {
            if (i < b.idx_lo) return true;
            if (!(i < b.idx_hi)) return false;
            return b.lower(i) <= a;
        };
        Ordinal hi = b.idx_lo + a;
        if (!(hi < b.idx_hi) && b.idx_hi.is_successor()) hi = b.idx_hi.predecessor();
        auto r = greatest_satisfying(pred, hi);
        if (r && b.idx_lo <= *r && *r < b.idx_hi && b.lower(*r) <= a && a <= b.upper(*r))
            return true;
    }
    return false;
}

std::string ClosedSetExpr::str() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& iv : intervals) {
        if (!first) out << " u ";
        first = false;
        out << iv.str();
    }
    if (blocks) {
        if (!first) out << " u ";
        first = false;
        out << "U{s in [" << blocks->idx_lo.str() << ", " << blocks->idx_hi.str() << "): ["
            << blocks->lower.str() << ", " << blocks->upper.str() << "]}";
    }
    if (contains_top) {
        if (!first) out << " u ";
        out << "{W}";
    }
    return out.str();
}

ClosednessReport is_closed(const ClosedSetExpr& H) {
    if (!H.blocks) return {true, std::nullopt};
    const auto& b = *H.blocks;
    // sanity on samples: nonempty blocks, strictly increasing and separated
    std::vector<Ordinal> limit_indices;
    for (const char* d : {"w", "w*2", "w^(2)", "w^(2)*2", "w^(w)"}) {
        Ordinal i = b.idx_lo + parse_ordinal(d);
        if (i < b.idx_hi || i == b.idx_hi) limit_indices.push_back(i);
    }
    if (b.idx_hi.is_limit() && !b.idx_hi.is_zero() && !b.idx_hi.is_top() &&
        std::find(limit_indices.begin(), limit_indices.end(), b.idx_hi) == limit_indices.end())
        limit_indices.push_back(b.idx_hi);
    for (const auto& lam : limit_indices) {
        // supremum of the blocks below lam is a limit of members
        Ordinal s = seq_sup(b.upper, lam);
        if (!H.contains(s)) return {false, s};
    }
    if (b.idx_hi.is_top() && !H.contains_top)
        return {false, Ordinal::top()};  // the family accumulates at W
    return {true, std::nullopt};
}

PwMap order_iso(const ClosedSetExpr& H) {
    auto rep = is_closed(H);
    if (!rep.closed)
        throw OrdinalError("order_iso: set is not closed; witness " +
                           (rep.witness ? rep.witness->str() : std::string("?")));
    if (H.intervals.empty() && !H.blocks)
        throw OrdinalError("order_iso: empty set");

    std::vector<PwMap::Plain> plains;
    std::vector<PwMap::Scheme> schemes;
    Ordinal d;  // domain cursor
    Ordinal last_member;
    for (const auto& iv : H.intervals) {
        Ordinal t = left_sub(iv.lower, iv.upper) + Ordinal(1);  // block order type
        plains.push_back({d, d + t, false, iv.lower});
        d = d + t;
        last_member = iv.upper;
    }
    if (H.blocks) {
        const auto b = *H.blocks;  // copied into the closures below
        Ordinal t = left_sub(b.lower(b.idx_lo), b.upper(b.idx_lo)) + Ordinal(1);
        for (const char* s : {"1", "2", "w", "w + 1", "w^(2)"}) {
            Ordinal i = b.idx_lo + parse_ordinal(s);
            if (i < b.idx_hi && !(left_sub(b.lower(i), b.upper(i)) + Ordinal(1) == t))
                throw OrdinalError("order_iso: block order types differ across the family");
        }
        Ordinal base = d;
        auto dom_lo = SequenceExpr::opaque(
            [base, t, b](const Ordinal& i) { return base + t * left_sub(b.idx_lo, i); },
            "block-domain-start", true, true);
        auto dom_end = SequenceExpr::opaque(
            [base, t, b](const Ordinal& i) {
                return base + t * (left_sub(b.idx_lo, i) + Ordinal(1));
            },
            "block-domain-end", true, true);
        schemes.push_back({b.idx_lo, b.idx_hi, dom_lo, dom_end, false, b.lower});
        if (b.idx_hi.is_top()) {
            // the family exhausts [0, W); W itself must be in H (closedness)
            plains.push_back({Ordinal::top(), std::nullopt, true, Ordinal::top()});
            return PwMap::make(std::move(plains), std::move(schemes));
        }
        d = base + t * left_sub(b.idx_lo, b.idx_hi);
        last_member = b.upper(b.idx_hi.is_successor() ? b.idx_hi.predecessor() : b.idx_hi);
        if (!b.idx_hi.is_successor())
            last_member = seq_sup(b.upper, b.idx_hi);  // closed, so this is in H
    }
    if (H.contains_top) {
        plains.push_back({d, std::nullopt, true, Ordinal::top()});
    } else {
        // constant extension beyond the order type of H
        plains.push_back({d, std::nullopt, true, last_member});
    }
    return PwMap::make(std::move(plains), std::move(schemes));
}

}  // namespace ordcalc

#include "ordcalc/pwmap.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ordcalc {

namespace {

// Sample indices used for spot checks and boundary sampling of schemes.
std::vector<Ordinal> index_samples(const Ordinal& idx_lo, const Ordinal& idx_hi) {
    std::vector<Ordinal> out;
    auto push = [&](const Ordinal& d) {
        Ordinal s = idx_lo + d;
        if (s < idx_hi && (out.empty() || !(out.back() == s))) out.push_back(s);
    };
    for (const char* d : {"0", "1", "2", "3", "w", "w + 1", "w*2", "w^(2)", "w^(2) + 1", "w^(3)"})
        push(parse_ordinal(d));
    if (idx_hi.is_successor()) {
        Ordinal last = idx_hi.predecessor();
        if (idx_lo <= last && std::find(out.begin(), out.end(), last) == out.end())
            out.push_back(last);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Ordinal translate_at(const Ordinal& first, const Ordinal& piece_lo, const Ordinal& a) {
    return first + left_sub(piece_lo, a);
}

}  // namespace

PwMap PwMap::identity() {
    return make({Plain{Ordinal(), std::nullopt, false, Ordinal()}});
}

PwMap PwMap::constant_map(const Ordinal& c) {
    return make({Plain{Ordinal(), std::nullopt, true, c}});
}

PwMap PwMap::make(std::vector<Plain> plains, std::vector<Scheme> schemes) {
    std::sort(plains.begin(), plains.end(),
              [](const Plain& a, const Plain& b) { return a.lo < b.lo; });
    for (const auto& p : plains)
        if (p.end && !(p.lo < *p.end)) throw OrdinalError("map piece with empty domain");
    for (const auto& s : schemes) {
        if (!(s.idx_lo < s.idx_hi)) throw OrdinalError("scheme with empty index range");
        auto samples = index_samples(s.idx_lo, s.idx_hi);
        Ordinal prev_end;
        bool have_prev = false;
        for (const auto& i : samples) {
            Ordinal lo = s.dom_lo(i), end = s.dom_end(i);
            if (!(lo < end)) throw OrdinalError("scheme instance with empty domain");
            if (have_prev && !(prev_end <= lo))
                throw OrdinalError("scheme instances overlap");
            prev_end = end;
            have_prev = true;
        }
    }
    PwMap m((raw_tag()));
    m.plains_ = std::move(plains);
    m.schemes_ = std::move(schemes);
    m.outer_.reset();
    m.inner_.reset();
    return m;
}

bool PwMap::is_plain() const { return !outer_ && schemes_.empty(); }

PwMap::Located PwMap::locate(const Ordinal& a) const {
    Located res;
    auto take = (
        [&](bool is_const, const Ordinal& lo, const Ordinal& value) {
            if (res.found) throw OrdinalError("map pieces overlap at " + a.str());
            res.found = true;
            res.is_const = is_const;
            res.piece_lo = lo;
            res.value = value;
        });
    for (const auto& p : plains_) {
        if (p.lo <= a && (!p.end || a < *p.end)) take(p.is_const, p.lo, p.value);
    }
    for (const auto& s : schemes_) {
        // greatest index i in [idx_lo, idx_hi) with dom_lo(i) <= a; since
        // dom_lo is strictly increasing, dom_lo(i) <= a forces i <= idx_lo+a
        auto pred = [&](const Ordinal& i) {
            if (i < s.idx_lo) return true;
            if (!(i < s.idx_hi)) return false;
            return s.dom_lo(i) <= a;
        };
        Ordinal hi = s.idx_lo + a;
        if (!(hi < s.idx_hi)) {
            if (s.idx_hi.is_successor()) hi = s.idx_hi.predecessor();
            // for a limit idx_hi every valid index is below idx_lo + a anyway
        }
        auto r = greatest_satisfying(pred, hi);
        if (!r || *r < s.idx_lo || !(*r < s.idx_hi)) continue;
        if (!(s.dom_lo(*r) <= a)) continue;  // open-sup result; no instance
        if (!(a < s.dom_end(*r))) continue;
        take(s.is_const, s.dom_lo(*r), s.value(*r));
    }
    return res;
}

Ordinal PwMap::operator()(const Ordinal& a) const {
    if (outer_) return (*outer_)((*inner_)(a));
    Located l = locate(a);
    if (!l.found) throw OrdinalError("map does not cover " + a.str());
    return l.is_const ? l.value : translate_at(l.value, l.piece_lo, a);
}

Ordinal PwMap::image_sup_up_to(const Ordinal& a) const {
    if (outer_) return outer_->image_sup_up_to(inner_->image_sup_up_to(a));
    Ordinal best;
    auto bump = [&](const Ordinal& v) {
        if (best < v) best = v;
    };
    auto translate_sup = [&](const Ordinal& lo, const Ordinal& value,
                             const std::optional<Ordinal>& end) {
        // sup of the translate image over [lo, end) clipped at a inclusive
        bool full = end && (a.is_top() || !(a + Ordinal(1) < *end));
        if (!full) {
            bump(a.is_top() && !end ? Ordinal::top() : value + left_sub(lo, a));
        } else if (end->is_successor()) {
            bump(value + left_sub(lo, end->predecessor()));
        } else {
            bump(value + left_sub(lo, *end));  // open sup
        }
    };
    for (const auto& p : plains_) {
        if (a < p.lo) continue;
        if (p.is_const)
            bump(p.value);
        else
            translate_sup(p.lo, p.value, p.end);
    }
    for (const auto& s : schemes_) {
        // greatest instance starting at or below a, as in locate()
        auto pred = [&](const Ordinal& i) {
            if (i < s.idx_lo) return true;
            if (!(i < s.idx_hi)) return false;
            return s.dom_lo(i) <= a;
        };
        Ordinal hi = s.idx_lo + a;
        if (!(hi < s.idx_hi) && s.idx_hi.is_successor()) hi = s.idx_hi.predecessor();
        auto r = greatest_satisfying(pred, hi);
        if (!r || *r < s.idx_lo) continue;
        if (*r < s.idx_hi && s.dom_lo(*r) <= a) {
            // earlier instances are dominated: images increase with the index
            if (s.is_const)
                bump(s.value(*r));
            else
                translate_sup(s.dom_lo(*r), s.value(*r), s.dom_end(*r));
        } else if (r->is_limit() && s.idx_lo < *r) {
            // open sup: every instance below *r fits under a; their images
            // accumulate at the value sup
            bump(seq_sup(s.value, *r));
        }
    }
    return best;
}

namespace {

// Merge adjacent plain pieces with identical behavior.
std::vector<PwMap::Plain> normalize_plains(std::vector<PwMap::Plain> ps) {
    std::sort(ps.begin(), ps.end(),
              [](const PwMap::Plain& a, const PwMap::Plain& b) { return a.lo < b.lo; });
    std::vector<PwMap::Plain> out;
    for (auto& p : ps) {
        if (!out.empty()) {
            auto& q = out.back();
            bool adjacent = q.end && *q.end == p.lo;
            if (adjacent && q.is_const && p.is_const && q.value == p.value) {
                q.end = p.end;
                continue;
            }
            if (adjacent && !q.is_const && !p.is_const &&
                p.value == translate_at(q.value, q.lo, p.lo)) {
                q.end = p.end;
                continue;
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

namespace {
bool is_identity_map(const PwMap& m) {
    if (!m.is_plain() || m.plains().size() != 1) return false;
    const auto& p = m.plains().front();
    return !p.is_const && p.lo.is_zero() && !p.end && p.value.is_zero();
}
}  // namespace

PwMap PwMap::compose(const PwMap& phi, const PwMap& psi) {
    if (is_identity_map(phi)) return psi;
    if (is_identity_map(psi)) return phi;
    if (!(phi.is_plain() && psi.is_plain())) {
        PwMap m((raw_tag()));
        m.plains_.clear();
        m.outer_ = std::make_shared<const PwMap>(phi);
        m.inner_ = std::make_shared<const PwMap>(psi);
        return m;
    }
    std::vector<Plain> out;
    for (const auto& p : psi.plains_) {
        if (p.is_const) {
            Ordinal c = phi(p.value);
            out.push_back({p.lo, p.end, true, c});
            continue;
        }
        // translate piece: image is [p.value, image_end) (or through W);
        // split the domain at preimages of phi's boundaries
        std::optional<Ordinal> image_end;
        if (p.end) image_end = translate_at(p.value, p.lo, *p.end);
        std::vector<Ordinal> breaks{p.value};
        for (const auto& q : phi.plains_)
            if (p.value < q.lo && (!image_end || q.lo < *image_end)) breaks.push_back(q.lo);
        std::sort(breaks.begin(), breaks.end());
        for (size_t i = 0; i < breaks.size(); ++i) {
            Ordinal d = p.lo + left_sub(p.value, breaks[i]);
            std::optional<Ordinal> dend =
                i + 1 < breaks.size()
                    ? std::optional<Ordinal>(p.lo + left_sub(p.value, breaks[i + 1]))
                    : p.end;
            Located l = phi.locate(breaks[i]);
            if (!l.found) throw OrdinalError("composition: outer map gap");
            if (l.is_const)
                out.push_back({d, dend, true, l.value});
            else
                out.push_back({d, dend, false, translate_at(l.value, l.piece_lo, breaks[i])});
        }
    }
    PwMap m((raw_tag()));
    m.plains_ = normalize_plains(std::move(out));
    return m;
}

namespace {

// least index i in [idx_lo, idx_hi) with seq(i) >= q, for strictly
// increasing seq; nullopt when there is none
std::optional<Ordinal> least_index_reaching(const SequenceExpr& seq, const Ordinal& idx_lo,
                                            const Ordinal& idx_hi, const Ordinal& q) {
    auto pred = [&](const Ordinal& i) {
        if (i < idx_lo) return false;
        if (!(i < idx_hi)) return true;  // out of range counts as "reached"
        return seq(i) >= q;
    };
    auto r = least_satisfying(pred, idx_hi.is_top() ? Ordinal::top() : idx_hi);
    if (!r || !(*r < idx_hi) || *r < idx_lo) return std::nullopt;
    return r;
}

// greatest index i in [idx_lo, idx_hi) with seq(i) <= q (strictly increasing
// seq); nullopt when none, or when the satisfying set has no greatest member
std::optional<Ordinal> greatest_index_below(const SequenceExpr& seq, const Ordinal& idx_lo,
                                            const Ordinal& idx_hi, const Ordinal& q) {
    auto pred = [&](const Ordinal& i) {
        if (i < idx_lo) return true;
        if (!(i < idx_hi)) return false;
        return seq(i) <= q;
    };
    Ordinal hi = idx_lo + q;
    if (!(hi < idx_hi) && idx_hi.is_successor()) hi = idx_hi.predecessor();
    auto r = greatest_satisfying(pred, hi);
    if (!r || *r < idx_lo || !(*r < idx_hi)) return std::nullopt;
    if (!(seq(*r) <= q)) return std::nullopt;  // open-sup result
    return r;
}

bool seq_is_constant_on(const SequenceExpr& seq, const Ordinal& idx_lo, const Ordinal& idx_hi) {
    auto samples = index_samples(idx_lo, idx_hi);
    for (const auto& i : samples)
        if (!(seq(i) == seq(idx_lo))) return false;
    return true;
}

}  // namespace

StepFunction PwMap::pullback(const StepFunction& f) const {
    if (outer_) return inner_->pullback(outer_->pullback(f));
    std::set<Ordinal> cuts;
    auto add_cut = [&](const Ordinal& c) {
        if (!c.is_zero()) cuts.insert(c);
    };
    for (const auto& p : plains_) {
        add_cut(p.lo);
        if (p.is_const) continue;
        std::optional<Ordinal> image_end;
        if (p.end) image_end = translate_at(p.value, p.lo, *p.end);
        for (const auto& q : f.cuts()) {
            if (p.value < q && (!image_end || q < *image_end))
                add_cut(p.lo + left_sub(p.value, q));
        }
    }
    for (const auto& s : schemes_) {
        add_cut(s.dom_lo(s.idx_lo));
        bool strict = s.value.strictly_increasing();
        if (!strict && !seq_is_constant_on(s.value, s.idx_lo, s.idx_hi))
            throw OrdinalError(
                "pullback through a scheme needs strictly increasing or constant values");
        if (!strict) continue;  // constant family: no value crossings
        for (const auto& q : f.cuts()) {
            if (auto r = least_index_reaching(s.value, s.idx_lo, s.idx_hi, q))
                add_cut(s.dom_lo(*r));
            if (!s.is_const) {
                // a cut interior to one translated image pulls back into
                // that instance
                if (auto r = greatest_index_below(s.value, s.idx_lo, s.idx_hi, q)) {
                    Ordinal off = left_sub(s.value(*r), q);
                    Ordinal len = left_sub(s.dom_lo(*r), s.dom_end(*r));
                    if (off < len) add_cut(s.dom_lo(*r) + off);
                }
            }
        }
    }
    std::vector<Ordinal> cs(cuts.begin(), cuts.end());
    std::vector<Rational> vals;
    vals.push_back(f((*this)(Ordinal())));
    for (const auto& c : cs) vals.push_back(f((*this)(c)));
    return StepFunction::from_cuts(std::move(cs), std::move(vals));
}

namespace {

struct LeftInfo {
    bool defined = false;
    Ordinal value;
};

}  // namespace

std::optional<Ordinal> PwMap::continuity_witness() const {
    if (outer_)
        throw OrdinalError("continuity of lazy compositions is not checked directly");
    // candidate limit points: piece starts (sampled for schemes) and W
    std::set<Ordinal> cands;
    for (const auto& p : plains_)
        if (p.lo.is_limit() && !p.lo.is_zero()) cands.insert(p.lo);
    for (const auto& s : schemes_)
        for (const auto& i : index_samples(s.idx_lo, s.idx_hi)) {
            Ordinal lo = s.dom_lo(i);
            if (lo.is_limit() && !lo.is_zero()) cands.insert(lo);
        }
    cands.insert(Ordinal::top());

    for (const auto& lam : cands) {
        Located at = locate(lam);
        if (!at.found) throw OrdinalError("map does not cover " + lam.str());
        if (at.piece_lo < lam) continue;  // interior of a piece: continuous there
        // left limit from the structure covering points just below lam
        LeftInfo left;
        for (const auto& p : plains_) {
            if (!(p.lo < lam)) continue;
            if (p.end && *p.end < lam) continue;  // does not reach lam
            if (!p.end && !lam.is_top()) continue;
            Ordinal v = p.is_const ? p.value : translate_at(p.value, p.lo, lam);
            left = {true, v};
        }
        for (const auto& s : schemes_) {
            auto pred = [&](const Ordinal& i) {
                if (i < s.idx_lo) return true;
                if (!(i < s.idx_hi)) return false;
                return s.dom_lo(i) < lam;
            };
            Ordinal hi = s.idx_lo + lam;
            if (!(hi < s.idx_hi) && s.idx_hi.is_successor()) hi = s.idx_hi.predecessor();
            auto r = greatest_satisfying(pred, hi);
            if (!r || *r < s.idx_lo) continue;
            if (*r < s.idx_hi && s.dom_lo(*r) < lam) {
                // a single instance abuts (or crosses) lam
                if (!(s.dom_end(*r) < lam) && !(s.dom_end(*r) > lam)) {
                    Ordinal v = s.is_const
                                    ? s.value(*r)
                                    : translate_at(s.value(*r), s.dom_lo(*r), lam);
                    left = {true, v};
                } else if (s.dom_end(*r) > lam) {
                    // lam interior to the instance; handled above via locate
                }
            } else {
                // instances accumulate at lam from below: limit index *r
                Ordinal lim_idx = *r;
                if (!lim_idx.is_limit() || lim_idx <= s.idx_lo) continue;
                const Scheme& sc = s;
                auto img_sup = SequenceExpr::opaque(
                    [&sc](const Ordinal& i) {
                        Ordinal lo = sc.dom_lo(i), end = sc.dom_end(i);
                        return sc.is_const ? sc.value(i)
                                           : sc.value(i) + left_sub(lo, end);
                    },
                    "image-sup", sc.value.strictly_increasing(), false);
                // only relevant if the accumulated domain really is lam
                Ordinal dom_acc = seq_sup(sc.dom_lo, lim_idx);
                if (!(dom_acc == lam)) continue;
                left = {true, seq_sup(img_sup, lim_idx)};
            }
        }
        if (!left.defined) continue;  // nothing accumulates at lam from below
        Ordinal at_val = (*this)(lam);
        if (!(left.value == at_val)) return lam;
    }
    return std::nullopt;
}

std::vector<Ordinal> PwMap::sample_boundaries() const {
    std::set<Ordinal> pts;
    if (outer_) {
        // inner boundaries are domain-side; outer ones are image-side hints
        for (const auto& b : inner_->sample_boundaries()) pts.insert(b);
        for (const auto& b : outer_->sample_boundaries()) pts.insert(b);
    } else {
        for (const auto& p : plains_) pts.insert(p.lo);
        for (const auto& s : schemes_)
            for (const auto& i : index_samples(s.idx_lo, s.idx_hi)) pts.insert(s.dom_lo(i));
    }
    pts.insert(Ordinal::top());
    return {pts.begin(), pts.end()};
}

std::string PwMap::str() const {
    if (outer_) return "(" + outer_->str() + ") after (" + inner_->str() + ")";
    std::ostringstream out;
    bool first = true;
    auto emit_domain = [&](const Ordinal& lo, const std::optional<Ordinal>& end) {
        if (!end) {
            out << "[" << lo.str() << ", W]";
        } else if (end->is_successor()) {
            out << "[" << lo.str() << ", " << end->predecessor().str() << "]";
        } else {
            out << "[" << lo.str() << ", " << end->str() << ")";
        }
    };
    for (const auto& p : plains_) {
        if (!first) out << ", ";
        first = false;
        emit_domain(p.lo, p.end);
        if (p.is_const)
            out << " -> const " << p.value.str();
        else
            out << " -> base " << p.value.str() << " + @ - " << p.lo.str();
    }
    for (const auto& s : schemes_) {
        if (!first) out << ", ";
        first = false;
        out << "scheme s in [" << s.idx_lo.str() << ", " << s.idx_hi.str() << "): ["
            << s.dom_lo.str() << ", " << s.dom_end.str() << ") -> "
            << (s.is_const ? "const " : "base ") << s.value.str();
        if (!s.is_const) out << " + @ - dom_lo";
    }
    return out.str();
}

PwMap parse_map(const std::string& text) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : text) {
        if (ch == '[' || ch == '(') ++depth;
        if (ch == ']' || ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);

    std::vector<PwMap::Plain> plains;
    for (const auto& raw : parts) {
        size_t lb = raw.find('[');
        size_t comma = raw.find(',', lb);
        // closing ']' or ')' of the interval, skipping parens inside ordinals
        size_t rb = std::string::npos;
        if (comma != std::string::npos) {
            int pd = 0;
            for (size_t i = comma + 1; i < raw.size(); ++i) {
                if (raw[i] == '(') {
                    ++pd;
                } else if (raw[i] == ')' && pd > 0) {
                    --pd;
                } else if (raw[i] == ']' || raw[i] == ')') {
                    rb = i;
                    break;
                }
            }
        }
        size_t arrow = raw.find("->", rb);
        if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos ||
            arrow == std::string::npos)
            throw OrdinalError("bad map piece: " + raw);
        Ordinal lo = parse_ordinal(raw.substr(lb + 1, comma - lb - 1));
        Ordinal hi = parse_ordinal(raw.substr(comma + 1, rb - comma - 1));
        bool closed = raw[rb] == ']';
        std::optional<Ordinal> end;
        if (closed && !hi.is_top())
            end = hi + Ordinal(1);
        else if (!closed)
            end = hi;
        std::string rhs = raw.substr(arrow + 2);
        size_t c = rhs.find("const");
        size_t b = rhs.find("base");
        if (c != std::string::npos) {
            plains.push_back({lo, end, true, parse_ordinal(rhs.substr(c + 5))});
        } else if (b != std::string::npos) {
            // base and anchor ordinals may contain '+', so anchor on '@'
            size_t at = rhs.find('@', b);
            size_t plus = at == std::string::npos ? std::string::npos : rhs.rfind('+', at);
            if (plus == std::string::npos) throw OrdinalError("bad translate piece: " + raw);
            Ordinal base = parse_ordinal(rhs.substr(b + 4, plus - b - 4));
            size_t minus = rhs.find('-', at);
            if (minus == std::string::npos) throw OrdinalError("bad translate piece: " + raw);
            Ordinal anchor = parse_ordinal(rhs.substr(minus + 1));
            if (!(anchor == lo))
                throw OrdinalError("translate anchor must equal the piece start: " + raw);
            plains.push_back({lo, end, false, base});
        } else {
            throw OrdinalError("map piece needs 'const' or 'base': " + raw);
        }
    }
    return PwMap::make(std::move(plains));
}

}  // namespace ordcalc

#include "ordcalc/stepfn.hpp"

#include <algorithm>
#include <sstream>

namespace ordcalc {

void StepFunction::normalize() {
    std::vector<Ordinal> cs;
    std::vector<Rational> vs;
    vs.push_back(values_[0]);
    for (size_t i = 0; i < cuts_.size(); ++i) {
        if (values_[i + 1] == vs.back()) continue;
        cs.push_back(cuts_[i]);
        vs.push_back(values_[i + 1]);
    }
    cuts_ = std::move(cs);
    values_ = std::move(vs);
}

StepFunction StepFunction::constant(const Rational& v) {
    StepFunction f;
    f.values_ = {v};
    return f;
}

StepFunction StepFunction::indicator(const Ordinal& lo, const Ordinal& hi) {
    if (hi < lo) throw OrdinalError("indicator: empty interval");
    StepFunction f;
    f.cuts_.clear();
    f.values_.clear();
    if (!lo.is_zero()) {
        f.cuts_.push_back(lo);
        f.values_.push_back(Rational(0));
    }
    f.values_.push_back(Rational(1));
    if (!hi.is_top()) {
        f.cuts_.push_back(hi + Ordinal(1));
        f.values_.push_back(Rational(0));
    }
    return f;
}

StepFunction StepFunction::below_indicator(const Ordinal& s) {
    if (s.is_zero()) return StepFunction();
    StepFunction f;
    f.cuts_ = {s};
    f.values_ = {Rational(1), Rational(0)};
    return f;
}

StepFunction StepFunction::from_cuts(std::vector<Ordinal> cuts, std::vector<Rational> values) {
    if (values.size() != cuts.size() + 1) throw OrdinalError("step: cut/value size mismatch");
    for (size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i].is_zero()) throw OrdinalError("step: zero cut");
        if (i > 0 && !(cuts[i - 1] < cuts[i])) throw OrdinalError("step: cuts not increasing");
    }
    StepFunction f;
    f.cuts_ = std::move(cuts);
    f.values_ = std::move(values);
    f.normalize();
    return f;
}

size_t StepFunction::region_of(const Ordinal& a) const {
    // index of the region containing a: number of cuts <= a
    return std::upper_bound(cuts_.begin(), cuts_.end(), a) - cuts_.begin();
}

Rational StepFunction::operator()(const Ordinal& a) const { return values_[region_of(a)]; }

Rational StepFunction::sup_abs() const {
    Rational m = 0;
    for (const auto& v : values_) m = std::max(m, v < 0 ? Rational(-v) : v);
    return m;
}

Rational StepFunction::left_limit(const Ordinal& lambda) const {
    if (!lambda.is_limit() || lambda.is_zero())
        throw OrdinalError("left_limit needs a limit ordinal > 0");
    // value on the region just below lambda: count cuts strictly below
    size_t i = std::lower_bound(cuts_.begin(), cuts_.end(), lambda) - cuts_.begin();
    return values_[i];
}

std::optional<Ordinal> StepFunction::continuity_witness() const {
    // discontinuities occur exactly at limit cuts (values on each side
    // differ by canonicality)
    for (const auto& c : cuts_)
        if (c.is_limit()) return c;
    return std::nullopt;
}

std::optional<Ordinal> StepFunction::support_sup() const {
    for (size_t i = values_.size(); i-- > 0;) {
        if (values_[i] == 0) continue;
        if (i == cuts_.size()) return Ordinal::top();
        const Ordinal& end = cuts_[i];  // region is [start, end)
        return end.is_successor() ? end.predecessor() : end;
    }
    return std::nullopt;
}

namespace {

template <typename Op>
StepFunction zip(const StepFunction& a, const StepFunction& b, Op op) {
    std::vector<Ordinal> cuts;
    std::merge(a.cuts().begin(), a.cuts().end(), b.cuts().begin(), b.cuts().end(),
               std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Rational> vals;
    vals.push_back(op(a(Ordinal()), b(Ordinal())));
    for (const auto& c : cuts) vals.push_back(op(a(c), b(c)));
    return StepFunction::from_cuts(std::move(cuts), std::move(vals));
}

}  // namespace

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    return zip(a, b, [](const Rational& x, const Rational& y) { return x + y; });
}
StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    return zip(a, b, [](const Rational& x, const Rational& y) { return x - y; });
}
StepFunction operator*(const StepFunction& a, const StepFunction& b) {
    return zip(a, b, [](const Rational& x, const Rational& y) { return x * y; });
}
StepFunction operator*(const Rational& c, const StepFunction& f) {
    std::vector<Rational> vals;
    for (const auto& v : f.values()) vals.push_back(c * v);
    return StepFunction::from_cuts(f.cuts(), std::move(vals));
}

std::string StepFunction::str() const {
    std::ostringstream out;
    Ordinal start;
    for (size_t i = 0; i < values_.size(); ++i) {
        if (i) out << ", ";
        if (i < cuts_.size()) {
            const Ordinal& end = cuts_[i];
            if (end.is_successor())
                out << "[" << start.str() << ", " << end.predecessor().str() << "]";
            else
                out << "[" << start.str() << ", " << end.str() << ")";
            start = end;
        } else {
            out << "[" << start.str() << ", W]";
        }
        out << " -> " << format_rational(values_[i]);
    }
    return out.str();
}

StepFunction parse_step(const std::string& text) {
    // pieces "[lo, hi] -> v" or "[lo, hi) -> v" separated by commas at depth 0
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

    std::vector<Ordinal> cuts;
    std::vector<Rational> vals;
    Ordinal expect_start;
    bool first = true;
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
            throw OrdinalError("bad step piece: " + raw);
        Ordinal lo = parse_ordinal(raw.substr(lb + 1, comma - lb - 1));
        Ordinal hi = parse_ordinal(raw.substr(comma + 1, rb - comma - 1));
        bool closed = raw[rb] == ']';
        Rational v = parse_rational(raw.substr(arrow + 2));
        if (!(lo == expect_start) || first != lo.is_zero())
            throw OrdinalError("step pieces must tile [0, W] in order");
        first = false;
        Ordinal end = closed ? (hi.is_top() ? Ordinal::top() : hi + Ordinal(1)) : hi;
        if (closed && hi.is_top()) {
            vals.push_back(v);
            return StepFunction::from_cuts(std::move(cuts), std::move(vals));
        }
        cuts.push_back(end);
        vals.push_back(v);
        expect_start = end;
    }
    throw OrdinalError("step pieces must end with a piece reaching W");
}

}  // namespace ordcalc

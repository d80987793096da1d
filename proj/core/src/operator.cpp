#include "ordcalc/operator.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace ordcalc {

namespace {

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

StepFunction abs_step(const StepFunction& f) {
    std::vector<Rational> vals;
    vals.reserve(f.values().size());
    for (const auto& v : f.values()) vals.push_back(rat_abs(v));
    return StepFunction::from_cuts(f.cuts(), std::move(vals));
}

BigNat coeff_of(const Ordinal& a, const Ordinal& e) {
    for (const auto& t : a.terms())
        if (t.exponent == e) return t.coeff;
    return 0;
}

// Largest exponent at which the CNFs of f and g differ; requires f != g,
// both countable. f + d = g + d holds exactly when the leading exponent of d
// exceeds this, i.e. for d >= w^(e*+1).
Ordinal largest_diff_exp(const Ordinal& f, const Ordinal& g) {
    std::optional<Ordinal> best;
    auto note = [&](const Ordinal& e) {
        if (!best || e > *best) best = e;
    };
    for (const auto& t : f.terms())
        if (coeff_of(g, t.exponent) != t.coeff) note(t.exponent);
    for (const auto& t : g.terms())
        if (coeff_of(f, t.exponent) != t.coeff) note(t.exponent);
    return *best;
}

const PwMap::Plain* piece_at(const PwMap& m, const Ordinal& a) {
    const PwMap::Plain* hit = nullptr;
    for (const auto& p : m.plains()) {
        if (p.lo <= a && (!p.end || a < *p.end)) hit = &p;
    }
    return hit;
}

}  // namespace

// ---------------------------------------------------------------- Functional

Functional Functional::point(const Ordinal& p, const Rational& c) {
    Functional m;
    if (c != 0) m.atoms.push_back({p, c});
    return m;
}

Rational Functional::operator()(const StepFunction& f) const {
    Rational s = 0;
    for (const auto& [p, c] : atoms) s += c * f(p);
    return s;
}

Rational Functional::coeff(const Ordinal& p) const {
    for (const auto& [q, c] : atoms)
        if (q == p) return c;
    return 0;
}

Rational Functional::norm() const {
    Rational s = 0;
    for (const auto& [p, c] : atoms) s += rat_abs(c);
    return s;
}

void Functional::normalize() {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Ordinal, Rational>> out;
    for (auto& [p, c] : atoms) {
        if (!out.empty() && out.back().first == p)
            out.back().second += c;
        else
            out.push_back({p, c});
    }
    std::erase_if(out, [](const auto& a) { return a.second == 0; });
    atoms = std::move(out);
}

Functional operator+(const Functional& a, const Functional& b) {
    Functional r = a;
    r.atoms.insert(r.atoms.end(), b.atoms.begin(), b.atoms.end());
    r.normalize();
    return r;
}

Functional operator*(const Rational& c, const Functional& m) {
    Functional r;
    if (c == 0) return r;
    r.atoms = m.atoms;
    for (auto& [p, v] : r.atoms) v *= c;
    return r;
}

std::string Functional::str() const {
    if (atoms.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += " + ";
        out += format_rational(atoms[i].second) + "*e(" + atoms[i].first.str() + ")";
    }
    return out;
}

// -------------------------------------------------------------- construction

OperatorExpr OperatorExpr::identity() {
    return comp(StepFunction::constant(1), PwMap::identity());
}

OperatorExpr OperatorExpr::P(const Ordinal& s) {
    if (s.is_top()) throw OrdinalError("P(s) requires a countable s");
    return comp(StepFunction::initial_indicator(s), PwMap::identity());
}

OperatorExpr OperatorExpr::Ptilde(const Ordinal& s) {
    if (s.is_top()) throw OrdinalError("Pt(s) requires a countable s");
    return P(s) + tensor(StepFunction::indicator(s + Ordinal(1), Ordinal::top()),
                         Functional::point(Ordinal::top()));
}

OperatorExpr OperatorExpr::comp(StepFunction w, PwMap phi) {
    OperatorExpr T;
    T.comps_.push_back({std::move(w), std::move(phi)});
    T.prune();
    return T;
}

OperatorExpr OperatorExpr::tensor(StepFunction g, Functional mu) {
    OperatorExpr T;
    T.tensors_.push_back({std::move(g), std::move(mu)});
    T.prune();
    return T;
}

void OperatorExpr::prune() {
    std::erase_if(comps_, [](const CompTerm& t) { return t.w.is_zero(); });
    // merge tensor terms sharing a functional: g1 (x) mu + g2 (x) mu = (g1 + g2) (x) mu
    std::vector<TensorTerm> merged;
    for (auto& t : tensors_) {
        bool found = false;
        for (auto& m : merged)
            if (m.mu == t.mu) {
                m.g = m.g + t.g;
                found = true;
                break;
            }
        if (!found) merged.push_back(std::move(t));
    }
    tensors_ = std::move(merged);
    std::erase_if(tensors_,
                  [](const TensorTerm& t) { return t.g.is_zero() || t.mu.is_zero(); });
}

bool OperatorExpr::is_plain() const {
    for (const auto& t : comps_)
        if (!t.phi.is_plain()) return false;
    return true;
}

// -------------------------------------------------------------------- action

StepFunction OperatorExpr::apply(const StepFunction& f) const {
    StepFunction out;  // zero
    for (const auto& t : comps_) out = out + t.w * t.phi.pullback(f);
    for (const auto& t : tensors_) out = out + t.mu(f) * t.g;
    return out;
}

Rational OperatorExpr::matrix_entry(const Ordinal& a, const Ordinal& b) const {
    Rational s = 0;
    for (const auto& t : comps_) {
        Rational w = t.w(a);
        if (w != 0 && t.phi(a) == b) s += w;
    }
    for (const auto& t : tensors_) s += t.g(a) * t.mu.coeff(b);
    return s;
}

Functional OperatorExpr::row(const Ordinal& a) const {
    Functional r;
    for (const auto& t : comps_) {
        Rational w = t.w(a);
        if (w != 0) r.atoms.push_back({t.phi(a), w});
    }
    for (const auto& t : tensors_) {
        Rational g = t.g(a);
        if (g == 0) continue;
        for (const auto& [p, c] : t.mu.atoms) r.atoms.push_back({p, g * c});
    }
    r.normalize();
    return r;
}

StepFunction OperatorExpr::column(const Ordinal& b) const {
    StepFunction out;
    StepFunction point = StepFunction::indicator(b, b);
    for (const auto& t : comps_) out = out + t.w * t.phi.pullback(point);
    for (const auto& t : tensors_) out = out + t.mu.coeff(b) * t.g;
    return out;
}

// ------------------------------------------------------------------- algebra

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
    OperatorExpr r = a;
    r.comps_.insert(r.comps_.end(), b.comps_.begin(), b.comps_.end());
    r.tensors_.insert(r.tensors_.end(), b.tensors_.begin(), b.tensors_.end());
    r.prune();
    return r;
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
    return a + Rational(-1) * b;
}

OperatorExpr operator*(const Rational& c, const OperatorExpr& T) {
    OperatorExpr r;
    if (c == 0) return r;
    r = T;
    for (auto& t : r.comps_) t.w = c * t.w;
    for (auto& t : r.tensors_) t.g = c * t.g;
    return r;
}

OperatorExpr OperatorExpr::compose(const OperatorExpr& S, const OperatorExpr& T) {
    OperatorExpr r;
    for (const auto& s : S.comps_) {
        // (S g)(a) = w_S(a) g(phi_S(a)) with g = Tf.
        for (const auto& t : T.comps_)
            r.comps_.push_back(
                {s.w * s.phi.pullback(t.w), PwMap::compose(t.phi, s.phi)});
        for (const auto& t : T.tensors_)
            r.tensors_.push_back({s.w * s.phi.pullback(t.g), t.mu});
    }
    for (const auto& s : S.tensors_) {
        // g(a) * mu(Tf) and mu(Tf) = sum_i c_i (row of T at p_i)(f).
        Functional nu;
        for (const auto& [p, c] : s.mu.atoms) nu = nu + c * T.row(p);
        if (!nu.is_zero()) r.tensors_.push_back({s.g, nu});
    }
    r.prune();
    return r;
}

// ---------------------------------------------------------------- candidates

namespace {

// Starts of the common refinement regions: weight cuts and plain map piece
// starts. Within one region every weight is constant and every plain map is a
// single constant/translate piece.
std::vector<Ordinal> region_starts(const OperatorExpr& T) {
    std::set<Ordinal> s;
    s.insert(Ordinal());
    for (const auto& t : T.comp_terms()) {
        for (const auto& c : t.w.cuts()) s.insert(c);
        for (const auto& p : t.phi.plains()) s.insert(p.lo);
    }
    for (const auto& t : T.tensor_terms())
        for (const auto& c : t.g.cuts()) s.insert(c);
    std::vector<Ordinal> out(s.begin(), s.end());
    std::erase_if(out, [](const Ordinal& a) { return a.is_top(); });
    return out;
}

size_t collision_budget(const OperatorExpr& T) {
    size_t nc = T.comp_terms().size();
    size_t nfix = nc;
    for (const auto& t : T.tensor_terms()) nfix += t.mu.atoms.size();
    size_t k = nc * (nc + nfix) + 2;
    return std::min<size_t>(k, 64);
}

// Exhaustive row test points for one refinement region [r, end) of a plain
// operator. Within the region each comp atom either stays fixed (constant
// piece) or moves as phi_i(r) + d (translate piece); the coincidence pattern
// among the atoms changes only at pairwise merge thresholds w^(e*+1)
// (translate/translate) and at isolated solutions of phi_i(r) + d = p
// (translate against a fixed point). Testing K+1 consecutive points past
// every threshold plus all isolated solutions covers every pattern the
// region realizes.
std::vector<Ordinal> region_points(const OperatorExpr& T, const Ordinal& r,
                                   const std::optional<Ordinal>& end, size_t K) {
    std::vector<Ordinal> trans;   // phi_i(r) for translate pieces
    std::vector<Ordinal> fixed;   // constant piece values and tensor support
    for (const auto& t : T.comp_terms()) {
        const PwMap::Plain* p = piece_at(t.phi, r);
        if (!p) continue;  // r = W handled separately
        if (p->is_const)
            fixed.push_back(p->value);
        else
            trans.push_back(p->value + left_sub(p->lo, r));
    }
    for (const auto& t : T.tensor_terms())
        for (const auto& [p, c] : t.mu.atoms)
            if (!p.is_top()) fixed.push_back(p);

    std::optional<Ordinal> len;
    if (end) len = left_sub(r, *end);

    std::set<Ordinal> deltas;
    auto put = [&](const Ordinal& d) {
        if (!len || d < *len) deltas.insert(d);
    };
    std::vector<Ordinal> zone_starts{Ordinal()};
    for (size_t i = 0; i < trans.size(); ++i)
        for (size_t j = i + 1; j < trans.size(); ++j)
            if (trans[i] != trans[j])
                zone_starts.push_back(
                    Ordinal::omega_pow(largest_diff_exp(trans[i], trans[j]) + Ordinal(1)));
    for (const auto& z : zone_starts)
        for (size_t m = 0; m <= K; ++m) put(z + Ordinal(static_cast<unsigned long long>(m)));
    for (const auto& f : trans)
        for (const auto& p : fixed)
            if (f <= p) put(left_sub(f, p));

    std::vector<Ordinal> pts;
    pts.reserve(deltas.size());
    for (const auto& d : deltas) pts.push_back(r + d);
    return pts;
}

}  // namespace

std::optional<Ordinal> nonzero_row_witness(const OperatorExpr& D) {
    std::vector<Ordinal> starts = region_starts(D);
    size_t K = collision_budget(D);
    std::set<Ordinal> pts;
    for (size_t i = 0; i < starts.size(); ++i) {
        std::optional<Ordinal> end;
        if (i + 1 < starts.size()) end = starts[i + 1];
        for (const auto& a : region_points(D, starts[i], end, K)) pts.insert(a);
    }
    if (!D.is_plain()) {
        // Schemes: enrich with sampled instance boundaries (semi-decision).
        for (const auto& t : D.comp_terms())
            for (const auto& b : t.phi.sample_boundaries())
                for (size_t m = 0; m <= K; ++m) {
                    Ordinal a = b.is_top() ? b : b + Ordinal(static_cast<unsigned long long>(m));
                    if (!a.is_top()) pts.insert(a);
                }
    }
    pts.insert(Ordinal::top());
    for (const auto& a : pts)
        if (!D.row(a).is_zero()) return a;
    return std::nullopt;
}

Rational OperatorExpr::norm() const {
    if (comps_.empty() && tensors_.empty()) return 0;
    std::vector<Ordinal> starts = region_starts(*this);
    size_t K = collision_budget(*this);
    std::set<Ordinal> pts;
    auto put_near = [&](const Ordinal& b) {
        if (b.is_top()) return;
        for (size_t m = 0; m <= K; ++m) pts.insert(b + Ordinal(static_cast<unsigned long long>(m)));
    };
    for (const auto& r : starts) put_near(r);
    if (!is_plain())
        for (const auto& t : comps_)
            for (const auto& b : t.phi.sample_boundaries()) put_near(b);
    pts.insert(Ordinal::top());

    Rational best = 0;
    for (const auto& a : pts) best = std::max(best, row(a).norm());

    if (!is_plain()) {
        // Certify against the exact upper bound sum |w_i| + |g_j|*|mu_j|,
        // which the row norm attains at every collision-free point.
        StepFunction bound;
        for (const auto& t : comps_) bound = bound + abs_step(t.w);
        for (const auto& t : tensors_) bound = bound + t.mu.norm() * abs_step(t.g);
        if (best != bound.sup_abs())
            throw OrdinalError(
                "operator norm not certified: schematic operator with "
                "cancellations outside the candidate set");
    }
    return best;
}

// ------------------------------------------------------------------ equality

EqualsReport op_equals(const OperatorExpr& S, const OperatorExpr& T) {
    OperatorExpr D = S - T;
    EqualsReport rep;
    rep.exact = D.is_plain();
    std::optional<Ordinal> w = nonzero_row_witness(D);
    if (!rep.exact && !w) {
        // Schemes: also probe generators 1_{[0,s]} at all sampled boundaries.
        std::set<Ordinal> gens{Ordinal(), Ordinal(1),        Ordinal::omega(),
                               Ordinal::omega() + Ordinal(1), Ordinal::top()};
        gens.insert(Ordinal::omega_pow(Ordinal(2)));
        gens.insert(Ordinal::omega_pow(Ordinal::omega()));
        for (const auto& b : D.sample_boundaries()) gens.insert(b);
        for (const auto& s : gens) {
            StepFunction g = StepFunction::initial_indicator(s);
            if (!D.apply(g).is_zero()) {
                rep.equal = false;
                rep.witness_generator = g;
                return rep;
            }
        }
    }
    if (!w) {
        rep.equal = true;
        return rep;
    }
    rep.equal = false;
    rep.witness_point = *w;
    Functional r = D.row(*w);
    rep.witness_generator = StepFunction::initial_indicator(r.atoms.front().first);
    return rep;
}

// ------------------------------------------------------------------ sampling

std::vector<Ordinal> OperatorExpr::sample_boundaries() const {
    std::set<Ordinal> s;
    s.insert(Ordinal());
    s.insert(Ordinal::top());
    for (const auto& t : comps_) {
        for (const auto& c : t.w.cuts()) s.insert(c);
        for (const auto& b : t.phi.sample_boundaries()) s.insert(b);
    }
    for (const auto& t : tensors_) {
        for (const auto& c : t.g.cuts()) s.insert(c);
        for (const auto& [p, c] : t.mu.atoms) s.insert(p);
    }
    return {s.begin(), s.end()};
}

// --------------------------------------------------------------- validation

RudinReport rudin_validate(const OperatorExpr& T) {
    RudinReport rep;
    std::set<Ordinal> samples;
    for (const auto& b : T.sample_boundaries()) {
        samples.insert(b);
        if (!b.is_top()) {
            samples.insert(b + Ordinal(1));
            samples.insert(b + Ordinal(2));
        }
    }
    for (const auto& a : samples) {
        if (a.is_top()) continue;
        StepFunction col = T.column(a);
        bool succ_or_zero = a.is_zero() || a.is_successor();
        auto cw = col.continuity_witness();
        if (succ_or_zero && cw && !rep.discontinuous_column) rep.discontinuous_column = a;
        bool jump_at_top = !col.cuts().empty() && col.cuts().back().is_top();
        if (jump_at_top && !rep.column_jump_at_top) rep.column_jump_at_top = a;
    }
    StepFunction colW = T.column(Ordinal::top());
    auto cw = colW.continuity_witness();
    if (cw && !cw->is_top()) rep.final_column_ok = false;
    rep.final_column_limit = colW.left_limit(Ordinal::top());
    return rep;
}

Ordinal row_support_sup(const OperatorExpr& T, const Ordinal& a) {
    Ordinal best;
    auto bump = [&](const Ordinal& v) {
        if (best < v) best = v;
    };
    for (const auto& t : T.comp_terms()) {
        if (!t.phi.is_plain()) {
            bump(t.phi.image_sup_up_to(a));
            continue;
        }
        const auto& cuts = t.w.cuts();
        const auto& vals = t.w.values();
        for (size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] == 0) continue;
            Ordinal rlo = i == 0 ? Ordinal() : cuts[i - 1];
            std::optional<Ordinal> rend;
            if (i < cuts.size()) rend = cuts[i];
            for (const auto& p : t.phi.plains()) {
                Ordinal lo = std::max(p.lo, rlo);
                std::optional<Ordinal> end = p.end;
                if (rend && (!end || *rend < *end)) end = rend;
                if ((end && !(lo < *end)) || a < lo) continue;
                if (p.is_const) {
                    bump(p.value);
                    continue;
                }
                bool clipped = !a.is_top() && (!end || a + Ordinal(1) < *end);
                if (clipped)
                    bump(p.value + left_sub(p.lo, a));
                else if (!end)
                    bump(Ordinal::top());
                else if (end->is_successor())
                    bump(p.value + left_sub(p.lo, end->predecessor()));
                else
                    bump(p.value + left_sub(p.lo, *end));  // open sup
            }
        }
    }
    for (const auto& t : T.tensor_terms()) {
        const auto& cuts = t.g.cuts();
        const auto& vals = t.g.values();
        bool live = false;
        for (size_t i = 0; i < vals.size() && !live; ++i) {
            Ordinal rlo = i == 0 ? Ordinal() : cuts[i - 1];
            if (vals[i] != 0 && rlo <= a) live = true;
        }
        if (live)
            for (const auto& [p, c] : t.mu.atoms) bump(p);
    }
    return best;
}

Ordinal column_support_sup(const OperatorExpr& T, const Ordinal& b) {
    Ordinal best;
    auto bump = [&](const Ordinal& v) {
        if (best < v) best = v;
    };
    StepFunction initial = StepFunction::initial_indicator(b);
    for (const auto& t : T.comp_terms()) {
        auto s = (t.w * t.phi.pullback(initial)).support_sup();
        if (s) bump(*s);
    }
    for (const auto& t : T.tensor_terms()) {
        bool hit = false;
        for (const auto& [p, c] : t.mu.atoms)
            if (p <= b) hit = true;
        if (!hit) continue;
        auto s = t.g.support_sup();
        if (s) bump(*s);
    }
    return best;
}

std::string RudinReport::str() const {
    std::ostringstream os;
    os << "rows summable: " << (rows_summable ? "yes" : "no") << "\n";
    os << "columns at 0/successors continuous: "
       << (discontinuous_column ? "no (column " + discontinuous_column->str() + ")" : "yes")
       << "\n";
    os << "countable columns continuous at W: "
       << (column_jump_at_top ? "no (column " + column_jump_at_top->str() + ")" : "yes")
       << "\n";
    os << "final column continuous on [0, W): " << (final_column_ok ? "yes" : "no")
       << " (left limit " << format_rational(final_column_limit) << ")\n";
    os << "verdict: " << (all_pass() ? "pass" : "fail");
    return os.str();
}

// ------------------------------------------------------------- serialization

std::string OperatorExpr::str() const {
    if (comps_.empty() && tensors_.empty()) return "0*I";
    std::vector<std::string> parts;
    for (const auto& t : comps_)
        parts.push_back("comp(" + t.w.str() + "; " + t.phi.str() + ")");
    for (const auto& t : tensors_)
        parts.push_back("tensor(" + t.g.str() + "; " + t.mu.str() + ")");
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " + ";
        out += parts[i];
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\n");
    return s.substr(a, b - a + 1);
}

// Split on a separator at bracket depth zero.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[' || ch == '{') ++depth;
        if (ch == ')' || ch == ']' || ch == '}') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

size_t matching_paren(const std::string& s, size_t open) {
    int depth = 0;
    for (size_t i = open; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) return i;
    }
    throw OrdinalError("unbalanced parentheses in operator expression");
}

OperatorExpr parse_prim(const std::string& raw) {
    std::string s = trim(raw);
    if (s == "I") return OperatorExpr::identity();
    auto inner_of = [&](size_t head) {
        size_t close = matching_paren(s, head);
        if (close != s.size() - 1)
            throw OrdinalError("trailing input after operator primitive: " + s);
        return s.substr(head + 1, close - head - 1);
    };
    if (s.rfind("Pt(", 0) == 0) return OperatorExpr::Ptilde(parse_ordinal(inner_of(2)));
    if (s.rfind("P(", 0) == 0) return OperatorExpr::P(parse_ordinal(inner_of(1)));
    if (s.rfind("comp(", 0) == 0) {
        auto parts = split_top(inner_of(4), ';');
        if (parts.size() != 2) throw OrdinalError("comp expects `step; map`: " + s);
        return OperatorExpr::comp(parse_step(trim(parts[0])), parse_map(trim(parts[1])));
    }
    if (s.rfind("tensor(", 0) == 0) {
        auto parts = split_top(inner_of(6), ';');
        if (parts.size() != 2) throw OrdinalError("tensor expects `step; functional`: " + s);
        return OperatorExpr::tensor(parse_step(trim(parts[0])),
                                    parse_functional(trim(parts[1])));
    }
    if (!s.empty() && s[0] == '(') {
        size_t close = matching_paren(s, 0);
        OperatorExpr left = parse_operator(s.substr(1, close - 1));
        std::string rest = trim(s.substr(close + 1));
        if (rest.empty() || rest[0] != '.')
            throw OrdinalError("expected `.` between composed operators: " + s);
        rest = trim(rest.substr(1));
        if (rest.empty() || rest.front() != '(' || matching_paren(rest, 0) != rest.size() - 1)
            throw OrdinalError("expected parenthesized right factor: " + s);
        OperatorExpr right = parse_operator(rest.substr(1, rest.size() - 2));
        return OperatorExpr::compose(left, right);
    }
    throw OrdinalError("unrecognized operator primitive: " + s);
}

}  // namespace

Functional parse_functional(const std::string& text) {
    std::string s = trim(text);
    if (s == "0") return Functional();
    Functional out;
    for (const auto& part : split_top(s, '+')) {
        std::string a = trim(part);
        Rational c = 1;
        if (a.rfind("e(", 0) != 0) {
            size_t star = a.find('*');
            if (star == std::string::npos)
                throw OrdinalError("functional atom must be `c*e(ord)`: " + a);
            c = parse_rational(trim(a.substr(0, star)));
            a = trim(a.substr(star + 1));
        }
        if (a.rfind("e(", 0) != 0 || a.back() != ')')
            throw OrdinalError("functional atom must be `c*e(ord)`: " + std::string(part));
        out = out + Functional::point(parse_ordinal(a.substr(2, a.size() - 3)), c);
    }
    return out;
}

OperatorExpr parse_operator(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw OrdinalError("empty operator expression");
    OperatorExpr total;
    for (const auto& part : split_top(s, '+')) {
        std::string a = trim(part);
        if (a.empty()) throw OrdinalError("empty operator term");
        Rational c = 1;
        if (std::isdigit(static_cast<unsigned char>(a[0])) || a[0] == '-') {
            size_t star = a.find('*');
            if (star == std::string::npos)
                throw OrdinalError("scalar term must be `c*prim`: " + a);
            c = parse_rational(trim(a.substr(0, star)));
            a = trim(a.substr(star + 1));
        }
        total = total + c * parse_prim(a);
    }
    return total;
}

}  // namespace ordcalc

#include "ordcalc/factorize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ordcalc/ideals.hpp"

namespace ordcalc {

FactorizeOptions::FactorizeOptions() : truncation(Ordinal::omega_pow(Ordinal(3))) {}

namespace {

std::optional<Ordinal> try_left_sub(const Ordinal& a, const Ordinal& b) {
    if (!(a <= b)) return std::nullopt;
    return left_sub(a, b);
}

// Leading CNF term of a nonzero countable ordinal, as an ordinal.
Ordinal lead_term(const Ordinal& x) {
    return Ordinal::omega_pow(x.terms()[0].exponent) * Ordinal(x.terms()[0].coeff);
}

// Least m with m * step == target, if any (monotone search).
std::optional<Ordinal> solve_mul(const Ordinal& step, const Ordinal& target) {
    if (step.is_zero()) return std::nullopt;
    auto r = least_satisfying([&](const Ordinal& m) { return target <= m * step; }, target);
    if (r && *r * step == target) return r;
    return std::nullopt;
}

// Signals that the index recursion left the certifiable regime; callers fall
// back to the truncated representation.
struct TruncationNeeded {
    std::string why;
};

// Supremum of f over [0, lam) along the fundamental sequence of lam, by CNF
// shape stabilization. Any tail of the probes has the same supremum, so late
// stabilization (after a finite irregular prefix) is retried on the tail.
Ordinal sup_along_fs(const std::function<Ordinal(const Ordinal&)>& f, const Ordinal& lam,
                     int depth = 8) {
    std::vector<Ordinal> distinct;
    for (int k = 1; k <= depth; ++k) {
        Ordinal p = f(fundamental_sequence(lam, static_cast<unsigned>(k)));
        if (!distinct.empty() && p < distinct.back())
            throw TruncationNeeded{"sequence not monotone below " + lam.str()};
        if (distinct.empty() || !(distinct.back() == p)) distinct.push_back(p);
    }
    if (distinct.size() == 1) return distinct[0];
    if (distinct.size() >= 3) {
        if (auto r = stabilized_sup(distinct)) return *r;
        std::vector<Ordinal> tail(distinct.end() - distinct.size() / 2, distinct.end());
        if (tail.size() >= 3)
            if (auto r = stabilized_sup(tail)) return *r;
    }
    if (depth < 32) return sup_along_fs(f, lam, depth * 4);
    throw TruncationNeeded{"no stable CNF shape below " + lam.str()};
}

// ---------------------------------------------------------------------------
// exact (memoized) evaluation of the index recursion

class HonestRecursion {
public:
    explicit HonestRecursion(const OperatorExpr& T2) : T2_(T2) {}
    Ordinal eta(const Ordinal& s) { return get(s).first; }
    Ordinal xi(const Ordinal& s) { return get(s).second; }

private:
    OperatorExpr T2_;
    std::map<Ordinal, std::pair<Ordinal, Ordinal>> memo_;
    int steps_ = 0;

    std::pair<Ordinal, Ordinal> get(const Ordinal& s) {
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        if (++steps_ > 20000) throw TruncationNeeded{"recursion budget exceeded"};
        if (s.is_top()) throw TruncationNeeded{"recursion index reached W"};
        std::pair<Ordinal, Ordinal> r;
        const Ordinal w = Ordinal::omega();
        if (s.is_zero()) {
            r = {Ordinal(), Ordinal()};
        } else if (s.is_successor()) {
            auto prev = get(s.predecessor());
            Ordinal e = std::max(prev.first + w, column_support_sup(T2_, prev.second)) + Ordinal(1);
            Ordinal x = std::max(prev.second + Ordinal(1), row_support_sup(T2_, e + w));
            r = {e, x};
        } else {
            Ordinal e = sup_along_fs([&](const Ordinal& t) { return get(t).first; }, s);
            Ordinal sx = sup_along_fs([&](const Ordinal& t) { return get(t).second; }, s);
            Ordinal x = std::max(sx, row_support_sup(T2_, e + w));
            r = {e, x};
        }
        if (r.first.is_top() || r.second.is_top())
            throw TruncationNeeded{"support supremum reaches W at stage " + s.str()};
        memo_[s] = r;
        return r;
    }
};

// ---------------------------------------------------------------------------
// closed tail forms

// One regime of a closed form: affine mul*(s - shift) + off, or the omega
// power of such an exponent plus a constant.
struct TailForm {
    bool power = false;
    Ordinal shift, mul, off, add;

    Ordinal eval(const Ordinal& s) const {
        Ordinal e = mul * left_sub(shift, s) + off;
        return power ? Ordinal::omega_pow(e) + add : e;
    }
    // sup of the values over [shift, lam) for a limit lam above the regime
    // start; the additive tails wash out under the limit (verified by probe
    // checks wherever a closed form is certified).
    Ordinal limit_closure(const Ordinal& lam) const {
        Ordinal e = mul * left_sub(shift, lam);
        return power ? Ordinal::omega_pow(e) : e;
    }
};

std::string tail_str(const TailForm& f) {
    std::string d = f.shift.is_zero() ? "s" : "(s - " + f.shift.str() + ")";
    auto aff = [&](const Ordinal& mul, const Ordinal& off) {
        std::string r = mul.str() + "*" + d;
        if (!off.is_zero()) r += " + " + off.str();
        return r;
    };
    if (!f.power) return aff(f.mul, f.off);
    std::string r = "w^(" + aff(f.mul, f.off) + ")";
    if (!f.add.is_zero()) r += " + " + f.add.str();
    return r;
}

std::optional<TailForm> fit_affine(const std::vector<std::pair<Ordinal, Ordinal>>& samples,
                                   unsigned max_shift) {
    if (samples.size() < 2) return std::nullopt;
    for (unsigned sh = 0; sh <= max_shift; ++sh) {
        Ordinal shift(sh);
        if (samples[0].first < shift) continue;
        std::vector<std::pair<Ordinal, Ordinal>> ds;
        ds.reserve(samples.size());
        for (const auto& [s, v] : samples) ds.push_back({left_sub(shift, s), v});
        std::set<Ordinal> muls;
        for (size_t i = 0; i + 1 < ds.size(); ++i) {
            auto gap = try_left_sub(ds[i].first, ds[i + 1].first);
            auto dv = try_left_sub(ds[i].second, ds[i + 1].second);
            if (!gap || gap->is_zero() || !dv || dv->is_zero()) continue;
            if (auto m = solve_mul(*gap, *dv)) muls.insert(*m);
            if (auto m = solve_mul(*gap, lead_term(*dv))) muls.insert(*m);
        }
        for (const auto& m : muls) {
            auto off = try_left_sub(m * ds[0].first, ds[0].second);
            if (!off) continue;
            bool ok = true;
            for (const auto& [d, v] : ds)
                if (!(m * d + *off == v)) {
                    ok = false;
                    break;
                }
            if (ok) return TailForm{false, shift, m, *off, Ordinal()};
        }
    }
    return std::nullopt;
}

std::optional<TailForm> fit_power(const std::vector<std::pair<Ordinal, Ordinal>>& samples,
                                  unsigned max_shift) {
    std::vector<std::pair<Ordinal, Ordinal>> exps;
    std::optional<Ordinal> add;
    for (const auto& [s, v] : samples) {
        if (v.is_zero() || v.is_top() || v.terms()[0].coeff != 1) return std::nullopt;
        Ordinal e = v.leading_exponent();
        if (e.is_zero()) return std::nullopt;
        Ordinal rest = left_sub(Ordinal::omega_pow(e), v);
        if (!add)
            add = rest;
        else if (!(*add == rest))
            return std::nullopt;
        exps.push_back({s, e});
    }
    auto ef = fit_affine(exps, max_shift);
    if (!ef) return std::nullopt;
    TailForm f = *ef;
    f.power = true;
    f.add = *add;
    return f;
}

std::optional<TailForm> fit_tail(const std::vector<std::pair<Ordinal, Ordinal>>& samples,
                                 unsigned max_shift) {
    if (auto a = fit_affine(samples, max_shift)) return a;
    return fit_power(samples, max_shift);
}

// A whole sequence: explicit exceptions plus one tail form per regime.
struct SeqModel {
    std::map<Ordinal, Ordinal> exceptions;
    TailForm fin;       // finite s beyond the exceptions
    TailForm inf_succ;  // transfinite successor s
    TailForm inf_lim;   // transfinite limit s

    Ordinal eval(const Ordinal& s) const {
        auto it = exceptions.find(s);
        if (it != exceptions.end()) return it->second;
        if (s.is_finite()) return fin.eval(s);
        return s.is_successor() ? inf_succ.eval(s) : inf_lim.eval(s);
    }
    // sup of the values below a transfinite limit; below w the finite regime
    // is cofinal, above it the successor regime is.
    Ordinal zeta_closure(const Ordinal& lam) const {
        if (lam == Ordinal::omega()) return fin.limit_closure(lam);
        return inf_succ.limit_closure(lam);
    }
};

std::string model_note(const SeqModel& m) {
    std::ostringstream os;
    os << "finite s: " << tail_str(m.fin) << "; transfinite successor s: " << tail_str(m.inf_succ)
       << "; transfinite limit s: " << tail_str(m.inf_lim) << "; exceptions:";
    for (const auto& [s, v] : m.exceptions) os << " (" << s.str() << ") -> " << v.str() << ";";
    return os.str();
}

std::vector<Ordinal> sample_lattice() {
    std::vector<Ordinal> out;
    for (unsigned s = 0; s <= 10; ++s) out.push_back(Ordinal(s));
    for (const char* t :
         {"w", "w + 1", "w + 2", "w + 3", "w + 4", "w + 5", "w*2", "w*2 + 1", "w*2 + 2", "w*2 + 3",
          "w*3", "w*4", "w^(2)", "w^(2) + 1", "w^(2) + 2", "w^(2) + w", "w^(2) + w + 1", "w^(2)*2",
          "w^(2)*2 + 1"})
        out.push_back(parse_ordinal(t));
    return out;
}

std::optional<SeqModel> fit_model(const std::map<Ordinal, Ordinal>& hv) {
    const Ordinal w = Ordinal::omega();
    auto at = [&](const Ordinal& s) { return hv.at(s); };
    std::vector<std::pair<Ordinal, Ordinal>> is_samp, il_samp;
    for (unsigned k = 1; k <= 5; ++k) is_samp.push_back({w + Ordinal(k), at(w + Ordinal(k))});
    for (unsigned k = 1; k <= 4; ++k) il_samp.push_back({w * Ordinal(k), at(w * Ordinal(k))});
    auto is = fit_tail(is_samp, 0);
    auto il = fit_tail(il_samp, 0);
    if (!is || !il) return std::nullopt;
    for (unsigned fs = 2; fs <= 4; ++fs) {
        std::vector<std::pair<Ordinal, Ordinal>> fsamp;
        for (unsigned s = fs; s <= 9; ++s) fsamp.push_back({Ordinal(s), at(Ordinal(s))});
        auto fin = fit_tail(fsamp, fs);
        if (!fin) continue;
        SeqModel m;
        for (unsigned s = 0; s < fs; ++s) m.exceptions[Ordinal(s)] = at(Ordinal(s));
        m.fin = *fin;
        m.inf_succ = *is;
        m.inf_lim = *il;
        bool ok = true;
        for (const auto& [s, v] : hv)
            if (!(m.eval(s) == v)) {
                ok = false;
                break;
            }
        if (ok) return m;
    }
    return std::nullopt;
}

// Re-verify the fitted forms against the recursion itself: limit continuity
// and suprema, and the successor/limit recursion equations re-evaluated at
// transfinite points far beyond the fitting lattice (the fitted values serve
// as the induction hypotheses there).
void verify_models(const OperatorExpr& T2, const SeqModel& me, const SeqModel& mx,
                   const std::map<Ordinal, Ordinal>& he, const std::map<Ordinal, Ordinal>& hx) {
    const Ordinal w = Ordinal::omega();
    auto eta = [&](const Ordinal& s) { return me.eval(s); };
    auto xi = [&](const Ordinal& s) { return mx.eval(s); };
    for (const auto& [s, v] : he)
        if (!(eta(s) == v)) throw TruncationNeeded{"eta fit mismatch at " + s.str()};
    for (const auto& [s, v] : hx)
        if (!(xi(s) == v)) throw TruncationNeeded{"xi fit mismatch at " + s.str()};
    for (const char* t : {"w", "w*2", "w^(2)", "w^(3)", "w^(w)"}) {
        Ordinal lam = parse_ordinal(t);
        if (!(eta(lam) == sup_along_fs(eta, lam)))
            throw TruncationNeeded{"eta not continuous at " + lam.str()};
        Ordinal zs = sup_along_fs(xi, lam);
        if (!(mx.zeta_closure(lam) == zs))
            throw TruncationNeeded{"zeta closure mismatch at " + lam.str()};
        if (!(xi(lam) == std::max(zs, row_support_sup(T2, eta(lam) + w))))
            throw TruncationNeeded{"xi limit-stage mismatch at " + lam.str()};
    }
    for (const char* t : {"w^(3)", "w^(3) + 1", "w^(w)", "w^(w) + 1"}) {
        Ordinal s = parse_ordinal(t);
        Ordinal e1 = std::max(eta(s) + w, column_support_sup(T2, xi(s))) + Ordinal(1);
        if (!(eta(s + Ordinal(1)) == e1))
            throw TruncationNeeded{"eta successor-stage mismatch at " + s.str()};
        Ordinal x1 = std::max(xi(s) + Ordinal(1), row_support_sup(T2, e1 + w));
        if (!(xi(s + Ordinal(1)) == x1))
            throw TruncationNeeded{"xi successor-stage mismatch at " + s.str()};
    }
    std::vector<Ordinal> chain;
    for (const char* t : {"1", "2", "w", "w + 1", "w*2", "w^(2)", "w^(3)", "w^(w)", "w^(w) + 1"})
        chain.push_back(parse_ordinal(t));
    for (size_t i = 1; i < chain.size(); ++i) {
        if (!(eta(chain[i - 1]) + w < eta(chain[i])))
            throw TruncationNeeded{"eta spacing fails at " + chain[i].str()};
        if (!(xi(chain[i - 1]) < xi(chain[i])))
            throw TruncationNeeded{"xi monotonicity fails at " + chain[i].str()};
    }
}

// Truncated representation: exact values on a finite prefix, then strictly
// increasing pads built from a single omega power P above everything the
// prefix (and the truncation bound) reaches.
void padded_models(HonestRecursion& hr, const Ordinal& bound, SeqModel& me, SeqModel& mx,
                   Ordinal& honest_limit) {
    std::map<Ordinal, Ordinal> he, hx;
    unsigned n = 0;
    try {
        for (unsigned s = 0; s <= 12; ++s) {
            Ordinal o(s);
            he[o] = hr.eta(o);
            hx[o] = hr.xi(o);
            n = s;
            if (s >= 6 && bound < hx[o]) break;
        }
    } catch (const TruncationNeeded&) {
        if (n < 4) throw OrdinalError("index recursion is not evaluable on a finite prefix");
    }
    Ordinal big;
    auto widen = [&](const Ordinal& v) {
        if (v.is_zero() || v.is_top()) return;
        if (big < v.leading_exponent()) big = v.leading_exponent();
    };
    widen(he[Ordinal(n)]);
    widen(hx[Ordinal(n)]);
    widen(bound);
    Ordinal P = Ordinal::omega_pow(big + Ordinal(1));
    auto mk = [&](const std::map<Ordinal, Ordinal>& hv, const Ordinal& off,
                  bool continuous_at_limits) {
        SeqModel m;
        m.exceptions = hv;
        m.fin = TailForm{false, Ordinal(), P, off, Ordinal()};
        m.inf_succ = m.fin;
        m.inf_lim = TailForm{false, Ordinal(), P, continuous_at_limits ? Ordinal() : off, Ordinal()};
        return m;
    };
    me = mk(he, Ordinal(1), true);
    mx = mk(hx, Ordinal::omega() + Ordinal(1), false);
    honest_limit = Ordinal(n);
}

struct ModelData {
    SeqModel eta, xi;
};

// theta's block values: xi at successor indices, zeta at limit indices.
SequenceExpr make_vtheta(const EtaXi& seqs) {
    SequenceExpr xi = seqs.xi, zeta = seqs.zeta;
    return SequenceExpr::opaque(
        [xi, zeta](const Ordinal& i) {
            if (i.is_top()) return Ordinal::top();
            return i.is_successor() ? xi(i) : zeta(i);
        },
        "theta-val", true, true);
}

// Block indices whose surroundings carry certified recursion values; the row
// and generator identities are sampled there.
std::vector<Ordinal> stage_indices(const EtaXi& seqs) {
    std::vector<Ordinal> out;
    for (unsigned k = 1; k <= 3; ++k)
        if (seqs.symbolic || Ordinal(k + 1) <= seqs.honest_limit) out.push_back(Ordinal(k));
    if (seqs.symbolic)
        for (const char* t : {"w", "w + 1", "w^(2)"}) out.push_back(parse_ordinal(t));
    return out;
}

StepFunction gen_at(const Ordinal& b) { return StepFunction::initial_indicator(b); }

}  // namespace

// ---------------------------------------------------------------------------
// the index recursion

EtaXi eta_xi_recursion(const OperatorExpr& T2, const FactorizeOptions& opt) {
    EtaXi out;
    HonestRecursion hr(T2);
    bool symbolic = true;
    SeqModel me, mx;
    std::vector<std::string> notes;
    try {
        std::map<Ordinal, Ordinal> he, hx;
        for (const auto& s : sample_lattice()) {
            he[s] = hr.eta(s);
            hx[s] = hr.xi(s);
        }
        auto ome = fit_model(he);
        auto omx = fit_model(hx);
        if (!ome || !omx) throw TruncationNeeded{"no template form fits the sample lattice"};
        me = *ome;
        mx = *omx;
        verify_models(T2, me, mx, he, hx);
        notes.push_back("eta: " + model_note(me));
        notes.push_back("xi: " + model_note(mx));
        notes.push_back(
            "checks: recursion match on the sample lattice; limit continuity of eta; "
            "zeta suprema; recursion consistency at w^(3) and w^(w); monotone spacing: ok");
    } catch (const TruncationNeeded& t) {
        symbolic = false;
        notes.push_back("no certified closed form (" + t.why + ")");
    } catch (const OrdinalError& e) {
        symbolic = false;
        notes.push_back(std::string("no certified closed form (") + e.what() + ")");
    }
    Ordinal honest_limit = Ordinal::top();
    if (!symbolic) {
        padded_models(hr, opt.truncation, me, mx, honest_limit);
        notes.push_back("exact recursion values through index " + honest_limit.str() +
                        "; strictly increasing padded tail beyond");
    }
    auto md = std::make_shared<const ModelData>(ModelData{me, mx});
    out.eta = SequenceExpr::opaque(
        [md](const Ordinal& s) { return s.is_top() ? Ordinal::top() : md->eta.eval(s); }, "eta",
        true, true);
    out.xi = SequenceExpr::opaque(
        [md](const Ordinal& s) { return s.is_top() ? Ordinal::top() : md->xi.eval(s); }, "xi",
        true, false);
    out.zeta = SequenceExpr::opaque(
        [md](const Ordinal& s) {
            if (s.is_top()) return Ordinal::top();
            if (s.is_zero()) return Ordinal();
            if (s.is_successor()) return md->xi.eval(s.predecessor());
            return md->xi.zeta_closure(s);
        },
        "zeta", true, true);
    out.symbolic = symbolic;
    out.honest_limit = honest_limit;
    out.notes = notes;
    return out;
}

// ---------------------------------------------------------------------------
// stages 1 and 2

std::pair<OperatorExpr, Ordinal> reduce_T1(const OperatorExpr& T) {
    if (in_loy_willis(T).verdict)
        throw OrdinalError("factorization requires an operator outside M "
                           "(the final column must jump at W)");
    Functional fr = T.row(Ordinal::top());
    Ordinal rho;
    for (const auto& [p, c] : fr.atoms)
        if (!p.is_top() && rho < p) rho = p;
    OperatorExpr T1 =
        OperatorExpr::compose(T, OperatorExpr::identity() - OperatorExpr::P(rho));
    if (!(T1.column(Ordinal::top()) == T.column(Ordinal::top())))
        throw OrdinalError("tail cut changed the final column");
    for (const auto& [p, c] : T1.row(Ordinal::top()).atoms)
        if (!p.is_top())
            throw OrdinalError("tail cut left countable final-row support at " + p.str());
    return {T1, rho};
}

CornerReduction reduce_T2(const OperatorExpr& T1) {
    StepFunction col = T1.column(Ordinal::top());
    Rational cw = col(Ordinal::top());
    Rational lim = col.left_limit(Ordinal::top());
    Rational c = cw - lim;
    if (c == 0) throw OrdinalError("final column of T1 has no jump at W");
    StepFunction g =
        col + (lim - cw) * StepFunction::indicator(Ordinal::top(), Ordinal::top());
    if (auto d = g.continuity_witness())
        throw OrdinalError("final column of T1 is discontinuous at " + d->str());
    OperatorExpr G = OperatorExpr::tensor(g, Functional::point(Ordinal::top()));
    OperatorExpr T2 = Rational(1) / c * (T1 - G);
    if (!(T2.column(Ordinal::top()) ==
          StepFunction::indicator(Ordinal::top(), Ordinal::top())))
        throw OrdinalError("corner normalization: final column of T2 is not 1_{W}");
    if (!(T2.row(Ordinal::top()) == Functional::point(Ordinal::top())))
        throw OrdinalError("corner normalization: final row of T2 is not e(W)");
    return {T2, c, g, G};
}

// ---------------------------------------------------------------------------
// stage 3: collapse projection and enumeration isometry

PhiXi build_phi_xi(const EtaXi& seqs) {
    const Ordinal w = Ordinal::omega();
    SequenceExpr xi = seqs.xi, zeta = seqs.zeta;
    Ordinal xi0 = xi(Ordinal());
    auto succ_lo = SequenceExpr::opaque(
        [xi](const Ordinal& t) { return xi(t) + Ordinal(1); }, "xi(s)+1", true, false);
    auto succ_end = SequenceExpr::opaque(
        [xi](const Ordinal& t) { return xi(t + Ordinal(1)) + Ordinal(1); }, "xi(s+1)+1", true,
        false);
    auto succ_val = SequenceExpr::opaque(
        [xi](const Ordinal& t) { return xi(t + Ordinal(1)); }, "xi(s+1)", true, false);
    auto lim_lo = SequenceExpr::opaque(
        [zeta, w](const Ordinal& j) { return zeta(w * j); }, "zeta(w*s)", true, true);
    auto lim_end = SequenceExpr::opaque(
        [xi, w](const Ordinal& j) { return xi(w * j) + Ordinal(1); }, "xi(w*s)+1", true, false);
    PwMap::Scheme succ{Ordinal(0), Ordinal::top(), succ_lo, succ_end, true, succ_val};
    PwMap::Scheme lim{Ordinal(1), Ordinal::top(), lim_lo, lim_end, true, lim_lo};
    PwMap phi = PwMap::make(
        {PwMap::Plain{Ordinal(0), xi0 + Ordinal(1), true, xi0},
         PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {succ, lim});
    OperatorExpr Phi = OperatorExpr::comp(StepFunction::constant(1), phi);
    if (!op_equals(OperatorExpr::compose(Phi, Phi), Phi).equal)
        throw OrdinalError("collapse projection is not idempotent");
    if (!(Phi.norm() == 1)) throw OrdinalError("collapse projection norm is not 1");
    return {phi, Phi};
}

OperatorExpr build_U(const EtaXi& seqs) {
    const Ordinal w = Ordinal::omega();
    SequenceExpr xi = seqs.xi, zeta = seqs.zeta;
    Ordinal xi0 = xi(Ordinal());
    auto succ_lo = SequenceExpr::opaque(
        [xi](const Ordinal& t) { return xi(t) + Ordinal(1); }, "xi(s)+1", true, false);
    auto succ_end = SequenceExpr::opaque(
        [xi](const Ordinal& t) { return xi(t + Ordinal(1)) + Ordinal(1); }, "xi(s+1)+1", true,
        false);
    auto lim_lo = SequenceExpr::opaque(
        [zeta, w](const Ordinal& j) { return zeta(w * j); }, "zeta(w*s)", true, true);
    auto lim_end = SequenceExpr::opaque(
        [xi, w](const Ordinal& j) { return xi(w * j) + Ordinal(1); }, "xi(w*s)+1", true, false);
    PwMap::Scheme succ{Ordinal(0), Ordinal::top(), succ_lo, succ_end, true,
                       SequenceExpr::add(SequenceExpr::var(), SequenceExpr::constant(Ordinal(1)))};
    PwMap::Scheme lim{Ordinal(1), Ordinal::top(), lim_lo, lim_end, true,
                      SequenceExpr::mul(SequenceExpr::constant(w), SequenceExpr::var())};
    PwMap psi = PwMap::make(
        {PwMap::Plain{Ordinal(0), xi0 + Ordinal(1), true, Ordinal(0)},
         PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {succ, lim});
    OperatorExpr U = OperatorExpr::comp(StepFunction::constant(1), psi);
    if (!(U.norm() == 1)) throw OrdinalError("xi-enumeration operator norm is not 1");
    for (const char* t : {"0", "1", "2", "w"}) {
        Ordinal s = parse_ordinal(t);
        if (!(U.apply(gen_at(s)) == gen_at(xi(s))))
            throw OrdinalError("xi-enumeration fails at generator " + s.str());
    }
    return U;
}

// ---------------------------------------------------------------------------
// stage 4: the block set H and its order isomorphism

HThetaPsi build_H_theta_psi(const EtaXi& seqs) {
    const Ordinal w = Ordinal::omega();
    SequenceExpr eta = seqs.eta;
    auto upper = SequenceExpr::opaque(
        [eta, w](const Ordinal& s) { return eta(s) + w; }, "eta(s)+w", true, false);
    ClosedSetExpr H;
    H.blocks = ClosedSetExpr::Blocks{Ordinal(1), Ordinal::top(), eta, upper};
    H.contains_top = true;
    auto rep = is_closed(H);
    if (!rep.closed)
        throw OrdinalError("block set H is not closed" +
                           (rep.witness ? "; witness " + rep.witness->str() : std::string()));
    PwMap psi_H = order_iso(H);
    SequenceExpr vth = make_vtheta(seqs);
    auto eta_next = SequenceExpr::opaque(
        [eta](const Ordinal& s) { return eta(s + Ordinal(1)); }, "eta(s+1)", true, false);
    // total extension of the block-value map: each value persists up to the
    // next block (only the restriction to H is ever used)
    PwMap theta = PwMap::make(
        {PwMap::Plain{Ordinal(0), eta(Ordinal(1)), true, Ordinal(0)},
         PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {PwMap::Scheme{Ordinal(1), Ordinal::top(), eta, eta_next, true, vth}});
    // theta o psi_H in product form: block s - 1 of the domain is
    // [(w+1)*(s-1), (w+1)*s), sent to the value of block s
    Ordinal wp1 = w + Ordinal(1);
    auto tp_lo = SequenceExpr::opaque(
        [wp1](const Ordinal& i) { return wp1 * left_sub(Ordinal(1), i); }, "(w+1)*(s-1)", true,
        true);
    auto tp_end = SequenceExpr::opaque(
        [wp1](const Ordinal& i) { return wp1 * (left_sub(Ordinal(1), i) + Ordinal(1)); },
        "(w+1)*s", true, false);
    PwMap theta_psi = PwMap::make(
        {PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {PwMap::Scheme{Ordinal(1), Ordinal::top(), tp_lo, tp_end, true, vth}});
    for (const char* t : {"0", "1", "5", "w", "w + 1", "w*2 + 2", "w^(2)", "w^(2) + 3", "W"}) {
        Ordinal a = parse_ordinal(t);
        if (!(theta_psi(a) == theta(psi_H(a))))
            throw OrdinalError("theta o psi_H mismatch at " + a.str());
    }
    OperatorExpr Psi_H = OperatorExpr::comp(StepFunction::constant(1), psi_H);
    if (!(Psi_H.norm() == 1)) throw OrdinalError("order-isomorphism operator norm is not 1");
    return {H, psi_H, theta, theta_psi, Psi_H};
}

// ---------------------------------------------------------------------------
// stage 5

Stage5 assemble_T5(const OperatorExpr& T2, const PhiXi& phi, const HThetaPsi& h,
                   const EtaXi& seqs, std::vector<std::string>* transcript) {
    const Ordinal w = Ordinal::omega();
    const Ordinal W = Ordinal::top();
    auto note = [&](const std::string& s) {
        if (transcript) transcript->push_back(s);
    };
    Stage5 st;
    st.T3 = OperatorExpr::compose(T2, phi.Phi);
    if (!(st.T3.row(W) == Functional::point(W)))
        throw OrdinalError("final row of T3 is not e(W)");
    SequenceExpr vth = make_vtheta(seqs);
    for (const auto& i : stage_indices(seqs)) {
        Ordinal v = vth(i), e = seqs.eta(i);
        for (const Ordinal& alpha : {e, e + Ordinal(1), e + w}) {
            for (const auto& [p, c] : st.T3.row(alpha).atoms)
                if (!(p == v))
                    throw OrdinalError("row of T3 at " + alpha.str() + " is supported at " +
                                       p.str() + ", expected " + v.str());
        }
    }
    note("check single-support rows of T3 over the blocks: ok");
    st.T4 = OperatorExpr::compose(h.Psi_H, st.T3);
    StepFunction u = st.T4.apply(StepFunction::constant(1));
    if (!(u(W) == 1)) throw OrdinalError("T4(1) does not take value 1 at W");
    st.chi = u.cuts().empty() ? Ordinal(0) : u.cuts().back();
    if (st.chi.is_top()) throw OrdinalError("T4(1) is not eventually 1 below W");
    st.Q = OperatorExpr::identity() - OperatorExpr::P(st.chi) +
           OperatorExpr::tensor(StepFunction::initial_indicator(st.chi),
                                Functional::point(st.chi));
    st.T5 = OperatorExpr::compose(st.Q, st.T4);
    Ordinal wp1 = w + Ordinal(1);
    std::set<Ordinal> alphas{Ordinal(0), Ordinal(1), st.chi, st.chi + Ordinal(1)};
    for (const auto& i : stage_indices(seqs)) {
        Ordinal lo = wp1 * left_sub(Ordinal(1), i);
        alphas.insert(lo);
        alphas.insert(lo + Ordinal(1));
    }
    for (const auto& alpha : alphas) {
        Ordinal target = h.theta_psi(alpha < st.chi ? st.chi : alpha);
        if (!(st.T5.row(alpha) == Functional::point(target)))
            throw OrdinalError("row of T5 at " + alpha.str() + " is not e(" + target.str() + ")");
    }
    if (!(st.T5.row(W) == Functional::point(W)))
        throw OrdinalError("final row of T5 is not e(W)");
    if (!(st.T5.column(W) == StepFunction::indicator(W, W)))
        throw OrdinalError("final column of T5 is not 1_{W}");
    if (!(st.T5.apply(StepFunction::constant(1)) == StepFunction::constant(1)))
        throw OrdinalError("T5 does not fix the constant 1");
    note("check T5 rows, final row and column, and T5(1) = 1: ok");
    return st;
}

// ---------------------------------------------------------------------------
// stage 6: enumeration of the live columns and the factor identity

void gamma_and_factor(FactorizationState& st, FactorizationCertificate& cert,
                      const FactorizeOptions& opt) {
    const Ordinal w = Ordinal::omega();
    const Ordinal W = Ordinal::top();
    const Ordinal wp1 = w + Ordinal(1);
    auto note = [&](const std::string& s) { cert.transcript.push_back(s); };
    Ordinal chi = st.stage5.chi;
    st.gamma_chi =
        *least_satisfying([&](const Ordinal& g) { return chi < wp1 * (g + Ordinal(1)); }, chi);
    SequenceExpr vth = make_vtheta(st.seqs);
    Ordinal gc = st.gamma_chi;
    st.mu = SequenceExpr::opaque(
        [vth, gc](const Ordinal& s) {
            return s.is_top() ? Ordinal::top() : vth(Ordinal(1) + gc + s);
        },
        "mu", true, true);
    st.nu = SequenceExpr::opaque(
        [wp1, gc, w](const Ordinal& s) {
            return s.is_top() ? Ordinal::top() : wp1 * (gc + s) + w;
        },
        "nu", true, false);
    note("gamma_chi = " + gc.str());
    note("mu(0) = " + st.mu(Ordinal()).str() + ", nu(0) = " + st.nu(Ordinal()).str());

    std::vector<Ordinal> sig;
    for (unsigned k = 0; k <= 2; ++k) {
        Ordinal s(k);
        if (st.seqs.symbolic || Ordinal(1) + gc + s + Ordinal(1) <= st.seqs.honest_limit)
            sig.push_back(s);
    }
    if (st.seqs.symbolic)
        for (const char* t : {"w", "w + 1", "w^(2)"}) sig.push_back(parse_ordinal(t));
    if (sig.empty()) sig.push_back(Ordinal(0));
    for (const auto& s : sig)
        if (!(st.stage5.T5.apply(gen_at(st.mu(s))) == gen_at(st.nu(s))))
            throw OrdinalError("T5 does not map 1_{[0,mu]} to 1_{[0,nu]} at stage " + s.str());
    note("check T5 maps mu-generators to nu-generators: ok");

    SequenceExpr mu = st.mu;
    auto mu_succ_lo = SequenceExpr::opaque(
        [mu](const Ordinal& t) { return mu(t) + Ordinal(1); }, "mu(s)+1", true, false);
    auto mu_succ_end = SequenceExpr::opaque(
        [mu](const Ordinal& t) { return mu(t + Ordinal(1)) + Ordinal(1); }, "mu(s+1)+1", true,
        false);
    auto mu_lim_lo = SequenceExpr::opaque(
        [mu, w](const Ordinal& j) { return mu(w * j); }, "mu(w*s)", true, true);
    auto mu_lim_end = SequenceExpr::opaque(
        [mu, w](const Ordinal& j) { return mu(w * j) + Ordinal(1); }, "mu(w*s)+1", true, false);
    PwMap psi_M = PwMap::make(
        {PwMap::Plain{Ordinal(0), mu(Ordinal()) + Ordinal(1), true, Ordinal(0)},
         PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {PwMap::Scheme{Ordinal(0), Ordinal::top(), mu_succ_lo, mu_succ_end, true,
                       SequenceExpr::add(SequenceExpr::var(), SequenceExpr::constant(Ordinal(1)))},
         PwMap::Scheme{Ordinal(1), Ordinal::top(), mu_lim_lo, mu_lim_end, true,
                       SequenceExpr::mul(SequenceExpr::constant(w), SequenceExpr::var())}});
    st.U_M = OperatorExpr::comp(StepFunction::constant(1), psi_M);
    if (!(st.U_M.norm() == 1)) throw OrdinalError("mu-enumeration operator norm is not 1");
    for (const char* t : {"0", "1", "2", "w"}) {
        Ordinal s = parse_ordinal(t);
        if (!(st.U_M.apply(gen_at(s)) == gen_at(st.mu(s))))
            throw OrdinalError("mu-enumeration fails at generator " + s.str());
    }

    PwMap psi_nu = PwMap::make(
        {PwMap::Plain{Ordinal::top(), std::nullopt, true, Ordinal::top()}},
        {PwMap::Scheme{Ordinal(0), Ordinal::top(), SequenceExpr::var(),
                       SequenceExpr::add(SequenceExpr::var(), SequenceExpr::constant(Ordinal(1))),
                       true, st.nu}});
    st.V_N = OperatorExpr::comp(StepFunction::constant(1), psi_nu);
    for (unsigned k = 0; k <= 2; ++k) {
        Ordinal s(k);
        if (!(st.V_N.apply(gen_at(st.nu(s))) == gen_at(s)))
            throw OrdinalError("nu-inversion fails at stage " + s.str());
    }
    note("check enumeration isometries U_M, V_N on samples: ok");

    OperatorExpr VTU = OperatorExpr::compose(
        st.V_N, OperatorExpr::compose(st.stage5.T5, st.U_M));
    for (const auto& s : sig)
        if (!(VTU.apply(gen_at(s)) == gen_at(s)))
            throw OrdinalError("V_N T5 U_M does not fix the generator at " + s.str());
    if (!(VTU.apply(StepFunction::constant(1)) == StepFunction::constant(1)))
        throw OrdinalError("V_N T5 U_M does not fix the constant 1");
    note("check V_N * T5 * U_M fixes the sampled generators: ok");

    OperatorExpr PhiU = OperatorExpr::compose(st.phi.Phi, st.U_M);
    cert.R = OperatorExpr::compose(OperatorExpr::identity() - OperatorExpr::P(st.rho), PhiU);
    OperatorExpr VQPsi = OperatorExpr::compose(
        st.V_N, OperatorExpr::compose(st.stage5.Q, st.h.Psi_H));
    cert.S = Rational(1) / st.c * VQPsi;
    cert.F = -OperatorExpr::compose(cert.S, OperatorExpr::compose(st.G, PhiU));

    std::set<Ordinal> gens{Ordinal(0), Ordinal(1)};
    for (const char* t : {"w", "w + 1", "w^(2)", "w^(w)"}) gens.insert(parse_ordinal(t));
    for (const auto& b : st.T.sample_boundaries())
        if (!b.is_top()) gens.insert(b);
    gens.insert(W);
    if (!st.seqs.symbolic) {
        // the factors are built from the padded sequences, so an identity at
        // 1_{[0,b]} is only certified while the enumeration index of b stays
        // in the recursion-exact prefix (plus the constant function)
        std::set<Ordinal> kept;
        for (unsigned k = 0; k <= 12; ++k) gens.insert(Ordinal(k));
        for (const auto& b : gens) {
            if (b.is_top()) {
                kept.insert(b);
                continue;
            }
            if (b.is_finite() && b <= opt.truncation &&
                Ordinal(1) + gc + b + Ordinal(1) <= st.seqs.honest_limit)
                kept.insert(b);
        }
        gens = kept;
    }
    cert.generator_endpoints.assign(gens.begin(), gens.end());

    OperatorExpr STR = OperatorExpr::compose(cert.S, OperatorExpr::compose(st.T, cert.R));
    OperatorExpr ImF = OperatorExpr::identity() - cert.F;
    bool exact = false;
    if (st.seqs.symbolic) {
        auto rep = op_equals(STR, ImF);
        if (!rep.equal)
            throw OrdinalError("S*T*R != I - F" +
                               (rep.witness_point ? " at row " + rep.witness_point->str()
                                                  : std::string()));
        exact = rep.exact;
    }
    for (const auto& b : cert.generator_endpoints) {
        StepFunction f = gen_at(b);
        if (!(STR.apply(f) == ImF.apply(f)))
            throw OrdinalError("S*T*R != I - F at generator " + b.str());
    }
    note(std::string("check S*T*R = I - F: ok (") +
         (exact ? "exact" : "generator-verified") + ")");
}

// ---------------------------------------------------------------------------
// removing the finite-rank defect

namespace {

OperatorExpr shift_up(unsigned long long k) {
    StepFunction wgt = StepFunction::constant(1) -
                       StepFunction::initial_indicator(Ordinal(k - 1));
    PwMap m = PwMap::make({PwMap::Plain{Ordinal(0), Ordinal(k), true, Ordinal(0)},
                           PwMap::Plain{Ordinal(k), Ordinal::omega(), false, Ordinal(0)},
                           PwMap::Plain{Ordinal::omega(), std::nullopt, false, Ordinal::omega()}});
    return OperatorExpr::comp(wgt, m);
}

OperatorExpr shift_down(unsigned long long k) {
    PwMap m = PwMap::make({PwMap::Plain{Ordinal(0), Ordinal::omega(), false, Ordinal(k)},
                           PwMap::Plain{Ordinal::omega(), std::nullopt, false, Ordinal::omega()}});
    return OperatorExpr::comp(StepFunction::constant(1), m);
}

}  // namespace

Upgrade fredholm_upgrade(const OperatorExpr& S, const OperatorExpr& T, const OperatorExpr& R,
                         const OperatorExpr& F) {
    (void)T;
    Upgrade up;
    up.S2 = S;
    up.R2 = R;
    if (F.comp_terms().empty() && F.tensor_terms().empty()) {
        up.exact = true;
        up.method = "none needed";
        return up;
    }
    if (!F.comp_terms().empty()) {
        up.method = "fredholm mode";
        return up;
    }
    const auto& ts = F.tensor_terms();
    size_t n = ts.size();
    // solve (Id - M) A = Id over the rationals, M_ij the pairing of the
    // i-th functional with the j-th range function
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, Rational(0)));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j)
            a[i][j] = (i == j ? Rational(1) : Rational(0)) - ts[i].mu(ts[j].g);
        a[i][n + i] = 1;
    }
    bool singular = false;
    for (size_t col = 0; col < n && !singular; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) {
            singular = true;
            break;
        }
        std::swap(a[col], a[piv]);
        Rational d = a[col][col];
        for (size_t j = 0; j < 2 * n; ++j) a[col][j] /= d;
        for (size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
        }
    }
    if (!singular) {
        OperatorExpr Wop = OperatorExpr::identity();
        for (size_t i = 0; i < n; ++i) {
            Functional kappa;
            for (size_t j = 0; j < n; ++j) kappa = kappa + a[i][n + j] * ts[j].mu;
            kappa.normalize();
            Wop = Wop + OperatorExpr::tensor(ts[i].g, kappa);
        }
        up.S2 = OperatorExpr::compose(Wop, S);
        up.exact = true;
        up.method = "finite-rank inverse";
        return up;
    }
    // the one-sided escape: when every functional of F lives below w, the
    // defect is pushed off by a shift on the block [0, w)
    BigNat maxp = 0;
    for (const auto& t : ts)
        for (const auto& [p, c] : t.mu.atoms) {
            if (!p.is_finite()) {
                up.method = "fredholm mode";
                return up;
            }
            if (maxp < p.finite_value()) maxp = p.finite_value();
        }
    auto k = static_cast<unsigned long long>(maxp) + 1;
    OperatorExpr shp = shift_up(k), shm = shift_down(k);
    if (!op_equals(OperatorExpr::compose(shm, shp), OperatorExpr::identity()).equal)
        throw OrdinalError("shift pair is not a left inverse");
    if (!op_equals(OperatorExpr::compose(F, shp), OperatorExpr::zero()).equal)
        throw OrdinalError("shift does not annihilate the finite-rank defect");
    up.S2 = OperatorExpr::compose(shm, S);
    up.R2 = OperatorExpr::compose(R, shp);
    up.exact = true;
    up.method = "shift";
    return up;
}

// ---------------------------------------------------------------------------
// the certificate and the driver

std::string FactorizationCertificate::text() const {
    std::ostringstream os;
    os << "ordcalc factorization certificate\n";
    os << "operator: " << operator_text << "\n";
    os << "truncation: " << truncation_text << "\n";
    os << "mode: " << mode << "\n";
    for (const auto& l : transcript) os << l << "\n";
    os << "S = " << S.str() << "\n";
    os << "R = " << R.str() << "\n";
    os << "F = " << F.str() << "\n";
    os << "upgrade: " << upgrade_method << "\n";
    os << "exact identity: " << (exact_identity ? "yes" : "no") << "\n";
    if (S_up) os << "S' = " << S_up->str() << "\n";
    if (R_up) os << "R' = " << R_up->str() << "\n";
    os << "generators:";
    for (size_t i = 0; i < generator_endpoints.size(); ++i)
        os << (i ? ", " : " ") << generator_endpoints[i].str();
    os << "\n";
    os << "replay: ordcalc factorize \"" << operator_text << "\" --truncate \""
       << truncation_text << "\"\n";
    return os.str();
}

FactorizationResult factorize(const OperatorExpr& T, const FactorizeOptions& opt) {
    FactorizationResult res;
    FactorizationState& st = res.state;
    FactorizationCertificate& cert = res.certificate;
    auto note = [&](const std::string& s) { cert.transcript.push_back(s); };
    st.T = T;
    cert.operator_text = T.str();
    cert.truncation_text = opt.truncation.str();

    auto [T1, rho] = reduce_T1(T);
    st.T1 = T1;
    st.rho = rho;
    note("rho = " + rho.str());
    note("check final row of T1 supported at W only: ok");
    note("check column(T1, W) == column(T, W): ok");

    CornerReduction corner = reduce_T2(T1);
    st.T2 = corner.T2;
    st.c = corner.c;
    st.g = corner.g;
    st.G = corner.G;
    note("c = " + format_rational(corner.c));
    note("g = " + corner.g.str());
    note("check g continuous, column(T2, W) = 1_{W}, row(T2, W) = e(W): ok");

    st.seqs = eta_xi_recursion(st.T2, opt);
    cert.mode = st.seqs.symbolic ? "symbolic" : "truncated to " + opt.truncation.str();
    for (const auto& l : st.seqs.notes) note(l);
    for (const char* t : {"1", "2", "w"}) {
        Ordinal s = parse_ordinal(t);
        note("eta(" + s.str() + ") = " + st.seqs.eta(s).str() + ", xi(" + s.str() + ") = " +
             st.seqs.xi(s).str());
    }

    st.phi = build_phi_xi(st.seqs);
    note("check collapse projection idempotent with norm 1: ok");
    st.U_Xi = build_U(st.seqs);
    note("check xi-enumeration isometry on samples: ok");
    st.h = build_H_theta_psi(st.seqs);
    note("check H closed; order isomorphism with block type w + 1: ok");
    st.stage5 = assemble_T5(st.T2, st.phi, st.h, st.seqs, &cert.transcript);
    note("chi = " + st.stage5.chi.str());
    gamma_and_factor(st, cert, opt);

    Upgrade up = fredholm_upgrade(cert.S, T, cert.R, cert.F);
    cert.upgrade_method = up.method;
    if (up.exact) {
        if (up.method != "none needed") {
            OperatorExpr STR2 =
                OperatorExpr::compose(up.S2, OperatorExpr::compose(T, up.R2));
            if (st.seqs.symbolic) {
                auto rep = op_equals(STR2, OperatorExpr::identity());
                if (!rep.equal)
                    throw OrdinalError(
                        "upgraded identity S'*T*R' != I" +
                        (rep.witness_point ? " at row " + rep.witness_point->str()
                                           : std::string()));
            }
            for (const auto& b : cert.generator_endpoints) {
                StepFunction f = gen_at(b);
                if (!(STR2.apply(f) == f))
                    throw OrdinalError("upgraded identity fails at generator " + b.str());
            }
        }
        cert.S_up = up.S2;
        cert.R_up = up.R2;
        cert.exact_identity = true;
        note("final identity on generators: ok");
    } else {
        note("finite-rank defect not removable by the implemented upgrades");
    }
    return res;
}

}  // namespace ordcalc

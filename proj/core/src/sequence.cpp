#include "ordcalc/sequence.hpp"

#include <sstream>

namespace ordcalc {

struct SequenceExpr::Node {
    enum Kind { Const, Var, Add, Mul, Pow, Cases, Opaque } kind;
    Ordinal c;
    std::shared_ptr<const Node> a, b;
    std::vector<std::pair<Ordinal, SequenceExpr>> entries;
    std::function<Ordinal(const Ordinal&)> fn;
    std::string name;
    bool strict = false;
    bool cont = false;
};

namespace {

Ordinal eval_node(const SequenceExpr::Node& n, const Ordinal& s);

Ordinal eval_node(const std::shared_ptr<const SequenceExpr::Node>& n, const Ordinal& s) {
    return eval_node(*n, s);
}

Ordinal eval_node(const SequenceExpr::Node& n, const Ordinal& s) {
    using N = SequenceExpr::Node;
    switch (n.kind) {
        case N::Const: return n.c;
        case N::Var: return s;
        case N::Add: return eval_node(n.a, s) + eval_node(n.b, s);
        case N::Mul: return eval_node(n.a, s) * eval_node(n.b, s);
        case N::Pow: return Ordinal::omega_pow(eval_node(n.a, s));
        case N::Cases: {
            size_t i = n.entries.size();
            while (i > 0 && n.entries[i - 1].first > s) --i;
            if (i == 0) throw OrdinalError("sequence cases: no segment for " + s.str());
            return n.entries[i - 1].second(s);
        }
        case N::Opaque: return n.fn(s);
    }
    throw OrdinalError("unreachable");
}

// Sample-based flag computation for closed-form nodes.
void check_flags(SequenceExpr::Node& n) {
    std::vector<Ordinal> pts;
    for (const char* t : {"0", "1", "2", "5", "w", "w + 1", "w*2", "w^(2)", "w^(2) + 1", "w^(w)"})
        pts.push_back(parse_ordinal(t));
    n.strict = true;
    try {
        for (size_t i = 1; i < pts.size(); ++i)
            if (!(eval_node(n, pts[i - 1]) < eval_node(n, pts[i]))) {
                n.strict = false;
                break;
            }
    } catch (const OrdinalError&) {
        n.strict = false;
    }
    n.cont = true;
    try {
        for (const char* t : {"w", "w*2", "w^(2)", "w^(w)"}) {
            Ordinal lam = parse_ordinal(t);
            Ordinal at = eval_node(n, lam);
            std::vector<Ordinal> probes;
            for (unsigned k = 1; k <= 8; ++k)
                probes.push_back(eval_node(n, fundamental_sequence(lam, k)));
            bool all_eq = true;
            for (const auto& p : probes) all_eq = all_eq && p == probes[0];
            if (all_eq) {
                if (!(probes[0] == at)) { n.cont = false; break; }
                continue;
            }
            auto s = stabilized_sup(probes);
            if (!s || !(*s == at)) { n.cont = false; break; }
        }
    } catch (const OrdinalError&) {
        n.cont = false;
    }
}

std::shared_ptr<const SequenceExpr::Node> make_checked(SequenceExpr::Node n) {
    check_flags(n);
    return std::make_shared<const SequenceExpr::Node>(std::move(n));
}

}  // namespace

// private ctor taking a node is declared in the header

SequenceExpr SequenceExpr::constant(const Ordinal& c) {
    Node n;
    n.kind = Node::Const;
    n.c = c;
    n.strict = false;
    n.cont = true;
    return SequenceExpr(std::make_shared<const Node>(std::move(n)));
}

SequenceExpr SequenceExpr::var() {
    Node n;
    n.kind = Node::Var;
    n.strict = true;
    n.cont = true;
    return SequenceExpr(std::make_shared<const Node>(std::move(n)));
}

SequenceExpr SequenceExpr::add(const SequenceExpr& a, const SequenceExpr& b) {
    Node n;
    n.kind = Node::Add;
    n.a = a.node_;
    n.b = b.node_;
    return SequenceExpr(make_checked(std::move(n)));
}

SequenceExpr SequenceExpr::mul(const SequenceExpr& a, const SequenceExpr& b) {
    Node n;
    n.kind = Node::Mul;
    n.a = a.node_;
    n.b = b.node_;
    return SequenceExpr(make_checked(std::move(n)));
}

SequenceExpr SequenceExpr::omega_power(const SequenceExpr& e) {
    Node n;
    n.kind = Node::Pow;
    n.a = e.node_;
    return SequenceExpr(make_checked(std::move(n)));
}

SequenceExpr SequenceExpr::cases(std::vector<std::pair<Ordinal, SequenceExpr>> entries) {
    if (entries.empty() || !entries[0].first.is_zero())
        throw OrdinalError("sequence cases must start at 0");
    for (size_t i = 1; i < entries.size(); ++i)
        if (!(entries[i - 1].first < entries[i].first))
            throw OrdinalError("sequence case thresholds must increase");
    Node n;
    n.kind = Node::Cases;
    n.entries = std::move(entries);
    return SequenceExpr(make_checked(std::move(n)));
}

SequenceExpr SequenceExpr::opaque(std::function<Ordinal(const Ordinal&)> fn, std::string name,
                                  bool strictly_increasing, bool continuous) {
    Node n;
    n.kind = Node::Opaque;
    n.fn = std::move(fn);
    n.name = std::move(name);
    n.strict = strictly_increasing;
    n.cont = continuous;
    return SequenceExpr(std::make_shared<const Node>(std::move(n)));
}

Ordinal SequenceExpr::operator()(const Ordinal& s) const { return eval_node(*node_, s); }

bool SequenceExpr::strictly_increasing() const { return node_->strict; }
bool SequenceExpr::continuous() const { return node_->cont; }

std::string SequenceExpr::str() const {
    using N = Node;
    const Node& n = *node_;
    switch (n.kind) {
        case N::Const: return n.c.str();
        case N::Var: return "@";
        case N::Add: return "(" + SequenceExpr(n.a).str() + " + " + SequenceExpr(n.b).str() + ")";
        case N::Mul: return "(" + SequenceExpr(n.a).str() + " * " + SequenceExpr(n.b).str() + ")";
        case N::Pow: return "w^(" + SequenceExpr(n.a).str() + ")";
        case N::Cases: {
            std::ostringstream out;
            out << "cases{";
            for (size_t i = 0; i < n.entries.size(); ++i) {
                if (i) out << "; ";
                out << n.entries[i].first.str() << ": " << n.entries[i].second.str();
            }
            out << "}";
            return out.str();
        }
        case N::Opaque: return "<" + n.name + ">";
    }
    return "?";
}

Ordinal seq_sup(const SequenceExpr& s, const Ordinal& limit, int probe_depth) {
    if (limit.is_top()) {
        // any strictly increasing ordinal map satisfies s(t) >= t, so the
        // values are cofinal in [0, W)
        if (s.strictly_increasing()) return Ordinal::top();
        throw OrdinalError("seq_sup at W needs a strictly increasing sequence");
    }
    if (!limit.is_limit() || limit.is_zero())
        throw OrdinalError("seq_sup needs a limit ordinal > 0");
    if (s.continuous() && s.strictly_increasing()) return s(limit);
    std::vector<Ordinal> probes;
    for (int k = 1; k <= probe_depth; ++k) probes.push_back(s(fundamental_sequence(limit, k)));
    for (size_t i = 1; i < probes.size(); ++i)
        if (probes[i] < probes[i - 1])
            throw OrdinalError("seq_sup: sequence not monotone along fundamental sequence");
    std::vector<Ordinal> distinct;
    for (const auto& p : probes)
        if (distinct.empty() || !(distinct.back() == p)) distinct.push_back(p);
    if (distinct.size() == 1) return distinct[0];  // eventually constant
    if (distinct.size() >= 3) {
        auto r = stabilized_sup(distinct);
        if (r) return *r;
        // Any tail of the probes has the same supremum; a sequence may only
        // settle into its eventual CNF shape past a finite prefix.
        std::vector<Ordinal> tail(distinct.end() - distinct.size() / 2, distinct.end());
        if (tail.size() >= 3) {
            auto rt = stabilized_sup(tail);
            if (rt) return *rt;
        }
    }
    // deepen once before giving up
    if (probe_depth < 32) return seq_sup(s, limit, probe_depth * 4);
    throw OrdinalError("seq_sup: no stable CNF shape along the fundamental sequence");
}

}  // namespace ordcalc

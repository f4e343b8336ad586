#include "bccd/statements.hpp"

#include <algorithm>
#include <limits>

#include "bccd/errors.hpp"

namespace bccd {

namespace {

void check_small(int n) {
    if (n > kMaxEnumerationNodes)
        throw CapacityError("statement rules handle at most " + std::to_string(kMaxEnumerationNodes) + " nodes");
}

void check_query(const Dag& g, NodeId x, NodeId y, NodeSet z) {
    if (g.size() > kMaxFingerprintNodes)
        throw CapacityError("uDAG queries handle at most " + std::to_string(kMaxFingerprintNodes) + " nodes");
    if (x < 0 || y < 0 || x >= g.size() || y >= g.size() || x == y) throw ArgumentError("bad query pair");
    if (z & ~full_set(g.size()) || contains(z, x) || contains(z, y)) throw ArgumentError("bad conditioning set");
}

// Rules 1 and 2 over an independence predicate and a certified-dependence
// predicate; in the faithful case the latter is the negation of the former.
// Rule 1 fires only on separating sets from which no single node can be
// dropped, which for d- and m-separation makes them minimal.
template <class Indep, class Dep>
void apply_rules(int n, Indep indep, Dep dep, StatementSet& out) {
    for (NodeId x = 0; x < n; ++x) {
        for (NodeId y = x + 1; y < n; ++y) {
            const NodeSet rest = full_set(n) & ~node_bit(x) & ~node_bit(y);
            bool separable = false;
            for (NodeSet s = rest;; s = (s - 1) & rest) {
                if (indep(x, y, s)) {
                    separable = true;
                    bool minimal = true;
                    for (NodeId z : members(s)) minimal = minimal && dep(x, y, s & ~node_bit(z));
                    if (minimal)
                        for (NodeId z : members(s)) out.push_back(CausalStatement::disjunctive_cause(z, x, y));
                    for (NodeId z : members(rest & ~s)) {
                        if (!dep(x, y, s | node_bit(z))) continue;
                        out.push_back(CausalStatement::non_cause(z, x));
                        out.push_back(CausalStatement::non_cause(z, y));
                        for (NodeId w : members(s)) out.push_back(CausalStatement::non_cause(z, w));
                    }
                }
                if (s == 0) break;
            }
            if (separable) out.push_back(CausalStatement::non_adjacent(x, y));
        }
    }
}

void add_pag_noncauses(const Pag& pag, StatementSet& out) {
    for (NodeId a = 0; a < pag.size(); ++a)
        for (NodeId b = 0; b < pag.size(); ++b)
            if (a != b && !potentially_directed_path(pag, a, b)) out.push_back(CausalStatement::non_cause(a, b));
}

}  // namespace

StatementSet faithful_statements(const Fingerprint& fp, const Pag& pag) {
    const int n = fp.size();
    check_small(n);
    if (pag.size() != n) throw ArgumentError("fingerprint and PAG differ in size");
    StatementSet out;
    auto indep = [&](NodeId x, NodeId y, NodeSet z) { return fp.independent(x, y, z); };
    auto dep = [&](NodeId x, NodeId y, NodeSet z) { return !fp.independent(x, y, z); };
    apply_rules(n, indep, dep, out);
    add_pag_noncauses(pag, out);
    normalize(out);
    return close_statements(out, n);
}

StatementSet statements_from_faithful_structure(const Dag& g) {
    check_small(g.size());
    return faithful_statements(independence_fingerprint(g), equivalence_class_pag(g));
}

StatementSet statements_from_faithful_structure(const Mag& g) {
    check_small(g.size());
    return faithful_statements(independence_fingerprint(g), equivalence_class_pag(g));
}

CiAnswer udag_ci_query(const Dag& g, NodeId x, NodeId y, NodeSet z) {
    check_query(g, x, y, z);
    if (d_separated(g, x, y, z)) return CiAnswer::Independent;
    if (g.adjacent(x, y) && d_separated(g.without_adjacency(x, y), x, y, z)) return CiAnswer::Dependent;
    return CiAnswer::Unknown;
}

CiAnswer udag_unique_path_query(const Dag& g, NodeId x, NodeId y, NodeSet z) {
    check_query(g, x, y, z);
    return count_connecting_paths(g, x, y, z, 2) == 1 ? CiAnswer::Dependent : CiAnswer::Unknown;
}

StatementSet noncause_statements_from_optimal_udag(const Dag& g) {
    check_small(g.size());
    StatementSet out;
    add_pag_noncauses(equivalence_class_pag(g), out);
    normalize(out);
    return out;
}

std::vector<Dag> optimal_udags_of_mag(const Mag& m) {
    check_small(m.size());
    if (m.size() == 0) return {Dag(0)};
    const DagCatalog& cat = DagCatalog::level(m.size());
    const Fingerprint fp = independence_fingerprint(m);
    int best = std::numeric_limits<int>::max();
    std::vector<int> chosen;
    for (int c = 0; c < cat.class_count(); ++c) {
        if (!cat.class_fingerprint(c).subset_of(fp)) continue;
        int p = cat.class_parameter_count(c);
        if (p < best) {
            best = p;
            chosen.clear();
        }
        if (p == best) chosen.push_back(c);
    }
    std::vector<Dag> out;
    for (int c : chosen)
        for (int i : cat.class_members(c)) out.push_back(cat.dag(i));
    return out;
}

StatementSet udag_statements(const Dag& g) {
    const int n = g.size();
    check_small(n);
    if (n == 0) return {};
    const DagCatalog& cat = DagCatalog::level(n);
    const int cls = cat.class_of(cat.index_of(g));
    const Fingerprint& fp = cat.class_fingerprint(cls);

    // Bits mark dependences certified by some member of the class.
    Fingerprint certified(n);
    for (int i : cat.class_members(cls)) {
        const Dag& d = cat.dag(i);
        for (NodeId x = 0; x < n; ++x) {
            for (NodeId y = x + 1; y < n; ++y) {
                const NodeSet rest = full_set(n) & ~node_bit(x) & ~node_bit(y);
                for (NodeSet s = rest;; s = (s - 1) & rest) {
                    if (!certified.independent(x, y, s) &&
                        (udag_ci_query(d, x, y, s) == CiAnswer::Dependent ||
                         udag_unique_path_query(d, x, y, s) == CiAnswer::Dependent))
                        certified.set(x, y, s);
                    if (s == 0) break;
                }
            }
        }
    }
    for (std::size_t w = 0; w < fp.words().size(); ++w)
        if (certified.words()[w] & fp.words()[w]) throw InvariantError("uDAG certifies a dependence it also separates");

    StatementSet out;
    auto indep = [&](NodeId x, NodeId y, NodeSet z) { return fp.independent(x, y, z); };
    auto dep = [&](NodeId x, NodeId y, NodeSet z) { return certified.independent(x, y, z); };
    apply_rules(n, indep, dep, out);
    add_pag_noncauses(equivalence_class_pag(g), out);
    normalize(out);
    return close_statements(out, n);
}

StatementSet bruteforce_statements(const Dag& g) {
    check_small(g.size());
    if (g.size() == 0) return {};
    const DagCatalog& cat = DagCatalog::level(g.size());
    return MagOracle::level(g.size()).row(cat.class_of(cat.index_of(g)));
}

}  // namespace bccd

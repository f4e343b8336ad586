#include "bccd/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "bccd/errors.hpp"

namespace bccd {

DirichletPrior DirichletPrior::bdeu(double ess) {
    if (!(ess > 0.0)) throw ArgumentError("BDeu equivalent sample size must be positive");
    return {Kind::BDeu, ess};
}

double DirichletPrior::pseudocount(int arity, int configurations) const {
    if (kind == Kind::K2) return 1.0;
    return equivalent_sample_size / (static_cast<double>(arity) * configurations);
}

double log_gamma(double x) {
    // lgamma_r leaves the global signgam alone, so it is safe across threads.
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

CountTable count_table(const Dataset& ds, VariableId child, std::span<const VariableId> parents) {
    auto check = [&](VariableId v) {
        if (v < 0 || v >= ds.variables()) throw ArgumentError("variable id " + std::to_string(v) + " out of range");
    };
    check(child);
    for (std::size_t i = 0; i < parents.size(); ++i) {
        check(parents[i]);
        if (parents[i] == child) throw ArgumentError("child listed among its parents");
        for (std::size_t j = 0; j < i; ++j)
            if (parents[j] == parents[i]) throw ArgumentError("duplicate parent");
    }
    CountTable t;
    t.child = child;
    t.parents.assign(parents.begin(), parents.end());
    t.child_arity = ds.arity(child);
    long long q = 1;
    for (VariableId p : parents) {
        q *= ds.arity(p);
        if (q > (1 << 24)) throw CapacityError("too many parent configurations");
    }
    t.configurations = static_cast<int>(q);
    t.counts.assign(static_cast<std::size_t>(q) * t.child_arity, 0);
    t.row_sums.assign(q, 0);

    std::span<const int> child_col = ds.column(child);
    std::vector<std::span<const int>> parent_cols;
    std::vector<int> radix;
    int stride = 1;
    for (VariableId p : parents) {
        parent_cols.push_back(ds.column(p));
        radix.push_back(stride);
        stride *= ds.arity(p);
    }
    for (int r = 0; r < ds.rows(); ++r) {
        int j = 0;
        for (std::size_t p = 0; p < parent_cols.size(); ++p) j += parent_cols[p][r] * radix[p];
        ++t.counts[static_cast<std::size_t>(j) * t.child_arity + child_col[r]];
        ++t.row_sums[j];
    }
    return t;
}

double log_family_score(const CountTable& table, const DirichletPrior& prior) {
    const double a_ijk = prior.pseudocount(table.child_arity, table.configurations);
    const double a_ij = a_ijk * table.child_arity;
    const double lg_ijk = log_gamma(a_ijk);
    const double lg_ij = log_gamma(a_ij);
    double score = 0.0;
    for (int j = 0; j < table.configurations; ++j) {
        if (table.row_sums[j] == 0) continue;  // the gamma ratios cancel
        score += lg_ij - log_gamma(table.row_sums[j] + a_ij);
        for (int k = 0; k < table.child_arity; ++k) {
            int n = table.count(j, k);
            if (n) score += log_gamma(n + a_ijk) - lg_ijk;
        }
    }
    return score;
}

double log_bd_score(const Dataset& ds, const Dag& g, std::span<const VariableId> vars, const DirichletPrior& prior) {
    if (static_cast<int>(vars.size()) != g.size()) throw ArgumentError("variable binding does not match graph size");
    double total = 0.0;
    for (NodeId v = 0; v < g.size(); ++v) {
        std::vector<VariableId> pa;
        for (NodeId p : members(g.parents(v))) pa.push_back(vars[p]);
        total += log_family_score(count_table(ds, vars[v], pa), prior);
    }
    return total;
}

double log_bd_score(const Dataset& ds, const Dag& g, const DirichletPrior& prior) {
    std::vector<VariableId> vars(g.size());
    for (int i = 0; i < g.size(); ++i) vars[i] = i;
    return log_bd_score(ds, g, vars, prior);
}

// ---------------------------------------------------------------------------
// Structure priors

StructurePrior structure_prior_uniform(int n) {
    const DagCatalog& cat = DagCatalog::level(n);
    return {n, std::vector<double>(cat.size(), 1.0 / cat.size())};
}

namespace {

void check_prior(const StructurePrior& p) {
    const DagCatalog& cat = DagCatalog::level(p.level);
    if (static_cast<int>(p.weights.size()) != cat.size()) throw ArgumentError("prior size does not match its level");
    double sum = 0.0;
    for (double w : p.weights) {
        if (!(w >= 0.0)) throw ArgumentError("prior weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("prior weights must sum to 1");
}

// Ordered selections of m distinct nodes out of k.
std::vector<std::vector<NodeId>> injections(int k, int m) {
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> cur;
    auto rec = [&](auto&& self, NodeSet used) -> void {
        if (static_cast<int>(cur.size()) == m) {
            out.push_back(cur);
            return;
        }
        for (NodeId v = 0; v < k; ++v) {
            if (contains(used, v)) continue;
            cur.push_back(v);
            self(self, used | node_bit(v));
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

std::vector<StructurePrior> structure_prior_multilevel(int reference_level, const StructurePrior& base) {
    if (reference_level < 1 || reference_level > kMaxEnumerationNodes)
        throw CapacityError("reference level must be in 1..5");
    if (base.level != reference_level) throw ArgumentError("base prior is not at the reference level");
    check_prior(base);
    const DagCatalog& top = DagCatalog::level(reference_level);

    // Class-level base mass: restrictions depend only on the fingerprint.
    std::vector<double> class_mass(top.class_count(), 0.0);
    for (int i = 0; i < top.size(); ++i) class_mass[top.class_of(i)] += base.weights[i];

    std::vector<StructurePrior> levels;
    for (int m = 1; m < reference_level; ++m) {
        const DagCatalog& cat = DagCatalog::level(m);
        std::vector<double> mass(cat.class_count(), 0.0);
        auto maps = injections(reference_level, m);
        const double share = 1.0 / maps.size();
        // Pattern -> receiving classes.
        std::unordered_map<Fingerprint, std::vector<int>, FingerprintHash> targets;
        auto receivers = [&](const Fingerprint& f) -> const std::vector<int>& {
            auto it = targets.find(f);
            if (it != targets.end()) return it->second;
            std::vector<int> rec;
            if (int c = cat.class_with(f); c >= 0) {
                rec.push_back(c);
            } else {
                int best = std::numeric_limits<int>::max();
                for (int c2 = 0; c2 < cat.class_count(); ++c2) {
                    if (!cat.class_fingerprint(c2).subset_of(f)) continue;
                    int p = cat.class_parameter_count(c2);
                    if (p < best) {
                        best = p;
                        rec.clear();
                    }
                    if (p == best) rec.push_back(c2);
                }
            }
            return targets.emplace(f, std::move(rec)).first->second;
        };
        for (int c = 0; c < top.class_count(); ++c) {
            if (class_mass[c] == 0.0) continue;
            const Fingerprint& fp = top.class_fingerprint(c);
            for (const auto& sel : maps) {
                const std::vector<int>& rec = receivers(fp.restricted_to(sel));
                int total = 0;
                for (int r : rec) total += static_cast<int>(cat.class_members(r).size());
                for (int r : rec)
                    mass[r] += class_mass[c] * share * cat.class_members(r).size() / static_cast<double>(total);
            }
        }
        StructurePrior p{m, std::vector<double>(cat.size(), 0.0)};
        for (int i = 0; i < cat.size(); ++i) {
            int c = cat.class_of(i);
            p.weights[i] = mass[c] / cat.class_members(c).size();
        }
        levels.push_back(std::move(p));
    }
    levels.push_back(base);
    return levels;
}

// ---------------------------------------------------------------------------
// Posteriors

StructurePosterior structure_posterior(const Dataset& ds, std::span<const VariableId> vars, const StructurePrior& prior,
                                       const DirichletPrior& dprior) {
    const int n = static_cast<int>(vars.size());
    if (n < 1 || n > kMaxEnumerationNodes) throw CapacityError("structure posteriors are limited to 1..5 variables");
    if (prior.level != n) throw ArgumentError("structure prior level does not match subset size");
    for (int i = 0; i < n; ++i) {
        if (vars[i] < 0 || vars[i] >= ds.variables()) throw ArgumentError("variable id out of range");
        for (int j = 0; j < i; ++j)
            if (vars[i] == vars[j]) throw ArgumentError("duplicate variable in subset");
    }
    const DagCatalog& cat = DagCatalog::level(n);
    if (static_cast<int>(prior.weights.size()) != cat.size()) throw ArgumentError("prior size does not match its level");

    // Family scores for every (child, parent set) used by some DAG.
    std::vector<double> family(static_cast<std::size_t>(n) << n, 0.0);
    std::vector<bool> have(family.size(), false);
    auto family_score = [&](NodeId child, NodeSet pa) {
        std::size_t key = (static_cast<std::size_t>(child) << n) | pa;
        if (!have[key]) {
            std::vector<VariableId> pv;
            for (NodeId p : members(pa)) pv.push_back(vars[p]);
            family[key] = log_family_score(count_table(ds, vars[child], pv), dprior);
            have[key] = true;
        }
        return family[key];
    };

    StructurePosterior post;
    post.level = n;
    post.log_likelihoods.resize(cat.size());
    post.posterior.resize(cat.size());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> log_joint(cat.size());
    for (int i = 0; i < cat.size(); ++i) {
        const Dag& g = cat.dag(i);
        double ll = 0.0;
        for (NodeId v = 0; v < n; ++v) ll += family_score(v, g.parents(v));
        post.log_likelihoods[i] = ll;
        log_joint[i] = prior.weights[i] > 0.0 ? ll + std::log(prior.weights[i])
                                              : -std::numeric_limits<double>::infinity();
        best = std::max(best, log_joint[i]);
    }
    if (!std::isfinite(best)) throw ArgumentError("structure prior has no mass");
    double norm = 0.0;
    for (int i = 0; i < cat.size(); ++i) norm += std::exp(log_joint[i] - best);
    for (int i = 0; i < cat.size(); ++i) post.posterior[i] = std::exp(log_joint[i] - best) / norm;
    return post;
}

double independence_probability(const StructurePosterior& posterior, NodeId x, NodeId y, NodeSet z) {
    const DagCatalog& cat = DagCatalog::level(posterior.level);
    if (x < 0 || y < 0 || x >= posterior.level || y >= posterior.level || x == y)
        throw ArgumentError("bad independence query");
    const int idx = Fingerprint::index(posterior.level, x, y, z);
    if (contains(z, x) || contains(z, y) || (z & ~full_set(posterior.level))) throw ArgumentError("bad conditioning set");
    double p = 0.0;
    for (int i = 0; i < cat.size(); ++i)
        if (cat.fingerprint(i).test(idx)) p += posterior.posterior[i];
    return p;
}

double minimal_dependence_probability(const StructurePosterior& posterior, NodeId x, NodeId y, NodeSet z,
                                      NodeId extra) {
    const DagCatalog& cat = DagCatalog::level(posterior.level);
    if (extra < 0 || extra >= posterior.level || extra == x || extra == y || contains(z, extra))
        throw ArgumentError("bad minimal-dependence variable");
    if (x < 0 || y < 0 || x >= posterior.level || y >= posterior.level || x == y)
        throw ArgumentError("bad independence query");
    if (contains(z, x) || contains(z, y) || (z & ~full_set(posterior.level))) throw ArgumentError("bad conditioning set");
    const int without = Fingerprint::index(posterior.level, x, y, z);
    const int with = Fingerprint::index(posterior.level, x, y, z | node_bit(extra));
    double p = 0.0;
    for (int i = 0; i < cat.size(); ++i)
        if (cat.fingerprint(i).test(without) && !cat.fingerprint(i).test(with)) p += posterior.posterior[i];
    return p;
}

IndependenceTest test_independence(const Dataset& ds, VariableId x, VariableId y, std::span<const VariableId> given,
                                   std::optional<VariableId> minimal_dependence, const DirichletPrior& dprior) {
    if (x == y) throw ArgumentError("x and y must differ");
    std::vector<VariableId> vars{x, y};
    vars.insert(vars.end(), given.begin(), given.end());
    if (minimal_dependence) vars.push_back(*minimal_dependence);
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (vars[i] == vars[j]) throw ArgumentError("variables in a test must be distinct");
    if (vars.size() > static_cast<std::size_t>(kMaxEnumerationNodes))
        throw CapacityError("tests are limited to 5 variables in total");
    const int n = static_cast<int>(vars.size());
    StructurePosterior post = structure_posterior(ds, vars, structure_prior_uniform(n), dprior);
    NodeSet z = 0;
    for (std::size_t i = 0; i < given.size(); ++i) z |= node_bit(static_cast<NodeId>(2 + i));
    IndependenceTest out;
    out.structures = DagCatalog::level(n).size();
    out.probability = minimal_dependence ? minimal_dependence_probability(post, 0, 1, z, n - 1)
                                         : independence_probability(post, 0, 1, z);
    return out;
}

}  // namespace bccd

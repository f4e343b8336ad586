#include "bccd/search.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "bccd/errors.hpp"

namespace bccd {

void StatementLedger::update(const CausalStatement& s, double p) {
    if (!(p >= 0.0 && p <= 1.0 + 1e-12)) throw ArgumentError("statement probability outside [0, 1]");
    auto [it, inserted] = entries_.emplace(s, p);
    if (!inserted) it->second = std::max(it->second, p);
}

double StatementLedger::probability(const CausalStatement& s) const {
    auto it = entries_.find(s);
    return it == entries_.end() ? 0.0 : it->second;
}

Skeleton::Skeleton(int n) : n_(n) {
    if (n < 0 || n > kMaxGraphNodes) throw CapacityError("at most 64 variables are supported");
    adjacency_.resize(n);
    for (NodeId v = 0; v < n; ++v) adjacency_[v] = full_set(n) & ~node_bit(v);
}

void Skeleton::remove(NodeId a, NodeId b) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) throw ArgumentError("bad skeleton edge");
    adjacency_[a] &= ~node_bit(b);
    adjacency_[b] &= ~node_bit(a);
}

std::vector<Edge> Skeleton::edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b : members(adjacency_[a] & ~full_set(a + 1))) out.emplace_back(a, b);
    return out;
}

CausalMatrix::CausalMatrix(int n) : n_(n), cells_(static_cast<std::size_t>(n) * n, CausalStatus::Unknown) {
    for (NodeId v = 0; v < n; ++v) cells_[static_cast<std::size_t>(v) * n + v] = CausalStatus::NotCauses;
}

CausalMatrix::CausalMatrix(const CausalLogicMatrix& lc) : CausalMatrix(lc.size()) {
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b = 0; b < n_; ++b) cells_[static_cast<std::size_t>(a) * n_ + b] = lc.relation(a, b);
}

CausalStatus CausalMatrix::at(NodeId cause, NodeId effect) const {
    if (cause < 0 || effect < 0 || cause >= n_ || effect >= n_) throw ArgumentError("variable out of range");
    return cells_[static_cast<std::size_t>(cause) * n_ + effect];
}

void CausalMatrix::set(NodeId cause, NodeId effect, CausalStatus s) {
    if (cause < 0 || effect < 0 || cause >= n_ || effect >= n_) throw ArgumentError("variable out of range");
    if (cause == effect && s != CausalStatus::NotCauses) throw ArgumentError("a variable never causes itself");
    cells_[static_cast<std::size_t>(cause) * n_ + effect] = s;
}

std::vector<StructurePrior> make_structure_priors(StructurePriorKind kind, int k_max) {
    if (k_max < 1 || k_max > kMaxEnumerationNodes) throw CapacityError("k_max must be in 1..5");
    if (kind == StructurePriorKind::Multilevel) {
        static std::mutex mutex;
        static std::map<int, std::vector<StructurePrior>> cache;
        std::lock_guard lock(mutex);
        auto it = cache.find(k_max);
        if (it == cache.end())
            it = cache.emplace(k_max, structure_prior_multilevel(k_max, structure_prior_uniform(k_max))).first;
        return it->second;
    }
    std::vector<StructurePrior> out;
    for (int m = 1; m <= k_max; ++m) out.push_back(structure_prior_uniform(m));
    return out;
}

std::vector<std::pair<CausalStatement, double>> subset_statement_probabilities(
    const Dataset& ds, std::span<const VariableId> w, const MappingTable& mapping,
    const std::vector<StructurePrior>& priors, const DirichletPrior& dprior) {
    const int m = static_cast<int>(w.size());
    if (m < 1 || m > mapping.k_max() || m > static_cast<int>(priors.size()))
        throw CapacityError("subset size exceeds the mapping or prior levels");
    if (!std::is_sorted(w.begin(), w.end())) throw ArgumentError("subset must be sorted");
    StructurePosterior post = structure_posterior(ds, w, priors[m - 1], dprior);
    const MappingTable::Compiled& table = mapping.compiled(m);
    std::vector<double> mass(table.statements.size(), 0.0);
    for (std::size_t i = 0; i < post.posterior.size(); ++i) {
        const double p = post.posterior[i];
        if (p == 0.0) continue;
        for (std::uint16_t id : table.rows[i]) mass[id] += p;
    }
    std::vector<std::pair<CausalStatement, double>> out;
    out.reserve(mass.size());
    for (std::size_t k = 0; k < mass.size(); ++k)
        out.emplace_back(table.statements[k].relabeled(w), std::min(mass[k], 1.0));
    return out;
}

namespace {

void merge_subset(const std::vector<std::pair<CausalStatement, double>>& probs, StatementLedger& ledger,
                  Skeleton& skeleton, double theta) {
    for (const auto& [s, p] : probs) {
        ledger.update(s, p);
        if (s.kind == StatementKind::NonAdjacent && p > theta) skeleton.remove(s.vars[0], s.vars[1]);
    }
}

void check_config(const BccdConfig& cfg, const MappingTable& mapping) {
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw ArgumentError("theta must be in (0, 1]");
    if (cfg.k_max < 2 || cfg.k_max > kMaxEnumerationNodes) throw CapacityError("k_max must be in 2..5");
    if (mapping.k_max() < cfg.k_max) throw ArgumentError("mapping does not cover k_max");
}

}  // namespace

void score_subset(const Dataset& ds, std::span<const VariableId> w, const MappingTable& mapping,
                  const std::vector<StructurePrior>& priors, const DirichletPrior& dprior, StatementLedger& ledger,
                  Skeleton& skeleton, double theta) {
    merge_subset(subset_statement_probabilities(ds, w, mapping, priors, dprior), ledger, skeleton, theta);
}

AdjacencySearchResult adjacency_search(const Dataset& ds, const BccdConfig& cfg, const MappingTable& mapping) {
    check_config(cfg, mapping);
    const int n = ds.variables();
    AdjacencySearchResult result{Skeleton(n), {}, {}};
    const std::vector<StructurePrior> priors = make_structure_priors(cfg.prior, cfg.k_max);
    const int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::set<NodeSet> processed;

    for (int k = 0; k <= cfg.k_max - 2; ++k) {
        // Subsets of this level come from a snapshot of the skeleton.
        const Skeleton snapshot = result.skeleton;
        std::set<NodeSet> level;
        bool room = false;
        for (NodeId x = 0; x < n; ++x) {
            for (NodeId y : members(snapshot.neighbors(x))) {
                const NodeSet pool = snapshot.neighbors(x) & ~node_bit(y);
                if (set_size(pool) < k) continue;
                room = true;
                std::vector<NodeId> p = members(pool);
                std::vector<bool> pick(p.size(), false);
                std::fill(pick.begin(), pick.begin() + k, true);
                do {
                    NodeSet w = node_bit(x) | node_bit(y);
                    for (std::size_t i = 0; i < p.size(); ++i)
                        if (pick[i]) w |= node_bit(p[i]);
                    if (!processed.count(w)) level.insert(w);
                } while (std::prev_permutation(pick.begin(), pick.end()));
            }
        }
        if (!room) break;

        std::vector<NodeSet> subsets(level.begin(), level.end());
        std::vector<std::vector<std::pair<CausalStatement, double>>> scores(subsets.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < subsets.size(); i = next++) {
                std::vector<VariableId> w = members(subsets[i]);
                scores[i] = subset_statement_probabilities(ds, w, mapping, priors, cfg.dirichlet);
            }
        };
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto guarded = [&] {
            try {
                worker();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = subsets.size();
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs && t < static_cast<int>(subsets.size()); ++t) pool.emplace_back(guarded);
        guarded();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);

        for (std::size_t i = 0; i < subsets.size(); ++i) {
            merge_subset(scores[i], result.ledger, result.skeleton, cfg.theta);
            processed.insert(subsets[i]);
            result.scored.push_back(members(subsets[i]));
        }
    }
    return result;
}

const char* status_name(DecisionStatus s) {
    switch (s) {
        case DecisionStatus::Applied: return "applied";
        case DecisionStatus::SkippedConflict: return "skipped-conflict";
        case DecisionStatus::BelowThreshold: return "below-threshold";
        case DecisionStatus::Derived: return "derived";
    }
    return "?";
}

InferenceResult rank_and_infer(const StatementLedger& ledger, int n, double theta) {
    std::vector<std::pair<CausalStatement, double>> order(ledger.entries().begin(), ledger.entries().end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    InferenceResult out{CausalLogicMatrix(n), CausalMatrix(n), {}};
    std::set<CausalStatement> asserted;
    int rank = 0;
    for (const auto& [s, p] : order) {
        DecisionStatus status = DecisionStatus::BelowThreshold;
        if (p > theta) {
            if (out.logic.apply(s)) {
                status = DecisionStatus::Applied;
                asserted.insert(s);
            } else {
                status = DecisionStatus::SkippedConflict;
            }
        }
        out.log.push_back({++rank, p, s, status});
    }
    for (const auto& f : out.logic.facts())
        if (!asserted.count(f)) out.log.push_back({++rank, std::nullopt, f, DecisionStatus::Derived});
    out.causal = CausalMatrix(out.logic);
    return out;
}

Pag map_to_pag(const Skeleton& skeleton, const CausalMatrix& mc) {
    if (skeleton.size() != mc.size()) throw ArgumentError("skeleton and causal matrix differ in size");
    auto mark = [&](NodeId at, NodeId other) {
        switch (mc.at(at, other)) {
            case CausalStatus::Causes: return Mark::Tail;
            case CausalStatus::NotCauses: return Mark::Arrow;
            case CausalStatus::Unknown: return Mark::Circle;
        }
        return Mark::Circle;
    };
    Pag p(skeleton.size());
    for (auto [a, b] : skeleton.edges()) p.set_edge(a, b, mark(a, b), mark(b, a));
    return p;
}

DiscoveryResult discover(const Dataset& ds, const BccdConfig& cfg, const MappingTable& mapping) {
    DiscoveryResult r;
    r.stage1 = adjacency_search(ds, cfg, mapping);
    r.stage2 = rank_and_infer(r.stage1.ledger, ds.variables(), cfg.theta);
    r.pag = map_to_pag(r.stage1.skeleton, r.stage2.causal);
    return r;
}

void write_decision_log(std::ostream& out, const std::vector<Decision>& log, std::span<const std::string> names) {
    out << "rank,probability,kind,vars,status\n";
    for (const auto& d : log) {
        out << d.rank << ',';
        if (d.probability) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", *d.probability);
            out << buf;
        }
        out << ',' << kind_name(d.statement.kind) << ',';
        for (int i = 0; i < d.statement.slot_count(); ++i) {
            const int v = d.statement.vars[i];
            out << (i ? ";" : "") << (v < static_cast<int>(names.size()) ? names[v] : std::to_string(v));
        }
        out << ',' << status_name(d.status) << '\n';
    }
}

std::vector<Decision> read_decision_log(std::istream& in, std::span<const std::string> names) {
    std::vector<Decision> out;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line) || line != "rank,probability,kind,vars,status")
        throw ParseError("missing decision log header", 1);
    ++lineno;
    auto var_id = [&](const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ParseError("unknown variable '" + name + "'", lineno);
        return static_cast<int>(it - names.begin());
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 5) throw ParseError("expected 5 fields", lineno);
        Decision d;
        try {
            d.rank = std::stoi(f[0]);
            if (!f[1].empty()) d.probability = std::stod(f[1]);
        } catch (const std::exception&) {
            throw ParseError("bad number", lineno);
        }
        StatementKind kind = kind_from_name(f[2]);
        std::vector<int> v;
        std::stringstream vs(f[3]);
        for (std::string name; std::getline(vs, name, ';');) v.push_back(var_id(name));
        try {
            if (kind == StatementKind::DisjunctiveCause && v.size() == 3)
                d.statement = CausalStatement::disjunctive_cause(v[0], v[1], v[2]);
            else if (kind == StatementKind::NonCause && v.size() == 2)
                d.statement = CausalStatement::non_cause(v[0], v[1]);
            else if (kind == StatementKind::NonAdjacent && v.size() == 2)
                d.statement = CausalStatement::non_adjacent(v[0], v[1]);
            else if (kind == StatementKind::Cause && v.size() == 2)
                d.statement = CausalStatement::cause(v[0], v[1]);
            else
                throw ParseError("wrong number of variables for " + f[2], lineno);
        } catch (const ArgumentError& e) {
            throw ParseError(e.what(), lineno);
        }
        bool known = false;
        for (auto s : {DecisionStatus::Applied, DecisionStatus::SkippedConflict, DecisionStatus::BelowThreshold,
                       DecisionStatus::Derived})
            if (f[4] == status_name(s)) {
                d.status = s;
                known = true;
            }
        if (!known) throw ParseError("unknown status '" + f[4] + "'", lineno);
        out.push_back(d);
    }
    return out;
}

}  // namespace bccd

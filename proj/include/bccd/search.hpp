#pragma once

// Adjacency search with statement probabilities, ranked causal inference and
// PAG assembly.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bccd/graphs.hpp"
#include "bccd/logic.hpp"
#include "bccd/scoring.hpp"
#include "bccd/statements.hpp"

namespace bccd {

// Running maximum probability of each statement over global variable ids.
class StatementLedger {
public:
    // Keeps the larger of the stored and the offered probability.
    void update(const CausalStatement& s, double p);
    // 0 for statements never offered.
    double probability(const CausalStatement& s) const;
    int size() const { return static_cast<int>(entries_.size()); }
    const std::map<CausalStatement, double>& entries() const { return entries_; }

    friend bool operator==(const StatementLedger&, const StatementLedger&) = default;

private:
    std::map<CausalStatement, double> entries_;
};

// Undirected adjacencies; starts complete and only loses edges.
class Skeleton {
public:
    Skeleton() = default;
    explicit Skeleton(int n);

    int size() const { return n_; }
    bool adjacent(NodeId a, NodeId b) const { return contains(adjacency_.at(a), b); }
    NodeSet neighbors(NodeId v) const { return adjacency_.at(v); }
    void remove(NodeId a, NodeId b);
    std::vector<Edge> edges() const;

    friend bool operator==(const Skeleton&, const Skeleton&) = default;

private:
    int n_ = 0;
    std::vector<NodeSet> adjacency_;
};

class CausalMatrix {
public:
    CausalMatrix() = default;
    explicit CausalMatrix(int n);
    explicit CausalMatrix(const CausalLogicMatrix& lc);

    int size() const { return n_; }
    CausalStatus at(NodeId cause, NodeId effect) const;
    void set(NodeId cause, NodeId effect, CausalStatus s);

    friend bool operator==(const CausalMatrix&, const CausalMatrix&) = default;

private:
    int n_ = 0;
    std::vector<CausalStatus> cells_;
};

enum class StructurePriorKind {
    Uniform,     // uniform over the DAGs of every subset size separately
    Multilevel,  // uniform over k_max-node DAGs, marginalized to smaller sizes
};

struct BccdConfig {
    double theta = 0.5;
    int k_max = kMaxEnumerationNodes;
    DirichletPrior dirichlet = DirichletPrior::k2();
    StructurePriorKind prior = StructurePriorKind::Uniform;
    int jobs = 1;
};

// Structure priors for subset sizes 1..k_max (element m-1 is size m).
std::vector<StructurePrior> make_structure_priors(StructurePriorKind kind, int k_max);

// Probability of every statement in the mapping rows of the subset, over
// global variable ids. w must be sorted; node i of the subset DAGs is w[i].
std::vector<std::pair<CausalStatement, double>> subset_statement_probabilities(
    const Dataset& ds, std::span<const VariableId> w, const MappingTable& mapping,
    const std::vector<StructurePrior>& priors, const DirichletPrior& dprior);

// Scores one subset into the ledger and drops skeleton edges inside w whose
// non-adjacency probability exceeds theta.
void score_subset(const Dataset& ds, std::span<const VariableId> w, const MappingTable& mapping,
                  const std::vector<StructurePrior>& priors, const DirichletPrior& dprior, StatementLedger& ledger,
                  Skeleton& skeleton, double theta);

struct AdjacencySearchResult {
    Skeleton skeleton;
    StatementLedger ledger;
    // Scored subsets in the order they were merged.
    std::vector<std::vector<VariableId>> scored;
};

AdjacencySearchResult adjacency_search(const Dataset& ds, const BccdConfig& cfg, const MappingTable& mapping);

enum class DecisionStatus { Applied, SkippedConflict, BelowThreshold, Derived };
const char* status_name(DecisionStatus s);

struct Decision {
    int rank = 0;                       // 1-based position in processing order
    std::optional<double> probability;  // absent for derived facts
    CausalStatement statement;
    DecisionStatus status = DecisionStatus::Applied;

    friend bool operator==(const Decision&, const Decision&) = default;
};

struct InferenceResult {
    CausalLogicMatrix logic;
    CausalMatrix causal;
    std::vector<Decision> log;
};

// Processes ledger statements by decreasing probability (ties by statement
// order) while the probability is strictly above theta. Closure facts not
// asserted by an applied statement are appended as Derived.
InferenceResult rank_and_infer(const StatementLedger& ledger, int n, double theta);

Pag map_to_pag(const Skeleton& skeleton, const CausalMatrix& mc);

struct DiscoveryResult {
    AdjacencySearchResult stage1;
    InferenceResult stage2;
    Pag pag;
};

DiscoveryResult discover(const Dataset& ds, const BccdConfig& cfg, const MappingTable& mapping);

// CSV with header rank,probability,kind,vars,status; vars are names joined
// by ';' in slot order.
void write_decision_log(std::ostream& out, const std::vector<Decision>& log, std::span<const std::string> names);
std::vector<Decision> read_decision_log(std::istream& in, std::span<const std::string> names);

}  // namespace bccd

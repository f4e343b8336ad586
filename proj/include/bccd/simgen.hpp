#pragma once

// Random discrete causal models, sampling, latent marginalization and the
// accuracy measures used to score discovered PAGs.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bccd/graphs.hpp"
#include "bccd/scoring.hpp"
#include "bccd/search.hpp"

namespace bccd {

// Deterministic seed derivation: splitmix64 of the inputs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Random topological order, then each forward pair becomes an edge with
// probability edge_density. Draws exceeding max_degree (in + out) are
// rejected and redrawn.
Dag random_dag(int n, int max_degree, double edge_density, std::uint64_t seed);

struct DiscreteBayesNet {
    Dag dag;
    std::vector<int> arities;
    // cpts[v][j * arities[v] + k] = p(v = k | parents in configuration j);
    // configurations are mixed radix over parents in increasing id order,
    // the smallest id least significant.
    std::vector<std::vector<double>> cpts;

    int configurations(NodeId v) const;
};

// Every CPT row drawn from a symmetric Dirichlet(alpha).
DiscreteBayesNet random_cpts(const Dag& dag, std::vector<int> arities, double alpha, std::uint64_t seed);

// Smallest edge effect: for each edge p -> v, the largest total-variation
// distance between two CPT rows of v that differ only in the value of p;
// the minimum over edges (1 for an edgeless graph).
double min_edge_strength(const DiscreteBayesNet& bn);

// Ancestral sampling; variables are named names[v] (default "V<v>").
Dataset sample_dataset(const DiscreteBayesNet& bn, int rows, std::uint64_t seed,
                       std::vector<std::string> names = {});

Dataset drop_columns(const Dataset& ds, std::span<const VariableId> hidden);

struct GroundTruth {
    Dag full_dag;
    NodeSet hidden = 0;
    std::vector<NodeId> observed;  // full-DAG node of each observed variable
    Mag true_mag;
    Pag true_pag;
};

GroundTruth make_ground_truth(const Dag& full_dag, NodeSet hidden);

// Mark categories for confusion counts: absent, arrowhead, tail, circle.
inline constexpr int kMarkCategories = 4;
int mark_category(Mark m);
using ConfusionMatrix = std::array<std::array<long, kMarkCategories>, kMarkCategories>;

// Over the n(n-1) ordered endpoint positions (a, b), a != b: the mark at a
// on the edge a - b, or "absent" when a and b are not adjacent. Returns the
// fraction of positions where the two graphs agree (1 when n < 2).
double pag_accuracy(const Pag& predicted, const Pag& truth);
// Rows are the true category, columns the predicted one.
ConfusionMatrix confusion_matrix(const Pag& predicted, const Pag& truth);

// Fraction of decided off-diagonal entries that match ancestry in the full
// DAG; 1 when nothing is decided.
double causal_accuracy(const CausalMatrix& mc, const GroundTruth& truth);
int causal_decisions(const CausalMatrix& mc);
// A statement over observed variables checked against the truth: causal
// kinds against ancestry in the full DAG, non-adjacency against the MAG.
bool statement_holds(const CausalStatement& s, const GroundTruth& truth);

// Experiment description, one key=value per line, '#' comments.
struct ExperimentManifest {
    int nodes = 6;  // observed
    int hidden = 1;
    int rows = 1000;
    int trials = 10;
    double theta = 0.5;
    std::uint64_t seed = 1;
    int max_degree = 4;
    double density = 0.4;
    double alpha = 1.0;
    // CPTs are redrawn until min_edge_strength reaches this value.
    double min_strength = 0.0;
    int arity = 2;
    int k_max = kMaxEnumerationNodes;
    StructurePriorKind prior = StructurePriorKind::Uniform;
    DirichletPrior dirichlet = DirichletPrior::k2();
};

ExperimentManifest read_manifest(std::istream& in);
void write_manifest(std::ostream& out, const ExperimentManifest& m);

struct Trial {
    int index = 0;
    GroundTruth truth;
    DiscreteBayesNet model;
    Dataset data;  // observed columns only
};

// Hidden nodes are drawn among nodes with at least two observed children.
Trial generate_trial(const ExperimentManifest& m, int index);

struct EvalReport {
    double pag_accuracy = 1.0;
    double causal_accuracy = 1.0;
    int decisions = 0;
    int applied_statements = 0;
    int correct_statements = 0;
    bool skeleton_match = false;
    ConfusionMatrix confusion{};
};

EvalReport evaluate(const Pag& predicted, const CausalMatrix& mc, const std::vector<Decision>& log,
                    const GroundTruth& truth);

struct ResultRow {
    int trial = 0;
    double theta = 0.5;
    EvalReport report;
};

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace bccd

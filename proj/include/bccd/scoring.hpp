#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bccd/graphs.hpp"

namespace bccd {

using VariableId = int;

// Discrete observations, stored column-major as integer codes 0..arity-1.
class Dataset {
public:
    Dataset() = default;
    // categories[v] lists the tokens of variable v; code k is categories[v][k].
    Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> categories,
            std::vector<std::vector<int>> columns);
    // Categories are named "0".."arity-1".
    static Dataset from_codes(std::vector<std::string> names, std::vector<int> arities,
                              std::vector<std::vector<int>> columns);

    int variables() const { return static_cast<int>(names_.size()); }
    int rows() const { return rows_; }
    const std::string& name(VariableId v) const { return names_.at(v); }
    const std::vector<std::string>& names() const { return names_; }
    int arity(VariableId v) const { return static_cast<int>(categories_.at(v).size()); }
    const std::vector<std::string>& categories(VariableId v) const { return categories_.at(v); }
    std::span<const int> column(VariableId v) const { return columns_.at(v); }
    int value(int row, VariableId v) const { return columns_.at(v)[row]; }
    // Throws ArgumentError for unknown names.
    VariableId index_of(std::string_view name) const;
    // Column projection in the given order; arities are kept.
    Dataset select(std::span<const VariableId> vars) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> categories_;
    std::vector<std::vector<int>> columns_;
    int rows_ = 0;
};

// Optional sidecar pinning the category set of some variables: one line per
// variable, "name: tok1,tok2,...". Order of tokens fixes the codes.
struct Schema {
    std::vector<std::pair<std::string, std::vector<std::string>>> variables;
};
Schema read_schema(std::istream& in);

// Header line of names, then one row per record. Tokens are coded in order
// of first appearance, after any categories pinned by the schema. Arity is
// the number of categories, at least 2. Empty cells are rejected.
Dataset read_csv(std::istream& in, const Schema* schema = nullptr);
void write_csv(std::ostream& out, const Dataset& ds);

// Contingency counts for one family. The parent instantiation index is mixed
// radix with the first listed parent as the least significant digit.
struct CountTable {
    VariableId child = 0;
    std::vector<VariableId> parents;
    int child_arity = 0;
    int configurations = 1;
    std::vector<int> counts;    // [j * child_arity + k]
    std::vector<int> row_sums;  // [j]

    int count(int j, int k) const { return counts[static_cast<std::size_t>(j) * child_arity + k]; }
};

CountTable count_table(const Dataset& ds, VariableId child, std::span<const VariableId> parents);

struct DirichletPrior {
    enum class Kind { K2, BDeu };
    Kind kind = Kind::K2;
    double equivalent_sample_size = 1.0;

    static DirichletPrior k2() { return {Kind::K2, 1.0}; }
    static DirichletPrior bdeu(double ess = 1.0);
    double pseudocount(int arity, int configurations) const;
};

double log_gamma(double x);

// ln p(D_family | parents) for one CountTable.
double log_family_score(const CountTable& table, const DirichletPrior& prior);

// ln p(D | g) by the BD metric. Node i of g is variable vars[i] of ds.
double log_bd_score(const Dataset& ds, const Dag& g, std::span<const VariableId> vars, const DirichletPrior& prior);
// Same, with node i bound to variable i.
double log_bd_score(const Dataset& ds, const Dag& g, const DirichletPrior& prior);

// Prior weights over the canonical DAG list of one level.
struct StructurePrior {
    int level = 0;
    std::vector<double> weights;
};

StructurePrior structure_prior_uniform(int n);

// Priors for levels 1..K (element m-1 is level m) obtained by marginalizing
// the level-K prior. Each K-node structure contributes, for every ordered
// choice of m of its nodes, its independence pattern on those nodes; that
// mass is shared uniformly by the m-node DAGs with the same pattern. Patterns
// no m-node DAG reproduces go to the fewest-parameter DAGs that imply only
// independencies of the pattern.
std::vector<StructurePrior> structure_prior_multilevel(int reference_level, const StructurePrior& base);

struct StructurePosterior {
    int level = 0;
    std::vector<double> log_likelihoods;
    std::vector<double> posterior;
};

// Posterior over every DAG on vars.size() nodes (canonical order), with
// DAG node i bound to variable vars[i].
StructurePosterior structure_posterior(const Dataset& ds, std::span<const VariableId> vars, const StructurePrior& prior,
                                       const DirichletPrior& dprior);

// Mass of structures whose d-separations contain x _||_ y | z (positions
// within the scored subset).
double independence_probability(const StructurePosterior& posterior, NodeId x, NodeId y, NodeSet z);
// Mass of structures entailing x _||_ y | z but not x _||_ y | z + {extra}.
double minimal_dependence_probability(const StructurePosterior& posterior, NodeId x, NodeId y, NodeSet z,
                                      NodeId extra);

struct IndependenceTest {
    double probability = 0.0;
    int structures = 0;
};

// Scores the subset {x, y} + given (+ minimal_dependence) and returns the
// independence (or minimal dependence) probability. Uses the uniform prior.
IndependenceTest test_independence(const Dataset& ds, VariableId x, VariableId y, std::span<const VariableId> given,
                                   std::optional<VariableId> minimal_dependence, const DirichletPrior& dprior);

}  // namespace bccd

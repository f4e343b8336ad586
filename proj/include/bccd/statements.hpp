#pragma once

// Causal statements implied by small structures, and the precomputed table
// from every DAG on up to five nodes to the statements it implies as an
// optimal uDAG.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bccd/graphs.hpp"
#include "bccd/logic.hpp"

namespace bccd {

// Statements from an independence pattern and the PAG of its class: rule 1
// on minimal separating sets, rule 2 on minimal dependences, NonAdjacent for
// separable pairs, NonCause wherever the PAG has no potentially directed
// path, then closure.
StatementSet faithful_statements(const Fingerprint& fp, const Pag& pag);
StatementSet statements_from_faithful_structure(const Dag& g);
StatementSet statements_from_faithful_structure(const Mag& g);

enum class CiAnswer { Independent, Dependent, Unknown };

// Queries accept graphs up to kMaxFingerprintNodes nodes.
CiAnswer udag_ci_query(const Dag& g, NodeId x, NodeId y, NodeSet z);
// Dependent when exactly one simple path connects x and y given z.
CiAnswer udag_unique_path_query(const Dag& g, NodeId x, NodeId y, NodeSet z);
StatementSet noncause_statements_from_optimal_udag(const Dag& g);

// Fewest-parameter DAGs among those whose independencies all hold in m.
std::vector<Dag> optimal_udags_of_mag(const Mag& m);

// Statements derivable from g as optimal uDAG using only what the uDAG
// certifies: independencies of g, dependences certified by any member of
// g's equivalence class, and non-causes from the class PAG.
StatementSet udag_statements(const Dag& g);

// Exhaustive check over every MAG on g's nodes: the intersection of the
// faithful statements of all MAGs that have g as an optimal uDAG.
StatementSet bruteforce_statements(const Dag& g);

// Catalog of every MAG on n <= 5 nodes grouped into equivalence classes,
// with the DAG classes each MAG class is optimally represented by. Built
// once per level.
class MagOracle {
public:
    static const MagOracle& level(int n);

    int nodes() const { return n_; }
    int mag_count() const { return mag_count_; }
    int class_count() const { return static_cast<int>(classes_.size()); }
    const Fingerprint& class_fingerprint(int c) const { return classes_[c].fingerprint; }
    const Mag& class_representative(int c) const { return classes_[c].representative; }
    const StatementSet& class_statements(int c) const { return classes_[c].statements; }
    const std::vector<int>& optimal_dag_classes(int c) const { return classes_[c].optimal_dag_classes; }
    // MAG classes that keep the DAG class (see DagCatalog) as optimal uDAG.
    const std::vector<int>& kept_classes(int dag_class) const { return kept_[dag_class]; }
    // Oracle row for a DAG class.
    const StatementSet& row(int dag_class) const { return rows_[dag_class]; }

private:
    explicit MagOracle(int n);

    struct MagClass {
        Fingerprint fingerprint;
        Mag representative;
        StatementSet statements;
        std::vector<int> optimal_dag_classes;
    };

    int n_ = 0;
    int mag_count_ = 0;
    std::vector<MagClass> classes_;
    std::vector<std::vector<int>> kept_;
    std::vector<StatementSet> rows_;
};

// Positional statements per canonical DAG index, for levels 1..k_max.
class MappingTable {
public:
    static constexpr std::uint16_t kOrderVersion = 1;
    static constexpr std::uint16_t kRuleVersion = 1;
    static constexpr std::uint32_t version() { return (std::uint32_t{kRuleVersion} << 16) | kOrderVersion; }

    MappingTable() = default;
    MappingTable(int k_max, std::vector<std::vector<StatementSet>> levels);

    int k_max() const { return k_max_; }
    int rows(int level) const { return static_cast<int>(levels_.at(level - 1).size()); }
    const StatementSet& row(int level, int dag_index) const { return levels_.at(level - 1).at(dag_index); }

    // Distinct statements of a level and, per row, indices into that list.
    struct Compiled {
        StatementSet statements;
        std::vector<std::vector<std::uint16_t>> rows;
    };
    const Compiled& compiled(int level) const { return compiled_.at(level - 1); }

    void write(std::ostream& out) const;
    // Throws ParseError on malformed input and CacheVersionError on a
    // version mismatch.
    static MappingTable read(std::istream& in);
    void write_text(std::ostream& out) const;

    friend bool operator==(const MappingTable& a, const MappingTable& b) {
        return a.k_max_ == b.k_max_ && a.levels_ == b.levels_;
    }

private:
    void compile();

    int k_max_ = 0;
    std::vector<std::vector<StatementSet>> levels_;
    std::vector<Compiled> compiled_;
};

// Levels up to 4 use the faithful statements of each DAG; level 5 uses the
// uDAG rules. jobs <= 0 means one worker per hardware thread.
MappingTable build_mapping(int k_max = kMaxEnumerationNodes, int jobs = 1);

// Reads the cache at path if it is valid for k_max, otherwise builds the
// table and (when path is non-empty) rewrites the cache.
MappingTable load_or_build_mapping(const std::string& path, int k_max, int jobs);

}  // namespace bccd

#pragma once

// Graph substrate: DAGs, MAGs and PAGs over dense node ids, separation
// criteria, latent projection, Markov equivalence and DAG enumeration.

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bccd {

using NodeId = int;
// Bit v set <=> node v is a member.
using NodeSet = std::uint64_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr int kMaxGraphNodes = 64;
// Fingerprints enumerate every conditioning set, so they are capped.
inline constexpr int kMaxFingerprintNodes = 6;
// Exhaustive DAG enumeration cap (29,281 structures at this size).
inline constexpr int kMaxEnumerationNodes = 5;

constexpr NodeSet node_bit(NodeId v) { return NodeSet{1} << v; }
constexpr bool contains(NodeSet s, NodeId v) { return (s >> v) & 1u; }
constexpr int set_size(NodeSet s) { return std::popcount(s); }
constexpr NodeSet full_set(int n) { return n >= 64 ? ~NodeSet{0} : (NodeSet{1} << n) - 1; }
NodeSet make_set(std::initializer_list<NodeId> nodes);
std::vector<NodeId> members(NodeSet s);

// Endpoint mark. `None` is used for "no edge".
enum class Mark : std::uint8_t { None = 0, Tail, Arrow, Circle };

class Dag {
public:
    Dag() = default;
    explicit Dag(int n);
    Dag(int n, std::initializer_list<Edge> edges);
    Dag(int n, std::span<const Edge> edges);

    int size() const { return n_; }
    bool has_edge(NodeId from, NodeId to) const;
    bool adjacent(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }
    NodeSet parents(NodeId v) const;
    NodeSet children(NodeId v) const;
    int edge_count() const;
    // Sorted by (parent, child).
    std::vector<Edge> edges() const;

    // Rejects self-loops, duplicate adjacencies and edges that close a cycle.
    void add_edge(NodeId from, NodeId to);
    void remove_edge(NodeId from, NodeId to);
    // Copy with the edge between a and b (either direction) removed.
    Dag without_adjacency(NodeId a, NodeId b) const;

    std::vector<NodeId> topological_order() const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    void check_node(NodeId v) const;

    int n_ = 0;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
};

// Storage shared by MAGs and PAGs: mark(at, other) is the mark at `at` on the
// edge between `at` and `other`, or Mark::None when they are not adjacent.
class EndpointGraph {
public:
    int size() const { return n_; }
    Mark mark(NodeId at, NodeId other) const;
    bool adjacent(NodeId a, NodeId b) const;
    NodeSet neighbors(NodeId v) const;
    int edge_count() const;
    // Adjacent pairs (a, b) with a < b, sorted.
    std::vector<Edge> adjacent_pairs() const;

    friend bool operator==(const EndpointGraph&, const EndpointGraph&) = default;

protected:
    EndpointGraph() = default;
    explicit EndpointGraph(int n);
    void put(NodeId a, NodeId b, Mark at_a, Mark at_b);
    void erase(NodeId a, NodeId b);
    void check_node(NodeId v) const;

    int n_ = 0;
    std::vector<Mark> marks_;
    std::vector<NodeSet> adjacency_;
};

// Ancestral graph without selection: every edge is a -> b or a <-> b.
class Mag : public EndpointGraph {
public:
    Mag() = default;
    explicit Mag(int n);
    static Mag from_dag(const Dag& g);

    void add_directed(NodeId from, NodeId to);
    void add_bidirected(NodeId a, NodeId b);
    // Marks restricted to Tail/Arrow; tail-tail (selection) is rejected.
    void set_edge(NodeId a, NodeId b, Mark at_a, Mark at_b);
    void remove_edge(NodeId a, NodeId b) { erase(a, b); }

    bool is_parent(NodeId a, NodeId b) const { return mark(a, b) == Mark::Tail; }
    NodeSet parents(NodeId v) const;
    // No directed cycle and no bidirected edge between ancestor and descendant.
    bool is_ancestral() const;

    friend bool operator==(const Mag&, const Mag&) = default;
};

class Pag : public EndpointGraph {
public:
    Pag() = default;
    explicit Pag(int n);
    void set_edge(NodeId a, NodeId b, Mark at_a, Mark at_b);
    void remove_edge(NodeId a, NodeId b) { erase(a, b); }

    friend bool operator==(const Pag&, const Pag&) = default;
};

// ---------------------------------------------------------------------------
// Separation and ancestry

// Reflexive-transitive closure over directed edges.
NodeSet ancestors(const Dag& g, NodeId x);
NodeSet ancestors(const Mag& g, NodeId x);
NodeSet ancestors_of(const Dag& g, NodeSet xs);
NodeSet ancestors_of(const Mag& g, NodeSet xs);

bool d_separated(const Dag& g, NodeId x, NodeId y, NodeSet z);
bool m_separated(const Mag& g, NodeId x, NodeId y, NodeSet z);

// Number of simple paths between x and y that are unblocked given z
// (non-colliders outside z, colliders ancestors of z), counted up to `limit`.
int count_connecting_paths(const Dag& g, NodeId x, NodeId y, NodeSet z, int limit);
int count_connecting_paths(const Mag& g, NodeId x, NodeId y, NodeSet z, int limit);

// ---------------------------------------------------------------------------
// Independence fingerprints

struct CiStatement {
    NodeId x = 0;
    NodeId y = 0;
    NodeSet z = 0;
    bool independent = true;

    friend auto operator<=>(const CiStatement&, const CiStatement&) = default;
};

// Set of independence statements x _||_ y | z over a graph with at most
// kMaxFingerprintNodes nodes, stored as a bitset over canonical indices.
class Fingerprint {
public:
    Fingerprint() = default;
    explicit Fingerprint(int n);

    int size() const { return n_; }
    // Canonical index: pair rank (x < y, lexicographic) times 2^(n-2) plus the
    // conditioning set compressed onto the remaining n-2 nodes in id order.
    static int index(int n, NodeId x, NodeId y, NodeSet z);
    static int capacity(int n);

    bool independent(NodeId x, NodeId y, NodeSet z) const;
    bool test(int index) const { return (bits_[index >> 6] >> (index & 63)) & 1u; }
    void set(NodeId x, NodeId y, NodeSet z);
    void set(int index) { bits_[index >> 6] |= std::uint64_t{1} << (index & 63); }
    // True when x and y are separated by some conditioning set.
    bool separable(NodeId x, NodeId y) const;
    bool subset_of(const Fingerprint& other) const;
    int count() const;
    // Statements among `nodes`, relabeled to positions 0..nodes.size()-1.
    Fingerprint restricted_to(std::span<const NodeId> nodes) const;
    // Independent statements in canonical (index) order.
    std::vector<CiStatement> statements() const;

    const std::array<std::uint64_t, 4>& words() const { return bits_; }

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;

private:
    int n_ = 0;
    std::array<std::uint64_t, 4> bits_{};
};

struct FingerprintHash {
    std::size_t operator()(const Fingerprint& f) const;
};

Fingerprint independence_fingerprint(const Dag& g);
Fingerprint independence_fingerprint(const Mag& g);

bool markov_equivalent(const Dag& a, const Dag& b);
bool markov_equivalent(const Mag& a, const Mag& b);

// ---------------------------------------------------------------------------
// Latent projection and equivalence classes

// MAG over `observed` (output node i is observed[i]).
Mag latent_project(const Dag& g, std::span<const NodeId> observed);

// All MAGs Markov equivalent to m. They share m's skeleton, so only the
// orientations of that skeleton are searched.
std::vector<Mag> mag_equivalence_class(const Mag& m);

// Common skeleton; a mark is kept where every member agrees, circle elsewhere.
Pag pag_of(std::span<const Mag> members);
Pag pag_of(std::span<const Dag> members);

// PAG of the MAG equivalence class containing g.
Pag equivalence_class_pag(const Mag& g);
Pag equivalence_class_pag(const Dag& g);

// A path x -> ... -> y on which every edge could be oriented toward y by
// resolving circles: no arrowhead at the near end, no tail at the far end.
bool potentially_directed_path(const Pag& p, NodeId x, NodeId y);

// ---------------------------------------------------------------------------
// Enumeration

// Every labeled DAG on n nodes (1 <= n <= 5), ordered lexicographically by the
// row-major flattened adjacency matrix (entry (i, j) set iff i -> j).
std::vector<Dag> enumerate_dags(int n);

// Row-major adjacency bits, entry (0,0) most significant; orders enumerate_dags.
std::uint32_t adjacency_code(const Dag& g);

// Free parameters with every variable binary: sum over nodes of 2^|parents|.
int binary_parameter_count(const Dag& g);

// Per-level table of all DAGs with fingerprints and equivalence classes.
// Built once per level on first use; immutable and shareable afterwards.
class DagCatalog {
public:
    static const DagCatalog& level(int n);

    int nodes() const { return n_; }
    int size() const { return static_cast<int>(dags_.size()); }
    const Dag& dag(int i) const { return dags_[i]; }
    const Fingerprint& fingerprint(int i) const { return fingerprints_[i]; }
    int parameter_count(int i) const { return parameters_[i]; }
    // Equivalence classes are numbered by their first member's index.
    int class_of(int i) const { return class_of_[i]; }
    int class_count() const { return static_cast<int>(classes_.size()); }
    const std::vector<int>& class_members(int c) const { return classes_[c]; }
    const Fingerprint& class_fingerprint(int c) const { return fingerprints_[classes_[c].front()]; }
    int class_parameter_count(int c) const { return parameters_[classes_[c].front()]; }
    // -1 when g has a different node count.
    int index_of(const Dag& g) const;
    // Index of the class with this fingerprint, or -1.
    int class_with(const Fingerprint& f) const;

private:
    explicit DagCatalog(int n);

    int n_;
    std::vector<Dag> dags_;
    std::vector<Fingerprint> fingerprints_;
    std::vector<int> parameters_;
    std::vector<int> class_of_;
    std::vector<std::vector<int>> classes_;
    std::unordered_map<std::uint32_t, int> code_index_;
    std::unordered_map<Fingerprint, int, FingerprintHash> fingerprint_class_;
};

// ---------------------------------------------------------------------------
// Text format: header "nodes: <n>", then one edge per line "a <m1>-<m2> b"
// with m1 in {-, <, o} at a and m2 in {-, >, o} at b. '#' starts a comment.

std::string to_text(const Dag& g);
std::string to_text(const Mag& g);
std::string to_text(const Pag& g);
Dag parse_dag(std::istream& in);
Mag parse_mag(std::istream& in);
Pag parse_pag(std::istream& in);

}  // namespace bccd

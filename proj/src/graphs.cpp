#include "bccd/graphs.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

#include "bccd/errors.hpp"

namespace bccd {

NodeSet make_set(std::initializer_list<NodeId> nodes) {
    NodeSet s = 0;
    for (NodeId v : nodes) {
        if (v < 0 || v >= kMaxGraphNodes) throw ArgumentError("node id out of range");
        s |= node_bit(v);
    }
    return s;
}

std::vector<NodeId> members(NodeSet s) {
    std::vector<NodeId> out;
    out.reserve(set_size(s));
    while (s) {
        out.push_back(std::countr_zero(s));
        s &= s - 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(int n) : n_(n) {
    if (n < 0 || n > kMaxGraphNodes) throw CapacityError("graph size out of range: " + std::to_string(n));
    parents_.assign(n, 0);
    children_.assign(n, 0);
}

Dag::Dag(int n, std::initializer_list<Edge> edges) : Dag(n, std::span<const Edge>(edges.begin(), edges.size())) {}

Dag::Dag(int n, std::span<const Edge> edges) : Dag(n) {
    for (auto [a, b] : edges) add_edge(a, b);
}

void Dag::check_node(NodeId v) const {
    if (v < 0 || v >= n_) throw ArgumentError("node id " + std::to_string(v) + " out of range");
}

bool Dag::has_edge(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    return contains(children_[from], to);
}

NodeSet Dag::parents(NodeId v) const {
    check_node(v);
    return parents_[v];
}

NodeSet Dag::children(NodeId v) const {
    check_node(v);
    return children_[v];
}

int Dag::edge_count() const {
    int c = 0;
    for (NodeSet s : children_) c += set_size(s);
    return c;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b : members(children_[a])) out.emplace_back(a, b);
    return out;
}

void Dag::add_edge(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    if (from == to) throw ArgumentError("self-loop on node " + std::to_string(from));
    if (adjacent(from, to)) throw ArgumentError("nodes already adjacent");
    if (contains(ancestors(*this, from), to)) throw ArgumentError("edge would create a directed cycle");
    children_[from] |= node_bit(to);
    parents_[to] |= node_bit(from);
}

void Dag::remove_edge(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    children_[from] &= ~node_bit(to);
    parents_[to] &= ~node_bit(from);
}

Dag Dag::without_adjacency(NodeId a, NodeId b) const {
    Dag copy = *this;
    copy.remove_edge(a, b);
    copy.remove_edge(b, a);
    return copy;
}

std::vector<NodeId> Dag::topological_order() const {
    std::vector<NodeId> order;
    order.reserve(n_);
    NodeSet placed = 0;
    while (static_cast<int>(order.size()) < n_) {
        bool progressed = false;
        for (NodeId v = 0; v < n_; ++v) {
            if (!contains(placed, v) && (parents_[v] & ~placed) == 0) {
                order.push_back(v);
                placed |= node_bit(v);
                progressed = true;
            }
        }
        if (!progressed) throw InvariantError("cycle in DAG");
    }
    return order;
}

// ---------------------------------------------------------------------------
// EndpointGraph, Mag, Pag

EndpointGraph::EndpointGraph(int n) : n_(n) {
    if (n < 0 || n > kMaxGraphNodes) throw CapacityError("graph size out of range: " + std::to_string(n));
    marks_.assign(static_cast<std::size_t>(n) * n, Mark::None);
    adjacency_.assign(n, 0);
}

void EndpointGraph::check_node(NodeId v) const {
    if (v < 0 || v >= n_) throw ArgumentError("node id " + std::to_string(v) + " out of range");
}

Mark EndpointGraph::mark(NodeId at, NodeId other) const {
    check_node(at);
    check_node(other);
    return marks_[static_cast<std::size_t>(other) * n_ + at];
}

bool EndpointGraph::adjacent(NodeId a, NodeId b) const {
    check_node(a);
    check_node(b);
    return contains(adjacency_[a], b);
}

NodeSet EndpointGraph::neighbors(NodeId v) const {
    check_node(v);
    return adjacency_[v];
}

int EndpointGraph::edge_count() const {
    int c = 0;
    for (NodeSet s : adjacency_) c += set_size(s);
    return c / 2;
}

std::vector<Edge> EndpointGraph::adjacent_pairs() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b : members(adjacency_[a] & ~full_set(a + 1))) out.emplace_back(a, b);
    return out;
}

void EndpointGraph::put(NodeId a, NodeId b, Mark at_a, Mark at_b) {
    check_node(a);
    check_node(b);
    if (a == b) throw ArgumentError("self-loop on node " + std::to_string(a));
    if (at_a == Mark::None || at_b == Mark::None) throw ArgumentError("edge endpoints need a mark");
    // Row `other`, column `at` holds the mark at `at`.
    marks_[static_cast<std::size_t>(b) * n_ + a] = at_a;
    marks_[static_cast<std::size_t>(a) * n_ + b] = at_b;
    adjacency_[a] |= node_bit(b);
    adjacency_[b] |= node_bit(a);
}

void EndpointGraph::erase(NodeId a, NodeId b) {
    check_node(a);
    check_node(b);
    marks_[static_cast<std::size_t>(b) * n_ + a] = Mark::None;
    marks_[static_cast<std::size_t>(a) * n_ + b] = Mark::None;
    adjacency_[a] &= ~node_bit(b);
    adjacency_[b] &= ~node_bit(a);
}

Mag::Mag(int n) : EndpointGraph(n) {}

Mag Mag::from_dag(const Dag& g) {
    Mag m(g.size());
    for (auto [a, b] : g.edges()) m.add_directed(a, b);
    return m;
}

void Mag::add_directed(NodeId from, NodeId to) { set_edge(from, to, Mark::Tail, Mark::Arrow); }

void Mag::add_bidirected(NodeId a, NodeId b) { set_edge(a, b, Mark::Arrow, Mark::Arrow); }

void Mag::set_edge(NodeId a, NodeId b, Mark at_a, Mark at_b) {
    auto ok = [](Mark m) { return m == Mark::Tail || m == Mark::Arrow; };
    if (!ok(at_a) || !ok(at_b)) throw ArgumentError("MAG edges carry only tail/arrowhead marks");
    if (at_a == Mark::Tail && at_b == Mark::Tail) throw ArgumentError("undirected MAG edges (selection) are not supported");
    put(a, b, at_a, at_b);
}

NodeSet Mag::parents(NodeId v) const {
    NodeSet p = 0;
    for (NodeId u : members(neighbors(v)))
        if (mark(u, v) == Mark::Tail) p |= node_bit(u);
    return p;
}

Pag::Pag(int n) : EndpointGraph(n) {}

void Pag::set_edge(NodeId a, NodeId b, Mark at_a, Mark at_b) { put(a, b, at_a, at_b); }

// ---------------------------------------------------------------------------
// Compact view used by the separation routines. For each node v:
// nbr[v] the neighbors, arrow[v] the neighbors u whose edge has an arrowhead
// at v, par[v] the parents.

namespace {

struct View {
    int n = 0;
    std::array<NodeSet, kMaxGraphNodes> nbr{};
    std::array<NodeSet, kMaxGraphNodes> arrow{};
    std::array<NodeSet, kMaxGraphNodes> par{};
};

View view_of(const Dag& g) {
    View v;
    v.n = g.size();
    for (NodeId i = 0; i < v.n; ++i) {
        v.par[i] = g.parents(i);
        v.nbr[i] = g.parents(i) | g.children(i);
        v.arrow[i] = g.parents(i);
    }
    return v;
}

View view_of(const Mag& g) {
    View v;
    v.n = g.size();
    for (NodeId i = 0; i < v.n; ++i) {
        v.nbr[i] = g.neighbors(i);
        for (NodeId u : members(v.nbr[i])) {
            if (g.mark(i, u) == Mark::Arrow) v.arrow[i] |= node_bit(u);
            if (g.mark(u, i) == Mark::Tail) v.par[i] |= node_bit(u);
        }
    }
    return v;
}

NodeSet ancestors_in(const View& v, NodeSet xs) {
    NodeSet result = xs;
    NodeSet frontier = xs;
    while (frontier) {
        NodeSet next = 0;
        for (NodeId u : members(frontier)) next |= v.par[u];
        frontier = next & ~result;
        result |= next;
    }
    return result;
}

void check_query(int n, NodeId x, NodeId y, NodeSet z) {
    if (x < 0 || x >= n || y < 0 || y >= n) throw ArgumentError("node id out of range");
    if (x == y) throw ArgumentError("separation query needs two distinct nodes");
    if (z & ~full_set(n)) throw ArgumentError("conditioning set has nodes out of range");
    if (contains(z, x) || contains(z, y)) throw ArgumentError("conditioning set contains an endpoint");
}

// Reachability over (node, arrived-with-arrowhead) states. A connecting walk
// whose colliders are ancestors of z exists iff a connecting path does.
bool connected(const View& v, NodeId x, NodeId y, NodeSet z, NodeSet anz) {
    std::array<NodeSet, 2> seen{0, 0};
    std::array<std::pair<NodeId, int>, 2 * kMaxGraphNodes> stack;
    int top = 0;
    for (NodeId u : members(v.nbr[x])) {
        int into = contains(v.arrow[u], x) ? 1 : 0;
        if (!contains(seen[into], u)) {
            seen[into] |= node_bit(u);
            stack[top++] = {u, into};
        }
    }
    while (top > 0) {
        auto [node, into] = stack[--top];
        if (node == y) return true;
        for (NodeId w : members(v.nbr[node])) {
            bool collider = into && contains(v.arrow[node], w);
            if (collider ? !contains(anz, node) : contains(z, node)) continue;
            int next = contains(v.arrow[w], node) ? 1 : 0;
            if (contains(seen[next], w)) continue;
            seen[next] |= node_bit(w);
            stack[top++] = {w, next};
        }
    }
    return false;
}

bool separated(const View& v, NodeId x, NodeId y, NodeSet z) {
    check_query(v.n, x, y, z);
    return !connected(v, x, y, z, ancestors_in(v, z));
}

int count_paths(const View& v, NodeId x, NodeId y, NodeSet z, int limit) {
    check_query(v.n, x, y, z);
    NodeSet anz = ancestors_in(v, z);
    int count = 0;
    // Depth-first over simple paths; `prev` is the node we arrived from.
    auto dfs = [&](auto&& self, NodeId node, NodeId prev, NodeSet visited) -> void {
        if (count >= limit) return;
        if (node == y) {
            ++count;
            return;
        }
        for (NodeId w : members(v.nbr[node] & ~visited)) {
            if (node != x) {
                bool collider = contains(v.arrow[node], prev) && contains(v.arrow[node], w);
                if (collider ? !contains(anz, node) : contains(z, node)) continue;
            }
            self(self, w, node, visited | node_bit(w));
            if (count >= limit) return;
        }
    };
    dfs(dfs, x, -1, node_bit(x));
    return count;
}

Fingerprint fingerprint_of(const View& v) {
    if (v.n > kMaxFingerprintNodes)
        throw CapacityError("fingerprints are limited to " + std::to_string(kMaxFingerprintNodes) + " nodes");
    Fingerprint f(v.n);
    NodeSet all = full_set(v.n);
    for (NodeSet z = 0; z <= all; ++z) {
        NodeSet anz = ancestors_in(v, z);
        for (NodeId x = 0; x < v.n; ++x) {
            if (contains(z, x)) continue;
            for (NodeId y = x + 1; y < v.n; ++y) {
                if (contains(z, y)) continue;
                if (!connected(v, x, y, z, anz)) f.set(x, y, z);
            }
        }
    }
    return f;
}

}  // namespace

NodeSet ancestors(const Dag& g, NodeId x) {
    if (x < 0 || x >= g.size()) throw ArgumentError("node id out of range");
    return ancestors_in(view_of(g), node_bit(x));
}

NodeSet ancestors(const Mag& g, NodeId x) {
    if (x < 0 || x >= g.size()) throw ArgumentError("node id out of range");
    return ancestors_in(view_of(g), node_bit(x));
}

NodeSet ancestors_of(const Dag& g, NodeSet xs) { return ancestors_in(view_of(g), xs); }
NodeSet ancestors_of(const Mag& g, NodeSet xs) { return ancestors_in(view_of(g), xs); }

bool Mag::is_ancestral() const {
    View v = view_of(*this);
    for (NodeId a = 0; a < n_; ++a) {
        NodeSet anc = ancestors_in(v, v.par[a]);
        if (contains(anc, a)) return false;  // directed cycle
        // An arrowhead at a from a descendant of a: bidirected edge to a descendant,
        // or a parent that is also a descendant (already a cycle).
        for (NodeId b : members(v.arrow[a] & ~v.par[a]))
            if (contains(ancestors_in(v, node_bit(b)), a) || contains(anc, b)) return false;
    }
    return true;
}

bool d_separated(const Dag& g, NodeId x, NodeId y, NodeSet z) { return separated(view_of(g), x, y, z); }
bool m_separated(const Mag& g, NodeId x, NodeId y, NodeSet z) { return separated(view_of(g), x, y, z); }

int count_connecting_paths(const Dag& g, NodeId x, NodeId y, NodeSet z, int limit) {
    return count_paths(view_of(g), x, y, z, limit);
}

int count_connecting_paths(const Mag& g, NodeId x, NodeId y, NodeSet z, int limit) {
    return count_paths(view_of(g), x, y, z, limit);
}

// ---------------------------------------------------------------------------
// Fingerprint

Fingerprint::Fingerprint(int n) : n_(n) {
    if (n < 0 || n > kMaxFingerprintNodes)
        throw CapacityError("fingerprints are limited to " + std::to_string(kMaxFingerprintNodes) + " nodes");
}

int Fingerprint::capacity(int n) { return n < 2 ? 0 : (n * (n - 1) / 2) << (n - 2); }

int Fingerprint::index(int n, NodeId x, NodeId y, NodeSet z) {
    if (x > y) std::swap(x, y);
    // Pairs (0,1),(0,2),...,(0,n-1),(1,2),...
    int pair = x * (2 * n - x - 1) / 2 + (y - x - 1);
    int compressed = 0;
    int bit = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (v == x || v == y) continue;
        if (contains(z, v)) compressed |= 1 << bit;
        ++bit;
    }
    return (pair << (n - 2)) | compressed;
}

bool Fingerprint::independent(NodeId x, NodeId y, NodeSet z) const {
    check_query(n_, x, y, z);
    return test(index(n_, x, y, z));
}

void Fingerprint::set(NodeId x, NodeId y, NodeSet z) { set(index(n_, x, y, z)); }

bool Fingerprint::separable(NodeId x, NodeId y) const {
    if (x > y) std::swap(x, y);
    int base = index(n_, x, y, 0);
    int width = 1 << (n_ - 2);
    for (int i = 0; i < width; ++i)
        if (test(base + i)) return true;
    return false;
}

bool Fingerprint::subset_of(const Fingerprint& other) const {
    for (std::size_t w = 0; w < bits_.size(); ++w)
        if (bits_[w] & ~other.bits_[w]) return false;
    return true;
}

int Fingerprint::count() const {
    int c = 0;
    for (auto w : bits_) c += std::popcount(w);
    return c;
}

Fingerprint Fingerprint::restricted_to(std::span<const NodeId> nodes) const {
    int m = static_cast<int>(nodes.size());
    Fingerprint out(m);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            NodeSet rest = full_set(m) & ~node_bit(a) & ~node_bit(b);
            for (NodeSet z = rest;; z = (z - 1) & rest) {
                NodeSet zg = 0;
                for (int k : members(z)) zg |= node_bit(nodes[k]);
                if (independent(nodes[a], nodes[b], zg)) out.set(a, b, z);
                if (z == 0) break;
            }
        }
    }
    return out;
}

std::vector<CiStatement> Fingerprint::statements() const {
    std::vector<CiStatement> out;
    for (NodeId x = 0; x < n_; ++x) {
        for (NodeId y = x + 1; y < n_; ++y) {
            NodeSet rest = full_set(n_) & ~node_bit(x) & ~node_bit(y);
            // Enumerate subsets in compressed-index order.
            std::vector<NodeId> others = members(rest);
            for (int c = 0; c < (1 << others.size()); ++c) {
                NodeSet z = 0;
                for (std::size_t k = 0; k < others.size(); ++k)
                    if ((c >> k) & 1) z |= node_bit(others[k]);
                if (test(index(n_, x, y, z))) out.push_back({x, y, z, true});
            }
        }
    }
    return out;
}

std::size_t FingerprintHash::operator()(const Fingerprint& f) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(f.size());
    for (auto w : f.words()) {
        h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

Fingerprint independence_fingerprint(const Dag& g) { return fingerprint_of(view_of(g)); }
Fingerprint independence_fingerprint(const Mag& g) { return fingerprint_of(view_of(g)); }

bool markov_equivalent(const Dag& a, const Dag& b) {
    if (a.size() != b.size()) throw ArgumentError("graphs have different node counts");
    return independence_fingerprint(a) == independence_fingerprint(b);
}

bool markov_equivalent(const Mag& a, const Mag& b) {
    if (a.size() != b.size()) throw ArgumentError("graphs have different node counts");
    return independence_fingerprint(a) == independence_fingerprint(b);
}

// ---------------------------------------------------------------------------
// Latent projection

Mag latent_project(const Dag& g, std::span<const NodeId> observed) {
    if (observed.empty()) throw ArgumentError("latent projection needs at least one observed node");
    NodeSet obs = 0;
    for (NodeId v : observed) {
        if (v < 0 || v >= g.size()) throw ArgumentError("observed node out of range");
        if (contains(obs, v)) throw ArgumentError("observed node listed twice");
        obs |= node_bit(v);
    }
    View v = view_of(g);
    int m = static_cast<int>(observed.size());
    Mag out(m);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            NodeId ga = observed[a], gb = observed[b];
            NodeSet rest = obs & ~node_bit(ga) & ~node_bit(gb);
            bool adjacent = true;
            for (NodeSet s = rest;; s = (s - 1) & rest) {
                if (!connected(v, ga, gb, s, ancestors_in(v, s))) {
                    adjacent = false;
                    break;
                }
                if (s == 0) break;
            }
            if (!adjacent) continue;
            Mark at_a = contains(ancestors_in(v, node_bit(gb)), ga) ? Mark::Tail : Mark::Arrow;
            Mark at_b = contains(ancestors_in(v, node_bit(ga)), gb) ? Mark::Tail : Mark::Arrow;
            out.set_edge(a, b, at_a, at_b);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalence classes

std::vector<Mag> mag_equivalence_class(const Mag& m) {
    int n = m.size();
    if (n > kMaxFingerprintNodes)
        throw CapacityError("equivalence classes are limited to " + std::to_string(kMaxFingerprintNodes) + " nodes");
    const Fingerprint target = independence_fingerprint(m);
    const std::vector<Edge> edges = m.adjacent_pairs();

    // Unshielded triples (a, c, b): the collider status must match m's.
    struct Triple {
        int e1, e2;
        NodeId c;
        NodeId a, b;
        bool collider;
    };
    std::vector<Triple> triples;
    auto edge_index = [&](NodeId a, NodeId b) {
        Edge key{std::min(a, b), std::max(a, b)};
        return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), key) - edges.begin());
    };
    for (NodeId c = 0; c < n; ++c) {
        std::vector<NodeId> nb = members(m.neighbors(c));
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                NodeId a = nb[i], b = nb[j];
                if (m.adjacent(a, b)) continue;
                bool collider = m.mark(c, a) == Mark::Arrow && m.mark(c, b) == Mark::Arrow;
                triples.push_back({edge_index(a, c), edge_index(b, c), c, a, b, collider});
            }
    }
    // Triples checked once both of their edges are assigned.
    std::vector<std::vector<int>> due(edges.size());
    for (int t = 0; t < static_cast<int>(triples.size()); ++t)
        due[std::max(triples[t].e1, triples[t].e2)].push_back(t);

    const std::array<std::pair<Mark, Mark>, 3> orientations{{
        {Mark::Tail, Mark::Arrow},
        {Mark::Arrow, Mark::Tail},
        {Mark::Arrow, Mark::Arrow},
    }};

    std::vector<Mag> out;
    Mag current(n);
    auto search = [&](auto&& self, std::size_t k) -> void {
        if (k == edges.size()) {
            if (current.is_ancestral() && independence_fingerprint(current) == target) out.push_back(current);
            return;
        }
        auto [a, b] = edges[k];
        for (auto [ma, mb] : orientations) {
            current.set_edge(a, b, ma, mb);
            bool ok = true;
            for (int t : due[k]) {
                const Triple& tr = triples[t];
                bool collider = current.mark(tr.c, tr.a) == Mark::Arrow && current.mark(tr.c, tr.b) == Mark::Arrow;
                if (collider != tr.collider) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, k + 1);
        }
        current.remove_edge(a, b);
    };
    search(search, 0);
    return out;
}

namespace {

template <typename G>
Pag intersect_marks(std::span<const G> members, auto&& mark_of) {
    if (members.empty()) throw ArgumentError("pag_of needs at least one graph");
    int n = members.front().size();
    Pag p(n);
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            bool adj = members.front().adjacent(a, b);
            for (const G& g : members) {
                if (g.size() != n) throw ArgumentError("pag_of members differ in node count");
                if (g.adjacent(a, b) != adj) throw ArgumentError("pag_of members differ in skeleton");
            }
            if (!adj) continue;
            Mark ma = mark_of(members.front(), a, b);
            Mark mb = mark_of(members.front(), b, a);
            for (const G& g : members) {
                if (mark_of(g, a, b) != ma) ma = Mark::Circle;
                if (mark_of(g, b, a) != mb) mb = Mark::Circle;
            }
            p.set_edge(a, b, ma, mb);
        }
    }
    return p;
}

}  // namespace

Pag pag_of(std::span<const Mag> members) {
    return intersect_marks(members, [](const Mag& g, NodeId at, NodeId other) { return g.mark(at, other); });
}

Pag pag_of(std::span<const Dag> members) {
    return intersect_marks(members, [](const Dag& g, NodeId at, NodeId other) {
        return g.has_edge(at, other) ? Mark::Tail : Mark::Arrow;
    });
}

Pag equivalence_class_pag(const Mag& g) {
    std::vector<Mag> cls = mag_equivalence_class(g);
    return pag_of(std::span<const Mag>(cls));
}

Pag equivalence_class_pag(const Dag& g) { return equivalence_class_pag(Mag::from_dag(g)); }

bool potentially_directed_path(const Pag& p, NodeId x, NodeId y) {
    int n = p.size();
    if (x < 0 || x >= n || y < 0 || y >= n) throw ArgumentError("node id out of range");
    if (x == y) throw ArgumentError("potentially directed path needs two distinct nodes");
    NodeSet seen = node_bit(x);
    std::vector<NodeId> queue{x};
    for (std::size_t i = 0; i < queue.size(); ++i) {
        NodeId v = queue[i];
        for (NodeId w : members(p.neighbors(v) & ~seen)) {
            Mark near = p.mark(v, w);
            Mark far = p.mark(w, v);
            if (near == Mark::Arrow || far == Mark::Tail) continue;
            if (w == y) return true;
            seen |= node_bit(w);
            queue.push_back(w);
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

void check_enumeration_size(int n) {
    if (n < 1 || n > kMaxEnumerationNodes)
        throw CapacityError("DAG enumeration supports 1.." + std::to_string(kMaxEnumerationNodes) + " nodes, got " +
                            std::to_string(n));
}

}  // namespace

std::vector<Dag> enumerate_dags(int n) {
    check_enumeration_size(n);
    // Off-diagonal positions in row-major order; the first one maps to the most
    // significant bit of the counter so ascending counters are lexicographic.
    std::vector<Edge> positions;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
            if (i != j) positions.emplace_back(i, j);
    const int m = static_cast<int>(positions.size());
    std::vector<Dag> out;
    std::array<NodeSet, kMaxEnumerationNodes> parents{};
    for (std::uint32_t code = 0; code < (std::uint32_t{1} << m); ++code) {
        parents.fill(0);
        bool two_cycle = false;
        for (int k = 0; k < m; ++k) {
            if ((code >> (m - 1 - k)) & 1u) {
                auto [i, j] = positions[k];
                if (contains(parents[i], j)) {
                    two_cycle = true;
                    break;
                }
                parents[j] |= node_bit(i);
            }
        }
        if (two_cycle) continue;
        // Peel sources until stuck.
        NodeSet placed = 0;
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (NodeId v = 0; v < n; ++v)
                if (!contains(placed, v) && (parents[v] & ~placed) == 0) {
                    placed |= node_bit(v);
                    progressed = true;
                }
        }
        if (placed != full_set(n)) continue;
        Dag g(n);
        for (int k = 0; k < m; ++k)
            if ((code >> (m - 1 - k)) & 1u) g.add_edge(positions[k].first, positions[k].second);
        out.push_back(std::move(g));
    }
    return out;
}

std::uint32_t adjacency_code(const Dag& g) {
    int n = g.size();
    if (n > kMaxEnumerationNodes) throw CapacityError("adjacency codes are limited to 5 nodes");
    std::uint32_t code = 0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
            if (g.has_edge(i, j)) code |= std::uint32_t{1} << (n * n - 1 - (i * n + j));
    return code;
}

int binary_parameter_count(const Dag& g) {
    int total = 0;
    for (NodeId v = 0; v < g.size(); ++v) total += 1 << set_size(g.parents(v));
    return total;
}

DagCatalog::DagCatalog(int n) : n_(n) {
    dags_ = enumerate_dags(n);
    fingerprints_.reserve(dags_.size());
    parameters_.reserve(dags_.size());
    class_of_.reserve(dags_.size());
    for (int i = 0; i < size(); ++i) {
        const Dag& g = dags_[i];
        fingerprints_.push_back(independence_fingerprint(g));
        parameters_.push_back(binary_parameter_count(g));
        code_index_.emplace(adjacency_code(g), i);
        auto [it, inserted] = fingerprint_class_.emplace(fingerprints_.back(), static_cast<int>(classes_.size()));
        if (inserted) classes_.emplace_back();
        classes_[it->second].push_back(i);
        class_of_.push_back(it->second);
    }
}

const DagCatalog& DagCatalog::level(int n) {
    check_enumeration_size(n);
    static std::array<std::once_flag, kMaxEnumerationNodes + 1> once;
    static std::array<std::unique_ptr<DagCatalog>, kMaxEnumerationNodes + 1> catalogs;
    std::call_once(once[n], [n] { catalogs[n].reset(new DagCatalog(n)); });
    return *catalogs[n];
}

int DagCatalog::index_of(const Dag& g) const {
    if (g.size() != n_) return -1;
    auto it = code_index_.find(adjacency_code(g));
    return it == code_index_.end() ? -1 : it->second;
}

int DagCatalog::class_with(const Fingerprint& f) const {
    auto it = fingerprint_class_.find(f);
    return it == fingerprint_class_.end() ? -1 : it->second;
}

}  // namespace bccd

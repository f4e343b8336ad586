#include <doctest.h>

#include <random>
#include <sstream>

#include "bccd/errors.hpp"
#include "bccd/graphs.hpp"
#include "bccd/simgen.hpp"

using namespace bccd;

namespace {

// Robinson's recurrence for labeled DAGs.
long long robinson(int n) {
    std::vector<long long> a(n + 1, 0);
    a[0] = 1;
    auto binom = [](int m, int k) {
        long long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
        return r;
    };
    for (int m = 1; m <= n; ++m)
        for (int k = 1; k <= m; ++k) {
            long long term = binom(m, k) * (1LL << (k * (m - k))) * a[m - k];
            a[m] += (k % 2 == 1) ? term : -term;
        }
    return a[n];
}

}  // namespace

TEST_CASE("d-separation on chains, forks and colliders") {
    Dag chain(3, {{0, 1}, {1, 2}});
    CHECK_FALSE(d_separated(chain, 0, 2, 0));
    CHECK(d_separated(chain, 0, 2, make_set({1})));

    Dag fork(3, {{1, 0}, {1, 2}});
    CHECK_FALSE(d_separated(fork, 0, 2, 0));
    CHECK(d_separated(fork, 0, 2, make_set({1})));

    Dag collider(4, {{0, 2}, {1, 2}, {2, 3}});
    CHECK(d_separated(collider, 0, 1, 0));
    CHECK_FALSE(d_separated(collider, 0, 1, make_set({2})));
    CHECK_FALSE(d_separated(collider, 0, 1, make_set({3})));

    CHECK_THROWS_AS(d_separated(chain, 0, 0, 0), ArgumentError);
    CHECK_THROWS_AS(d_separated(chain, 0, 2, make_set({0})), ArgumentError);
}

TEST_CASE("DAG edits reject cycles and self-loops") {
    Dag g(3, {{0, 1}, {1, 2}});
    CHECK_THROWS_AS(g.add_edge(2, 0), ArgumentError);
    CHECK_THROWS_AS(g.add_edge(1, 1), ArgumentError);
    CHECK_THROWS_AS(g.add_edge(1, 0), ArgumentError);
    CHECK(g.topological_order() == std::vector<NodeId>{0, 1, 2});
    CHECK(ancestors(g, 2) == make_set({0, 1, 2}));
}

TEST_CASE("enumeration counts follow Robinson's recurrence") {
    for (int n = 1; n <= 4; ++n) CHECK(static_cast<long long>(enumerate_dags(n).size()) == robinson(n));
    CHECK(robinson(5) == 29281);
    CHECK(DagCatalog::level(3).class_count() == 11);
    CHECK(DagCatalog::level(4).class_count() == 185);
}

TEST_CASE("enumeration order is lexicographic in the adjacency code") {
    auto dags = enumerate_dags(3);
    for (std::size_t i = 1; i < dags.size(); ++i) CHECK(adjacency_code(dags[i - 1]) < adjacency_code(dags[i]));
    CHECK(dags.front().edge_count() == 0);
}

TEST_CASE("latent projection") {
    // 0 <- 2 -> 1 with 2 hidden gives a bidirected edge.
    Dag confounded(3, {{2, 0}, {2, 1}});
    std::vector<NodeId> obs{0, 1};
    Mag m = latent_project(confounded, obs);
    CHECK(m.mark(0, 1) == Mark::Arrow);
    CHECK(m.mark(1, 0) == Mark::Arrow);

    // 0 -> 2 -> 1 with 2 hidden gives 0 -> 1.
    Dag mediated(3, {{0, 2}, {2, 1}});
    Mag d = latent_project(mediated, obs);
    CHECK(d.mark(0, 1) == Mark::Tail);
    CHECK(d.mark(1, 0) == Mark::Arrow);

    // 0 -> 2 <- 1 with 2 hidden leaves 0 and 1 separated.
    Dag collider(3, {{0, 2}, {1, 2}});
    CHECK_FALSE(latent_project(collider, obs).adjacent(0, 1));
}

TEST_CASE("latent projection preserves separations among observed nodes") {
    for (int trial = 0; trial < 40; ++trial) {
        Dag g = random_dag(6, 5, 0.5, 100 + trial);
        std::vector<NodeId> obs{0, 1, 3, 4, 5};
        Mag m = latent_project(g, obs);
        CHECK(m.is_ancestral());
        const int k = static_cast<int>(obs.size());
        for (NodeId x = 0; x < k; ++x)
            for (NodeId y = x + 1; y < k; ++y)
                for (NodeSet z = 0; z < (NodeSet{1} << k); ++z) {
                    if (contains(z, x) || contains(z, y)) continue;
                    NodeSet full = 0;
                    for (NodeId v : members(z)) full |= node_bit(obs[v]);
                    CHECK(m_separated(m, x, y, z) == d_separated(g, obs[x], obs[y], full));
                }
    }
}

TEST_CASE("ancestral checks") {
    Mag m(3);
    m.add_directed(0, 1);
    m.add_directed(1, 2);
    CHECK(m.is_ancestral());
    m.add_bidirected(0, 2);
    CHECK_FALSE(m.is_ancestral());
    Mag u(2);
    CHECK_THROWS_AS(u.set_edge(0, 1, Mark::Tail, Mark::Tail), ArgumentError);
}

TEST_CASE("PAG of a v-structure and of a chain") {
    Pag v = equivalence_class_pag(Dag(3, {{0, 2}, {1, 2}}));
    CHECK(v.mark(0, 2) == Mark::Circle);
    CHECK(v.mark(2, 0) == Mark::Arrow);
    CHECK(v.mark(2, 1) == Mark::Arrow);
    CHECK_FALSE(v.adjacent(0, 1));

    Pag c = equivalence_class_pag(Dag(3, {{0, 1}, {1, 2}}));
    CHECK(c.mark(0, 1) == Mark::Circle);
    CHECK(c.mark(1, 0) == Mark::Circle);
    CHECK(c.mark(2, 1) == Mark::Circle);

    CHECK(potentially_directed_path(c, 0, 2));
    CHECK(potentially_directed_path(v, 0, 2));
    CHECK_FALSE(potentially_directed_path(v, 2, 0));
    CHECK_FALSE(potentially_directed_path(v, 0, 1));
}

TEST_CASE("MAG equivalence class of a bidirected pair") {
    Mag m(2);
    m.add_bidirected(0, 1);
    // 0 -> 1, 1 -> 0 and 0 <-> 1 all entail nothing.
    CHECK(mag_equivalence_class(m).size() == 3);
    Pag p = equivalence_class_pag(m);
    CHECK(p.mark(0, 1) == Mark::Circle);
    CHECK(p.mark(1, 0) == Mark::Circle);
}

TEST_CASE("fingerprints") {
    Dag chain(3, {{0, 1}, {1, 2}});
    Fingerprint f = independence_fingerprint(chain);
    CHECK(f.count() == 1);
    CHECK(f.independent(0, 2, make_set({1})));
    CHECK(f.separable(0, 2));
    CHECK_FALSE(f.separable(0, 1));
    CHECK(markov_equivalent(chain, Dag(3, {{1, 0}, {1, 2}})));
    CHECK_FALSE(markov_equivalent(chain, Dag(3, {{0, 1}, {2, 1}})));
    CHECK(Fingerprint::capacity(3) == 6);
    CHECK(independence_fingerprint(Dag(4)).restricted_to(std::vector<NodeId>{1, 3}).independent(0, 1, 0));
}

TEST_CASE("text format round trip") {
    Pag p(3);
    p.set_edge(0, 1, Mark::Circle, Mark::Arrow);
    p.set_edge(1, 2, Mark::Tail, Mark::Arrow);
    std::string text = to_text(p);
    std::istringstream in(text);
    Pag q = parse_pag(in);
    CHECK(q == p);
    CHECK(to_text(q) == text);

    Dag g(3, {{2, 0}, {0, 1}});
    std::istringstream din(to_text(g));
    CHECK(parse_dag(din) == g);

    std::istringstream bad("nodes: 3\n0 --> 1\n1 ==> 2\n");
    try {
        parse_dag(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).rfind("line 3", 0) == 0);
    }
}

#include <doctest.h>

#include <sstream>

#include "bccd/errors.hpp"
#include "bccd/search.hpp"
#include "bccd/simgen.hpp"

using namespace bccd;
using S = CausalStatement;

namespace {

const MappingTable& mapping3() {
    static const MappingTable t = build_mapping(3);
    return t;
}

const MappingTable& mapping4() {
    static const MappingTable t = build_mapping(4);
    return t;
}

const Decision* find(const std::vector<Decision>& log, const S& s) {
    for (const auto& d : log)
        if (d.statement == s) return &d;
    return nullptr;
}

Dataset sample(const Dag& g, int rows, std::uint64_t seed) {
    DiscreteBayesNet bn = random_cpts(g, std::vector<int>(g.size(), 2), 1.0, seed);
    while (min_edge_strength(bn) < 0.3) bn = random_cpts(g, std::vector<int>(g.size(), 2), 1.0, ++seed);
    return sample_dataset(bn, rows, seed + 1000);
}

}  // namespace

TEST_CASE("ledger keeps running maxima") {
    StatementLedger l;
    CHECK(l.probability(S::cause(0, 1)) == 0.0);
    l.update(S::cause(0, 1), 0.4);
    l.update(S::cause(0, 1), 0.2);
    CHECK(l.probability(S::cause(0, 1)) == 0.4);
    l.update(S::cause(0, 1), 0.7);
    CHECK(l.probability(S::cause(0, 1)) == 0.7);
    CHECK(l.size() == 1);
}

TEST_CASE("skeleton edits") {
    Skeleton s(3);
    CHECK(s.edges().size() == 3);
    s.remove(2, 0);
    CHECK_FALSE(s.adjacent(0, 2));
    CHECK(s.neighbors(0) == make_set({1}));
    CHECK_THROWS_AS(Skeleton(65), CapacityError);
}

TEST_CASE("ranked inference applies statements in order above the threshold") {
    StatementLedger l;
    l.update(S::cause(0, 1), 0.9);
    l.update(S::cause(1, 0), 0.8);
    l.update(S::non_adjacent(0, 2), 0.7);
    l.update(S::non_cause(2, 0), 0.5);
    InferenceResult r = rank_and_infer(l, 3, 0.5);

    REQUIRE(r.log.size() >= 4);
    CHECK(r.log[0].statement == S::cause(0, 1));
    CHECK(r.log[0].status == DecisionStatus::Applied);
    CHECK(r.log[1].status == DecisionStatus::SkippedConflict);
    CHECK(r.log[2].statement == S::non_adjacent(0, 2));
    CHECK(r.log[2].status == DecisionStatus::Applied);
    // Exactly at the threshold is not enough.
    CHECK(r.log[3].status == DecisionStatus::BelowThreshold);

    const Decision* derived = find(r.log, S::non_cause(1, 0));
    REQUIRE(derived != nullptr);
    CHECK(derived->status == DecisionStatus::Derived);
    CHECK_FALSE(derived->probability.has_value());

    CHECK(r.causal.at(0, 1) == CausalStatus::Causes);
    CHECK(r.causal.at(1, 0) == CausalStatus::NotCauses);
    CHECK(r.causal.at(2, 0) == CausalStatus::Unknown);
}

TEST_CASE("ties keep canonical statement order") {
    StatementLedger l;
    l.update(S::cause(1, 0), 0.8);
    l.update(S::cause(0, 1), 0.8);
    InferenceResult r = rank_and_infer(l, 2, 0.5);
    CHECK(r.log[0].statement == S::cause(0, 1));
    CHECK(r.log[1].status == DecisionStatus::SkippedConflict);
}

TEST_CASE("PAG marks follow the causal matrix") {
    Skeleton s(3);
    s.remove(0, 2);
    CausalMatrix mc(3);
    mc.set(0, 1, CausalStatus::Causes);
    mc.set(1, 0, CausalStatus::NotCauses);
    mc.set(2, 1, CausalStatus::NotCauses);
    Pag p = map_to_pag(s, mc);
    CHECK(p.mark(0, 1) == Mark::Tail);
    CHECK(p.mark(1, 0) == Mark::Arrow);
    CHECK(p.mark(2, 1) == Mark::Arrow);
    CHECK(p.mark(1, 2) == Mark::Circle);
    CHECK_FALSE(p.adjacent(0, 2));
}

TEST_CASE("decision logs round trip") {
    StatementLedger l;
    l.update(S::disjunctive_cause(2, 0, 1), 0.91234567890123456);
    l.update(S::non_cause(2, 0), 0.8);
    l.update(S::non_adjacent(0, 1), 0.3);
    InferenceResult r = rank_and_infer(l, 3, 0.5);
    std::vector<std::string> names{"A", "B", "C"};
    std::ostringstream out;
    write_decision_log(out, r.log, names);
    std::istringstream in(out.str());
    std::vector<Decision> back = read_decision_log(in, names);
    CHECK(back == r.log);
    std::ostringstream again;
    write_decision_log(again, back, names);
    CHECK(again.str() == out.str());

    std::istringstream bad("rank,probability,kind,vars,status\n1,0.5,non-cause,A;Q,applied\n");
    CHECK_THROWS_AS(read_decision_log(bad, names), ParseError);
}

TEST_CASE("independent columns end up non-adjacent") {
    Dataset ds = sample(Dag(2), 2000, 3);
    BccdConfig cfg;
    cfg.k_max = 3;
    DiscoveryResult r = discover(ds, cfg, mapping3());
    CHECK(r.pag.edge_count() == 0);
}

TEST_CASE("an empty dataset leaves every edge with circle marks") {
    Dataset ds = Dataset::from_codes({"A", "B", "C"}, {2, 2, 2}, std::vector<std::vector<int>>(3));
    BccdConfig cfg;
    cfg.k_max = 3;
    DiscoveryResult r = discover(ds, cfg, mapping3());
    CHECK(r.pag.edge_count() == 3);
    for (auto [a, b] : r.pag.adjacent_pairs()) {
        CHECK(r.pag.mark(a, b) == Mark::Circle);
        CHECK(r.pag.mark(b, a) == Mark::Circle);
    }
}

TEST_CASE("a strong v-structure is recovered") {
    Dataset ds = sample(Dag(3, {{0, 2}, {1, 2}}), 5000, 11);
    BccdConfig cfg;
    cfg.k_max = 3;
    DiscoveryResult r = discover(ds, cfg, mapping3());
    CHECK_FALSE(r.pag.adjacent(0, 1));
    CHECK(r.pag.mark(2, 0) == Mark::Arrow);
    CHECK(r.pag.mark(2, 1) == Mark::Arrow);
}

TEST_CASE("subset probabilities are relabeled to global ids") {
    Dataset ds = sample(Dag(4, {{0, 1}, {1, 3}}), 500, 5);
    auto priors = make_structure_priors(StructurePriorKind::Uniform, 3);
    std::vector<VariableId> w{0, 1, 3};
    auto probs = subset_statement_probabilities(ds, w, mapping3(), priors, DirichletPrior::k2());
    for (const auto& [s, p] : probs) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0 + 1e-12);
        for (int i = 0; i < s.slot_count(); ++i) CHECK(s.vars[i] != 2);
    }
    std::vector<VariableId> unsorted{3, 0, 1};
    CHECK_THROWS_AS(subset_statement_probabilities(ds, unsorted, mapping3(), priors, DirichletPrior::k2()),
                    ArgumentError);
}

TEST_CASE("discovery is deterministic across worker counts") {
    Dataset ds = sample(Dag(5, {{0, 1}, {1, 2}, {3, 2}, {2, 4}}), 1500, 21);
    BccdConfig one;
    one.k_max = 4;
    BccdConfig many = one;
    many.jobs = 3;
    DiscoveryResult a = discover(ds, one, mapping4());
    DiscoveryResult b = discover(ds, many, mapping4());
    CHECK(a.stage1.ledger == b.stage1.ledger);
    CHECK(a.stage1.skeleton == b.stage1.skeleton);
    CHECK(a.stage1.scored == b.stage1.scored);
    CHECK(a.stage2.log == b.stage2.log);
    CHECK(a.pag == b.pag);
}

TEST_CASE("mapping must cover k_max") {
    Dataset ds = sample(Dag(3), 10, 1);
    BccdConfig cfg;
    cfg.k_max = 4;
    CHECK_THROWS(discover(ds, cfg, mapping3()));
}

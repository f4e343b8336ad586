#include <array>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "bccd/errors.hpp"
#include "bccd/statements.hpp"

namespace bccd {

const MagOracle& MagOracle::level(int n) {
    if (n < 1 || n > kMaxEnumerationNodes)
        throw CapacityError("MAG oracle levels are 1.." + std::to_string(kMaxEnumerationNodes));
    static std::array<std::once_flag, kMaxEnumerationNodes + 1> once;
    static std::array<std::unique_ptr<MagOracle>, kMaxEnumerationNodes + 1> levels;
    std::call_once(once[n], [n] { levels[n].reset(new MagOracle(n)); });
    return *levels[n];
}

MagOracle::MagOracle(int n) : n_(n) {
    std::vector<Edge> pairs;
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    const int p = static_cast<int>(pairs.size());

    // Each pair is absent, a -> b, b -> a or a <-> b.
    std::unordered_map<Fingerprint, int, FingerprintHash> index;
    std::vector<std::vector<Mag>> members;
    const std::uint64_t total = std::uint64_t{1} << (2 * p);
    for (std::uint64_t code = 0; code < total; ++code) {
        Mag m(n);
        for (int e = 0; e < p; ++e) {
            auto [a, b] = pairs[e];
            switch ((code >> (2 * e)) & 3u) {
                case 1: m.add_directed(a, b); break;
                case 2: m.add_directed(b, a); break;
                case 3: m.add_bidirected(a, b); break;
                default: break;
            }
        }
        if (!m.is_ancestral()) continue;
        Fingerprint fp = independence_fingerprint(m);
        bool maximal = true;
        for (auto [a, b] : pairs)
            if (!m.adjacent(a, b) && !fp.separable(a, b)) maximal = false;
        if (!maximal) continue;
        ++mag_count_;
        auto [it, inserted] = index.emplace(fp, static_cast<int>(classes_.size()));
        if (inserted) {
            classes_.push_back({fp, m, {}, {}});
            members.emplace_back();
        }
        members[it->second].push_back(std::move(m));
    }

    const DagCatalog& cat = DagCatalog::level(n);
    kept_.assign(cat.class_count(), {});
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        MagClass& mc = classes_[c];
        mc.statements = faithful_statements(mc.fingerprint, pag_of(members[c]));
        int best = std::numeric_limits<int>::max();
        for (int d = 0; d < cat.class_count(); ++d) {
            if (!cat.class_fingerprint(d).subset_of(mc.fingerprint)) continue;
            int params = cat.class_parameter_count(d);
            if (params < best) {
                best = params;
                mc.optimal_dag_classes.clear();
            }
            if (params == best) mc.optimal_dag_classes.push_back(d);
        }
        for (int d : mc.optimal_dag_classes) kept_[d].push_back(static_cast<int>(c));
    }

    rows_.assign(cat.class_count(), {});
    for (int d = 0; d < cat.class_count(); ++d) {
        if (kept_[d].empty()) continue;
        StatementSet row = classes_[kept_[d].front()].statements;
        for (std::size_t k = 1; k < kept_[d].size(); ++k) row = intersect(row, classes_[kept_[d][k]].statements);
        rows_[d] = std::move(row);
    }
}

}  // namespace bccd

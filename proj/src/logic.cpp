#include "bccd/logic.hpp"

#include <algorithm>

#include "bccd/errors.hpp"

namespace bccd {

CausalStatement CausalStatement::disjunctive_cause(int z, int x, int y) {
    if (z == x || z == y || x == y) throw ArgumentError("disjunctive cause needs three distinct variables");
    if (x > y) std::swap(x, y);
    return {StatementKind::DisjunctiveCause, {z, x, y}};
}

CausalStatement CausalStatement::non_cause(int z, int x) {
    if (z == x) throw ArgumentError("non-cause needs two distinct variables");
    return {StatementKind::NonCause, {z, x, kUnusedSlot}};
}

CausalStatement CausalStatement::non_adjacent(int x, int y) {
    if (x == y) throw ArgumentError("non-adjacency needs two distinct variables");
    if (x > y) std::swap(x, y);
    return {StatementKind::NonAdjacent, {x, y, kUnusedSlot}};
}

CausalStatement CausalStatement::cause(int z, int x) {
    if (z == x) throw ArgumentError("cause needs two distinct variables");
    return {StatementKind::Cause, {z, x, kUnusedSlot}};
}

CausalStatement CausalStatement::relabeled(std::span<const int> map) const {
    auto m = [&](int v) {
        if (v < 0 || v >= static_cast<int>(map.size())) throw ArgumentError("statement slot outside relabeling");
        return map[v];
    };
    switch (kind) {
        case StatementKind::DisjunctiveCause: return disjunctive_cause(m(vars[0]), m(vars[1]), m(vars[2]));
        case StatementKind::NonCause: return non_cause(m(vars[0]), m(vars[1]));
        case StatementKind::NonAdjacent: return non_adjacent(m(vars[0]), m(vars[1]));
        case StatementKind::Cause: return cause(m(vars[0]), m(vars[1]));
    }
    throw InvariantError("bad statement kind");
}

const char* kind_name(StatementKind kind) {
    switch (kind) {
        case StatementKind::DisjunctiveCause: return "disjunctive-cause";
        case StatementKind::NonCause: return "non-cause";
        case StatementKind::NonAdjacent: return "non-adjacent";
        case StatementKind::Cause: return "cause";
    }
    return "?";
}

StatementKind kind_from_name(const std::string& name) {
    for (auto k : {StatementKind::DisjunctiveCause, StatementKind::NonCause, StatementKind::NonAdjacent,
                   StatementKind::Cause})
        if (name == kind_name(k)) return k;
    throw ParseError("unknown statement kind '" + name + "'");
}

std::string describe(const CausalStatement& s, std::span<const std::string> names) {
    auto nm = [&](int v) {
        return v >= 0 && v < static_cast<int>(names.size()) ? names[v] : std::to_string(v);
    };
    switch (s.kind) {
        case StatementKind::DisjunctiveCause:
            return nm(s.vars[0]) + "=>" + nm(s.vars[1]) + "|" + nm(s.vars[0]) + "=>" + nm(s.vars[2]);
        case StatementKind::NonCause: return nm(s.vars[0]) + "!=>" + nm(s.vars[1]);
        case StatementKind::NonAdjacent: return nm(s.vars[0]) + "-/-" + nm(s.vars[1]);
        case StatementKind::Cause: return nm(s.vars[0]) + "=>" + nm(s.vars[1]);
    }
    return "?";
}

void normalize(StatementSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

StatementSet intersect(const StatementSet& a, const StatementSet& b) {
    StatementSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool is_subset(const StatementSet& a, const StatementSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint8_t kAsserted = 1;

struct Fact {
    enum Type : std::uint8_t { Cause, NonCause, Disjunction } type;
    int a, b, c;
};

}  // namespace

CausalLogicMatrix::CausalLogicMatrix(int n) : n_(n) {
    if (n < 0 || n > 256) throw CapacityError("causal logic matrix supports at most 256 variables");
    cells_.assign(static_cast<std::size_t>(n) * n * n, 0);
}

CausalStatus CausalLogicMatrix::relation(int cause, int effect) const {
    if (cause < 0 || effect < 0 || cause >= n_ || effect >= n_) throw ArgumentError("variable out of range");
    if (cause == effect) return CausalStatus::NotCauses;
    return static_cast<CausalStatus>(cell(cause, effect, effect));
}

bool CausalLogicMatrix::disjunction(int z, int x, int y) const {
    if (x > y) std::swap(x, y);
    if (z < 0 || x < 0 || z >= n_ || y >= n_ || x == y || z == x || z == y) return false;
    return cell(z, x, y) == kAsserted;
}

bool CausalLogicMatrix::apply(const CausalStatement& s) {
    for (int i = 0; i < s.slot_count(); ++i)
        if (s.vars[i] < 0 || s.vars[i] >= n_) throw ArgumentError("statement variable out of range");
    if (s.kind == StatementKind::NonAdjacent) return true;

    CausalLogicMatrix next = *this;
    std::vector<Fact> work;
    bool contradiction = false;
    auto rel = [&](int a, int b) {
        return a == b ? CausalStatus::NotCauses : static_cast<CausalStatus>(next.cell(a, b, b));
    };
    auto set_cause = [&](int a, int b) {
        if (a == b || rel(a, b) == CausalStatus::NotCauses) {
            contradiction = true;
            return;
        }
        if (rel(a, b) == CausalStatus::Causes) return;
        next.cell(a, b, b) = static_cast<std::uint8_t>(CausalStatus::Causes);
        work.push_back({Fact::Cause, a, b, 0});
    };
    auto set_non_cause = [&](int a, int b) {
        if (a == b) return;
        CausalStatus r = rel(a, b);
        if (r == CausalStatus::Causes) {
            contradiction = true;
            return;
        }
        if (r == CausalStatus::NotCauses) return;
        next.cell(a, b, b) = static_cast<std::uint8_t>(CausalStatus::NotCauses);
        work.push_back({Fact::NonCause, a, b, 0});
    };
    auto set_disjunction = [&](int z, int x, int y) {
        if (x > y) std::swap(x, y);
        if (next.cell(z, x, y) == kAsserted) return;
        next.cell(z, x, y) = kAsserted;
        work.push_back({Fact::Disjunction, z, x, y});
    };

    switch (s.kind) {
        case StatementKind::DisjunctiveCause: set_disjunction(s.vars[0], s.vars[1], s.vars[2]); break;
        case StatementKind::NonCause: set_non_cause(s.vars[0], s.vars[1]); break;
        case StatementKind::Cause: set_cause(s.vars[0], s.vars[1]); break;
        case StatementKind::NonAdjacent: break;
    }

    while (!work.empty() && !contradiction) {
        Fact f = work.back();
        work.pop_back();
        switch (f.type) {
            case Fact::Cause: {
                const int a = f.a, b = f.b;
                set_non_cause(b, a);
                for (int x = 0; x < n_ && !contradiction; ++x) {
                    if (x == a || x == b) continue;
                    if (rel(x, a) == CausalStatus::Causes) set_cause(x, b);
                    if (rel(b, x) == CausalStatus::Causes) set_cause(a, x);
                    if (rel(a, x) == CausalStatus::NotCauses) set_non_cause(b, x);
                    if (rel(x, b) == CausalStatus::NotCauses) set_non_cause(x, a);
                }
                break;
            }
            case Fact::NonCause: {
                const int a = f.a, b = f.b;
                for (int x = 0; x < n_ && !contradiction; ++x) {
                    if (x == a || x == b) continue;
                    if (rel(a, x) == CausalStatus::Causes) set_non_cause(x, b);
                    if (rel(x, b) == CausalStatus::Causes) set_non_cause(a, x);
                    // Disjunction elimination on (a; b, x).
                    if (next.cell(a, std::min(b, x), std::max(b, x)) == kAsserted) set_cause(a, x);
                }
                break;
            }
            case Fact::Disjunction: {
                const int z = f.a, x = f.b, y = f.c;
                if (rel(z, x) == CausalStatus::NotCauses) set_cause(z, y);
                if (rel(z, y) == CausalStatus::NotCauses) set_cause(z, x);
                break;
            }
        }
    }
    if (contradiction) return false;
    *this = std::move(next);
    return true;
}

StatementSet CausalLogicMatrix::facts() const {
    StatementSet out;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            auto r = static_cast<CausalStatus>(cell(i, j, j));
            if (r == CausalStatus::Causes) out.push_back(CausalStatement::cause(i, j));
            if (r == CausalStatus::NotCauses) out.push_back(CausalStatement::non_cause(i, j));
            for (int k = j + 1; k < n_; ++k)
                if (k != i && cell(i, j, k) == kAsserted) out.push_back(CausalStatement::disjunctive_cause(i, j, k));
        }
    }
    normalize(out);
    return out;
}

StatementSet close_statements(const StatementSet& statements, int n) {
    CausalLogicMatrix m(n);
    StatementSet out;
    for (const auto& s : statements) {
        if (s.kind == StatementKind::NonAdjacent) {
            out.push_back(s);
            continue;
        }
        if (!m.apply(s)) throw InvariantError("contradictory statements: " + describe(s));
    }
    StatementSet facts = m.facts();
    out.insert(out.end(), facts.begin(), facts.end());
    normalize(out);
    return out;
}

}  // namespace bccd

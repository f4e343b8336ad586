#pragma once

// Logical causal statements and the deductive closure that combines them.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bccd {

// Declaration order is the canonical kind order used for tie-breaking.
enum class StatementKind : std::uint8_t {
    DisjunctiveCause = 0,  // (z => x) or (z => y)
    NonCause = 1,          // z does not cause x
    NonAdjacent = 2,       // no edge x - y
    Cause = 3,             // z => x
};

inline constexpr int kUnusedSlot = -1;

// vars: DisjunctiveCause {z, x, y} with x < y; NonCause / Cause {z, x, -1};
// NonAdjacent {x, y, -1} with x < y. Ordering is by kind, then vars.
struct CausalStatement {
    StatementKind kind = StatementKind::NonAdjacent;
    std::array<int, 3> vars{kUnusedSlot, kUnusedSlot, kUnusedSlot};

    static CausalStatement disjunctive_cause(int z, int x, int y);
    static CausalStatement non_cause(int z, int x);
    static CausalStatement non_adjacent(int x, int y);
    static CausalStatement cause(int z, int x);

    int slot_count() const { return kind == StatementKind::DisjunctiveCause ? 3 : 2; }
    // Variables renamed through map (slot value v becomes map[v]), re-canonicalized.
    CausalStatement relabeled(std::span<const int> map) const;

    friend auto operator<=>(const CausalStatement&, const CausalStatement&) = default;
};

const char* kind_name(StatementKind kind);
StatementKind kind_from_name(const std::string& name);
// "Z=>X|Z=>Y", "Z!=>X", "X-/-Y", "Z=>X" style rendering with optional names.
std::string describe(const CausalStatement& s, std::span<const std::string> names = {});

// Sorted, duplicate-free.
using StatementSet = std::vector<CausalStatement>;
void normalize(StatementSet& s);
StatementSet intersect(const StatementSet& a, const StatementSet& b);
bool is_subset(const StatementSet& a, const StatementSet& b);

enum class CausalStatus : std::uint8_t { Unknown = 0, Causes, NotCauses };

// Cube of causal facts over n variables. Cell (i, j, j) holds the status of
// "i => j"; cell (i, j, k) with j < k, both != i, records an asserted
// disjunction "(i => j) or (i => k)". Kept closed under transitivity,
// irreflexivity and disjunction elimination, plus the non-cause consequences
// of transitivity (a => b and not a => c gives not b => c, and
// b => c and not a => c gives not a => b).
class CausalLogicMatrix {
public:
    CausalLogicMatrix() = default;
    explicit CausalLogicMatrix(int n);

    int size() const { return n_; }
    // Diagonal reads as NotCauses.
    CausalStatus relation(int cause, int effect) const;
    bool disjunction(int z, int x, int y) const;

    // Adds the statement and closes. On contradiction nothing is written and
    // false is returned. NonAdjacent statements carry no causal content and
    // leave the matrix untouched.
    bool apply(const CausalStatement& s);

    // Every non-trivial fact: causes, off-diagonal non-causes, disjunctions.
    StatementSet facts() const;

    friend bool operator==(const CausalLogicMatrix&, const CausalLogicMatrix&) = default;

private:
    std::uint8_t& cell(int i, int j, int k) { return cells_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
    std::uint8_t cell(int i, int j, int k) const { return cells_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }

    int n_ = 0;
    std::vector<std::uint8_t> cells_;
};

// Closure of a statement set, as facts plus the NonAdjacent statements.
// Throws InvariantError if the statements contradict each other.
StatementSet close_statements(const StatementSet& statements, int n);

}  // namespace bccd

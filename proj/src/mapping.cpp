#include <algorithm>
#include <array>
#include <atomic>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include "bccd/errors.hpp"
#include "bccd/statements.hpp"

namespace bccd {

namespace {

constexpr char kMagic[8] = {'B', 'C', 'C', 'D', 'M', 'A', 'P', '1'};
constexpr std::array<int, kMaxEnumerationNodes + 1> kDagCounts = {1, 1, 3, 25, 543, 29281};
constexpr std::uint8_t kNoSlot = 0xFF;

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }
void put_u16(std::ostream& out, std::uint16_t v) {
    put_u8(out, v & 0xFF);
    put_u8(out, v >> 8);
}
void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) put_u8(out, (v >> (8 * i)) & 0xFF);
}

std::uint32_t get(std::istream& in, int bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) throw ParseError("mapping cache is truncated");
        v |= static_cast<std::uint32_t>(c & 0xFF) << (8 * i);
    }
    return v;
}

CausalStatement decode(std::uint8_t kind, std::array<std::uint8_t, 3> slots, int level) {
    if (kind > static_cast<std::uint8_t>(StatementKind::Cause)) throw ParseError("bad statement kind in mapping cache");
    auto k = static_cast<StatementKind>(kind);
    const int used = k == StatementKind::DisjunctiveCause ? 3 : 2;
    for (int i = 0; i < 3; ++i) {
        if (i < used && slots[i] >= level) throw ParseError("statement slot out of range in mapping cache");
        if (i >= used && slots[i] != kNoSlot) throw ParseError("unused statement slot is set in mapping cache");
    }
    CausalStatement s;
    try {
        switch (k) {
            case StatementKind::DisjunctiveCause: s = CausalStatement::disjunctive_cause(slots[0], slots[1], slots[2]); break;
            case StatementKind::NonCause: s = CausalStatement::non_cause(slots[0], slots[1]); break;
            case StatementKind::NonAdjacent: s = CausalStatement::non_adjacent(slots[0], slots[1]); break;
            case StatementKind::Cause: s = CausalStatement::cause(slots[0], slots[1]); break;
        }
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("invalid statement in mapping cache: ") + e.what());
    }
    for (int i = 0; i < used; ++i)
        if (s.vars[i] != slots[i]) throw ParseError("non-canonical statement in mapping cache");
    return s;
}

}  // namespace

MappingTable::MappingTable(int k_max, std::vector<std::vector<StatementSet>> levels)
    : k_max_(k_max), levels_(std::move(levels)) {
    if (k_max < 1 || k_max > kMaxEnumerationNodes)
        throw CapacityError("mapping levels are 1.." + std::to_string(kMaxEnumerationNodes));
    if (static_cast<int>(levels_.size()) != k_max) throw ArgumentError("mapping needs one row list per level");
    for (int n = 1; n <= k_max; ++n) {
        if (static_cast<int>(levels_[n - 1].size()) != kDagCounts[n])
            throw ArgumentError("mapping level " + std::to_string(n) + " has the wrong row count");
        for (auto& row : levels_[n - 1]) {
            normalize(row);
            for (const auto& s : row)
                for (int i = 0; i < s.slot_count(); ++i)
                    if (s.vars[i] < 0 || s.vars[i] >= n) throw ArgumentError("mapping statement names a missing node");
        }
    }
    compile();
}

void MappingTable::compile() {
    compiled_.assign(k_max_, {});
    for (int n = 1; n <= k_max_; ++n) {
        Compiled& c = compiled_[n - 1];
        for (const auto& row : levels_[n - 1]) c.statements.insert(c.statements.end(), row.begin(), row.end());
        normalize(c.statements);
        for (const auto& row : levels_[n - 1]) {
            std::vector<std::uint16_t> ids;
            ids.reserve(row.size());
            for (const auto& s : row) {
                auto it = std::lower_bound(c.statements.begin(), c.statements.end(), s);
                ids.push_back(static_cast<std::uint16_t>(it - c.statements.begin()));
            }
            c.rows.push_back(std::move(ids));
        }
    }
}

void MappingTable::write(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    put_u32(out, version());
    put_u8(out, static_cast<std::uint8_t>(k_max_));
    for (const auto& level : levels_) {
        put_u32(out, static_cast<std::uint32_t>(level.size()));
        for (const auto& row : level) {
            put_u16(out, static_cast<std::uint16_t>(row.size()));
            for (const auto& s : row) {
                put_u8(out, static_cast<std::uint8_t>(s.kind));
                for (int i = 0; i < 3; ++i) put_u8(out, i < s.slot_count() ? static_cast<std::uint8_t>(s.vars[i]) : kNoSlot);
            }
        }
    }
    if (!out) throw std::runtime_error("failed writing mapping cache");
}

MappingTable MappingTable::read(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ParseError("not a mapping cache (bad magic)");
    std::uint32_t v = get(in, 4);
    if (v != version())
        throw CacheVersionError("mapping cache version " + std::to_string(v) + " does not match " +
                                std::to_string(version()));
    int k_max = static_cast<int>(get(in, 1));
    if (k_max < 1 || k_max > kMaxEnumerationNodes) throw ParseError("mapping cache has invalid k_max");
    std::vector<std::vector<StatementSet>> levels(k_max);
    for (int n = 1; n <= k_max; ++n) {
        std::uint32_t rows = get(in, 4);
        if (static_cast<int>(rows) != kDagCounts[n])
            throw ParseError("mapping cache level " + std::to_string(n) + " has the wrong row count");
        levels[n - 1].resize(rows);
        for (auto& row : levels[n - 1]) {
            std::uint32_t count = get(in, 2);
            row.reserve(count);
            for (std::uint32_t i = 0; i < count; ++i) {
                auto kind = static_cast<std::uint8_t>(get(in, 1));
                std::array<std::uint8_t, 3> slots{};
                for (auto& s : slots) s = static_cast<std::uint8_t>(get(in, 1));
                row.push_back(decode(kind, slots, n));
            }
            if (!std::is_sorted(row.begin(), row.end()) ||
                std::adjacent_find(row.begin(), row.end()) != row.end())
                throw ParseError("mapping cache row is not sorted");
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes in mapping cache");
    return MappingTable(k_max, std::move(levels));
}

void MappingTable::write_text(std::ostream& out) const {
    out << "mapping version " << version() << " k_max " << k_max_ << '\n';
    for (int n = 1; n <= k_max_; ++n) {
        out << "level " << n << " rows " << rows(n) << '\n';
        for (int i = 0; i < rows(n); ++i) {
            out << n << ':' << i;
            for (const auto& s : row(n, i)) out << ' ' << describe(s);
            out << '\n';
        }
    }
}

MappingTable build_mapping(int k_max, int jobs) {
    if (k_max < 1 || k_max > kMaxEnumerationNodes)
        throw CapacityError("mapping levels are 1.." + std::to_string(kMaxEnumerationNodes));
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::vector<std::vector<StatementSet>> levels;
    for (int n = 1; n <= k_max; ++n) {
        const DagCatalog& cat = DagCatalog::level(n);
        std::vector<StatementSet> class_rows(cat.class_count());
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int c = next++; c < cat.class_count(); c = next++) {
                const Dag& g = cat.dag(cat.class_members(c).front());
                class_rows[c] = n <= 4 ? statements_from_faithful_structure(g) : udag_statements(g);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        std::vector<StatementSet> rows(cat.size());
        for (int i = 0; i < cat.size(); ++i) rows[i] = class_rows[cat.class_of(i)];
        levels.push_back(std::move(rows));
    }
    return MappingTable(k_max, std::move(levels));
}

MappingTable load_or_build_mapping(const std::string& path, int k_max, int jobs) {
    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                MappingTable t = MappingTable::read(in);
                if (t.k_max() == k_max) return t;
            } catch (const CacheVersionError&) {
            }
        }
    }
    MappingTable t = build_mapping(k_max, jobs);
    if (!path.empty()) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write mapping cache '" + path + "'");
        t.write(out);
    }
    return t;
}

}  // namespace bccd

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "bccd/errors.hpp"
#include "bccd/scoring.hpp"

namespace bccd {

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> categories,
                 std::vector<std::vector<int>> columns)
    : names_(std::move(names)), categories_(std::move(categories)), columns_(std::move(columns)) {
    if (names_.size() != categories_.size() || names_.size() != columns_.size())
        throw ArgumentError("dataset names, categories and columns differ in length");
    rows_ = columns_.empty() ? 0 : static_cast<int>(columns_.front().size());
    for (std::size_t v = 0; v < names_.size(); ++v) {
        if (categories_[v].size() < 2) throw ArgumentError("variable '" + names_[v] + "' needs arity >= 2");
        if (static_cast<int>(columns_[v].size()) != rows_) throw ArgumentError("ragged dataset columns");
        int r = static_cast<int>(categories_[v].size());
        for (int code : columns_[v])
            if (code < 0 || code >= r) throw ArgumentError("value out of range for variable '" + names_[v] + "'");
        for (std::size_t w = 0; w < v; ++w)
            if (names_[w] == names_[v]) throw ArgumentError("duplicate variable name '" + names_[v] + "'");
    }
}

Dataset Dataset::from_codes(std::vector<std::string> names, std::vector<int> arities,
                            std::vector<std::vector<int>> columns) {
    std::vector<std::vector<std::string>> cats;
    for (int r : arities) {
        std::vector<std::string> c;
        for (int k = 0; k < r; ++k) c.push_back(std::to_string(k));
        cats.push_back(std::move(c));
    }
    return Dataset(std::move(names), std::move(cats), std::move(columns));
}

VariableId Dataset::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ArgumentError("unknown variable '" + std::string(name) + "'");
    return static_cast<VariableId>(it - names_.begin());
}

Dataset Dataset::select(std::span<const VariableId> vars) const {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> cats;
    std::vector<std::vector<int>> cols;
    for (VariableId v : vars) {
        if (v < 0 || v >= variables()) throw ArgumentError("variable id out of range");
        names.push_back(names_[v]);
        cats.push_back(categories_[v]);
        cols.push_back(columns_[v]);
    }
    Dataset out(std::move(names), std::move(cats), std::move(cols));
    out.rows_ = rows_;
    return out;
}

namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    return s.substr(i);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

Schema read_schema(std::istream& in) {
    Schema schema;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        auto colon = raw.find(':');
        if (colon == std::string::npos) throw ParseError("expected 'name: tok1,tok2,...'", line);
        std::string name = trim(raw.substr(0, colon));
        std::vector<std::string> tokens = split_fields(raw.substr(colon + 1), ',');
        if (name.empty() || tokens.size() < 2) throw ParseError("schema entries need a name and >= 2 categories", line);
        for (const auto& t : tokens)
            if (t.empty()) throw ParseError("empty category token", line);
        schema.variables.emplace_back(std::move(name), std::move(tokens));
    }
    return schema;
}

Dataset read_csv(std::istream& in, const Schema* schema) {
    std::string raw;
    int line = 0;
    std::vector<std::string> names;
    while (std::getline(in, raw)) {
        ++line;
        if (!trim(raw).empty()) {
            names = split_fields(raw, ',');
            break;
        }
    }
    if (names.empty()) throw ParseError("missing header line", line);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) throw ParseError("empty variable name in header", line);
        for (std::size_t j = 0; j < i; ++j)
            if (names[j] == names[i]) throw ParseError("duplicate variable name '" + names[i] + "'", line);
    }
    const std::size_t nvars = names.size();
    std::vector<std::vector<std::string>> cats(nvars);
    std::vector<bool> pinned(nvars, false);
    if (schema) {
        for (const auto& [name, tokens] : schema->variables) {
            auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw ParseError("schema names unknown variable '" + name + "'");
            cats[it - names.begin()] = tokens;
            pinned[it - names.begin()] = true;
        }
    }
    std::vector<std::unordered_map<std::string, int>> lookup(nvars);
    for (std::size_t v = 0; v < nvars; ++v)
        for (std::size_t k = 0; k < cats[v].size(); ++k) lookup[v].emplace(cats[v][k], static_cast<int>(k));

    std::vector<std::vector<int>> cols(nvars);
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        std::vector<std::string> fields = split_fields(raw, ',');
        if (fields.size() != nvars)
            throw ParseError("expected " + std::to_string(nvars) + " fields, found " + std::to_string(fields.size()),
                             line);
        for (std::size_t v = 0; v < nvars; ++v) {
            if (fields[v].empty()) throw ParseError("missing value for '" + names[v] + "'", line);
            auto [it, inserted] = lookup[v].emplace(fields[v], static_cast<int>(cats[v].size()));
            if (inserted) {
                if (pinned[v]) throw ParseError("value '" + fields[v] + "' not in schema for '" + names[v] + "'", line);
                cats[v].push_back(fields[v]);
            }
            cols[v].push_back(it->second);
        }
    }
    // Unused placeholder categories keep every arity at least 2.
    for (auto& c : cats) {
        for (int k = 0; c.size() < 2; ++k) {
            std::string placeholder = "_unobserved" + std::to_string(k);
            if (std::find(c.begin(), c.end(), placeholder) == c.end()) c.push_back(placeholder);
        }
    }
    return Dataset(std::move(names), std::move(cats), std::move(cols));
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (int v = 0; v < ds.variables(); ++v) out << (v ? "," : "") << ds.name(v);
    out << '\n';
    for (int r = 0; r < ds.rows(); ++r) {
        for (int v = 0; v < ds.variables(); ++v) out << (v ? "," : "") << ds.categories(v)[ds.value(r, v)];
        out << '\n';
    }
}

}  // namespace bccd

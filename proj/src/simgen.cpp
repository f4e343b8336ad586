#include "bccd/simgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "bccd/errors.hpp"

namespace bccd {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    };
    return splitmix(seed ^ splitmix(stream));
}

Dag random_dag(int n, int max_degree, double edge_density, std::uint64_t seed) {
    if (n < 1 || n > kMaxGraphNodes) throw ArgumentError("random_dag needs 1..64 nodes");
    if (!(edge_density > 0.0 && edge_density < 1.0)) throw ArgumentError("edge density must be in (0, 1)");
    if (max_degree < 0) throw ArgumentError("max degree must be nonnegative");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(edge_density);
    constexpr int kBudget = 100000;
    for (int attempt = 0; attempt < kBudget; ++attempt) {
        std::vector<NodeId> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        Dag g(n);
        std::vector<int> degree(n, 0);
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!coin(rng)) continue;
                g.add_edge(order[i], order[j]);
                if (++degree[order[i]] > max_degree || ++degree[order[j]] > max_degree) ok = false;
            }
        }
        if (ok) return g;
    }
    throw std::runtime_error("random_dag: no graph within the degree bound after " + std::to_string(kBudget) +
                             " draws");
}

int DiscreteBayesNet::configurations(NodeId v) const {
    int q = 1;
    for (NodeId p : members(dag.parents(v))) q *= arities[p];
    return q;
}

DiscreteBayesNet random_cpts(const Dag& dag, std::vector<int> arities, double alpha, std::uint64_t seed) {
    if (static_cast<int>(arities.size()) != dag.size()) throw ArgumentError("one arity per node is required");
    for (int r : arities)
        if (r < 2) throw ArgumentError("arities must be at least 2");
    if (!(alpha > 0.0)) throw ArgumentError("Dirichlet alpha must be positive");
    DiscreteBayesNet bn{dag, std::move(arities), {}};
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (NodeId v = 0; v < dag.size(); ++v) {
        const int r = bn.arities[v];
        const int q = bn.configurations(v);
        std::vector<double> cpt(static_cast<std::size_t>(q) * r);
        for (int j = 0; j < q; ++j) {
            double* row = &cpt[static_cast<std::size_t>(j) * r];
            double sum = 0.0;
            for (int k = 0; k < r; ++k) sum += row[k] = gamma(rng);
            if (sum > 0.0) {
                for (int k = 0; k < r; ++k) row[k] /= sum;
            } else {
                row[std::uniform_int_distribution<int>(0, r - 1)(rng)] = 1.0;
            }
        }
        bn.cpts.push_back(std::move(cpt));
    }
    return bn;
}

double min_edge_strength(const DiscreteBayesNet& bn) {
    double weakest = 1.0;
    for (NodeId v = 0; v < bn.dag.size(); ++v) {
        const std::vector<NodeId> parents = members(bn.dag.parents(v));
        const int r = bn.arities[v];
        int radix = 1;
        for (NodeId p : parents) {
            double strongest = 0.0;
            const int rp = bn.arities[p];
            for (int j = 0; j < bn.configurations(v); ++j) {
                const int digit = (j / radix) % rp;
                if (digit != 0) continue;
                for (int a = 0; a < rp; ++a) {
                    for (int b = a + 1; b < rp; ++b) {
                        const double* ra = &bn.cpts[v][static_cast<std::size_t>(j + a * radix) * r];
                        const double* rb = &bn.cpts[v][static_cast<std::size_t>(j + b * radix) * r];
                        double tv = 0.0;
                        for (int k = 0; k < r; ++k) tv += std::abs(ra[k] - rb[k]);
                        strongest = std::max(strongest, tv / 2.0);
                    }
                }
            }
            weakest = std::min(weakest, strongest);
            radix *= rp;
        }
    }
    return weakest;
}

Dataset sample_dataset(const DiscreteBayesNet& bn, int rows, std::uint64_t seed, std::vector<std::string> names) {
    const int n = bn.dag.size();
    if (rows < 0) throw ArgumentError("row count must be nonnegative");
    if (names.empty())
        for (NodeId v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
    if (static_cast<int>(names.size()) != n) throw ArgumentError("one name per node is required");
    std::vector<std::vector<int>> cols(n, std::vector<int>(rows));
    std::vector<std::vector<NodeId>> parents(n);
    for (NodeId v = 0; v < n; ++v) parents[v] = members(bn.dag.parents(v));
    const std::vector<NodeId> order = bn.dag.topological_order();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int row = 0; row < rows; ++row) {
        for (NodeId v : order) {
            int j = 0, radix = 1;
            for (NodeId p : parents[v]) {
                j += cols[p][row] * radix;
                radix *= bn.arities[p];
            }
            const int r = bn.arities[v];
            const double* dist = &bn.cpts[v][static_cast<std::size_t>(j) * r];
            double u = unit(rng), acc = 0.0;
            int k = 0;
            for (; k < r - 1; ++k) {
                acc += dist[k];
                if (u < acc) break;
            }
            cols[v][row] = k;
        }
    }
    return Dataset::from_codes(std::move(names), bn.arities, std::move(cols));
}

Dataset drop_columns(const Dataset& ds, std::span<const VariableId> hidden) {
    std::vector<VariableId> keep;
    for (VariableId v = 0; v < ds.variables(); ++v)
        if (std::find(hidden.begin(), hidden.end(), v) == hidden.end()) keep.push_back(v);
    if (keep.empty()) throw ArgumentError("cannot drop every column");
    return ds.select(keep);
}

GroundTruth make_ground_truth(const Dag& full_dag, NodeSet hidden) {
    GroundTruth t;
    t.full_dag = full_dag;
    t.hidden = hidden & full_set(full_dag.size());
    for (NodeId v = 0; v < full_dag.size(); ++v)
        if (!contains(t.hidden, v)) t.observed.push_back(v);
    if (t.observed.empty()) throw ArgumentError("ground truth needs an observed variable");
    t.true_mag = latent_project(full_dag, t.observed);
    t.true_pag = equivalence_class_pag(t.true_mag);
    return t;
}

namespace {

template <typename T>
T parse_number(const std::string& text, int line) {
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) throw ParseError("bad number '" + text + "'", line);
    return value;
}

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentManifest read_manifest(std::istream& in) {
    ExperimentManifest m;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        raw = trimmed(raw);
        if (raw.empty()) continue;
        auto eq = raw.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line);
        const std::string key = trimmed(raw.substr(0, eq));
        const std::string value = trimmed(raw.substr(eq + 1));
        if (key == "nodes") m.nodes = parse_number<int>(value, line);
        else if (key == "hidden") m.hidden = parse_number<int>(value, line);
        else if (key == "rows") m.rows = parse_number<int>(value, line);
        else if (key == "trials") m.trials = parse_number<int>(value, line);
        else if (key == "theta") m.theta = parse_number<double>(value, line);
        else if (key == "seed") m.seed = parse_number<std::uint64_t>(value, line);
        else if (key == "max_degree") m.max_degree = parse_number<int>(value, line);
        else if (key == "density") m.density = parse_number<double>(value, line);
        else if (key == "alpha") m.alpha = parse_number<double>(value, line);
        else if (key == "min_strength") m.min_strength = parse_number<double>(value, line);
        else if (key == "arity") m.arity = parse_number<int>(value, line);
        else if (key == "kmax") m.k_max = parse_number<int>(value, line);
        else if (key == "prior") {
            if (value == "uniform") m.prior = StructurePriorKind::Uniform;
            else if (value == "multilevel") m.prior = StructurePriorKind::Multilevel;
            else throw ParseError("prior must be uniform or multilevel", line);
        } else if (key == "score") {
            if (value == "k2") m.dirichlet = DirichletPrior::k2();
            else if (value == "bdeu") m.dirichlet = DirichletPrior::bdeu(m.dirichlet.equivalent_sample_size);
            else throw ParseError("score must be k2 or bdeu", line);
        } else if (key == "ess") {
            m.dirichlet.equivalent_sample_size = parse_number<double>(value, line);
            if (!(m.dirichlet.equivalent_sample_size > 0.0)) throw ParseError("ess must be positive", line);
        } else {
            throw ParseError("unknown manifest key '" + key + "'", line);
        }
    }
    if (m.nodes < 1 || m.nodes + m.hidden > kMaxGraphNodes) throw ParseError("nodes must be in 1..64");
    if (m.hidden < 0 || m.rows < 0) throw ParseError("hidden and rows must be nonnegative");
    if (m.trials < 1) throw ParseError("trials must be positive");
    if (!(m.theta > 0.0 && m.theta <= 1.0)) throw ParseError("theta must be in (0, 1]");
    if (!(m.density > 0.0 && m.density < 1.0)) throw ParseError("density must be in (0, 1)");
    if (!(m.alpha > 0.0)) throw ParseError("alpha must be positive");
    if (!(m.min_strength >= 0.0 && m.min_strength < 1.0)) throw ParseError("min_strength must be in [0, 1)");
    if (m.arity < 2) throw ParseError("arity must be at least 2");
    if (m.k_max < 2 || m.k_max > kMaxEnumerationNodes) throw ParseError("kmax must be in 2..5");
    if (m.max_degree < 0) throw ParseError("max_degree must be nonnegative");
    return m;
}

void write_manifest(std::ostream& out, const ExperimentManifest& m) {
    out << "nodes=" << m.nodes << "\nhidden=" << m.hidden << "\nrows=" << m.rows << "\ntrials=" << m.trials
        << "\ntheta=" << m.theta << "\nseed=" << m.seed << "\nmax_degree=" << m.max_degree
        << "\ndensity=" << m.density << "\nalpha=" << m.alpha << "\nmin_strength=" << m.min_strength << "\narity=" << m.arity << "\nkmax=" << m.k_max
        << "\nprior=" << (m.prior == StructurePriorKind::Uniform ? "uniform" : "multilevel")
        << "\nscore=" << (m.dirichlet.kind == DirichletPrior::Kind::K2 ? "k2" : "bdeu")
        << "\ness=" << m.dirichlet.equivalent_sample_size << '\n';
}

Trial generate_trial(const ExperimentManifest& m, int index) {
    const int total = m.nodes + m.hidden;
    const std::uint64_t trial_seed = mix_seed(m.seed, static_cast<std::uint64_t>(index));
    constexpr int kAttempts = 10000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        Dag g = random_dag(total, m.max_degree, m.density, mix_seed(trial_seed, 3 * attempt));
        std::mt19937_64 rng(mix_seed(trial_seed, 3 * attempt + 1));
        std::vector<NodeId> candidates(total);
        std::iota(candidates.begin(), candidates.end(), 0);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        NodeSet hidden = 0;
        for (NodeId c : candidates) {
            if (set_size(hidden) == m.hidden) break;
            const NodeSet next = hidden | node_bit(c);
            bool ok = true;
            for (NodeId h : members(next))
                if (set_size(g.children(h) & ~next) < 2) ok = false;
            if (ok) hidden = next;
        }
        if (set_size(hidden) != m.hidden) continue;

        Trial t;
        t.index = index;
        t.truth = make_ground_truth(g, hidden);
        const std::uint64_t cpt_seed = mix_seed(trial_seed, 3 * attempt + 2);
        t.model = random_cpts(g, std::vector<int>(total, m.arity), m.alpha, cpt_seed);
        for (std::uint64_t redraw = 1; min_edge_strength(t.model) < m.min_strength; ++redraw) {
            if (redraw > 10000) throw std::runtime_error("no CPTs reach min_strength in trial " + std::to_string(index));
            t.model = random_cpts(g, std::vector<int>(total, m.arity), m.alpha, mix_seed(cpt_seed, redraw));
        }
        Dataset full = sample_dataset(t.model, m.rows, mix_seed(trial_seed, ~std::uint64_t{0} - attempt));
        std::vector<VariableId> dropped = members(hidden);
        t.data = m.hidden > 0 ? drop_columns(full, dropped) : full;
        return t;
    }
    throw std::runtime_error("could not place " + std::to_string(m.hidden) + " hidden confounders in trial " +
                             std::to_string(index));
}

}  // namespace bccd

#include "commands.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bccd/errors.hpp"
#include "bccd/search.hpp"
#include "bccd/simgen.hpp"
#include "bccd/statements.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace bccd::cli {

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw InputError("write failed: " + path);
}

void write_file(const std::string& path, const std::string& bytes) {
    auto out = open_out(path);
    out << bytes;
    finish(out, path);
}

std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

StructurePriorKind prior_kind(const std::string& name) {
    if (name == "uniform") return StructurePriorKind::Uniform;
    if (name == "multilevel") return StructurePriorKind::Multilevel;
    throw ArgumentError("unknown prior: " + name);
}

const char* prior_name(StructurePriorKind k) { return k == StructurePriorKind::Uniform ? "uniform" : "multilevel"; }

DirichletPrior dirichlet(const std::string& score, double ess) {
    if (score == "k2") return DirichletPrior::k2();
    if (score == "bdeu") return DirichletPrior::bdeu(ess);
    throw ArgumentError("unknown score: " + score);
}

ordered_json config_json(const BccdConfig& cfg) {
    ordered_json j;
    j["theta"] = cfg.theta;
    j["kmax"] = cfg.k_max;
    j["prior"] = prior_name(cfg.prior);
    j["score"] = cfg.dirichlet.kind == DirichletPrior::Kind::K2 ? "k2" : "bdeu";
    j["ess"] = cfg.dirichlet.equivalent_sample_size;
    return j;
}

ordered_json run_manifest(const std::string& command, ordered_json config, const ordered_json& inputs,
                          std::uint64_t seed) {
    ordered_json j;
    j["command"] = command;
    j["config"] = std::move(config);
    j["inputs"] = inputs;
    j["tool_version"] = kToolVersion;
    j["mapping_version"] = MappingTable::version();
    j["seed"] = seed;
    return j;
}

void write_manifest_json(const std::string& path, const ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

Dataset load_dataset(const std::string& data, const std::string& schema_path) {
    auto in = open_in(data);
    if (schema_path.empty()) return read_csv(in);
    auto sin = open_in(schema_path);
    Schema schema = read_schema(sin);
    return read_csv(in, &schema);
}

MappingTable load_mapping(const std::string& path, int k_max, int jobs) {
    if (k_max < 1 || k_max > kMaxEnumerationNodes)
        throw CapacityError("kmax must be between 1 and " + std::to_string(kMaxEnumerationNodes));
    if (path.empty()) return build_mapping(k_max, jobs);
    return load_or_build_mapping(path, k_max, jobs);
}

std::string trial_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%03d", index);
    return buf;
}

ExperimentManifest load_experiment(const std::string& path) {
    auto in = open_in(path);
    return read_manifest(in);
}

BccdConfig config_of(const ExperimentManifest& m, int jobs) {
    BccdConfig cfg;
    cfg.theta = m.theta;
    cfg.k_max = m.k_max;
    cfg.prior = m.prior;
    cfg.dirichlet = m.dirichlet;
    cfg.jobs = jobs;
    return cfg;
}

NodeSet read_hidden(const std::string& path) {
    auto in = open_in(path);
    NodeSet hidden = 0;
    std::string token;
    while (in >> token) {
        int v = -1;
        try {
            v = std::stoi(token);
        } catch (const std::exception&) {
            throw ParseError("bad node id in " + path + ": " + token);
        }
        if (v < 0 || v >= kMaxGraphNodes) throw ParseError("node id out of range in " + path + ": " + token);
        hidden |= node_bit(v);
    }
    return hidden;
}

std::vector<std::string> trial_dirs(const std::string& root) {
    if (!fs::is_directory(root)) throw InputError("not a directory: " + root);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && entry.path().filename().string().rfind("trial_", 0) == 0)
            names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

int trial_index(const std::string& name) {
    try {
        return std::stoi(name.substr(6));
    } catch (const std::exception&) {
        throw InputError("bad trial directory name: " + name);
    }
}

}  // namespace

void cmd_build_mapping(const BuildMappingArgs& args, int jobs, std::ostream& out) {
    if (args.kmax < 1 || args.kmax > kMaxEnumerationNodes)
        throw CapacityError("kmax must be between 1 and " + std::to_string(kMaxEnumerationNodes));
    MappingTable table = build_mapping(args.kmax, jobs);
    {
        auto f = open_out(args.out);
        table.write(f);
        finish(f, args.out);
    }
    if (!args.text.empty()) {
        auto f = open_out(args.text);
        table.write_text(f);
        finish(f, args.text);
    }
    out << "mapping version " << MappingTable::version() << '\n';
    for (int level = 1; level <= table.k_max(); ++level) out << "level " << level << ": " << table.rows(level) << " rows\n";
}

void cmd_discover(const DiscoverArgs& args, int jobs, std::ostream& out) {
    Dataset ds = load_dataset(args.data, args.schema);
    BccdConfig cfg;
    cfg.theta = args.theta;
    cfg.k_max = args.kmax;
    cfg.prior = prior_kind(args.scoring.prior);
    cfg.dirichlet = dirichlet(args.scoring.score, args.scoring.ess);
    cfg.jobs = jobs;
    MappingTable mapping = load_mapping(args.mapping, cfg.k_max, jobs);

    DiscoveryResult r = discover(ds, cfg, mapping);

    write_file(args.out_pag, to_text(r.pag));
    {
        auto f = open_out(args.out_log);
        write_decision_log(f, r.stage2.log, ds.names());
        finish(f, args.out_log);
    }
    ordered_json inputs;
    inputs["data"] = fnv1a(read_bytes(args.data));
    if (!args.schema.empty()) inputs["schema"] = fnv1a(read_bytes(args.schema));
    write_manifest_json(args.out_pag + ".manifest.json", run_manifest("discover", config_json(cfg), inputs, 0));

    int applied = 0;
    for (const auto& d : r.stage2.log)
        if (d.status == DecisionStatus::Applied) ++applied;
    out << "variables=" << ds.variables() << " rows=" << ds.rows() << " edges=" << r.stage1.skeleton.edges().size()
        << " statements=" << r.stage1.ledger.size() << " applied=" << applied << '\n';
}

void cmd_test_independence(const TestIndependenceArgs& args, std::ostream& out) {
    Dataset ds = load_dataset(args.data, args.schema);
    VariableId x = ds.index_of(args.x);
    VariableId y = ds.index_of(args.y);
    std::vector<VariableId> given;
    for (const auto& name : args.given) given.push_back(ds.index_of(name));
    std::optional<VariableId> extra;
    if (args.minimal_dep) extra = ds.index_of(*args.minimal_dep);
    IndependenceTest t = test_independence(ds, x, y, given, extra, dirichlet(args.scoring.score, args.scoring.ess));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t.probability);
    out << "probability=" << buf << " structures=" << t.structures << '\n';
}

void cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    ExperimentManifest m = load_experiment(args.manifest);
    fs::create_directories(args.out);
    {
        std::ostringstream echo;
        write_manifest(echo, m);
        write_file((fs::path(args.out) / "manifest.txt").string(), echo.str());
    }
    for (int t = 0; t < m.trials; ++t) {
        Trial trial = generate_trial(m, t);
        fs::path dir = fs::path(args.out) / trial_name(t);
        fs::create_directories(dir);
        {
            auto f = open_out((dir / "data.csv").string());
            write_csv(f, trial.data);
            finish(f, (dir / "data.csv").string());
        }
        write_file((dir / "truth.dag").string(), to_text(trial.truth.full_dag));
        write_file((dir / "truth.mag").string(), to_text(trial.truth.true_mag));
        write_file((dir / "truth.pag").string(), to_text(trial.truth.true_pag));
        std::string hidden;
        for (NodeId v : members(trial.truth.hidden)) hidden += (hidden.empty() ? "" : " ") + std::to_string(v);
        write_file((dir / "hidden.txt").string(), hidden + "\n");
    }
    ordered_json inputs;
    inputs["manifest"] = fnv1a(read_bytes(args.manifest));
    ordered_json config;
    config["trials"] = m.trials;
    config["nodes"] = m.nodes;
    config["hidden"] = m.hidden;
    config["rows"] = m.rows;
    write_manifest_json((fs::path(args.out) / "run.json").string(), run_manifest("simulate", config, inputs, m.seed));
    out << "wrote " << m.trials << " trials to " << args.out << '\n';
}

void cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
    std::vector<ResultRow> rows;
    ordered_json inputs = ordered_json::object();
    for (const auto& name : trial_dirs(args.truth)) {
        fs::path tdir = fs::path(args.truth) / name;
        fs::path pdir = fs::path(args.pred) / name;
        if (!fs::is_directory(pdir)) throw InputError("missing prediction for " + name);

        std::ifstream dag_in = open_in((tdir / "truth.dag").string());
        Dag full = parse_dag(dag_in);
        GroundTruth truth = make_ground_truth(full, read_hidden((tdir / "hidden.txt").string()));

        std::ifstream data_in = open_in((tdir / "data.csv").string());
        std::string header;
        std::getline(data_in, header);
        std::vector<std::string> names;
        {
            std::stringstream ss(header);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                if (!cell.empty() && cell.back() == '\r') cell.pop_back();
                names.push_back(cell);
            }
        }
        if (static_cast<int>(names.size()) != static_cast<int>(truth.observed.size()))
            throw InputError(name + ": data columns do not match the truth");

        std::ifstream pag_in = open_in((pdir / "pred.pag").string());
        Pag pred = parse_pag(pag_in);
        if (pred.size() != static_cast<int>(truth.observed.size()))
            throw InputError(name + ": predicted PAG has " + std::to_string(pred.size()) + " nodes, truth has " +
                             std::to_string(truth.observed.size()));
        std::ifstream log_in = open_in((pdir / "decisions.csv").string());
        std::vector<Decision> log = read_decision_log(log_in, names);

        CausalLogicMatrix logic(pred.size());
        for (const auto& d : log)
            if (d.status == DecisionStatus::Applied && !logic.apply(d.statement))
                throw InputError(name + ": applied decisions contradict each other");

        rows.push_back({trial_index(name), args.theta, evaluate(pred, CausalMatrix(logic), log, truth)});
        inputs[name] = fnv1a(read_bytes((pdir / "pred.pag").string()) + read_bytes((pdir / "decisions.csv").string()));
    }
    {
        auto f = open_out(args.out);
        write_results_csv(f, rows);
        finish(f, args.out);
    }
    ordered_json config;
    config["theta"] = args.theta;
    write_manifest_json(args.out + ".manifest.json", run_manifest("evaluate", config, inputs, 0));
    out << "evaluated " << rows.size() << " trials\n";
}

void cmd_sweep(const SweepArgs& args, int jobs, std::ostream& out) {
    if (args.thetas.empty()) throw ArgumentError("no thresholds given");
    ExperimentManifest m = load_experiment(args.manifest);
    MappingTable mapping = load_mapping(args.mapping, m.k_max, jobs);

    std::vector<ResultRow> rows;
    for (int t = 0; t < m.trials; ++t) {
        Trial trial = generate_trial(m, t);
        const int n = trial.data.variables();
        std::optional<AdjacencySearchResult> fixed;
        if (args.fix_skeleton) fixed = adjacency_search(trial.data, config_of(m, jobs), mapping);
        for (double theta : args.thetas) {
            BccdConfig cfg = config_of(m, jobs);
            cfg.theta = theta;
            if (fixed) {
                InferenceResult inf = rank_and_infer(fixed->ledger, n, theta);
                Pag pag = map_to_pag(fixed->skeleton, inf.causal);
                rows.push_back({t, theta, evaluate(pag, inf.causal, inf.log, trial.truth)});
            } else {
                DiscoveryResult r = discover(trial.data, cfg, mapping);
                rows.push_back({t, theta, evaluate(r.pag, r.stage2.causal, r.stage2.log, trial.truth)});
            }
        }
    }
    {
        auto f = open_out(args.out);
        write_results_csv(f, rows);
        finish(f, args.out);
    }
    ordered_json inputs;
    inputs["manifest"] = fnv1a(read_bytes(args.manifest));
    ordered_json config = config_json(config_of(m, jobs));
    config["thetas"] = args.thetas;
    config["fix_skeleton"] = args.fix_skeleton;
    config["trials"] = m.trials;
    write_manifest_json(args.out + ".manifest.json", run_manifest("sweep", config, inputs, m.seed));

    for (double theta : args.thetas) {
        double sum = 0;
        long decisions = 0;
        int count = 0;
        for (const auto& r : rows) {
            if (r.theta != theta) continue;
            sum += r.report.causal_accuracy;
            decisions += r.report.decisions;
            ++count;
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "theta=%g trials=%d mean_causal_accuracy=%.4f mean_decisions=%.2f", theta, count,
                      count ? sum / count : 0.0, count ? static_cast<double>(decisions) / count : 0.0);
        out << buf << '\n';
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const CapacityError*>(&e)) return 3;
    if (dynamic_cast<const InvariantError*>(&e)) return 4;
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
        dynamic_cast<const InputError*>(&e) || dynamic_cast<const CacheVersionError*>(&e) ||
        dynamic_cast<const fs::filesystem_error*>(&e))
        return 2;
    if (dynamic_cast<const std::logic_error*>(&e)) return 4;
    return 2;
}

}  // namespace bccd::cli

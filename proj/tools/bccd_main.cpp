#include <iostream>

#include <CLI11.hpp>

#include "bccd/statements.hpp"
#include "commands.hpp"

using namespace bccd::cli;

namespace {

void add_scoring(CLI::App* cmd, ScoreOptions& s, bool with_prior) {
    if (with_prior)
        cmd->add_option("--prior", s.prior, "structure prior")->check(CLI::IsMember({"uniform", "multilevel"}));
    cmd->add_option("--score", s.score, "BD metric variant")->check(CLI::IsMember({"k2", "bdeu"}));
    cmd->add_option("--ess", s.ess, "BDeu equivalent sample size")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian constraint-based causal discovery"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.set_version_flag("--version", std::string("bccd ") + kToolVersion + " (mapping version " +
                                          std::to_string(bccd::MappingTable::version()) + ")");

    BuildMappingArgs bm;
    auto* build = app.add_subcommand("build-mapping", "precompute the DAG to statement table");
    build->add_option("--kmax", bm.kmax, "largest subset size")->capture_default_str();
    build->add_option("--out", bm.out, "binary cache path")->required();
    build->add_option("--text", bm.text, "also write a readable dump");

    DiscoverArgs da;
    auto* disc = app.add_subcommand("discover", "learn a PAG from a CSV dataset");
    disc->add_option("--data", da.data, "CSV file")->required();
    disc->add_option("--schema", da.schema, "category sidecar");
    disc->add_option("--theta", da.theta, "decision threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    disc->add_option("--kmax", da.kmax, "largest subset size")->capture_default_str();
    disc->add_option("--mapping", da.mapping, "mapping cache (built when missing)");
    disc->add_option("--out-pag", da.out_pag, "PAG output")->required();
    disc->add_option("--out-log", da.out_log, "decision log output")->required();
    add_scoring(disc, da.scoring, true);

    TestIndependenceArgs ti;
    auto* test = app.add_subcommand("test-independence", "Bayesian probability of an independence");
    test->add_option("--data", ti.data, "CSV file")->required();
    test->add_option("--schema", ti.schema, "category sidecar");
    test->add_option("--x", ti.x)->required();
    test->add_option("--y", ti.y)->required();
    test->add_option("--given", ti.given, "conditioning variables")->delimiter(',');
    test->add_option("--minimal-dep", ti.minimal_dep, "report the minimal dependence probability on this variable");
    add_scoring(test, ti.scoring, false);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "generate random models and data");
    sim->add_option("--manifest", sa.manifest)->required();
    sim->add_option("--out", sa.out, "output directory")->required();

    EvaluateArgs ea;
    auto* eval = app.add_subcommand("evaluate", "score predicted PAGs against ground truth");
    eval->add_option("--truth", ea.truth, "simulate output directory")->required();
    eval->add_option("--pred", ea.pred, "directory of trial_XXX/pred.pag and decisions.csv")->required();
    eval->add_option("--out", ea.out, "results CSV")->required();
    eval->add_option("--theta", ea.theta, "threshold recorded in the theta column")->capture_default_str();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "simulate and discover over several thresholds");
    sweep->add_option("--manifest", sw.manifest)->required();
    sweep->add_option("--thetas", sw.thetas, "comma separated thresholds")->delimiter(',')->required();
    sweep->add_option("--out", sw.out, "results CSV")->required();
    sweep->add_option("--mapping", sw.mapping, "mapping cache (built when missing)");
    sweep->add_flag("--fix-skeleton", sw.fix_skeleton,
                    "approximation: run the adjacency search once at the manifest theta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*build) cmd_build_mapping(bm, jobs, std::cout);
        else if (*disc) cmd_discover(da, jobs, std::cout);
        else if (*test) cmd_test_independence(ti, std::cout);
        else if (*sim) cmd_simulate(sa, std::cout);
        else if (*eval) cmd_evaluate(ea, std::cout);
        else if (*sweep) cmd_sweep(sw, jobs, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}

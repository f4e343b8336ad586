#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bccd::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Missing or unreadable files and inconsistent inputs.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScoreOptions {
    std::string prior = "uniform";
    std::string score = "k2";
    double ess = 1.0;
};

struct BuildMappingArgs {
    int kmax = 5;
    std::string out;
    std::string text;
};

struct DiscoverArgs {
    std::string data;
    std::string schema;
    double theta = 0.5;
    int kmax = 5;
    std::string mapping;
    std::string out_pag;
    std::string out_log;
    ScoreOptions scoring;
};

struct TestIndependenceArgs {
    std::string data;
    std::string schema;
    std::string x;
    std::string y;
    std::vector<std::string> given;
    std::optional<std::string> minimal_dep;
    ScoreOptions scoring;
};

struct SimulateArgs {
    std::string manifest;
    std::string out;
};

struct EvaluateArgs {
    std::string truth;
    std::string pred;
    std::string out;
    double theta = 0.5;
};

struct SweepArgs {
    std::string manifest;
    std::vector<double> thetas;
    std::string out;
    std::string mapping;
    bool fix_skeleton = false;
};

void cmd_build_mapping(const BuildMappingArgs& args, int jobs, std::ostream& out);
void cmd_discover(const DiscoverArgs& args, int jobs, std::ostream& out);
void cmd_test_independence(const TestIndependenceArgs& args, std::ostream& out);
void cmd_simulate(const SimulateArgs& args, std::ostream& out);
void cmd_evaluate(const EvaluateArgs& args, std::ostream& out);
void cmd_sweep(const SweepArgs& args, int jobs, std::ostream& out);

// 2 for input errors, 3 for capacity errors, 4 for internal failures.
int exit_code_for(const std::exception& e);

}  // namespace bccd::cli

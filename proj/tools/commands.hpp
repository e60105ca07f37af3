#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dspem::cli {

struct EngineOptions {
    std::string engine = "mcem";  // mcem | mcem-is
    int mc_samples = 10000;
    int max_iter = 100;
    double rel_tol = 1e-4;
    int is_switch_iter = 10;
    int burnin = 1000;
    double ess_floor = 0.2;
};

struct SimulateOptions {
    int model = 1;
    int scenario = 1;
    int n_families = 100;
    bool ds_plus = false;
    std::uint64_t seed = 1;
    std::string out;
};

struct FitOptions {
    std::string input;
    std::string variant = "full";
    EngineOptions engine;
    std::uint64_t seed = 1;
    std::string out;
};

struct TestOptions {
    std::string input;
    EngineOptions engine;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    bool reduced_own_bank = false;
    std::string out;
};

struct ScanOptions {
    std::string scan_path;
    std::string pedigree_path;
    std::string out;
    EngineOptions engine;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    int jobs = 1;
    double completeness = 1.0;
    bool reduced_own_bank = false;
};

struct PowerOptions {
    std::vector<int> models{1};
    std::vector<int> scenarios{1};
    int n_families = 100;
    bool ds_plus = false;
    int replicates = 100;
    EngineOptions engine;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    int jobs = 1;
    std::string out;
};

struct VerifyOptions {
    int draws = 1000;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_fit(const FitOptions& opt);
int cmd_test(const TestOptions& opt);
int cmd_scan(const ScanOptions& opt);
int cmd_power(const PowerOptions& opt);
int cmd_verify(const VerifyOptions& opt);

}  // namespace dspem::cli

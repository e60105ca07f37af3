#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dspem/dirichlet.hpp"
#include "dspem/em.hpp"
#include "dspem/genetics.hpp"
#include "dspem/io.hpp"

namespace {

void add_engine_options(CLI::App* cmd, dspem::cli::EngineOptions& opt) {
    cmd->add_option("--engine", opt.engine, "Estimator: mcem or mcem-is")
        ->check(CLI::IsMember({"mcem", "mcem-is"}));
    cmd->add_option("--mc-samples", opt.mc_samples, "Monte Carlo samples per E-step")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", opt.max_iter, "Maximum EM iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rel-tol", opt.rel_tol, "Relative parameter-change tolerance");
    cmd->add_option("--is-switch-iter", opt.is_switch_iter,
                    "Iteration after which mcem-is reweights the frozen bank");
    cmd->add_option("--burnin", opt.burnin, "Chain burn-in sweeps");
    cmd->add_option("--ess-floor", opt.ess_floor,
                    "Minimum ESS fraction before the reference bank refreshes");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dspem: joint maximum-likelihood detection of imprinting and maternal "
        "effects from discordant sib-pair families"};
    app.require_subcommand(1);

    dspem::cli::SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Generate a discordant sib-pair family file");
    simulate->add_option("--model", sim.model, "Disease model id (1-8)")
        ->check(CLI::Range(1, 8));
    simulate->add_option("--scenario", sim.scenario, "Scenario id (1-8)")
        ->check(CLI::Range(1, 8));
    simulate->add_option("--n", sim.n_families, "Number of families")
        ->check(CLI::PositiveNumber);
    simulate->add_flag("--ds-plus", sim.ds_plus, "Add one extra sibling per family");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--out", sim.out, "Output family file (default stdout)");

    dspem::cli::FitOptions fitopt;
    CLI::App* fit = app.add_subcommand("fit", "Fit one model variant to a family file");
    fit->add_option("input", fitopt.input, "Family file")->required();
    fit->add_option("--variant", fitopt.variant,
                    "Model variant: full, null, no-imprinting, no-maternal")
        ->check(CLI::IsMember({"full", "null", "no-imprinting", "no-maternal"}));
    add_engine_options(fit, fitopt.engine);
    fit->add_option("--seed", fitopt.seed, "Random seed");
    fit->add_option("--out", fitopt.out,
                    "Report path (trace goes to <out>.trace.tsv; default stdout)");

    dspem::cli::TestOptions testopt;
    CLI::App* test = app.add_subcommand(
        "test", "Fit all four variants and run the three likelihood ratio tests");
    test->add_option("input", testopt.input, "Family file")->required();
    add_engine_options(test, testopt.engine);
    test->add_option("--seed", testopt.seed, "Random seed");
    test->add_option("--alpha", testopt.alpha, "Significance level");
    test->add_flag("--reduced-own-bank", testopt.reduced_own_bank,
                   "Average reduced-model likelihoods over their own final banks");
    test->add_option("--out", testopt.out, "Report path (default stdout)");

    dspem::cli::ScanOptions scanopt;
    CLI::App* scan = app.add_subcommand("scan", "Per-SNP batch testing");
    scan->add_option("scan_file", scanopt.scan_path, "Long-format SNP genotype file")
        ->required();
    scan->add_option("pedigree_file", scanopt.pedigree_path,
                     "Pedigree file with sibling statuses")
        ->required();
    scan->add_option("--out", scanopt.out, "Output TSV (default stdout)");
    add_engine_options(scan, scanopt.engine);
    scan->add_option("--seed", scanopt.seed, "Base seed (per-SNP streams derive from it)");
    scan->add_option("--alpha", scanopt.alpha, "Significance level (Bonferroni-adjusted)");
    scan->add_option("--jobs", scanopt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    scan->add_option("--completeness", scanopt.completeness,
                     "Required fraction of pedigree families per SNP");
    scan->add_flag("--reduced-own-bank", scanopt.reduced_own_bank,
                   "Average reduced-model likelihoods over their own final banks");

    dspem::cli::PowerOptions poweropt;
    CLI::App* power = app.add_subcommand(
        "power", "Replicate grid: type I error / power / relative bias");
    power->add_option("--model", poweropt.models, "Disease model ids (repeatable)")
        ->check(CLI::Range(1, 8));
    power->add_option("--scenario", poweropt.scenarios, "Scenario ids (repeatable)")
        ->check(CLI::Range(1, 8));
    power->add_option("--n", poweropt.n_families, "Families per replicate")
        ->check(CLI::PositiveNumber);
    power->add_flag("--ds-plus", poweropt.ds_plus, "One extra sibling per family");
    power->add_option("--replicates", poweropt.replicates, "Replicates per cell")
        ->check(CLI::PositiveNumber);
    add_engine_options(power, poweropt.engine);
    power->add_option("--seed", poweropt.seed, "Base seed");
    power->add_option("--alpha", poweropt.alpha, "Significance level");
    power->add_option("--jobs", poweropt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    power->add_option("--out", poweropt.out,
                      "Summary TSV (replicates go to <out>.replicates.tsv)");

    dspem::cli::VerifyOptions verifyopt;
    CLI::App* verify = app.add_subcommand(
        "verify", "Audit the production probabilities against the enumeration oracle");
    verify->group("");  // hidden
    verify->add_option("--draws", verifyopt.draws, "Random parameter draws")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", verifyopt.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return dspem::cli::cmd_simulate(sim);
        if (fit->parsed()) return dspem::cli::cmd_fit(fitopt);
        if (test->parsed()) return dspem::cli::cmd_test(testopt);
        if (scan->parsed()) return dspem::cli::cmd_scan(scanopt);
        if (power->parsed()) return dspem::cli::cmd_power(poweropt);
        if (verify->parsed()) return dspem::cli::cmd_verify(verifyopt);
    } catch (const dspem::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dspem::FamilyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "dspem/em.hpp"
#include "dspem/inference.hpp"
#include "dspem/io.hpp"
#include "dspem/oracle.hpp"
#include "dspem/parallel.hpp"
#include "dspem/simulate.hpp"

namespace dspem::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

EmConfig make_config(const EngineOptions& opt) {
    EmConfig cfg;
    cfg.mc_samples = opt.mc_samples;
    cfg.max_iter = opt.max_iter;
    cfg.min_iter = std::min(cfg.min_iter, opt.max_iter);
    cfg.rel_tol = opt.rel_tol;
    cfg.is_switch_iter = opt.is_switch_iter;
    cfg.n_burnin = opt.burnin;
    cfg.is_weight_ess_floor = opt.ess_floor;
    cfg.validate();
    return cfg;
}

FitResult run_engine(const std::string& engine, const Dataset& data,
                     const EmConfig& cfg, ModelVariant variant, Rng& rng) {
    if (engine == "mcem") return fit(data, cfg, variant, rng);
    if (engine == "mcem-is") return fit_importance(data, cfg, variant, rng);
    throw std::invalid_argument("unknown engine '" + engine + "'");
}

ModelVariant parse_variant(const std::string& name) {
    for (const ModelVariant v :
         {ModelVariant::Full, ModelVariant::Null, ModelVariant::NoImprinting,
          ModelVariant::NoMaternal}) {
        if (name == variant_name(v)) return v;
    }
    throw std::invalid_argument("unknown variant '" + name + "'");
}

std::ostream& open_or_stdout(std::optional<std::ofstream>& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.emplace(path);
    if (!*file) throw std::runtime_error("cannot write to " + path);
    return *file;
}

void write_theta_keys(std::ostream& os, const std::string& prefix, const Theta& t) {
    os << prefix << "delta_hat\t" << format_double(t.delta()) << '\n'
       << prefix << "r1_hat\t" << format_double(t.r1()) << '\n'
       << prefix << "r2_hat\t" << format_double(t.r2()) << '\n'
       << prefix << "r_im_hat\t" << format_double(t.r_im()) << '\n'
       << prefix << "s1_hat\t" << format_double(t.s1()) << '\n'
       << prefix << "s2_hat\t" << format_double(t.s2()) << '\n';
}

void write_alpha_keys(std::ostream& os, const std::string& prefix,
                      const DirichletParams& a) {
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f)
            os << prefix << "alpha_" << m << f << '\t'
               << format_double(a.at(m, f)) << '\n';
}

void write_trace(std::ostream& os, const FitResult& fit) {
    os << "#iter\tdelta\tr1\tr2\tr_im\ts1\ts2";
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f) os << "\talpha_" << m << f;
    os << "\tq\n";
    for (std::size_t i = 0; i < fit.trace.size(); ++i) {
        const IterationRecord& rec = fit.trace[i];
        os << (i + 1) << '\t' << format_double(rec.theta.delta()) << '\t'
           << format_double(rec.theta.r1()) << '\t' << format_double(rec.theta.r2())
           << '\t' << format_double(rec.theta.r_im()) << '\t'
           << format_double(rec.theta.s1()) << '\t' << format_double(rec.theta.s2());
        for (int j = 0; j < 9; ++j) os << '\t' << format_double(rec.alpha[j]);
        os << '\t' << format_double(rec.q) << '\n';
    }
}

struct TestPipeline {
    FitResult full;
    FitResult null_fit;
    FitResult no_imprinting;
    FitResult no_maternal;
    TestResult association;
    TestResult imprinting;
    TestResult maternal;
};

TestPipeline run_test_pipeline(const Dataset& data, const EmConfig& cfg,
                               const std::string& engine, std::uint64_t seed,
                               bool reduced_own_bank) {
    const auto fit_variant = [&](ModelVariant v) {
        Rng rng(derive_seed(seed, variant_name(v)));
        return run_engine(engine, data, cfg, v, rng);
    };
    FitResult full = fit_variant(ModelVariant::Full);
    FitResult null_fit = fit_variant(ModelVariant::Null);
    FitResult no_imp = fit_variant(ModelVariant::NoImprinting);
    FitResult no_mat = fit_variant(ModelVariant::NoMaternal);
    TestResult assoc = lrt(full, null_fit, Effect::Association, data, reduced_own_bank);
    TestResult imp = lrt(full, no_imp, Effect::Imprinting, data, reduced_own_bank);
    TestResult mat = lrt(full, no_mat, Effect::Maternal, data, reduced_own_bank);
    return {std::move(full), std::move(null_fit), std::move(no_imp),
            std::move(no_mat), std::move(assoc), std::move(imp), std::move(mat)};
}

void write_test_result_keys(std::ostream& os, const TestResult& r, double alpha) {
    const std::string name = effect_name(r.effect);
    os << name << "_statistic\t" << format_double(r.statistic) << '\n'
       << name << "_df\t" << r.df << '\n'
       << name << "_p_value\t" << format_double(r.p_value) << '\n'
       << name << "_neglog10_p\t" << format_double(-std::log10(r.p_value)) << '\n'
       << name << "_reject\t" << (r.p_value <= alpha ? 1 : 0) << '\n';
}

std::string sanitize(const std::string& msg) {
    std::string out = msg;
    for (char& c : out)
        if (c == '\t' || c == '\n') c = ' ';
    return out;
}

std::array<double, 3> quartiles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    return {quantile(0.25), quantile(0.5), quantile(0.75)};
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt) {
    const DiseaseModel model = disease_model(opt.model);
    const Scenario scen = scenario(opt.scenario);
    const double delta = calibrate_delta(model, scen);
    const SimplexPoint mu = mating_type_probs(scen);

    const Dataset data =
        simulate_dataset(model, scen, opt.n_families, opt.ds_plus, opt.seed);
    std::vector<std::string> ids;
    ids.reserve(data.families.size());
    for (std::size_t i = 0; i < data.families.size(); ++i) {
        std::ostringstream os;
        os << 'F' << std::setw(4) << std::setfill('0') << (i + 1);
        ids.push_back(os.str());
    }

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, opt.out);
    write_family_file(os, data, ids);

    std::cerr << "calibrated_delta\t" << format_double(delta) << '\n';
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f)
            std::cerr << "mu_" << m << f << '\t' << format_double(mu.at(m, f)) << '\n';
    return 0;
}

int cmd_fit(const FitOptions& opt) {
    const NamedDataset input = read_family_file(opt.input);
    const EmConfig cfg = make_config(opt.engine);
    const ModelVariant variant = parse_variant(opt.variant);

    const auto start = Clock::now();
    Rng rng(opt.seed);
    const FitResult result = run_engine(opt.engine.engine, input.data, cfg, variant, rng);
    const double elapsed = seconds_since(start);

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, opt.out);
    os << "command\tfit\n"
       << "input\t" << opt.input << '\n'
       << "engine\t" << opt.engine.engine << '\n'
       << "variant\t" << variant_name(variant) << '\n'
       << "seed\t" << opt.seed << '\n'
       << "n_families\t" << input.data.n_families() << '\n'
       << "ds_only\t" << (input.data.ds_only() ? 1 : 0) << '\n'
       << "mc_samples\t" << cfg.mc_samples << '\n'
       << "max_iter\t" << cfg.max_iter << '\n'
       << "rel_tol\t" << format_double(cfg.rel_tol) << '\n'
       << "converged\t" << (result.converged ? 1 : 0) << '\n'
       << "n_iter\t" << result.n_iter << '\n';
    write_theta_keys(os, "", result.theta_hat);
    write_alpha_keys(os, "", result.alpha_hat);
    if (!result.trace.empty()) {
        os << "q_final\t" << format_double(result.trace.back().q) << '\n';
    }
    for (const std::string& w : result.warnings) os << "warning\t" << sanitize(w) << '\n';

    if (!opt.out.empty()) {
        std::ofstream trace_os(opt.out + ".trace.tsv");
        if (!trace_os) throw std::runtime_error("cannot write to " + opt.out + ".trace.tsv");
        write_trace(trace_os, result);
    } else {
        os << '\n';
        write_trace(os, result);
    }

    std::cerr << "wall_clock_sec\t" << format_double(elapsed) << '\n';
    return 0;
}

int cmd_test(const TestOptions& opt) {
    const NamedDataset input = read_family_file(opt.input);
    const EmConfig cfg = make_config(opt.engine);

    const auto start = Clock::now();
    const TestPipeline pipeline = run_test_pipeline(
        input.data, cfg, opt.engine.engine, opt.seed, opt.reduced_own_bank);
    const double elapsed = seconds_since(start);

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, opt.out);
    os << "command\ttest\n"
       << "input\t" << opt.input << '\n'
       << "engine\t" << opt.engine.engine << '\n'
       << "seed\t" << opt.seed << '\n'
       << "n_families\t" << input.data.n_families() << '\n'
       << "ds_only\t" << (input.data.ds_only() ? 1 : 0) << '\n'
       << "alpha_level\t" << format_double(opt.alpha) << '\n'
       << "reduced_own_bank\t" << (opt.reduced_own_bank ? 1 : 0) << '\n';

    const auto write_fit = [&](const std::string& prefix, const FitResult& f) {
        os << prefix << "converged\t" << (f.converged ? 1 : 0) << '\n'
           << prefix << "n_iter\t" << f.n_iter << '\n';
        write_theta_keys(os, prefix, f.theta_hat);
        for (const std::string& w : f.warnings)
            os << "warning\t" << prefix << sanitize(w) << '\n';
    };
    write_fit("full_", pipeline.full);
    write_fit("null_", pipeline.null_fit);
    write_fit("no_imprinting_", pipeline.no_imprinting);
    write_fit("no_maternal_", pipeline.no_maternal);

    write_test_result_keys(os, pipeline.association, opt.alpha);
    write_test_result_keys(os, pipeline.imprinting, opt.alpha);
    write_test_result_keys(os, pipeline.maternal, opt.alpha);
    for (const TestResult* r :
         {&pipeline.association, &pipeline.imprinting, &pipeline.maternal}) {
        for (const std::string& w : r->warnings) os << "warning\t" << sanitize(w) << '\n';
    }

    std::cerr << "wall_clock_sec\t" << format_double(elapsed) << '\n';
    return 0;
}

int cmd_scan(const ScanOptions& opt) {
    const Pedigree pedigree = read_pedigree_file(opt.pedigree_path);
    const std::vector<SnpFamilies> blocks =
        read_scan_file(opt.scan_path, pedigree, opt.completeness);
    const EmConfig cfg = make_config(opt.engine);
    const double n_snps = static_cast<double>(blocks.size());

    struct Row {
        std::string snp_id;
        std::size_t n_families = 0;
        std::optional<TestPipeline> pipeline;
        std::string error;
    };
    std::vector<Row> rows(blocks.size());

    const auto start = Clock::now();
    parallel_for(blocks.size(), opt.jobs, [&](std::size_t i) {
        Row& row = rows[i];
        row.snp_id = blocks[i].snp_id;
        row.n_families = blocks[i].dataset.data.n_families();
        try {
            row.pipeline = run_test_pipeline(blocks[i].dataset.data, cfg,
                                             opt.engine.engine,
                                             derive_seed(opt.seed, blocks[i].snp_id),
                                             opt.reduced_own_bank);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    const double elapsed = seconds_since(start);

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, opt.out);
    os << "#snp_id\tn_families";
    for (const char* e : {"association", "imprinting", "maternal"}) {
        os << '\t' << e << "_statistic\t" << e << "_df\t" << e << "_p_value\t" << e
           << "_neglog10_p\t" << e << "_sig_bonferroni";
    }
    os << "\tstatus\n";

    std::size_t failures = 0;
    for (const Row& row : rows) {
        os << row.snp_id << '\t' << row.n_families;
        if (row.pipeline) {
            for (const TestResult* r : {&row.pipeline->association,
                                        &row.pipeline->imprinting,
                                        &row.pipeline->maternal}) {
                const bool sig = r->p_value * n_snps <= opt.alpha;
                os << '\t' << format_double(r->statistic) << '\t' << r->df << '\t'
                   << format_double(r->p_value) << '\t'
                   << format_double(-std::log10(r->p_value)) << '\t' << (sig ? 1 : 0);
            }
            os << "\tok\n";
        } else {
            ++failures;
            for (int k = 0; k < 15; ++k) os << "\t.";
            os << '\t' << sanitize(row.error) << '\n';
        }
    }

    std::cerr << "scan_snps\t" << blocks.size() << '\n'
              << "scan_failures\t" << failures << '\n'
              << "wall_clock_sec\t" << format_double(elapsed) << '\n';
    return 0;
}

int cmd_power(const PowerOptions& opt) {
    const EmConfig cfg = make_config(opt.engine);

    struct Cell {
        int model, scenario;
        bool ds_plus;
    };
    std::vector<Cell> cells;
    for (const int m : opt.models)
        for (const int s : opt.scenarios) cells.push_back({m, s, opt.ds_plus});

    struct Replicate {
        std::size_t cell = 0;
        int index = 0;
        std::uint64_t seed = 0;
        bool ok = false;
        std::string error;
        double delta_hat = 0, r1 = 0, r2 = 0, r_im = 0, s1 = 0, s2 = 0;
        bool converged = false;
        double stat[3] = {0, 0, 0};
        double p[3] = {1, 1, 1};
        double seconds = 0.0;
    };
    std::vector<Replicate> reps(cells.size() * static_cast<std::size_t>(opt.replicates));
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int r = 0; r < opt.replicates; ++r) {
            Replicate& rep = reps[c * opt.replicates + r];
            rep.cell = c;
            rep.index = r;
            std::ostringstream tag;
            tag << "m" << cells[c].model << ".s" << cells[c].scenario << ".ds"
                << (cells[c].ds_plus ? 1 : 0) << ".r" << r;
            rep.seed = derive_seed(opt.seed, tag.str());
        }
    }

    parallel_for(reps.size(), opt.jobs, [&](std::size_t i) {
        Replicate& rep = reps[i];
        const Cell& cell = cells[rep.cell];
        const auto start = Clock::now();
        try {
            const Dataset data =
                simulate_dataset(disease_model(cell.model), scenario(cell.scenario),
                                 opt.n_families, cell.ds_plus, rep.seed);
            const TestPipeline pipeline = run_test_pipeline(
                data, cfg, opt.engine.engine, rep.seed, false);
            const Theta& t = pipeline.full.theta_hat;
            rep.delta_hat = t.delta();
            rep.r1 = t.r1();
            rep.r2 = t.r2();
            rep.r_im = t.r_im();
            rep.s1 = t.s1();
            rep.s2 = t.s2();
            rep.converged = pipeline.full.converged;
            const TestResult* results[3] = {&pipeline.association,
                                            &pipeline.imprinting,
                                            &pipeline.maternal};
            for (int e = 0; e < 3; ++e) {
                rep.stat[e] = results[e]->statistic;
                rep.p[e] = results[e]->p_value;
            }
            rep.ok = true;
        } catch (const std::exception& e) {
            rep.error = e.what();
        }
        rep.seconds = seconds_since(start);
    });

    // Replicate-level raw TSV for plotting.
    const std::string rep_path =
        opt.out.empty() ? std::string() : opt.out + ".replicates.tsv";
    std::optional<std::ofstream> rep_file;
    std::ostringstream rep_buf;
    std::ostream& ros = rep_path.empty() ? static_cast<std::ostream&>(rep_buf)
                                         : open_or_stdout(rep_file, rep_path);
    ros << "#model\tscenario\tdata_type\treplicate\tseed\tconverged_full\tdelta_hat"
           "\tr1_hat\tr2_hat\tr_im_hat\ts1_hat\ts2_hat";
    for (const char* e : {"association", "imprinting", "maternal"})
        ros << '\t' << e << "_statistic\t" << e << "_p_value\t" << e << "_reject";
    ros << "\tstatus\n";
    for (const Replicate& rep : reps) {
        const Cell& cell = cells[rep.cell];
        ros << cell.model << '\t' << cell.scenario << '\t'
            << (cell.ds_plus ? "DS+1" : "DS") << '\t' << rep.index << '\t' << rep.seed
            << '\t';
        if (rep.ok) {
            ros << (rep.converged ? 1 : 0) << '\t' << format_double(rep.delta_hat)
                << '\t' << format_double(rep.r1) << '\t' << format_double(rep.r2)
                << '\t' << format_double(rep.r_im) << '\t' << format_double(rep.s1)
                << '\t' << format_double(rep.s2);
            for (int e = 0; e < 3; ++e) {
                ros << '\t' << format_double(rep.stat[e]) << '\t'
                    << format_double(rep.p[e]) << '\t'
                    << (rep.p[e] <= opt.alpha ? 1 : 0);
            }
            ros << "\tok\n";
        } else {
            for (int k = 0; k < 15; ++k) ros << ".\t";
            ros << sanitize(rep.error) << '\n';
        }
    }

    // Summary per cell.
    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, opt.out);
    os << "#model\tscenario\tn_families\tdata_type\tengine\tn_replicates\tn_ok"
          "\treject_association\treject_imprinting\treject_maternal";
    for (const char* p : {"delta", "r1", "r2", "r_im", "s1", "s2"})
        os << "\tbias_" << p << "_q1\tbias_" << p << "_median\tbias_" << p << "_q3";
    os << '\n';

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        const DiseaseModel model = disease_model(cell.model);
        const double delta_true = calibrate_delta(model, scenario(cell.scenario));
        const double truth[6] = {delta_true, model.r1, model.r2,
                                 model.r_im, model.s1, model.s2};

        std::size_t n_ok = 0;
        double rejections[3] = {0, 0, 0};
        std::array<std::vector<double>, 6> bias;
        double total_seconds = 0.0;
        for (int r = 0; r < opt.replicates; ++r) {
            const Replicate& rep = reps[c * opt.replicates + r];
            total_seconds += rep.seconds;
            if (!rep.ok) continue;
            ++n_ok;
            for (int e = 0; e < 3; ++e) rejections[e] += rep.p[e] <= opt.alpha ? 1 : 0;
            const double est[6] = {rep.delta_hat, rep.r1, rep.r2, rep.r_im, rep.s1, rep.s2};
            for (int k = 0; k < 6; ++k)
                bias[k].push_back((est[k] - truth[k]) / truth[k]);
        }

        os << cell.model << '\t' << cell.scenario << '\t' << opt.n_families << '\t'
           << (cell.ds_plus ? "DS+1" : "DS") << '\t' << opt.engine.engine << '\t'
           << opt.replicates << '\t' << n_ok;
        for (int e = 0; e < 3; ++e) {
            os << '\t'
               << format_double(n_ok ? rejections[e] / static_cast<double>(n_ok) : 0.0);
        }
        for (int k = 0; k < 6; ++k) {
            if (n_ok == 0) {
                os << "\t.\t.\t.";
            } else {
                const auto q = quartiles(bias[k]);
                os << '\t' << format_double(q[0]) << '\t' << format_double(q[1])
                   << '\t' << format_double(q[2]);
            }
        }
        os << '\n';

        std::cerr << "cell\tmodel=" << cell.model << " scenario=" << cell.scenario
                  << " data=" << (cell.ds_plus ? "DS+1" : "DS")
                  << "\tmean_wall_clock_sec\t"
                  << format_double(total_seconds /
                                   std::max(1, opt.replicates))
                  << '\n';
    }
    return 0;
}

int cmd_verify(const VerifyOptions& opt) {
    Rng rng(opt.seed);
    const auto random_theta = [&]() {
        for (;;) {
            const double delta = rng.uniform(0.01, 0.2);
            const auto rr = [&]() { return std::exp(rng.uniform(-1.1, 1.1)); };
            try {
                return Theta(delta, rr(), rr(), rr(), rr(), rr());
            } catch (const std::invalid_argument&) {
            }
        }
    };
    const DirichletParams prior = DirichletParams::uniform();

    double max_entry_diff = 0.0;
    double max_denom_diff = 0.0;
    bool count_ok = true;
    for (int draw = 0; draw < opt.draws; ++draw) {
        const Theta theta = random_theta();
        const SimplexPoint mu = sample_dirichlet(prior, rng);
        const oracle::EnumeratedTable table = oracle::enumerate_joint_table(theta, mu);
        count_ok = count_ok && table.entries.size() == 29;
        for (const auto& [key, prob] : table.entries) {
            const double direct =
                joint_ds_prob(theta, mu, std::get<0>(key), std::get<1>(key),
                              std::get<2>(key), std::get<3>(key));
            max_entry_diff = std::max(max_entry_diff, std::fabs(direct - prob));
        }
        max_denom_diff = std::max(
            max_denom_diff, std::fabs(ds_denominator(theta, mu) - table.total));
    }

    const bool entries_ok = max_entry_diff < 1e-12;
    const bool denom_ok = max_denom_diff < 1e-12;
    std::cout << "joint_table_agreement\t" << (entries_ok ? "PASS" : "FAIL")
              << "\tmax_abs_diff\t" << format_double(max_entry_diff) << '\n';
    std::cout << "nonzero_configuration_count\t" << (count_ok ? "PASS" : "FAIL")
              << '\n';
    std::cout << "denominator_identity\t" << (denom_ok ? "PASS" : "FAIL")
              << "\tmax_abs_diff\t" << format_double(max_denom_diff) << '\n';
    return (entries_ok && denom_ok && count_ok) ? 0 : 3;
}

}  // namespace dspem::cli

// Acceptance suite: one pass/fail line per criterion. Heavy statistical
// criteria run replicated fitting pipelines in-process; the determinism
// criterion drives the installed CLI binary (--cli path).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "dspem/em.hpp"
#include "dspem/inference.hpp"
#include "dspem/io.hpp"
#include "dspem/oracle.hpp"
#include "dspem/parallel.hpp"
#include "dspem/simulate.hpp"
#include "dspem/special.hpp"

using namespace dspem;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_jobs = 8;
double g_scale = 1.0;  // development knob; ctest runs at 1.0

int scaled(int n) { return std::max(4, static_cast<int>(std::lround(n * g_scale))); }

using Clock = std::chrono::steady_clock;

struct Criterion {
    int id;
    bool pass = true;
    std::ostringstream detail;
    double seconds = 0.0;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [FAIL: " << what << "]";
        }
    }
};

std::vector<Criterion> g_results;

Theta random_theta(Rng& rng) {
    for (;;) {
        const double delta = rng.uniform(0.01, 0.2);
        const auto rr = [&]() { return std::exp(rng.uniform(-1.1, 1.1)); };
        try {
            return Theta(delta, rr(), rr(), rr(), rr(), rr());
        } catch (const std::invalid_argument&) {
        }
    }
}

double batch_se(const std::vector<double>& values, int n_batches = 50) {
    const std::size_t batch = std::max<std::size_t>(1, values.size() / n_batches);
    std::vector<double> means;
    for (std::size_t start = 0; start + batch <= values.size(); start += batch) {
        double m = 0.0;
        for (std::size_t i = 0; i < batch; ++i) m += values[start + i];
        means.push_back(m / static_cast<double>(batch));
    }
    const double grand =
        std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double var = 0.0;
    for (const double m : means) var += (m - grand) * (m - grand);
    var /= (means.size() - 1);
    return std::sqrt(var / means.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Tanh-sinh quadrature over (0, 1); exact enough for Beta-type endpoint
// singularities.
template <typename F>
double tanh_sinh_01(const F& f, int n = 1200) {
    const double t_max = 3.2;
    const double h = 2.0 * t_max / n;
    const double half_pi = 1.5707963267948966;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = -t_max + k * h;
        const double s = half_pi * std::sinh(t);
        const double u = 0.5 * (1.0 + std::tanh(s));
        const double w = 0.5 * half_pi * std::cosh(t) / (std::cosh(s) * std::cosh(s));
        if (u <= 0.0 || u >= 1.0 || w == 0.0) continue;
        sum += f(u) * w * h;
    }
    return sum;
}

// Four-variant fit plus the three likelihood ratio tests, as the test and
// scan commands run it.
struct PipelineOutcome {
    bool ok = false;
    std::string error;
    double p[3] = {1, 1, 1};
    double stat[3] = {0, 0, 0};
    double theta[6] = {0, 0, 0, 0, 0, 0};
    double seconds = 0.0;
};

PipelineOutcome run_pipeline(const Dataset& data, const EmConfig& cfg,
                             std::uint64_t seed, const std::string& engine) {
    PipelineOutcome out;
    const auto start = Clock::now();
    try {
        const auto fit_variant = [&](ModelVariant v) {
            Rng rng(derive_seed(seed, variant_name(v)));
            return engine == "mcem-is" ? fit_importance(data, cfg, v, rng)
                                       : fit(data, cfg, v, rng);
        };
        const FitResult full = fit_variant(ModelVariant::Full);
        const FitResult null_fit = fit_variant(ModelVariant::Null);
        const FitResult no_imp = fit_variant(ModelVariant::NoImprinting);
        const FitResult no_mat = fit_variant(ModelVariant::NoMaternal);
        const TestResult r[3] = {lrt(full, null_fit, Effect::Association, data),
                                 lrt(full, no_imp, Effect::Imprinting, data),
                                 lrt(full, no_mat, Effect::Maternal, data)};
        for (int e = 0; e < 3; ++e) {
            out.p[e] = r[e].p_value;
            out.stat[e] = r[e].statistic;
        }
        const Theta& t = full.theta_hat;
        out.theta[0] = t.delta();
        out.theta[1] = t.r1();
        out.theta[2] = t.r2();
        out.theta[3] = t.r_im();
        out.theta[4] = t.s1();
        out.theta[5] = t.s2();
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------------

void criterion_1(Criterion& c) {
    Rng rng(101);
    const DirichletParams prior = DirichletParams::uniform();
    double worst = 0.0;
    bool counts_ok = true;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        const Theta theta = random_theta(rng);
        const SimplexPoint mu = sample_dirichlet(prior, rng);
        const auto table = oracle::enumerate_joint_table(theta, mu);
        counts_ok = counts_ok && table.entries.size() == 29;
        for (const auto& [key, prob] : table.entries) {
            const double ours =
                joint_ds_prob(theta, mu, std::get<0>(key), std::get<1>(key),
                              std::get<2>(key), std::get<3>(key));
            worst = std::max(worst, std::fabs(ours - prob));
        }
    }
    c.require(worst < 1e-12, "oracle disagreement");
    c.require(counts_ok, "config count != 29");
    c.detail << "1000 draws, max |diff| = " << worst << ", 29 configs each";
}

// Printed-table audit. Rows keyed by (m,f,c1,c2); "printed" is the published
// expression, "derived" the first-principles value where they differ.
void criterion_2(Criterion& c) {
    struct Row {
        int id, m, f, c1, c2;
        std::function<double(const Theta&, const SimplexPoint&)> printed;
        // Empty when the printed expression is already first-principles.
        std::function<double(const Theta&, const SimplexPoint&)> derived;
    };
    const auto D = [](const Theta& t) { return t.delta(); };
    std::vector<Row> rows;
    const auto add = [&](int id, int m, int f, int c1, int c2, auto printed) {
        rows.push_back({id, m, f, c1, c2, printed, nullptr});
    };
    const auto add_dev = [&](int id, int m, int f, int c1, int c2, auto printed,
                             auto derived) {
        rows.push_back({id, m, f, c1, c2, printed, derived});
    };

    add(1, 0, 0, 0, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 0) * D(t) * (1 - D(t));
    });
    add(2, 0, 1, 0, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 1) * 0.25 * D(t) * (1 - D(t));
    });
    add(3, 0, 1, 1, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 1) * 0.25 * D(t) * t.r1() * (1 - D(t));
    });
    add(4, 0, 1, 0, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 1) * 0.25 * D(t) * (1 - D(t) * t.r1());
    });
    add(5, 0, 1, 1, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 1) * 0.25 * D(t) * t.r1() * (1 - D(t) * t.r1());
    });
    add(6, 0, 2, 1, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(0, 2) * D(t) * t.r1() * (1 - D(t) * t.r1());
    });
    add(7, 1, 0, 0, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 0) * 0.25 * D(t) * t.s1() * (1 - D(t) * t.s1());
    });
    // Printed rows 8 and 9 carry a spurious r_im on the childless factor; the
    // derivation in the worked appendix has no such factor.
    add_dev(8, 1, 0, 1, 0,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 0) * 0.25 * D(t) * t.r1() * t.s1() * t.r_im() *
                       (1 - D(t) * t.s1() * t.r_im());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 0) * 0.25 * D(t) * t.r1() * t.s1() * t.r_im() *
                       (1 - D(t) * t.s1());
            });
    add_dev(9, 1, 0, 0, 1,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 0) * 0.25 * D(t) * t.s1() * t.r_im() *
                       (1 - D(t) * t.r1() * t.s1() * t.r_im());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 0) * 0.25 * D(t) * t.s1() *
                       (1 - D(t) * t.r1() * t.s1() * t.r_im());
            });
    add(10, 1, 0, 1, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 0) * 0.25 * D(t) * t.r1() * t.s1() * t.r_im() *
               (1 - D(t) * t.r1() * t.s1() * t.r_im());
    });
    add(11, 1, 1, 0, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.s1() * (1 - D(t) * t.s1());
    });
    add(12, 1, 1, 1, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.r1() * t.s1() * (1 - D(t) * t.s1()) *
               (1 + t.r_im());
    });
    add(13, 1, 1, 0, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.s1() *
               (2 - D(t) * t.r1() * t.s1() * (1 + t.r_im()));
    });
    // Printed row 14 carries an extra (1 - delta s1); the appendix derivation
    // for the same configuration has no such factor.
    add_dev(14, 1, 1, 1, 1,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 1) / 16.0 * D(t) * t.r1() * t.s1() *
                       (1 - D(t) * t.s1()) * (1 + t.r_im()) *
                       (2 - D(t) * t.r1() * t.s1() * (1 + t.r_im()));
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 1) / 16.0 * D(t) * t.r1() * t.s1() * (1 + t.r_im()) *
                       (2 - D(t) * t.r1() * t.s1() * (1 + t.r_im()));
            });
    add(15, 1, 1, 2, 0, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.r2() * t.s1() * (1 - D(t) * t.s1());
    });
    add(16, 1, 1, 0, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.s1() * (1 - D(t) * t.r2() * t.s1());
    });
    add(17, 1, 1, 2, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.r2() * t.s1() *
               (1 - D(t) * t.r2() * t.s1());
    });
    add(18, 1, 1, 1, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.r1() * t.s1() * (1 + t.r_im()) *
               (1 - D(t) * t.r2() * t.s1());
    });
    add(19, 1, 1, 2, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 1) / 16.0 * D(t) * t.r2() * t.s1() *
               (2 - D(t) * t.r1() * t.s1() * (1 + t.r_im()));
    });
    add(20, 1, 2, 1, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 2) * 0.25 * D(t) * t.r1() * t.s1() *
               (1 - D(t) * t.r1() * t.s1());
    });
    add(21, 1, 2, 1, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 2) * 0.25 * D(t) * t.r1() * t.s1() *
               (1 - D(t) * t.r2() * t.s1());
    });
    add(22, 1, 2, 2, 1, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 2) * 0.25 * D(t) * t.r2() * t.s1() *
               (1 - D(t) * t.r1() * t.s1());
    });
    add(23, 1, 2, 2, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(1, 2) * 0.25 * D(t) * t.r2() * t.s1() *
               (1 - D(t) * t.r2() * t.s1());
    });
    // Printed rows 24-27 are shifted by one configuration (row 25 holds row
    // 24's value, and so on); row 24 as printed belongs to no configuration.
    add_dev(24, 2, 0, 1, 1,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(1, 2) * 0.25 * D(t) * t.r2() * t.s1() *
                       (1 - D(t) * t.r2() * t.s2());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 0) * D(t) * t.r1() * t.s2() * t.r_im() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            });
    add_dev(25, 2, 1, 1, 1,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 0) * D(t) * t.r1() * t.s2() * t.r_im() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 1) * 0.25 * D(t) * t.r1() * t.s2() * t.r_im() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            });
    add_dev(26, 2, 1, 2, 1,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 1) * 0.25 * D(t) * t.r1() * t.s2() * t.r_im() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 1) * 0.25 * D(t) * t.r2() * t.s2() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            });
    add_dev(27, 2, 1, 1, 2,
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 1) * 0.25 * D(t) * t.r2() * t.s2() *
                       (1 - D(t) * t.r1() * t.s2() * t.r_im());
            },
            [&](const Theta& t, const SimplexPoint& u) {
                return u.at(2, 1) * 0.25 * D(t) * t.r1() * t.s2() * t.r_im() *
                       (1 - D(t) * t.r2() * t.s2());
            });
    add(28, 2, 1, 2, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(2, 1) * 0.25 * D(t) * t.r2() * t.s2() *
               (1 - D(t) * t.r2() * t.s2());
    });
    add(29, 2, 2, 2, 2, [&](const Theta& t, const SimplexPoint& u) {
        return u.at(2, 2) * D(t) * t.r2() * t.s2() * (1 - D(t) * t.r2() * t.s2());
    });

    Rng rng(202);
    const DirichletParams prior = DirichletParams::uniform();
    double worst_match = 0.0;
    std::set<int> deviations;
    bool deviations_detected = true;
    for (int rep = 0; rep < 100; ++rep) {
        const Theta theta = random_theta(rng);
        const SimplexPoint mu = sample_dirichlet(prior, rng);
        for (const Row& row : rows) {
            const double generated =
                joint_ds_prob(theta, mu, row.m, row.f, row.c1, row.c2);
            const double expected =
                row.derived ? row.derived(theta, mu) : row.printed(theta, mu);
            worst_match = std::max(worst_match, std::fabs(generated - expected));
            if (row.derived) {
                deviations.insert(row.id);
                // The printed expression must genuinely differ somewhere.
                if (rep == 0 &&
                    std::fabs(row.printed(theta, mu) - generated) < 1e-12) {
                    deviations_detected = false;
                }
            }
        }
    }
    c.require(worst_match < 1e-12, "symbolic mismatch");
    c.require(deviations_detected, "documented deviation not observed");
    c.detail << "max |diff| = " << worst_match << "; printed-table deviations at rows {";
    bool first = true;
    for (const int id : deviations) {
        c.detail << (first ? "" : ",") << id;
        first = false;
    }
    c.detail << "} match the first-principles derivation";
}

void criterion_3(Criterion& c) {
    const Dataset data = simulate_dataset(disease_model(2), scenario(1), 100, false, 303);
    Rng rng(303);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const SimplexPoint z = sample_dirichlet(DirichletParams::uniform(), rng);
        const double a = log_likelihood_given_z(Theta(0.01, 1, 1, 1, 1, 1), z, data);
        const double b = log_likelihood_given_z(Theta(0.05, 1, 1, 1, 1, 1), z, data);
        const double d = log_likelihood_given_z(Theta(0.2, 1, 1, 1, 1, 1), z, data);
        worst = std::max({worst, std::fabs(a - b), std::fabs(a - d)});
    }
    c.require(worst < 1e-10, "delta does not cancel");
    c.detail << "max |delta-shift| = " << worst << " across {0.01, 0.05, 0.2}";
}

void criterion_4(Criterion& c) {
    Rng rng(404);
    double worst_integral = 0.0;
    int mean_failures = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::array<double, 9> av;
        for (double& a : av) a = rng.uniform(0.5, 8.0);
        const DirichletParams alpha(av);
        const double total = alpha.sum();

        // 1-D quadrature of the conditional over its scaled segment.
        const SimplexPoint z = sample_dirichlet(alpha, rng);
        const IndexPair pair{1, 6};
        const double s = z[1] + z[6];
        const double integral = tanh_sinh_01([&](double u) {
            std::array<double, 9> v = z.values();
            v[1] = s * u;
            v[6] = s - v[1];
            return s * std::exp(conditional_pair_log_density(alpha, pair, SimplexPoint(v)));
        });
        worst_integral = std::max(worst_integral, std::fabs(integral - 1.0));

        // Pairwise-sweep Gibbs over 1e5 sweeps.
        const std::vector<IndexPair> schedule = ChainConfig::default_pair_schedule();
        std::array<double, 9> state;
        state.fill(1.0 / 9.0);
        const int sweeps = 100000;
        std::array<std::vector<double>, 9> traces;
        for (auto& t : traces) t.reserve(sweeps);
        for (int it = 0; it < sweeps; ++it) {
            for (const IndexPair& p : schedule) resample_pair(alpha, p, state, rng);
            for (int j = 0; j < 9; ++j) traces[j].push_back(state[j]);
        }
        for (int j = 0; j < 9; ++j) {
            const double mean =
                std::accumulate(traces[j].begin(), traces[j].end(), 0.0) / sweeps;
            const double se = batch_se(traces[j]);
            if (std::fabs(mean - av[j] / total) >= 3.0 * se) ++mean_failures;
        }
    }
    c.require(worst_integral < 1e-8, "conditional does not integrate to 1");
    // 45 coordinate checks at 3 SE: allow the expected handful of boundary
    // cases but no systematic failure.
    c.require(mean_failures <= 2, "Gibbs means off by more than 3 SE");
    c.detail << "max |integral-1| = " << worst_integral << "; " << mean_failures
             << "/45 coordinate means outside 3 SE";
}

void criterion_5(Criterion& c) {
    // Prior reproduction on empty data.
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    const DirichletParams flat = DirichletParams::uniform();
    ChainConfig config;
    config.n_samples = 10000;
    config.n_burnin = 1000;
    Rng rng(505);
    const ChainResult prior_chain = run_chain(theta, flat, Dataset{}, config, rng);
    int mean_failures = 0;
    for (int j = 0; j < 9; ++j) {
        std::vector<double> coord;
        for (const SimplexPoint& z : prior_chain.bank.samples) coord.push_back(z[j]);
        const double mean =
            std::accumulate(coord.begin(), coord.end(), 0.0) / coord.size();
        if (std::fabs(mean - 1.0 / 9.0) >= 3.0 * batch_se(coord)) ++mean_failures;
    }

    // Four overdispersed chains on a 100-family dataset.
    const Dataset data = simulate_dataset(disease_model(2), scenario(1), 100, false, 505);
    const auto [theta0, alpha0] = init_psi(data, ModelVariant::Full);
    Rng rng2(506);
    const ChainResult diag =
        run_chain_with_diagnostics(theta0, alpha0, data, config, rng2);
    double max_psrf = 0.0;
    for (const double r : *diag.psrf) max_psrf = std::max(max_psrf, r);

    c.require(mean_failures == 0, "prior means outside 3 SE");
    c.require(max_psrf < 1.1, "PSRF >= 1.1");
    c.detail << "prior means ok (9/9); max PSRF = " << max_psrf
             << " over 4 overdispersed chains x 10000 samples";
}

std::vector<double> g_t2_sample;  // criterion 6 output, reused by criterion 10

void criterion_6(Criterion& c) {
    const int n_reps = scaled(200);
    EmConfig cfg;
    cfg.mc_samples = 2000;

    std::vector<PipelineOutcome> outcomes(n_reps);
    parallel_for(n_reps, g_jobs, [&](std::size_t r) {
        const std::uint64_t seed = derive_seed(606, "c6.r" + std::to_string(r));
        const Dataset data =
            simulate_dataset(disease_model(1), scenario(1), 100, false, seed);
        outcomes[r] = run_pipeline(data, cfg, seed, "mcem");
    });

    int n_ok = 0;
    double reject[3] = {0, 0, 0};
    g_t2_sample.clear();
    for (const PipelineOutcome& out : outcomes) {
        if (!out.ok) continue;
        ++n_ok;
        for (int e = 0; e < 3; ++e) reject[e] += out.p[e] <= 0.05 ? 1 : 0;
        g_t2_sample.push_back(out.stat[1]);
    }
    c.require(n_ok == n_reps, "replicates failed");
    c.detail << n_reps << " null replicates: type I error";
    const char* names[3] = {" association=", " imprinting=", " maternal="};
    for (int e = 0; e < 3; ++e) {
        const double rate = reject[e] / std::max(1, n_ok);
        c.detail << names[e] << rate;
        if (g_scale == 1.0) {
            c.require(rate >= 0.02 && rate <= 0.09, "type I error outside [0.02, 0.09]");
        }
    }
}

void criterion_7(Criterion& c) {
    const int n_reps = scaled(100);
    EmConfig cfg;  // defaults: 10000 samples

    struct Cell {
        int model;
        bool ds_plus;
        double rejections = 0.0;
        int n_ok = 0;
    };
    std::vector<Cell> cells = {{5, false}, {5, true}, {3, false}};

    std::vector<PipelineOutcome> outcomes(cells.size() * n_reps);
    parallel_for(outcomes.size(), g_jobs, [&](std::size_t i) {
        const std::size_t cell = i / n_reps;
        const std::size_t r = i % n_reps;
        std::ostringstream tag;
        tag << "c7.m" << cells[cell].model << ".ds" << cells[cell].ds_plus << ".r" << r;
        const std::uint64_t seed = derive_seed(707, tag.str());
        const Dataset data = simulate_dataset(disease_model(cells[cell].model),
                                              scenario(2), 100,
                                              cells[cell].ds_plus, seed);
        outcomes[i] = run_pipeline(data, cfg, seed, "mcem");
    });
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].ok) continue;
        Cell& cell = cells[i / n_reps];
        ++cell.n_ok;
        cell.rejections += outcomes[i].p[1] <= 0.05 ? 1 : 0;  // imprinting test
    }

    const double power_ds = cells[0].rejections / std::max(1, cells[0].n_ok);
    const double power_ds1 = cells[1].rejections / std::max(1, cells[1].n_ok);
    const double null_rate = cells[2].rejections / std::max(1, cells[2].n_ok);
    if (g_scale == 1.0) {
        c.require(power_ds >= null_rate + 0.15,
                  "imprinting power does not clear the no-imprinting rate by 0.15");
        c.require(power_ds1 >= power_ds, "DS+1 power below DS power");
    }
    c.detail << n_reps << " reps/cell: imprinting rejection model5-DS=" << power_ds
             << " model5-DS+1=" << power_ds1 << " model3-DS=" << null_rate;
}

void criterion_8(Criterion& c) {
    const int n_reps = scaled(100);
    EmConfig cfg;
    const DiseaseModel model = disease_model(7);
    const Scenario scen = scenario(4);

    struct Estimate {
        bool ok = false;
        double rr[5] = {0, 0, 0, 0, 0};
    };
    std::vector<Estimate> estimates(n_reps);
    parallel_for(n_reps, g_jobs, [&](std::size_t r) {
        const std::uint64_t seed = derive_seed(808, "c8.r" + std::to_string(r));
        try {
            const Dataset data = simulate_dataset(model, scen, 100, true, seed);
            Rng rng(derive_seed(seed, variant_name(ModelVariant::Full)));
            const FitResult full = fit(data, cfg, ModelVariant::Full, rng);
            estimates[r].rr[0] = full.theta_hat.r1();
            estimates[r].rr[1] = full.theta_hat.r2();
            estimates[r].rr[2] = full.theta_hat.r_im();
            estimates[r].rr[3] = full.theta_hat.s1();
            estimates[r].rr[4] = full.theta_hat.s2();
            estimates[r].ok = true;
        } catch (const std::exception&) {
        }
    });

    const double truth[5] = {model.r1, model.r2, model.r_im, model.s1, model.s2};
    const char* names[5] = {"r1", "r2", "r_im", "s1", "s2"};
    c.detail << n_reps << " reps, median relative bias:";
    for (int k = 0; k < 5; ++k) {
        std::vector<double> bias;
        for (const Estimate& est : estimates) {
            if (est.ok) bias.push_back((est.rr[k] - truth[k]) / truth[k]);
        }
        const double med = median(bias);
        c.detail << ' ' << names[k] << '=' << med;
        if (g_scale == 1.0) {
            c.require(std::fabs(med) <= 0.15, std::string(names[k]) + " bias beyond 0.15");
        }
    }
}

void criterion_9(Criterion& c) {
    const int per_model = scaled(20);
    EmConfig cfg;

    struct Pair {
        bool ok = false;
        double mcem[6], is[6];
        double mcem_sec = 0, is_sec = 0;
    };
    std::vector<Pair> pairs(2 * per_model);
    parallel_for(pairs.size(), g_jobs, [&](std::size_t i) {
        const int model_id = i < static_cast<std::size_t>(per_model) ? 1 : 5;
        const std::uint64_t seed =
            derive_seed(909, "c9.m" + std::to_string(model_id) + ".r" +
                                 std::to_string(i % per_model));
        const Dataset data =
            simulate_dataset(disease_model(model_id), scenario(1), 100, true, seed);
        const auto run_one = [&](const std::string& engine, double* out,
                                 double* seconds) {
            const auto start = Clock::now();
            Rng rng(derive_seed(seed, variant_name(ModelVariant::Full)));
            const FitResult f = engine == "mcem-is"
                                    ? fit_importance(data, cfg, ModelVariant::Full, rng)
                                    : fit(data, cfg, ModelVariant::Full, rng);
            *seconds = std::chrono::duration<double>(Clock::now() - start).count();
            out[0] = f.theta_hat.delta();
            out[1] = f.theta_hat.r1();
            out[2] = f.theta_hat.r2();
            out[3] = f.theta_hat.r_im();
            out[4] = f.theta_hat.s1();
            out[5] = f.theta_hat.s2();
        };
        try {
            run_one("mcem", pairs[i].mcem, &pairs[i].mcem_sec);
            run_one("mcem-is", pairs[i].is, &pairs[i].is_sec);
            pairs[i].ok = true;
        } catch (const std::exception&) {
        }
    });

    double total_mcem = 0.0, total_is = 0.0;
    std::array<std::vector<double>, 6> rel;
    for (const Pair& p : pairs) {
        if (!p.ok) continue;
        total_mcem += p.mcem_sec;
        total_is += p.is_sec;
        for (int k = 0; k < 6; ++k) {
            rel[k].push_back(std::fabs(p.is[k] - p.mcem[k]) /
                             std::max(std::fabs(p.mcem[k]), 1e-12));
        }
    }
    const char* names[6] = {"delta", "r1", "r2", "r_im", "s1", "s2"};
    c.detail << 2 * per_model << " matched fits: median |rel diff|";
    for (int k = 0; k < 6; ++k) {
        const double med = median(rel[k]);
        c.detail << ' ' << names[k] << '=' << med;
        if (g_scale == 1.0) {
            c.require(med <= 0.05, std::string(names[k]) + " parity beyond 5%");
        }
    }
    const double ratio = total_is / std::max(total_mcem, 1e-9);
    c.detail << "; wall-clock ratio is/mcem = " << ratio;
    if (g_scale == 1.0) {
        c.require(ratio <= 0.6, "importance sampling not faster than 0.6x");
    }
}

void criterion_10(Criterion& c) {
    if (g_t2_sample.empty()) {
        c.require(false, "criterion 6 sample unavailable");
        return;
    }
    std::vector<double> sample = g_t2_sample;
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = 1.0 - chi2_sf(sample[i], 1);
        d_stat = std::max(d_stat, std::fabs((i + 1.0) / n - cdf));
        d_stat = std::max(d_stat, std::fabs(cdf - i / n));
    }
    const double critical = 1.62762 / std::sqrt(n);  // KS at level 0.01
    if (g_scale == 1.0) {
        c.require(d_stat < critical, "KS test rejects chi2_1");
    }
    c.detail << "KS D = " << d_stat << " vs 1% critical value " << critical << " (n="
             << sample.size() << ")";
}

// --------------------------------------------------------------------------
// Criterion 11: CLI determinism.

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
    const std::string cmd = g_cli + " " + args + " > " + stdout_path.string() +
                            " 2> " + stdout_path.string() + ".err";
    return std::system(cmd.c_str());
}

void criterion_11(Criterion& c) {
    const fs::path dir = "acceptance_cli_tmp";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const std::string& name) { return (dir / name).string(); };

    // Fixtures: a family file plus a 3-SNP scan panel with a shared pedigree.
    c.require(run_cli("simulate --model 2 --scenario 3 --n 25 --ds-plus --seed 11 "
                      "--out " + p("fam.tsv"), dir / "sim1.out") == 0,
              "simulate failed");
    {
        const NamedDataset base = read_family_file(p("fam.tsv"));
        std::ofstream ped(p("ped.tsv"));
        ped << "#family_id\tsib_statuses\n";
        for (std::size_t i = 0; i < base.ids.size(); ++i) {
            ped << base.ids[i] << '\t'
                << (base.data.families[i].siblings[0].affected ? "1" : "0") << '\n';
        }
        std::ofstream scan(p("scan.tsv"));
        scan << "#snp_id\tfamily_id\tm\tf\tc1\tc2\tsib_genotypes\n";
        for (int snp = 0; snp < 3; ++snp) {
            const Dataset snp_data = simulate_dataset(
                disease_model(1), scenario(5), 25, true, 1100 + snp);
            for (std::size_t i = 0; i < base.ids.size(); ++i) {
                const FamilyRecord& fam = snp_data.families[i];
                scan << "rs" << snp << '\t' << base.ids[i] << '\t' << fam.m << '\t'
                     << fam.f << '\t' << fam.c1 << '\t' << fam.c2 << '\t'
                     << fam.siblings[0].genotype << '\n';
            }
        }
    }

    struct Verb {
        std::string name;
        std::string args;                  // with {out} placeholder
        std::vector<std::string> outputs;  // produced files, with {out}
        bool has_jobs;
    };
    const std::string fast =
        " --mc-samples 150 --max-iter 2 --burnin 50";
    const std::vector<Verb> verbs = {
        {"simulate",
         "simulate --model 2 --scenario 3 --n 25 --ds-plus --seed 11 --out {out}fam.tsv",
         {"{out}fam.tsv"},
         false},
        {"fit",
         "fit " + p("fam.tsv") + fast + " --seed 5 --out {out}fit.txt",
         {"{out}fit.txt", "{out}fit.txt.trace.tsv"},
         false},
        {"test",
         "test " + p("fam.tsv") + fast + " --seed 5 --out {out}test.txt",
         {"{out}test.txt"},
         false},
        {"scan",
         "scan " + p("scan.tsv") + " " + p("ped.tsv") + fast +
             " --seed 7 --jobs {jobs} --out {out}scan.tsv",
         {"{out}scan.tsv"},
         true},
        {"power",
         "power --model 1 --scenario 5 --n 15 --replicates 3" + fast +
             " --seed 9 --jobs {jobs} --out {out}power.tsv",
         {"{out}power.tsv", "{out}power.tsv.replicates.tsv"},
         true},
        {"verify", "verify --draws 50 --seed 3", {}, false},
    };

    const auto substitute = [](std::string s, const std::string& key,
                               const std::string& value) {
        for (std::size_t pos = s.find(key); pos != std::string::npos;
             pos = s.find(key)) {
            s.replace(pos, key.size(), value);
        }
        return s;
    };

    for (const Verb& verb : verbs) {
        // Two sequential runs at --jobs 1 must be byte-identical (stdout and
        // every produced file); a --jobs 8 run must give identical results.
        std::vector<std::string> run_tags = {"a", "b"};
        if (verb.has_jobs) run_tags.push_back("j8");
        std::map<std::string, std::vector<std::string>> contents;
        for (const std::string& tag : run_tags) {
            const std::string out_prefix = (dir / (verb.name + "_" + tag + "_")).string();
            std::string args = substitute(verb.args, "{out}", out_prefix);
            args = substitute(args, "{jobs}", tag == "j8" ? "8" : "1");
            const int rc = run_cli(args, dir / (verb.name + "_" + tag + ".stdout"));
            c.require(rc == 0, verb.name + " exited nonzero");
            std::vector<std::string> blobs;
            blobs.push_back(slurp(dir / (verb.name + "_" + tag + ".stdout")));
            for (const std::string& f : verb.outputs) {
                blobs.push_back(slurp(substitute(f, "{out}", out_prefix)));
            }
            contents[tag] = std::move(blobs);
        }
        c.require(contents["a"] == contents["b"],
                  verb.name + " not byte-identical across reruns");
        if (verb.has_jobs) {
            c.require(contents["a"] == contents["j8"],
                      verb.name + " results differ at --jobs 8");
        }
    }
    c.detail << "6 verbs byte-identical across reruns; scan/power identical at --jobs 8";
    fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) g_cli = argv[++i];
        else if (arg == "--jobs" && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
        else if (arg == "--scale" && i + 1 < argc) g_scale = std::atof(argv[++i]);
        else if (arg == "--only" && i + 1 < argc) {
            std::istringstream is(argv[++i]);
            std::string tok;
            while (std::getline(is, tok, ',')) only.insert(std::atoi(tok.c_str()));
        }
    }

    const std::vector<std::pair<int, std::function<void(Criterion&)>>> criteria = {
        {1, criterion_1},   {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5},   {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
        {9, criterion_9},   {10, criterion_10}, {11, criterion_11},
    };

    bool all_pass = true;
    for (const auto& [id, fn] : criteria) {
        if (!only.empty() && !only.count(id)) continue;
        if (id == 11 && g_cli.empty()) {
            std::cout << "criterion 11: SKIP (no --cli path given)\n";
            continue;
        }
        Criterion c{id};
        const auto start = Clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        all_pass = all_pass && c.pass;
        std::cout << "criterion " << id << ": " << (c.pass ? "PASS" : "FAIL") << "  "
                  << c.detail.str() << "  (" << c.seconds << " s)" << std::endl;
    }
    if (g_scale != 1.0) {
        std::cout << "note: ran at --scale " << g_scale
                  << "; thresholds are only enforced at scale 1\n";
    }
    return all_pass ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dspem/mh.hpp"

using namespace dspem;

namespace {

Dataset type1_families(int n) {
    std::vector<FamilyRecord> fams(n, FamilyRecord{0, 0, 0, 0, {}});
    return Dataset::from_families(std::move(fams));
}

Dataset empty_dataset() { return Dataset{}; }

double batch_se(const std::vector<double>& values, int n_batches = 50) {
    const std::size_t batch = values.size() / n_batches;
    std::vector<double> means;
    for (int b = 0; b < n_batches; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < batch; ++i) m += values[b * batch + i];
        means.push_back(m / static_cast<double>(batch));
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / n_batches;
    double var = 0.0;
    for (const double m : means) var += (m - grand) * (m - grand);
    var /= (n_batches - 1);
    return std::sqrt(var / n_batches);
}

}  // namespace

TEST_SUITE_BEGIN("mh");

TEST_CASE("mh ratio basics") {
    const Theta theta(0.05, 1.5, 2.0, 1.4, 1.2, 1.3);
    Rng rng(1);
    const SimplexPoint a = sample_dirichlet(DirichletParams::uniform(), rng);
    const SimplexPoint b = sample_dirichlet(DirichletParams::uniform(), rng);

    CHECK(mh_ratio(theta, type1_families(10), a, a) == doctest::Approx(1.0));
    CHECK(mh_ratio(theta, empty_dataset(), a, b) == doctest::Approx(1.0));

    // Reciprocal property.
    const Dataset data = Dataset::from_families(
        {{1, 1, 1, 0, {}}, {0, 1, 1, 1, {}}, {2, 1, 2, 1, {}}});
    const double fwd = mh_ratio(theta, data, a, b);
    const double bwd = mh_ratio(theta, data, b, a);
    CHECK(fwd * bwd == doctest::Approx(1.0).epsilon(1e-10));

    // Single type-1 family: closed form through the joint and denominator.
    const Dataset one = type1_families(1);
    const double expected =
        (joint_ds_prob(theta, b, 0, 0, 0, 0) / ds_denominator(theta, b)) /
        (joint_ds_prob(theta, a, 0, 0, 0, 0) / ds_denominator(theta, a));
    CHECK(mh_ratio(theta, one, a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pair step: flat likelihood always accepts; errors propagate") {
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    const DirichletParams alpha = DirichletParams::uniform();
    Rng rng(2);
    const SimplexPoint z = sample_dirichlet(alpha, rng);
    for (int i = 0; i < 50; ++i) {
        const auto [next, accepted] =
            mh_step_pair(theta, alpha, empty_dataset(), z, {0, 1}, rng);
        CHECK(accepted);
    }

    // Boundary theta makes one family impossible: the step must error out.
    const Theta boundary(1.0 / 9.0, 1, 3, 1, 1, 3);
    const Dataset bad = Dataset::from_families({{2, 2, 2, 2, {}}});
    Rng rng2(3);
    CHECK_THROWS_AS(mh_step_pair(boundary, alpha, bad, z, {0, 1}, rng2), FamilyError);

    // Determinism.
    Rng ra(4), rb(4);
    const auto [na, aa] = mh_step_pair(theta, alpha, type1_families(5), z, {2, 3}, ra);
    const auto [nb, ab] = mh_step_pair(theta, alpha, type1_families(5), z, {2, 3}, rb);
    CHECK(aa == ab);
    for (int j = 0; j < 9; ++j) CHECK(na[j] == nb[j]);
}

TEST_CASE("chain with empty data reproduces the prior") {
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    const DirichletParams alpha = DirichletParams::uniform();
    ChainConfig config;
    config.n_samples = 20000;
    config.n_burnin = 200;
    Rng rng(5);
    const ChainResult result = run_chain(theta, alpha, empty_dataset(), config, rng);
    REQUIRE(result.bank.size() == 20000);
    CHECK(result.acceptance_rate == doctest::Approx(1.0));

    for (int j = 0; j < 9; ++j) {
        std::vector<double> coord;
        coord.reserve(result.bank.size());
        for (const SimplexPoint& z : result.bank.samples) coord.push_back(z[j]);
        const double mean = std::accumulate(coord.begin(), coord.end(), 0.0) /
                            static_cast<double>(coord.size());
        CHECK(std::fabs(mean - 1.0 / 9.0) < 4.0 * batch_se(coord));
    }
}

TEST_CASE("recorded samples satisfy the simplex invariants") {
    const Theta theta(0.08, 1.4, 2.0, 1.0, 1.0, 1.0);
    const DirichletParams alpha = DirichletParams::uniform();
    const Dataset data = Dataset::from_families(
        {{1, 1, 1, 0, {}}, {1, 1, 2, 0, {}}, {0, 1, 1, 0, {}}, {2, 2, 2, 2, {}}});
    ChainConfig config;
    config.n_samples = 2000;
    config.n_burnin = 100;
    Rng rng(6);
    const ChainResult result = run_chain(theta, alpha, data, config, rng);
    for (const SimplexPoint& z : result.bank.samples) {
        double sum = 0.0;
        for (int j = 0; j < 9; ++j) {
            REQUIRE(z[j] > 0.0);
            REQUIRE(z[j] < 1.0);
            sum += z[j];
        }
        REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
    }
    // Cached log-likelihoods agree with recomputation.
    const DatasetSummary summary(data);
    const LogLikelihood ll(theta, summary);
    for (std::size_t t = 0; t < result.bank.size(); t += 97) {
        CHECK(result.bank.loglik[t] ==
              doctest::Approx(ll(result.bank.samples[t])).epsilon(1e-10));
    }
}

TEST_CASE("concentrated data: chain matches the conjugate posterior") {
    // 500 families of type (0,0,0,0) under the null theta give a likelihood
    // proportional to mu_00^500, so the posterior is Dirichlet with alpha_00
    // bumped by 500.
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    const DirichletParams alpha = DirichletParams::uniform();
    const Dataset data = type1_families(500);
    ChainConfig config;
    config.n_samples = 6000;
    config.n_burnin = 500;
    Rng rng(7);
    const ChainResult result = run_chain(theta, alpha, data, config, rng);

    std::vector<double> coord;
    for (const SimplexPoint& z : result.bank.samples) coord.push_back(z[0]);
    const double mean =
        std::accumulate(coord.begin(), coord.end(), 0.0) / coord.size();
    const double expected = 501.0 / 509.0;
    CHECK(mean > 0.9);
    CHECK(std::fabs(mean - expected) < 4.0 * batch_se(coord));
}

TEST_CASE("chain determinism") {
    const Theta theta(0.06, 1.2, 1.8, 1.1, 1.0, 1.0);
    const DirichletParams alpha = DirichletParams::uniform();
    const Dataset data = Dataset::from_families({{1, 1, 1, 0, {}}, {0, 1, 1, 1, {}}});
    ChainConfig config;
    config.n_samples = 200;
    config.n_burnin = 50;
    Rng ra(8), rb(8);
    const ChainResult a = run_chain(theta, alpha, data, config, ra);
    const ChainResult b = run_chain(theta, alpha, data, config, rb);
    REQUIRE(a.bank.size() == b.bank.size());
    for (std::size_t t = 0; t < a.bank.size(); ++t) {
        for (int j = 0; j < 9; ++j) CHECK(a.bank.samples[t][j] == b.bank.samples[t][j]);
    }
    CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("psrf limits") {
    Rng rng(9);
    SampleBank chain;
    for (int i = 0; i < 500; ++i)
        chain.samples.push_back(sample_dirichlet(DirichletParams::uniform(), rng));

    // Identical chains: pure within-variance.
    const auto identical = psrf({chain, chain, chain});
    for (int j = 0; j < 9; ++j) {
        CHECK(identical[j] < 1.001);
        CHECK(identical[j] > 0.99);
    }

    // Disjoint constant chains: pure between-variance.
    std::array<double, 9> lo, hi;
    lo.fill(0.1);
    lo[0] = 0.2;
    hi.fill(0.05);
    hi[0] = 0.6;
    SampleBank ca, cb;
    for (int i = 0; i < 500; ++i) {
        ca.samples.push_back(SimplexPoint(lo));
        cb.samples.push_back(SimplexPoint(hi));
    }
    const auto disjoint = psrf({ca, cb});
    for (int j = 0; j < 9; ++j) CHECK(disjoint[j] > 2.0);

    CHECK_THROWS_AS(psrf({chain}), std::invalid_argument);
    SampleBank shorter = chain;
    shorter.samples.erase(shorter.samples.begin() + 400, shorter.samples.end());
    CHECK_THROWS_AS(psrf({chain, shorter}), std::invalid_argument);
}

TEST_CASE("stationary chains have psrf near one") {
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    const DirichletParams alpha = DirichletParams::uniform();
    ChainConfig config;
    config.n_samples = 2000;
    config.n_burnin = 100;
    config.n_diag_chains = 4;
    Rng rng(10);
    const ChainResult result =
        run_chain_with_diagnostics(theta, alpha, empty_dataset(), config, rng);
    REQUIRE(result.psrf.has_value());
    for (int j = 0; j < 9; ++j) CHECK((*result.psrf)[j] < 1.1);
}

TEST_CASE("config validation") {
    ChainConfig config;
    config.pair_schedule = {{0, 1}, {2, 3}};  // does not cover all coordinates
    const Theta theta(0.05, 1, 1, 1, 1, 1);
    Rng rng(11);
    CHECK_THROWS_AS(
        run_chain(theta, DirichletParams::uniform(), empty_dataset(), config, rng),
        std::invalid_argument);
}

TEST_SUITE_END();

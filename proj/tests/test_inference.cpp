#include <doctest.h>

#include <cmath>

#include "dspem/inference.hpp"
#include "dspem/simulate.hpp"

using namespace dspem;

namespace {

SampleBank prior_bank(int n, std::uint64_t seed) {
    SampleBank bank;
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        bank.samples.push_back(sample_dirichlet(DirichletParams::uniform(), rng));
    return bank;
}

FitResult make_fit(const Theta& theta, ModelVariant variant, SampleBank bank) {
    return FitResult{theta,
                     DirichletParams::uniform(),
                     variant,
                     std::move(bank),
                     {},
                     1,
                     true,
                     {}};
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("chi-square survival function") {
    CHECK(chi2_sf(0.0, 1) == doctest::Approx(1.0));
    CHECK(chi2_sf(0.0, 7) == doctest::Approx(1.0));
    for (const double x : {0.5, 2.0, 7.3}) {
        CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    }
    // Standard 5% critical values.
    CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi2_sf(11.070497693516351, 5) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi2_sf(12.591587243743977, 6) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi2_sf(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-6));

    // Strict monotonicity in the statistic at fixed df.
    double prev = 1.0;
    for (double x = 0.1; x < 30.0; x += 0.7) {
        const double p = chi2_sf(x, 3);
        CHECK(p < prev);
        prev = p;
    }
    CHECK_THROWS_AS(chi2_sf(-1.0, 2), std::domain_error);
    CHECK_THROWS_AS(chi2_sf(1.0, 0), std::domain_error);
}

TEST_CASE("lrt: identical parameters give a zero statistic") {
    const Dataset data = simulate_dataset(disease_model(1), scenario(5), 30, false, 99);
    SampleBank bank = prior_bank(200, 1);
    const Theta same(0.05, 1, 1, 1, 1, 1);
    const FitResult full = make_fit(same, ModelVariant::Full, bank);
    const FitResult reduced = make_fit(same, ModelVariant::Null, bank);
    const TestResult r = lrt(full, reduced, Effect::Association, data);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("lrt: association df depends on additional siblings") {
    SampleBank bank = prior_bank(100, 2);
    const Theta full_theta(0.05, 1.3, 1.8, 1.2, 1.1, 1.2);
    const Theta null_theta(0.05, 1, 1, 1, 1, 1);

    const Dataset ds_only = simulate_dataset(disease_model(2), scenario(5), 25, false, 7);
    const TestResult a =
        lrt(make_fit(full_theta, ModelVariant::Full, bank),
            make_fit(null_theta, ModelVariant::Null, bank), Effect::Association, ds_only);
    CHECK(a.df == 6);

    const Dataset ds_plus = simulate_dataset(disease_model(2), scenario(5), 25, true, 8);
    const TestResult b =
        lrt(make_fit(full_theta, ModelVariant::Full, bank),
            make_fit(null_theta, ModelVariant::Null, bank), Effect::Association, ds_plus);
    CHECK(b.df == 5);

    // A single family with a sibling flips the rule.
    std::vector<FamilyRecord> mixed = ds_only.families;
    mixed.push_back({1, 1, 1, 0, {{0, false}}});
    const TestResult c = lrt(make_fit(full_theta, ModelVariant::Full, bank),
                             make_fit(null_theta, ModelVariant::Null, bank),
                             Effect::Association, Dataset::from_families(mixed));
    CHECK(c.df == 5);

    const TestResult imp = lrt(make_fit(full_theta, ModelVariant::Full, bank),
                               make_fit(null_theta, ModelVariant::NoImprinting, bank),
                               Effect::Imprinting, ds_only);
    CHECK(imp.df == 1);
    const TestResult mat = lrt(make_fit(full_theta, ModelVariant::Full, bank),
                               make_fit(null_theta, ModelVariant::NoMaternal, bank),
                               Effect::Maternal, ds_only);
    CHECK(mat.df == 2);
}

TEST_CASE("lrt: null reduced term is delta-free on DS-only data") {
    const Dataset data = simulate_dataset(disease_model(1), scenario(5), 30, false, 11);
    SampleBank bank = prior_bank(150, 3);
    const Theta full_theta(0.05, 1.2, 1.5, 1.1, 1.0, 1.0);
    const FitResult full = make_fit(full_theta, ModelVariant::Full, bank);

    const TestResult r1 = lrt(full, make_fit(Theta(0.01, 1, 1, 1, 1, 1),
                                             ModelVariant::Null, bank),
                              Effect::Association, data);
    const TestResult r2 = lrt(full, make_fit(Theta(0.2, 1, 1, 1, 1, 1),
                                             ModelVariant::Null, bank),
                              Effect::Association, data);
    CHECK(r1.statistic == doctest::Approx(r2.statistic).epsilon(1e-10));
}

TEST_CASE("lrt: negative raw statistics floor at zero with a warning") {
    // Every family has an affected variant-carrying child, so shrinking r1
    // below 1 lowers the likelihood for every Z; the full-model point is
    // strictly worse than the null reduction.
    const Dataset data =
        Dataset::from_families(std::vector<FamilyRecord>(20, {0, 1, 1, 0, {}}));
    SampleBank bank = prior_bank(150, 4);
    const Theta bad_full(0.05, 0.1, 1.0, 1.0, 1.0, 1.0);
    const Theta good_null(0.05, 1, 1, 1, 1, 1);
    const TestResult r =
        lrt(make_fit(bad_full, ModelVariant::Full, bank),
            make_fit(good_null, ModelVariant::Null, bank), Effect::Association, data);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(!r.warnings.empty());
}

TEST_CASE("lrt: variant pairing is enforced") {
    const Dataset data = simulate_dataset(disease_model(1), scenario(5), 10, false, 17);
    SampleBank bank = prior_bank(50, 5);
    const Theta t(0.05, 1, 1, 1, 1, 1);
    CHECK_THROWS_AS(lrt(make_fit(t, ModelVariant::Full, bank),
                        make_fit(t, ModelVariant::Null, bank), Effect::Imprinting, data),
                    std::invalid_argument);
    CHECK_THROWS_AS(lrt(make_fit(t, ModelVariant::Null, bank),
                        make_fit(t, ModelVariant::Null, bank), Effect::Association, data),
                    std::invalid_argument);
}

TEST_SUITE_END();

#include "dspem/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "dspem/special.hpp"

namespace dspem {

const char* effect_name(Effect e) {
    switch (e) {
        case Effect::Association: return "association";
        case Effect::Imprinting: return "imprinting";
        case Effect::Maternal: return "maternal";
    }
    return "?";
}

ModelVariant reduced_variant_for(Effect e) {
    switch (e) {
        case Effect::Association: return ModelVariant::Null;
        case Effect::Imprinting: return ModelVariant::NoImprinting;
        case Effect::Maternal: return ModelVariant::NoMaternal;
    }
    throw std::logic_error("reduced_variant_for: unknown effect");
}

double chi2_sf(double x, int df) {
    if (x < 0.0) throw std::domain_error("chi2_sf: statistic must be non-negative");
    if (df <= 0) throw std::domain_error("chi2_sf: df must be positive");
    return gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

namespace {

double mean_loglik_over_bank(const Theta& theta, const SampleBank& bank,
                             const DatasetSummary& summary) {
    const LogLikelihood ll(theta, summary);
    double mean = 0.0;
    for (const SimplexPoint& z : bank.samples) mean += ll(z);
    return mean / static_cast<double>(bank.size());
}

}  // namespace

TestResult lrt(const FitResult& full, const FitResult& reduced, Effect effect,
               const Dataset& data, bool reduced_own_bank) {
    if (full.variant != ModelVariant::Full) {
        throw std::invalid_argument("lrt: first fit must be the full model");
    }
    if (reduced.variant != reduced_variant_for(effect)) {
        throw std::invalid_argument("lrt: reduced fit does not match the tested effect");
    }
    if (full.final_bank.size() == 0 || reduced.final_bank.size() == 0) {
        throw std::invalid_argument("lrt: fits carry no Monte Carlo samples");
    }

    const DatasetSummary summary(data);
    const double mean_full =
        mean_loglik_over_bank(full.theta_hat, full.final_bank, summary);
    const double mean_reduced = mean_loglik_over_bank(
        reduced.theta_hat, reduced_own_bank ? reduced.final_bank : full.final_bank,
        summary);

    TestResult result;
    result.effect = effect;
    result.statistic = 2.0 * (mean_full - mean_reduced);
    if (result.statistic < 0.0) {
        result.warnings.push_back(
            "negative raw statistic floored at zero (Monte Carlo noise)");
        result.statistic = 0.0;
    }
    switch (effect) {
        case Effect::Association: result.df = summary.ds_only() ? 6 : 5; break;
        case Effect::Imprinting: result.df = 1; break;
        case Effect::Maternal: result.df = 2; break;
    }
    result.p_value = chi2_sf(result.statistic, result.df);
    return result;
}

}  // namespace dspem

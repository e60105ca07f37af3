#pragma once

#include <string>
#include <vector>

#include "dspem/em.hpp"

namespace dspem {

enum class Effect { Association, Imprinting, Maternal };

const char* effect_name(Effect e);

// Reduced-model variant tested against the full model for each effect.
ModelVariant reduced_variant_for(Effect e);

struct TestResult {
    Effect effect;
    double statistic = 0.0;  // floored at zero
    int df = 1;
    double p_value = 1.0;
    std::vector<std::string> warnings;
};

// Upper-tail probability of the chi-square law with df degrees of freedom.
double chi2_sf(double x, int df);

// Likelihood ratio statistic averaged over the full fit's final Monte Carlo
// sample bank:
//   T = mean_t 2 [ log P(Y|Z_t; theta_full) - log P(Y|Z_t; theta_reduced) ],
// floored at zero. Degrees of freedom: 1 for imprinting, 2 for maternal, and
// for association 6 on data without additional siblings (the null model's
// discordant-pair likelihood is parameter-free) or 5 with them (delta stays
// identified through the sibling terms). With reduced_own_bank the reduced
// model's mean log-likelihood is taken over its own final bank instead.
TestResult lrt(const FitResult& full, const FitResult& reduced, Effect effect,
               const Dataset& data, bool reduced_own_bank = false);

}  // namespace dspem

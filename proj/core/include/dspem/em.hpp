#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dspem/dirichlet.hpp"
#include "dspem/genetics.hpp"
#include "dspem/mh.hpp"
#include "dspem/rng.hpp"

namespace dspem {

// The four penetrance model variants used by the likelihood ratio tests.
enum class ModelVariant { Full, Null, NoImprinting, NoMaternal };

const char* variant_name(ModelVariant v);

// Applies the variant's equality constraints (r_im = 1, s1 = s2 = 1, ...).
Theta constrain_theta(const Theta& theta, ModelVariant variant);

struct EmConfig {
    int max_iter = 100;
    int min_iter = 3;
    double rel_tol = 1e-4;
    int mc_samples = 10000;
    int n_burnin = 1000;
    // Iteration after which the frozen sample bank is importance-reweighted
    // instead of resampled (fit_importance only).
    int is_switch_iter = 10;
    // Minimum effective-sample-size fraction before the reference bank is
    // refreshed with a fresh chain; 0 disables refreshing.
    double is_weight_ess_floor = 0.2;

    void validate() const;
};

struct IterationRecord {
    Theta theta;
    DirichletParams alpha;
    double q;
};

struct FitResult {
    Theta theta_hat;
    DirichletParams alpha_hat;
    ModelVariant variant;
    SampleBank final_bank;
    std::vector<IterationRecord> trace;
    int n_iter = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

// Raised when an EM run aborts (chain failure or M-step error); carries the
// iterations completed so far.
class EmError : public std::runtime_error {
public:
    EmError(const std::string& what, std::vector<IterationRecord> partial_trace)
        : std::runtime_error(what), trace(std::move(partial_trace)) {}
    std::vector<IterationRecord> trace;
};

// Starting point: alpha from the observed parental counts via
// alpha_mf = (n_mf / n) * 100 + 1, and theta at the neutral point with delta
// seeded from the affected fraction among additional siblings when present.
std::pair<Theta, DirichletParams> init_psi(const Dataset& data, ModelVariant variant);

// Monte Carlo Q: mean over the bank of log P(Y|Z; theta) plus the mean
// Dirichlet log-density at alpha.
double q_mc(const Theta& theta, const DirichletParams& alpha,
            const SampleBank& bank, const Dataset& data);

// Maximizes the theta term of q_mc over the variant's free parameters
// (simplex search in log-parameter space, deterministic). The returned value
// never scores below theta_init on the same bank.
Theta m_step_theta(const SampleBank& bank, const Dataset& data,
                   const Theta& theta_init, ModelVariant variant,
                   std::vector<std::string>* warnings = nullptr);

// Maximizes the alpha term: Dirichlet MLE on the bank's mean log coordinates.
DirichletParams m_step_alpha(const SampleBank& bank);

// Unnormalized importance weights for reusing a bank drawn at
// (theta_ref, alpha_ref) while the EM iterate has moved to
// (theta_k, alpha_k), computed in log space and max-shifted. ess is
// (sum w)^2 / sum w^2.
struct ImportanceWeights {
    std::vector<double> weights;
    double ess = 0.0;
};

ImportanceWeights importance_weights(const SampleBank& bank, const Theta& theta_k,
                                     const DirichletParams& alpha_k,
                                     const Theta& theta_ref,
                                     const DirichletParams& alpha_ref,
                                     const Dataset& data);

// Plain MCEM: alternate a fresh MH chain at the current iterate with the
// separable M-steps until the parameters settle or max_iter is reached.
FitResult fit(const Dataset& data, const EmConfig& config, ModelVariant variant,
              Rng& rng);

// Importance-sampling MCEM: identical to fit through is_switch_iter, then the
// frozen bank is reweighted each iteration; the reference refreshes when the
// effective sample size falls below the configured floor.
FitResult fit_importance(const Dataset& data, const EmConfig& config,
                         ModelVariant variant, Rng& rng);

}  // namespace dspem

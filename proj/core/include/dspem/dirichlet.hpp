#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "dspem/genetics.hpp"
#include "dspem/rng.hpp"

namespace dspem {

// Concentration parameters of the Dirichlet prior on the nine mating type
// probabilities, indexed like SimplexPoint.
class DirichletParams {
public:
    explicit DirichletParams(const std::array<double, 9>& alpha);

    static DirichletParams uniform() {
        std::array<double, 9> a;
        a.fill(1.0);
        return DirichletParams(a);
    }

    double operator[](int i) const { return alpha_[i]; }
    double at(int m, int f) const { return alpha_[SimplexPoint::index(m, f)]; }
    const std::array<double, 9>& values() const { return alpha_; }
    double sum() const;

private:
    std::array<double, 9> alpha_;
};

// log pi_alpha(z) = -log B(alpha) + sum (alpha_mf - 1) log z_mf.
double dirichlet_log_density(const DirichletParams& alpha, const SimplexPoint& z);

SimplexPoint sample_dirichlet(const DirichletParams& alpha, Rng& rng);

using IndexPair = std::pair<int, int>;

// Conditional density of the two selected coordinates given the remaining
// seven: a Dirichlet on the pair scaled by the residual mass s = z_i + z_j,
// expressed with respect to the one-dimensional measure dz_i on the segment.
double conditional_pair_log_density(const DirichletParams& alpha, IndexPair pair,
                                    const SimplexPoint& z);

// Redraws the selected pair from its conditional distribution, leaving every
// other coordinate untouched. The pair's total mass is preserved exactly.
SimplexPoint sample_pair_given_rest(const DirichletParams& alpha, IndexPair pair,
                                    const SimplexPoint& z, Rng& rng);

// In-place version used by the sampler's inner loop.
void resample_pair(const DirichletParams& alpha, IndexPair pair,
                   std::array<double, 9>& z, Rng& rng);

// Monte Carlo draws of Z with cached values of log P(Y|Z). The generator
// cache holds the log-likelihood at the parameters the chain ran at; further
// caches can be attached per fitted model variant.
struct SampleBank {
    std::vector<SimplexPoint> samples;
    std::vector<double> loglik;  // at the generating theta

    std::size_t size() const { return samples.size(); }

    // Mean of log z_mf over the bank, optionally weighted (weights need not
    // be normalized).
    std::array<double, 9> mean_log_z() const;
    std::array<double, 9> mean_log_z(const std::vector<double>& weights) const;
};

// Raised when the Dirichlet MLE diverges or fails to converge; carries the
// last iterate.
class DirichletMleError : public std::runtime_error {
public:
    DirichletMleError(const std::string& what, const std::array<double, 9>& last)
        : std::runtime_error(what), last_iterate(last) {}
    std::array<double, 9> last_iterate;
};

// Maximum likelihood concentration parameters from mean log coordinates:
// solves digamma(alpha_mf) - digamma(sum alpha) = mean_log_z_mf by the
// fixed-point iteration with a Newton polish; the returned gradient norm is
// below 1e-8. Throws if the system has no finite solution (degenerate input).
DirichletParams dirichlet_mle_from_log_means(const std::array<double, 9>& mean_log_z);

}  // namespace dspem

#include "dspem/dirichlet.hpp"

#include <cmath>
#include <limits>

#include "dspem/special.hpp"

namespace dspem {

DirichletParams::DirichletParams(const std::array<double, 9>& alpha) : alpha_(alpha) {
    for (const double a : alpha_) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw std::invalid_argument("DirichletParams: entries must be positive and finite");
        }
    }
}

double DirichletParams::sum() const {
    double s = 0.0;
    for (const double a : alpha_) s += a;
    return s;
}

double dirichlet_log_density(const DirichletParams& alpha, const SimplexPoint& z) {
    double value = -log_multivariate_beta(alpha.values().data(), 9);
    for (int i = 0; i < 9; ++i) value += (alpha[i] - 1.0) * std::log(z[i]);
    return value;
}

SimplexPoint sample_dirichlet(const DirichletParams& alpha, Rng& rng) {
    std::array<double, 9> z;
    for (;;) {
        double sum = 0.0;
        for (int i = 0; i < 9; ++i) {
            z[i] = rng.gamma(alpha[i]);
            sum += z[i];
        }
        if (!(sum > 0.0)) continue;
        bool interior = true;
        for (double& v : z) {
            v /= sum;
            if (v <= 1e-15 || v >= 1.0) interior = false;
        }
        if (interior) return SimplexPoint(z);
    }
}

namespace {

void check_pair(IndexPair pair) {
    if (pair.first < 0 || pair.first >= 9 || pair.second < 0 || pair.second >= 9 ||
        pair.first == pair.second) {
        throw std::invalid_argument("pair indices must be distinct and in [0, 9)");
    }
}

}  // namespace

double conditional_pair_log_density(const DirichletParams& alpha, IndexPair pair,
                                    const SimplexPoint& z) {
    check_pair(pair);
    double rest = 0.0;
    for (int i = 0; i < 9; ++i)
        if (i != pair.first && i != pair.second) rest += z[i];
    const double s = 1.0 - rest;
    if (!(s > 0.0)) throw std::domain_error("conditional_pair_log_density: residual mass <= 0");
    const double ai = alpha[pair.first];
    const double aj = alpha[pair.second];
    const double zi = z[pair.first];
    const double zj = z[pair.second];
    return log_gamma(ai + aj) - log_gamma(ai) - log_gamma(aj) +
           (ai - 1.0) * std::log(zi / s) + (aj - 1.0) * std::log(zj / s) -
           std::log(s);
}

void resample_pair(const DirichletParams& alpha, IndexPair pair,
                   std::array<double, 9>& z, Rng& rng) {
    const double s = z[pair.first] + z[pair.second];
    const double u = rng.beta(alpha[pair.first], alpha[pair.second]);
    z[pair.first] = s * u;
    z[pair.second] = s - z[pair.first];
}

SimplexPoint sample_pair_given_rest(const DirichletParams& alpha, IndexPair pair,
                                    const SimplexPoint& z, Rng& rng) {
    check_pair(pair);
    std::array<double, 9> values = z.values();
    if (!(values[pair.first] + values[pair.second] > 0.0)) {
        throw std::domain_error("sample_pair_given_rest: residual mass <= 0");
    }
    resample_pair(alpha, pair, values, rng);
    return SimplexPoint(values);
}

std::array<double, 9> SampleBank::mean_log_z() const {
    std::array<double, 9> mean{};
    for (const SimplexPoint& z : samples)
        for (int i = 0; i < 9; ++i) mean[i] += std::log(z[i]);
    for (double& v : mean) v /= static_cast<double>(samples.size());
    return mean;
}

std::array<double, 9> SampleBank::mean_log_z(const std::vector<double>& weights) const {
    std::array<double, 9> mean{};
    double total = 0.0;
    for (std::size_t t = 0; t < samples.size(); ++t) {
        total += weights[t];
        for (int i = 0; i < 9; ++i) mean[i] += weights[t] * std::log(samples[t][i]);
    }
    for (double& v : mean) v /= total;
    return mean;
}

DirichletParams dirichlet_mle_from_log_means(const std::array<double, 9>& mean_log_z) {
    double exp_sum = 0.0;
    for (const double L : mean_log_z) {
        if (!(L < 0.0)) {
            throw std::invalid_argument("dirichlet_mle_from_log_means: mean logs must be negative");
        }
        exp_sum += std::exp(L);
    }
    // The stationarity system has a finite solution only when the geometric
    // means lie strictly inside the simplex (Jensen gap); a bank of identical
    // points drives alpha to infinity.
    std::array<double, 9> alpha;
    if (exp_sum >= 1.0 - 1e-12) {
        alpha.fill(std::numeric_limits<double>::infinity());
        throw DirichletMleError("dirichlet_mle_from_log_means: degenerate input, alpha diverges",
                                alpha);
    }

    for (int i = 0; i < 9; ++i) alpha[i] = 9.0 * std::exp(mean_log_z[i]) / exp_sum;

    const auto grad = [&](const std::array<double, 9>& a, double s) {
        std::array<double, 9> g;
        const double ds = digamma(s);
        for (int i = 0; i < 9; ++i) g[i] = ds - digamma(a[i]) + mean_log_z[i];
        return g;
    };
    const auto max_abs = [](const std::array<double, 9>& g) {
        double m = 0.0;
        for (const double v : g) m = std::max(m, std::fabs(v));
        return m;
    };

    double s = 0.0;
    for (const double a : alpha) s += a;
    bool converged = false;
    for (int iter = 0; iter < 1000 && !converged; ++iter) {
        // Fixed point: alpha_i <- digamma_inv(digamma(sum alpha) + L_i).
        const double ds = digamma(s);
        s = 0.0;
        for (int i = 0; i < 9; ++i) {
            alpha[i] = digamma_inv(ds + mean_log_z[i]);
            s += alpha[i];
        }
        if (s > 1e9) {
            throw DirichletMleError("dirichlet_mle_from_log_means: alpha diverging", alpha);
        }
        if (max_abs(grad(alpha, s)) < 1e-10) converged = true;

        // Newton polish once the fixed point is close (Sherman-Morrison on
        // the Hessian -diag(trigamma(alpha)) + trigamma(s) * ones).
        if (converged || iter > 20) {
            for (int polish = 0; polish < 50; ++polish) {
                const auto g = grad(alpha, s);
                if (max_abs(g) < 1e-12) break;
                const double c = trigamma(s);
                double qg = 0.0, q1 = 0.0;
                std::array<double, 9> qinv_g;
                std::array<double, 9> qinv{};
                for (int i = 0; i < 9; ++i) {
                    const double q = trigamma(alpha[i]);
                    qinv[i] = 1.0 / q;
                    qinv_g[i] = g[i] / q;
                    qg += qinv_g[i];
                    q1 += qinv[i];
                }
                const double b = c * qg / (1.0 - c * q1);
                double step_scale = 1.0;
                std::array<double, 9> next;
                for (int tries = 0; tries < 30; ++tries) {
                    bool ok = true;
                    for (int i = 0; i < 9; ++i) {
                        next[i] = alpha[i] + step_scale * (qinv_g[i] + b * qinv[i]);
                        if (!(next[i] > 0.0)) { ok = false; break; }
                    }
                    if (ok) break;
                    step_scale *= 0.5;
                }
                alpha = next;
                s = 0.0;
                for (const double a : alpha) s += a;
            }
            converged = max_abs(grad(alpha, s)) < 1e-8;
            if (converged) break;
        }
    }
    if (!converged) {
        throw DirichletMleError("dirichlet_mle_from_log_means: no convergence after 1000 iterations",
                                alpha);
    }
    return DirichletParams(alpha);
}

}  // namespace dspem

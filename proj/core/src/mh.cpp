#include "dspem/mh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dspem/special.hpp"

namespace dspem {

void ChainConfig::validate() const {
    if (n_samples <= 0) throw std::invalid_argument("ChainConfig: n_samples must be positive");
    if (n_burnin < 0) throw std::invalid_argument("ChainConfig: n_burnin must be non-negative");
    if (thin <= 0) throw std::invalid_argument("ChainConfig: thin must be positive");
    if (n_diag_chains <= 0) throw std::invalid_argument("ChainConfig: n_diag_chains must be positive");
    std::array<bool, 9> covered{};
    for (const IndexPair& p : pair_schedule) {
        if (p.first < 0 || p.first >= 9 || p.second < 0 || p.second >= 9 ||
            p.first == p.second) {
            throw std::invalid_argument("ChainConfig: malformed pair in schedule");
        }
        covered[p.first] = covered[p.second] = true;
    }
    if (!std::all_of(covered.begin(), covered.end(), [](bool c) { return c; })) {
        throw std::invalid_argument("ChainConfig: pair schedule must cover all nine coordinates");
    }
}

double mh_ratio(const Theta& theta, const Dataset& data,
                const SimplexPoint& z_current, const SimplexPoint& z_proposed) {
    const DatasetSummary summary(data);
    const LogLikelihood loglik(theta, summary);
    return std::exp(loglik(z_proposed) - loglik(z_current));
}

std::pair<SimplexPoint, bool> mh_step_pair(const Theta& theta,
                                           const DirichletParams& alpha,
                                           const Dataset& data,
                                           const SimplexPoint& z, IndexPair pair,
                                           Rng& rng) {
    const DatasetSummary summary(data);
    const LogLikelihood loglik(theta, summary);
    const SimplexPoint proposed = sample_pair_given_rest(alpha, pair, z, rng);
    const double log_ratio = loglik(proposed) - loglik(z);
    const bool accepted = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
    return {accepted ? proposed : z, accepted};
}

ChainResult run_chain(const Theta& theta, const DirichletParams& alpha,
                      const Dataset& data, const ChainConfig& config, Rng& rng,
                      const std::optional<SimplexPoint>& start) {
    config.validate();
    const DatasetSummary summary(data);
    const LogLikelihood loglik(theta, summary);

    std::array<double, 9> state =
        (start ? *start : sample_dirichlet(alpha, rng)).values();
    double current_ll = loglik.eval(state);

    long long proposals = 0;
    long long accepted = 0;
    long long burnin_proposals = 0;
    long long burnin_accepted = 0;

    const auto sweep = [&](bool in_burnin) {
        for (const IndexPair& pair : config.pair_schedule) {
            const double zi = state[pair.first];
            const double zj = state[pair.second];
            resample_pair(alpha, pair, state, rng);
            const double proposed_ll = loglik.eval(state);
            const double log_ratio = proposed_ll - current_ll;
            const bool accept = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
            if (accept) {
                current_ll = proposed_ll;
            } else {
                state[pair.first] = zi;
                state[pair.second] = zj;
            }
            ++proposals;
            accepted += accept;
            if (in_burnin) {
                ++burnin_proposals;
                burnin_accepted += accept;
            }
        }
        // Counteract floating-point drift of the simplex constraint; the
        // cached log-likelihood is refreshed whenever the state is touched.
        double sum = 0.0;
        for (const double v : state) sum += v;
        if (std::fabs(sum - 1.0) > 1e-13) {
            for (double& v : state) v /= sum;
            current_ll = loglik.eval(state);
        }
    };

    for (int b = 0; b < config.n_burnin; ++b) sweep(true);

    ChainResult result;
    result.bank.samples.reserve(config.n_samples);
    result.bank.loglik.reserve(config.n_samples);
    for (int t = 0; t < config.n_samples; ++t) {
        for (int k = 0; k < config.thin; ++k) sweep(false);
        result.bank.samples.emplace_back(state);
        result.bank.loglik.push_back(loglik.eval(state));
    }

    result.acceptance_rate =
        proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    if (burnin_proposals > 0 &&
        static_cast<double>(burnin_accepted) / static_cast<double>(burnin_proposals) < 0.01) {
        result.warnings.push_back(
            "acceptance rate below 0.01 over burn-in (flat likelihood or degenerate data)");
    }
    return result;
}

std::array<double, 9> psrf(const std::vector<SampleBank>& chains) {
    if (chains.size() < 2) throw std::invalid_argument("psrf: need at least two chains");
    const std::size_t n = chains.front().size();
    if (n < 100) throw std::invalid_argument("psrf: chains must have length >= 100");
    for (const SampleBank& c : chains) {
        if (c.size() != n) throw std::invalid_argument("psrf: chains must have equal length");
    }
    const std::size_t m = chains.size();
    const std::size_t total = m * n;

    std::array<double, 9> result{};
    std::vector<double> pooled(total);
    std::vector<std::size_t> order(total);
    std::vector<double> znorm(total);
    for (int coord = 0; coord < 9; ++coord) {
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t t = 0; t < n; ++t)
                pooled[c * n + t] = chains[c].samples[t][coord];

        // Rank-normalize: average ranks for ties, then map through the normal
        // quantile function with the Blom offset.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
        std::size_t i = 0;
        while (i < total) {
            std::size_t j = i;
            while (j + 1 < total && pooled[order[j + 1]] == pooled[order[i]]) ++j;
            const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) {
                znorm[order[k]] = normal_quantile(
                    (avg_rank - 0.375) / (static_cast<double>(total) + 0.25));
            }
            i = j + 1;
        }

        double within = 0.0;
        double grand_mean = 0.0;
        std::vector<double> chain_means(m);
        for (std::size_t c = 0; c < m; ++c) {
            double mean = 0.0;
            for (std::size_t t = 0; t < n; ++t) mean += znorm[c * n + t];
            mean /= static_cast<double>(n);
            chain_means[c] = mean;
            grand_mean += mean;
            double var = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double d = znorm[c * n + t] - mean;
                var += d * d;
            }
            within += var / static_cast<double>(n - 1);
        }
        within /= static_cast<double>(m);
        grand_mean /= static_cast<double>(m);
        double between_over_n = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            const double d = chain_means[c] - grand_mean;
            between_over_n += d * d;
        }
        between_over_n /= static_cast<double>(m - 1);

        if (within == 0.0) {
            result[coord] = between_over_n == 0.0
                                ? 1.0
                                : std::numeric_limits<double>::infinity();
        } else {
            const double nn = static_cast<double>(n);
            result[coord] = std::sqrt((nn - 1.0) / nn + between_over_n / within);
        }
    }
    return result;
}

ChainResult run_chain_with_diagnostics(const Theta& theta,
                                       const DirichletParams& alpha,
                                       const Dataset& data,
                                       const ChainConfig& config, Rng& rng) {
    config.validate();
    std::vector<ChainResult> results;
    results.reserve(config.n_diag_chains);
    for (int c = 0; c < config.n_diag_chains; ++c) {
        // Overdispersed starts: deflate the concentration so early states
        // spread well beyond the prior's bulk.
        const double scale = 1.0 / static_cast<double>(1 << std::min(c, 6));
        std::array<double, 9> a = alpha.values();
        for (double& v : a) v = std::max(v * scale, 0.05);
        Rng chain_rng(derive_seed(rng.raw(), static_cast<std::uint64_t>(c)));
        const SimplexPoint start = sample_dirichlet(DirichletParams(a), chain_rng);
        results.push_back(run_chain(theta, alpha, data, config, chain_rng, start));
    }
    std::vector<SampleBank> banks;
    banks.reserve(results.size());
    for (ChainResult& r : results) banks.push_back(std::move(r.bank));
    ChainResult out;
    out.psrf = psrf(banks);
    out.acceptance_rate = results.front().acceptance_rate;
    out.warnings = results.front().warnings;
    out.bank = std::move(banks.front());
    return out;
}

}  // namespace dspem

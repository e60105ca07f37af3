#include "dspem/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dspem/nelder_mead.hpp"
#include "dspem/special.hpp"

namespace dspem {

const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::Full: return "full";
        case ModelVariant::Null: return "null";
        case ModelVariant::NoImprinting: return "no-imprinting";
        case ModelVariant::NoMaternal: return "no-maternal";
    }
    return "?";
}

Theta constrain_theta(const Theta& t, ModelVariant variant) {
    switch (variant) {
        case ModelVariant::Full:
            return t;
        case ModelVariant::Null:
            return Theta(t.delta(), 1.0, 1.0, 1.0, 1.0, 1.0);
        case ModelVariant::NoImprinting:
            return Theta(t.delta(), t.r1(), t.r2(), 1.0, t.s1(), t.s2());
        case ModelVariant::NoMaternal:
            return Theta(t.delta(), t.r1(), t.r2(), t.r_im(), 1.0, 1.0);
    }
    throw std::logic_error("constrain_theta: unknown variant");
}

void EmConfig::validate() const {
    if (max_iter <= 0 || min_iter <= 0 || min_iter > max_iter) {
        throw std::invalid_argument("EmConfig: need 0 < min_iter <= max_iter");
    }
    if (!(rel_tol > 0.0)) throw std::invalid_argument("EmConfig: rel_tol must be positive");
    if (mc_samples <= 0) throw std::invalid_argument("EmConfig: mc_samples must be positive");
    if (n_burnin < 0) throw std::invalid_argument("EmConfig: n_burnin must be non-negative");
    if (is_switch_iter < 1) throw std::invalid_argument("EmConfig: is_switch_iter must be >= 1");
    if (is_weight_ess_floor < 0.0 || is_weight_ess_floor > 1.0) {
        throw std::invalid_argument("EmConfig: is_weight_ess_floor must lie in [0,1]");
    }
}

namespace {

// Which relative risks are free under each variant; delta is always free.
struct VariantLayout {
    std::array<bool, 5> free_rr{};  // r1, r2, r_im, s1, s2

    static VariantLayout of(ModelVariant v) {
        VariantLayout l;
        switch (v) {
            case ModelVariant::Full: l.free_rr = {true, true, true, true, true}; break;
            case ModelVariant::Null: l.free_rr = {false, false, false, false, false}; break;
            case ModelVariant::NoImprinting: l.free_rr = {true, true, false, true, true}; break;
            case ModelVariant::NoMaternal: l.free_rr = {true, true, true, false, false}; break;
        }
        return l;
    }

    std::size_t dim() const {
        std::size_t d = 1;
        for (const bool f : free_rr) d += f;
        return d;
    }

    std::vector<double> pack(const Theta& t) const {
        std::vector<double> x;
        x.reserve(dim());
        x.push_back(std::log(t.delta()));
        const std::array<double, 5> rr = {t.r1(), t.r2(), t.r_im(), t.s1(), t.s2()};
        for (int i = 0; i < 5; ++i)
            if (free_rr[i]) x.push_back(std::log(rr[i]));
        return x;
    }

    Theta unpack(const std::vector<double>& x) const {
        std::array<double, 5> rr = {1.0, 1.0, 1.0, 1.0, 1.0};
        std::size_t j = 1;
        for (int i = 0; i < 5; ++i)
            if (free_rr[i]) rr[i] = std::exp(x[j++]);
        return Theta(std::exp(x[0]), rr[0], rr[1], rr[2], rr[3], rr[4]);
    }
};

void add_warning(std::vector<std::string>* warnings, const std::string& msg) {
    if (!warnings) return;
    if (std::find(warnings->begin(), warnings->end(), msg) == warnings->end()) {
        warnings->push_back(msg);
    }
}

// Weighted theta objective over a fixed bank; weights are normalized once.
class ThetaObjective {
public:
    ThetaObjective(const SampleBank& bank, const DatasetSummary& summary,
                   const std::vector<double>* weights)
        : summary_(summary), m_(bank.size()),
          n_(static_cast<double>(summary.n_families())) {
        zflat_.resize(m_ * 9);
        for (std::size_t t = 0; t < m_; ++t)
            for (int j = 0; j < 9; ++j) zflat_[t * 9 + j] = bank.samples[t][j];
        wt_.resize(m_);
        if (weights) {
            double total = 0.0;
            for (const double w : *weights) total += w;
            for (std::size_t t = 0; t < m_; ++t) wt_[t] = (*weights)[t] / total;
        } else {
            std::fill(wt_.begin(), wt_.end(), 1.0 / static_cast<double>(m_));
        }
    }

    // Theta part of Q up to the mu-only constant (irrelevant for argmax).
    double eval(const Theta& theta) const {
        const LogLikelihood ll(theta, summary_);
        const auto& w = ll.denominator_weights();
        double acc = 0.0;
        const double* z = zflat_.data();
        for (std::size_t t = 0; t < m_; ++t, z += 9) {
            const double dot = z[0] * w[0] + z[1] * w[1] + z[2] * w[2] +
                               z[3] * w[3] + z[4] * w[4] + z[5] * w[5] +
                               z[6] * w[6] + z[7] * w[7] + z[8] * w[8];
            acc += wt_[t] * std::log(dot);
        }
        return ll.theta_constant() - n_ * acc;
    }

private:
    const DatasetSummary& summary_;
    std::size_t m_;
    double n_;
    std::vector<double> zflat_;
    std::vector<double> wt_;
};

Theta m_step_theta_impl(const SampleBank& bank, const DatasetSummary& summary,
                        const std::vector<double>* weights, const Theta& theta_init,
                        ModelVariant variant, std::vector<std::string>* warnings) {
    if (bank.size() == 0) throw std::invalid_argument("m_step_theta: empty bank");
    const Theta theta0 = constrain_theta(theta_init, variant);
    if (variant == ModelVariant::Null && summary.ds_only()) {
        // The discordant-pair term is free of delta once all relative risks
        // are 1 (delta(1-delta) cancels), and there are no sibling terms.
        add_warning(warnings,
                    "theta objective is flat for the null model on data without "
                    "additional siblings; initial delta kept");
        return theta0;
    }

    const VariantLayout layout = VariantLayout::of(variant);
    const ThetaObjective objective(bank, summary, weights);
    const auto f = [&](const std::vector<double>& x) {
        try {
            return -objective.eval(layout.unpack(x));
        } catch (const std::exception&) {
            return 1e300;  // invalid theta (penetrance > 1 or overflow)
        }
    };
    NelderMeadOptions options;
    options.initial_step = 0.25;
    options.x_tol = 1e-6;
    options.max_iter = 500;
    const NelderMeadResult res = nelder_mead(f, layout.pack(theta0), options);
    if (!res.converged) {
        add_warning(warnings, "theta optimizer reached its iteration cap; best iterate kept");
    }
    return layout.unpack(res.x);
}

DirichletParams m_step_alpha_impl(const SampleBank& bank,
                                  const std::vector<double>* weights) {
    if (bank.size() == 0) throw std::invalid_argument("m_step_alpha: empty bank");
    return dirichlet_mle_from_log_means(weights ? bank.mean_log_z(*weights)
                                                : bank.mean_log_z());
}

double q_impl(const Theta& theta, const DirichletParams& alpha,
              const SampleBank& bank, const DatasetSummary& summary,
              const std::vector<double>* weights) {
    const LogLikelihood ll(theta, summary);
    double total_w = 0.0;
    double theta_term = 0.0;
    for (std::size_t t = 0; t < bank.size(); ++t) {
        const double w = weights ? (*weights)[t] : 1.0;
        total_w += w;
        theta_term += w * ll(bank.samples[t]);
    }
    theta_term /= total_w;
    const auto mean_log = weights ? bank.mean_log_z(*weights) : bank.mean_log_z();
    double alpha_term = -log_multivariate_beta(alpha.values().data(), 9);
    for (int i = 0; i < 9; ++i) alpha_term += (alpha[i] - 1.0) * mean_log[i];
    return theta_term + alpha_term;
}

double rel_change(const Theta& a, const Theta& b, const DirichletParams& pa,
                  const DirichletParams& pb, const VariantLayout& layout) {
    const auto rel = [](double x, double y) {
        return std::fabs(y - x) / std::max(std::fabs(x), 1e-12);
    };
    double r = rel(a.delta(), b.delta());
    const std::array<double, 5> ra = {a.r1(), a.r2(), a.r_im(), a.s1(), a.s2()};
    const std::array<double, 5> rb = {b.r1(), b.r2(), b.r_im(), b.s1(), b.s2()};
    for (int i = 0; i < 5; ++i)
        if (layout.free_rr[i]) r = std::max(r, rel(ra[i], rb[i]));
    for (int i = 0; i < 9; ++i) r = std::max(r, rel(pa[i], pb[i]));
    return r;
}

FitResult run_em(const Dataset& data, const EmConfig& config, ModelVariant variant,
                 Rng& rng, bool importance) {
    config.validate();
    if (data.families.empty()) throw std::invalid_argument("fit: dataset is empty");
    const DatasetSummary summary(data);
    const VariantLayout layout = VariantLayout::of(variant);

    auto [theta, alpha] = init_psi(data, variant);

    ChainConfig chain_config;
    chain_config.n_samples = config.mc_samples;
    chain_config.n_burnin = config.n_burnin;

    std::vector<IterationRecord> trace;
    std::vector<std::string> warnings;
    SampleBank bank;
    Theta theta_ref = theta;
    DirichletParams alpha_ref = alpha;

    bool converged = false;
    int consecutive_small = 0;

    try {
        for (int k = 1; k <= config.max_iter; ++k) {
            std::vector<double> weights;  // empty means uniform
            bool fresh = !importance || k <= config.is_switch_iter;
            if (!fresh) {
                ImportanceWeights iw =
                    importance_weights(bank, theta, alpha, theta_ref, alpha_ref, data);
                if (config.is_weight_ess_floor > 0.0 &&
                    iw.ess < config.is_weight_ess_floor * static_cast<double>(bank.size())) {
                    fresh = true;
                    std::ostringstream os;
                    os << "importance weights collapsed (ESS " << iw.ess << " of "
                       << bank.size() << "); reference bank refreshed";
                    add_warning(&warnings, os.str());
                } else {
                    weights = std::move(iw.weights);
                }
            }
            if (fresh) {
                ChainResult cr = run_chain(theta, alpha, data, chain_config, rng);
                for (const std::string& w : cr.warnings) add_warning(&warnings, w);
                bank = std::move(cr.bank);
                theta_ref = theta;
                alpha_ref = alpha;
            }

            const std::vector<double>* wptr = weights.empty() ? nullptr : &weights;
            const Theta theta_new =
                m_step_theta_impl(bank, summary, wptr, theta, variant, &warnings);
            const DirichletParams alpha_new = m_step_alpha_impl(bank, wptr);

            const double rel = rel_change(theta, theta_new, alpha, alpha_new, layout);
            theta = theta_new;
            alpha = alpha_new;
            trace.push_back({theta, alpha, q_impl(theta, alpha, bank, summary, wptr)});

            consecutive_small = rel < config.rel_tol ? consecutive_small + 1 : 0;
            if (k >= config.min_iter && consecutive_small >= 2) {
                converged = true;
                break;
            }
        }
    } catch (const EmError&) {
        throw;
    } catch (const std::exception& e) {
        throw EmError(std::string("EM aborted: ") + e.what(), std::move(trace));
    }

    const int n_iter = static_cast<int>(trace.size());
    return FitResult{theta, alpha, variant, std::move(bank), std::move(trace),
                     n_iter, converged, std::move(warnings)};
}

}  // namespace

std::pair<Theta, DirichletParams> init_psi(const Dataset& data, ModelVariant variant) {
    if (data.families.empty()) throw std::invalid_argument("init_psi: dataset is empty");
    const double n = static_cast<double>(data.families.size());
    std::array<double, 9> alpha;
    for (int i = 0; i < 9; ++i) alpha[i] = data.n_mf[i] / n * 100.0 + 1.0;

    double sib_total = 0.0;
    double sib_affected = 0.0;
    for (const FamilyRecord& fam : data.families) {
        for (const SiblingRecord& sib : fam.siblings) {
            sib_total += 1.0;
            sib_affected += sib.affected ? 1.0 : 0.0;
        }
    }
    double delta0 = 0.05;
    if (sib_total > 0.0) {
        delta0 = std::clamp(sib_affected / sib_total, 0.01, 0.99);
    }
    const Theta theta0 = constrain_theta(Theta(delta0, 1.0, 1.0, 1.0, 1.0, 1.0), variant);
    return {theta0, DirichletParams(alpha)};
}

double q_mc(const Theta& theta, const DirichletParams& alpha, const SampleBank& bank,
            const Dataset& data) {
    if (bank.size() == 0) throw std::invalid_argument("q_mc: empty bank");
    const DatasetSummary summary(data);
    return q_impl(theta, alpha, bank, summary, nullptr);
}

Theta m_step_theta(const SampleBank& bank, const Dataset& data, const Theta& theta_init,
                   ModelVariant variant, std::vector<std::string>* warnings) {
    const DatasetSummary summary(data);
    return m_step_theta_impl(bank, summary, nullptr, theta_init, variant, warnings);
}

DirichletParams m_step_alpha(const SampleBank& bank) {
    return m_step_alpha_impl(bank, nullptr);
}

ImportanceWeights importance_weights(const SampleBank& bank, const Theta& theta_k,
                                     const DirichletParams& alpha_k,
                                     const Theta& theta_ref,
                                     const DirichletParams& alpha_ref,
                                     const Dataset& data) {
    if (bank.size() == 0) throw std::invalid_argument("importance_weights: empty bank");
    const DatasetSummary summary(data);
    const LogLikelihood ll_k(theta_k, summary);
    const LogLikelihood ll_ref(theta_ref, summary);
    const double log_beta_shift = log_multivariate_beta(alpha_ref.values().data(), 9) -
                                  log_multivariate_beta(alpha_k.values().data(), 9);

    const std::size_t m = bank.size();
    std::vector<double> logw(m);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
        const SimplexPoint& z = bank.samples[t];
        double lw = ll_k(z) - ll_ref(z) + log_beta_shift;
        for (int i = 0; i < 9; ++i) lw += (alpha_k[i] - alpha_ref[i]) * std::log(z[i]);
        logw[t] = lw;
        max_logw = std::max(max_logw, lw);
    }
    ImportanceWeights out;
    out.weights.resize(m);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double w = std::exp(logw[t] - max_logw);
        out.weights[t] = w;
        sum += w;
        sum_sq += w * w;
    }
    out.ess = sum * sum / sum_sq;
    return out;
}

FitResult fit(const Dataset& data, const EmConfig& config, ModelVariant variant,
              Rng& rng) {
    return run_em(data, config, variant, rng, false);
}

FitResult fit_importance(const Dataset& data, const EmConfig& config,
                         ModelVariant variant, Rng& rng) {
    return run_em(data, config, variant, rng, true);
}

}  // namespace dspem

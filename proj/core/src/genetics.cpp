#include "dspem/genetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dspem {

namespace {

void check_genotype(int g, const char* name) {
    if (!is_valid_genotype(g)) {
        std::ostringstream os;
        os << name << " genotype out of range: " << g;
        throw std::invalid_argument(os.str());
    }
}

// Probability that a parent with the given genotype transmits the variant.
double transmit_variant(Genotype g) { return 0.5 * g; }

bool mendel_compatible(Genotype m, Genotype f, Genotype c) {
    const double pm = transmit_variant(m);
    const double pf = transmit_variant(f);
    switch (c) {
        case 0: return (1.0 - pm) * (1.0 - pf) > 0.0;
        case 1: return pm * (1.0 - pf) + (1.0 - pm) * pf > 0.0;
        case 2: return pm * pf > 0.0;
        default: return false;
    }
}

std::array<JointConfig, 29> build_joint_configs() {
    std::array<JointConfig, 29> configs;
    int k = 0;
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f)
            for (int c1 = 0; c1 <= 2; ++c1)
                for (int c2 = 0; c2 <= 2; ++c2)
                    if (mendel_compatible(m, f, c1) && mendel_compatible(m, f, c2))
                        configs[k++] = {m, f, c1, c2};
    return configs;
}

const std::array<JointConfig, 29> kJointConfigs = build_joint_configs();

// config index for (m,f,c1,c2), or -1.
std::array<int, 81> build_config_lookup() {
    std::array<int, 81> lut;
    lut.fill(-1);
    for (std::size_t i = 0; i < kJointConfigs.size(); ++i) {
        const auto& c = kJointConfigs[i];
        lut[((c.m * 3 + c.f) * 3 + c.c1) * 3 + c.c2] = static_cast<int>(i);
    }
    return lut;
}

const std::array<int, 81> kConfigLookup = build_config_lookup();

int config_index(int m, int f, int c1, int c2) {
    return kConfigLookup[((m * 3 + f) * 3 + c1) * 3 + c2];
}

}  // namespace

Theta::Theta(double delta, double r1, double r2, double r_im, double s1, double s2)
    : delta_(delta), r1_(r1), r2_(r2), r_im_(r_im), s1_(s1), s2_(s2) {
    const bool positive = delta > 0.0 && r1 > 0.0 && r2 > 0.0 && r_im > 0.0 &&
                          s1 > 0.0 && s2 > 0.0;
    if (!positive || !(delta < 1.0) || !std::isfinite(r1) || !std::isfinite(r2) ||
        !std::isfinite(r_im) || !std::isfinite(s1) || !std::isfinite(s2)) {
        throw std::invalid_argument(
            "Theta: delta must lie in (0,1) and all relative risks must be "
            "positive and finite");
    }
    if (max_penetrance() > 1.0) {
        std::ostringstream os;
        os << "Theta: worst-case penetrance " << max_penetrance()
           << " exceeds 1 (delta=" << delta << ", r1=" << r1 << ", r2=" << r2
           << ", r_im=" << r_im << ", s1=" << s1 << ", s2=" << s2 << ")";
        throw std::invalid_argument(os.str());
    }
}

double Theta::max_penetrance() const {
    // Reachable child factors: 1 (c=0), r1 (paternal het), r1*r_im (maternal
    // het), r2 (c=2); mother factors: 1, s1, s2.
    const double child = std::max({1.0, r1_, r1_ * r_im_, r2_});
    const double mother = std::max({1.0, s1_, s2_});
    return delta_ * child * mother;
}

SimplexPoint::SimplexPoint(const std::array<double, 9>& mu) : mu_(mu) {
    double sum = 0.0;
    for (const double v : mu_) {
        if (!(v > 0.0) || !(v < 1.0)) {
            throw std::domain_error("SimplexPoint: entries must lie strictly in (0,1)");
        }
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::domain_error("SimplexPoint: entries must sum to 1");
    }
}

SimplexPoint SimplexPoint::uniform() {
    std::array<double, 9> mu;
    mu.fill(1.0 / 9.0);
    return SimplexPoint(mu);
}

Dataset Dataset::from_families(std::vector<FamilyRecord> families) {
    Dataset data;
    data.families = std::move(families);
    for (std::size_t i = 0; i < data.families.size(); ++i) {
        const FamilyRecord& fam = data.families[i];
        check_genotype(fam.m, "mother");
        check_genotype(fam.f, "father");
        for (const Genotype c : {fam.c1, fam.c2}) {
            check_genotype(c, "child");
            if (!mendel_compatible(fam.m, fam.f, c)) {
                std::ostringstream os;
                os << "family #" << i << ": child genotype " << c
                   << " is Mendel-incompatible with parents (" << fam.m << ", "
                   << fam.f << ")";
                throw FamilyError(i, os.str());
            }
        }
        for (const SiblingRecord& sib : fam.siblings) {
            check_genotype(sib.genotype, "sibling");
            if (!mendel_compatible(fam.m, fam.f, sib.genotype)) {
                std::ostringstream os;
                os << "family #" << i << ": sibling genotype " << sib.genotype
                   << " is Mendel-incompatible with parents (" << fam.m << ", "
                   << fam.f << ")";
                throw FamilyError(i, os.str());
            }
        }
        data.n_mf[SimplexPoint::index(fam.m, fam.f)] += 1.0;
    }
    return data;
}

bool Dataset::ds_only() const {
    return std::all_of(families.begin(), families.end(),
                       [](const FamilyRecord& f) { return f.siblings.empty(); });
}

double transmission_prob(Genotype m, Genotype f, ChildGenotype c) {
    check_genotype(m, "mother");
    check_genotype(f, "father");
    if (!c.valid()) throw std::invalid_argument("transmission_prob: malformed child state");
    const double pm = transmit_variant(m);
    const double pf = transmit_variant(f);
    switch (c.count) {
        case 0: return (1.0 - pm) * (1.0 - pf);
        case 2: return pm * pf;
        default: break;
    }
    switch (c.origin) {
        case Origin::Maternal: return pm * (1.0 - pf);
        case Origin::Paternal: return (1.0 - pm) * pf;
        default: return pm * (1.0 - pf) + (1.0 - pm) * pf;
    }
}

double penetrance(const Theta& theta, Genotype m, ChildGenotype c) {
    check_genotype(m, "mother");
    if (!c.valid()) throw std::invalid_argument("penetrance: malformed child state");
    if (c.count == 1 && c.origin == Origin::Ambiguous) {
        throw std::invalid_argument(
            "penetrance: ambiguous parental origin must be averaged at the "
            "joint-probability level");
    }
    double p = theta.delta();
    if (c.count == 1) p *= theta.r1();
    if (c.count == 2) p *= theta.r2();
    if (c.count == 1 && c.origin == Origin::Maternal) p *= theta.r_im();
    if (m == 1) p *= theta.s1();
    if (m == 2) p *= theta.s2();
    if (p > 1.0) throw std::domain_error("penetrance: value exceeds 1");
    return p;
}

ChildTable make_child_table(const Theta& theta, Genotype m, Genotype f) {
    check_genotype(m, "mother");
    check_genotype(f, "father");
    const double pm = transmit_variant(m);
    const double pf = transmit_variant(f);
    const double mother_rr = (m == 1) ? theta.s1() : (m == 2) ? theta.s2() : 1.0;
    ChildTable tab;
    // Enumerate which parent contributed the variant allele: a from the
    // mother, b from the father.
    for (int a = 0; a <= 1; ++a) {
        for (int b = 0; b <= 1; ++b) {
            const double prob = (a ? pm : 1.0 - pm) * (b ? pf : 1.0 - pf);
            if (prob == 0.0) continue;
            const int count = a + b;
            double pen = theta.delta() * mother_rr;
            if (count == 1) pen *= theta.r1() * (a ? theta.r_im() : 1.0);
            if (count == 2) pen *= theta.r2();
            tab.t[count] += prob;
            tab.a[count] += prob * pen;
        }
    }
    return tab;
}

std::span<const JointConfig> joint_configs() { return kJointConfigs; }

double joint_ds_prob(const Theta& theta, const SimplexPoint& mu,
                     Genotype m, Genotype f, Genotype c1, Genotype c2) {
    check_genotype(m, "mother");
    check_genotype(f, "father");
    check_genotype(c1, "c1");
    check_genotype(c2, "c2");
    if (!mendel_compatible(m, f, c1) || !mendel_compatible(m, f, c2)) return 0.0;
    const ChildTable tab = make_child_table(theta, m, f);
    return mu.at(m, f) * tab.a[c1] * (tab.t[c2] - tab.a[c2]);
}

double ds_denominator(const Theta& theta, const SimplexPoint& mu) {
    double total = 0.0;
    for (int m = 0; m <= 2; ++m) {
        for (int f = 0; f <= 2; ++f) {
            const ChildTable tab = make_child_table(theta, m, f);
            const double affected = tab.a[0] + tab.a[1] + tab.a[2];
            total += mu.at(m, f) * affected * (1.0 - affected);
        }
    }
    return total;
}

double sibling_block_prob(const Theta& theta, Genotype m, Genotype f,
                          std::span<const SiblingRecord> siblings) {
    if (siblings.empty()) return 1.0;
    const ChildTable tab = make_child_table(theta, m, f);
    double prod = 1.0;
    for (const SiblingRecord& sib : siblings) {
        check_genotype(sib.genotype, "sibling");
        const double p = sib.affected ? tab.a[sib.genotype]
                                      : tab.t[sib.genotype] - tab.a[sib.genotype];
        prod *= p;
    }
    return prod;
}

DatasetSummary::DatasetSummary(const Dataset& data) : n_(data.families.size()) {
    config_rep_.fill(0);
    // (m, f, genotype, affected) -> position in sib_groups_
    std::array<int, 54> sib_lookup;
    sib_lookup.fill(-1);
    for (std::size_t i = 0; i < data.families.size(); ++i) {
        const FamilyRecord& fam = data.families[i];
        const int cfg = config_index(fam.m, fam.f, fam.c1, fam.c2);
        if (cfg < 0) {
            std::ostringstream os;
            os << "family #" << i << ": genotypes (" << fam.m << ", " << fam.f
               << ", " << fam.c1 << ", " << fam.c2 << ") are Mendel-incompatible";
            throw FamilyError(i, os.str());
        }
        if (config_counts_[cfg] == 0.0) config_rep_[cfg] = i;
        config_counts_[cfg] += 1.0;
        parent_counts_[SimplexPoint::index(fam.m, fam.f)] += 1.0;
        for (const SiblingRecord& sib : fam.siblings) {
            const int key = ((fam.m * 3 + fam.f) * 3 + sib.genotype) * 2 +
                            (sib.affected ? 1 : 0);
            if (sib_lookup[key] < 0) {
                sib_lookup[key] = static_cast<int>(sib_groups_.size());
                sib_groups_.push_back({fam.m, fam.f, sib.genotype, sib.affected, 0.0, i});
            }
            sib_groups_[sib_lookup[key]].count += 1.0;
        }
    }
}

LogLikelihood::LogLikelihood(const Theta& theta, const DatasetSummary& summary)
    : summary_(&summary), n_(static_cast<double>(summary.n_families())) {
    std::array<ChildTable, 9> tables;
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f)
            tables[SimplexPoint::index(m, f)] = make_child_table(theta, m, f);

    for (int mf = 0; mf < 9; ++mf) {
        const ChildTable& tab = tables[mf];
        const double affected = tab.a[0] + tab.a[1] + tab.a[2];
        weights_[mf] = affected * (1.0 - affected);
    }

    double constant = 0.0;
    const auto& counts = summary.config_counts();
    const auto configs = joint_configs();
    for (std::size_t k = 0; k < configs.size(); ++k) {
        if (counts[k] == 0.0) continue;
        const JointConfig& cfg = configs[k];
        const ChildTable& tab = tables[SimplexPoint::index(cfg.m, cfg.f)];
        const double kval = tab.a[cfg.c1] * (tab.t[cfg.c2] - tab.a[cfg.c2]);
        if (!(kval > 0.0)) {
            std::ostringstream os;
            os << "family #" << summary.representative(static_cast<int>(k))
               << ": zero probability under the supplied parameters";
            throw FamilyError(summary.representative(static_cast<int>(k)), os.str());
        }
        constant += counts[k] * std::log(kval);
    }
    for (const DatasetSummary::SibGroup& grp : summary.sib_groups()) {
        const ChildTable& tab = tables[SimplexPoint::index(grp.m, grp.f)];
        const double p = grp.affected ? tab.a[grp.genotype]
                                      : tab.t[grp.genotype] - tab.a[grp.genotype];
        if (!(p > 0.0)) {
            std::ostringstream os;
            os << "family #" << grp.representative
               << ": sibling term has zero probability under the supplied parameters";
            throw FamilyError(grp.representative, os.str());
        }
        constant += grp.count * std::log(p);
    }
    theta_constant_ = constant;
}

double LogLikelihood::eval(const std::array<double, 9>& z) const {
    if (n_ == 0.0) return 0.0;
    const auto& parents = summary_->parent_counts();
    double value = theta_constant_;
    double denom = 0.0;
    for (int mf = 0; mf < 9; ++mf) {
        denom += z[mf] * weights_[mf];
        if (parents[mf] != 0.0) value += parents[mf] * std::log(z[mf]);
    }
    return value - n_ * std::log(denom);
}

double log_likelihood_given_z(const Theta& theta, const SimplexPoint& z,
                              const Dataset& data) {
    if (data.families.empty()) {
        throw std::invalid_argument("log_likelihood_given_z: empty dataset");
    }
    const DatasetSummary summary(data);
    return LogLikelihood(theta, summary)(z);
}

}  // namespace dspem

#include "dspem/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace dspem {

DiseaseModel disease_model(int id) {
    switch (id) {
        case 1: return {1.0, 1.0, 1.0, 1.0, 1.0};
        case 2: return {2.0, 3.0, 1.0, 1.0, 1.0};
        case 3: return {1.0, 3.0, 1.0, 1.0, 1.0};
        case 4: return {1.0, 3.0, 1.0, 2.0, 2.0};
        case 5: return {1.0, 3.0, 3.0, 1.0, 1.0};
        case 6: return {3.0, 3.0, 1.0 / 3.0, 1.0, 1.0};
        case 7: return {1.0, 3.0, 3.0, 2.0, 2.0};
        case 8: return {3.0, 3.0, 1.0 / 3.0, 2.0, 2.0};
        default: throw std::invalid_argument("disease_model: id must be 1-8");
    }
}

Scenario scenario(int id) {
    Scenario s;
    switch (id) {
        case 1: s = {0.1, 0.05, false}; break;
        case 2: s = {0.3, 0.05, false}; break;
        case 3: s = {0.1, 0.15, false}; break;
        case 4: s = {0.3, 0.15, false}; break;
        case 5: s = {0.1, 0.05, true}; break;
        case 6: s = {0.3, 0.05, true}; break;
        case 7: s = {0.1, 0.15, true}; break;
        case 8: s = {0.3, 0.15, true}; break;
        default: throw std::invalid_argument("scenario: id must be 1-8");
    }
    if (!s.hwe) {
        s.zeta_male = 0.1;
        s.zeta_female = 0.3;
    }
    return s;
}

std::array<double, 3> genotype_freqs(double p, double zeta) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("genotype_freqs: p must lie in (0,1)");
    if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("genotype_freqs: zeta must lie in [0,1]");
    const double q = 1.0 - p;
    return {q * q * (1.0 - zeta) + q * zeta,
            2.0 * p * q * (1.0 - zeta),
            p * p * (1.0 - zeta) + p * zeta};
}

SimplexPoint mating_type_probs(const Scenario& scenario) {
    const auto mother = genotype_freqs(scenario.maf, scenario.zeta_female);
    const auto father = genotype_freqs(scenario.maf, scenario.zeta_male);
    std::array<double, 9> mu;
    for (int m = 0; m <= 2; ++m)
        for (int f = 0; f <= 2; ++f) mu[SimplexPoint::index(m, f)] = mother[m] * father[f];
    return SimplexPoint(mu);
}

Theta theta_for(const DiseaseModel& model, double delta) {
    return Theta(delta, model.r1, model.r2, model.r_im, model.s1, model.s2);
}

double calibrate_delta(const DiseaseModel& model, const Scenario& scenario) {
    // Prevalence is linear in delta: P(D=1) = delta * E[risk factor] where
    // the expectation runs over parents and origin-resolved transmissions.
    const SimplexPoint mu = mating_type_probs(scenario);
    double expected_rr = 0.0;
    for (int m = 0; m <= 2; ++m) {
        for (int f = 0; f <= 2; ++f) {
            const double pm = 0.5 * m;
            const double pf = 0.5 * f;
            const double mother_rr = (m == 1) ? model.s1 : (m == 2) ? model.s2 : 1.0;
            for (int a = 0; a <= 1; ++a) {
                for (int b = 0; b <= 1; ++b) {
                    const double prob = (a ? pm : 1.0 - pm) * (b ? pf : 1.0 - pf);
                    if (prob == 0.0) continue;
                    double rr = mother_rr;
                    if (a + b == 1) rr *= model.r1 * (a ? model.r_im : 1.0);
                    if (a + b == 2) rr *= model.r2;
                    expected_rr += mu.at(m, f) * prob * rr;
                }
            }
        }
    }
    const double delta = scenario.prev / expected_rr;
    theta_for(model, delta);  // throws if any penetrance exceeds 1
    return delta;
}

FamilyRecord simulate_family(const DiseaseModel& model, const Scenario& scenario,
                             double delta, bool with_extra_sibling, Rng& rng) {
    const Theta theta = theta_for(model, delta);
    const auto mother_freqs = genotype_freqs(scenario.maf, scenario.zeta_female);
    const auto father_freqs = genotype_freqs(scenario.maf, scenario.zeta_male);

    const auto draw_genotype = [&](const std::array<double, 3>& freqs) {
        return rng.categorical(freqs.data(), 3, 1.0);
    };
    struct Child {
        Genotype genotype;
        bool affected;
    };
    const auto draw_child = [&](Genotype m, Genotype f) {
        const bool from_mother = rng.bernoulli(0.5 * m);
        const bool from_father = rng.bernoulli(0.5 * f);
        const int count = from_mother + from_father;
        ChildGenotype cg;
        if (count == 1) {
            cg = from_mother ? ChildGenotype::het_maternal() : ChildGenotype::het_paternal();
        } else {
            cg = ChildGenotype::homozygous(count);
        }
        return Child{count, rng.bernoulli(penetrance(theta, m, cg))};
    };

    for (;;) {
        const Genotype m = draw_genotype(mother_freqs);
        const Genotype f = draw_genotype(father_freqs);
        const Child first = draw_child(m, f);
        const Child second = draw_child(m, f);
        if (first.affected == second.affected) continue;
        FamilyRecord fam;
        fam.m = m;
        fam.f = f;
        fam.c1 = first.affected ? first.genotype : second.genotype;
        fam.c2 = first.affected ? second.genotype : first.genotype;
        if (with_extra_sibling) {
            const Child extra = draw_child(m, f);
            fam.siblings.push_back({extra.genotype, extra.affected});
        }
        return fam;
    }
}

Dataset simulate_dataset(const DiseaseModel& model, const Scenario& scenario,
                         int n_families, bool with_extra_sibling,
                         std::uint64_t seed) {
    if (n_families <= 0) throw std::invalid_argument("simulate_dataset: n_families must be positive");
    const double delta = calibrate_delta(model, scenario);
    Rng rng(seed);
    std::vector<FamilyRecord> families;
    families.reserve(n_families);
    for (int i = 0; i < n_families; ++i) {
        families.push_back(simulate_family(model, scenario, delta, with_extra_sibling, rng));
    }
    return Dataset::from_families(std::move(families));
}

}  // namespace dspem

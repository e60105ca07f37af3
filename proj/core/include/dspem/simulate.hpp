#pragma once

#include <array>
#include <cstdint>

#include "dspem/genetics.hpp"
#include "dspem/rng.hpp"

namespace dspem {

// One simulation scenario: minor allele frequency, disease prevalence, and
// whether Hardy-Weinberg equilibrium holds. When it does not, excess
// homozygosity is induced through sex-specific inbreeding coefficients
// (0.1 for fathers, 0.3 for mothers).
struct Scenario {
    double maf = 0.1;
    double prev = 0.05;
    bool hwe = true;
    double zeta_male = 0.0;
    double zeta_female = 0.0;
};

// Relative risks of one disease model; delta is calibrated from the
// scenario's prevalence separately.
struct DiseaseModel {
    double r1 = 1.0, r2 = 1.0, r_im = 1.0, s1 = 1.0, s2 = 1.0;
};

// The standard 8 x 8 simulation grid (ids 1-8).
DiseaseModel disease_model(int id);
Scenario scenario(int id);

// Genotype frequencies under inbreeding:
//   (1-p)^2 (1-zeta) + (1-p) zeta,  2p(1-p)(1-zeta),  p^2 (1-zeta) + p zeta.
std::array<double, 3> genotype_freqs(double p, double zeta);

// Mating type probabilities: mothers and fathers pair independently, each
// sex with its own genotype law, so mu_mf != mu_fm whenever the inbreeding
// coefficients differ.
SimplexPoint mating_type_probs(const Scenario& scenario);

// Phenocopy rate delta such that the population prevalence of a randomly
// drawn child equals scenario.prev. Errors if the resulting penetrance
// exceeds 1 anywhere.
double calibrate_delta(const DiseaseModel& model, const Scenario& scenario);

// Builds the full parameter vector for a model at its calibrated delta.
Theta theta_for(const DiseaseModel& model, double delta);

// Rejection-samples one discordant sib-pair family: parents from the mating
// law, children by allele transmission, disease status by the penetrance
// model; accepted when exactly one of the two probands is affected (the
// affected one becomes c1). The optional extra sibling's status is free.
FamilyRecord simulate_family(const DiseaseModel& model, const Scenario& scenario,
                             double delta, bool with_extra_sibling, Rng& rng);

Dataset simulate_dataset(const DiseaseModel& model, const Scenario& scenario,
                         int n_families, bool with_extra_sibling,
                         std::uint64_t seed);

}  // namespace dspem

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dspem {

// Genotypes are counts of the variant allele: 0, 1 or 2.
using Genotype = int;

inline bool is_valid_genotype(int g) { return g >= 0 && g <= 2; }

// Parental origin of a single variant allele. Only meaningful for
// heterozygous children; Ambiguous can occur only when both parents are
// heterozygous and the inheritance path cannot be resolved.
enum class Origin : std::uint8_t { Maternal, Paternal, Unambiguous, Ambiguous };

struct ChildGenotype {
    int count = 0;
    Origin origin = Origin::Unambiguous;

    static ChildGenotype homozygous(int count) { return {count, Origin::Unambiguous}; }
    static ChildGenotype het_maternal() { return {1, Origin::Maternal}; }
    static ChildGenotype het_paternal() { return {1, Origin::Paternal}; }
    static ChildGenotype het_ambiguous() { return {1, Origin::Ambiguous}; }

    bool valid() const {
        if (!is_valid_genotype(count)) return false;
        if (count == 1) return origin != Origin::Unambiguous;
        return origin == Origin::Unambiguous;
    }
};

// The six penetrance parameters: phenocopy rate delta and the relative risks
// for one/two copies of the child's own variant allele (r1, r2), a maternally
// inherited single copy (r_im), and one/two copies carried by the mother
// (s1, s2). Construction rejects any combination whose worst-case penetrance
// over the reachable genotype configurations exceeds 1; silently clamping
// would corrupt every downstream likelihood.
class Theta {
public:
    Theta(double delta, double r1, double r2, double r_im, double s1, double s2);

    double delta() const { return delta_; }
    double r1() const { return r1_; }
    double r2() const { return r2_; }
    double r_im() const { return r_im_; }
    double s1() const { return s1_; }
    double s2() const { return s2_; }

    // Largest penetrance over all (mother, child, origin) configurations.
    double max_penetrance() const;

    bool operator==(const Theta&) const = default;

private:
    double delta_, r1_, r2_, r_im_, s1_, s2_;
};

// A point on the 8-simplex: the nine mating type probabilities mu_mf indexed
// row-major by (mother, father). No symmetry between mu_mf and mu_fm is
// assumed anywhere.
class SimplexPoint {
public:
    static constexpr int kSize = 9;
    static constexpr int index(int m, int f) { return 3 * m + f; }

    explicit SimplexPoint(const std::array<double, 9>& mu);

    static SimplexPoint uniform();

    double operator[](int i) const { return mu_[i]; }
    double at(int m, int f) const { return mu_[index(m, f)]; }
    const std::array<double, 9>& values() const { return mu_; }

private:
    std::array<double, 9> mu_;
};

struct SiblingRecord {
    Genotype genotype = 0;
    bool affected = false;
};

// One discordant sib-pair family: parental genotypes, the affected proband
// c1, the unaffected proband c2, and any additional siblings with their
// disease status. Parental origin of heterozygous children is latent and is
// never stored; the likelihood terms average over it where it is ambiguous.
struct FamilyRecord {
    Genotype m = 0;
    Genotype f = 0;
    Genotype c1 = 0;
    Genotype c2 = 0;
    std::vector<SiblingRecord> siblings;
};

// Raised when a family is impossible under the model (Mendel-incompatible
// genotypes or a zero-probability configuration).
class FamilyError : public std::runtime_error {
public:
    FamilyError(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    std::size_t family_index() const { return index_; }

private:
    std::size_t index_;
};

struct Dataset {
    std::vector<FamilyRecord> families;
    std::array<double, 9> n_mf{};  // parental pair counts, index(m, f)

    // Validates Mendel compatibility of every child and tallies n_mf.
    static Dataset from_families(std::vector<FamilyRecord> families);

    std::size_t n_families() const { return families.size(); }
    bool ds_only() const;
};

// P(child = c | mother = m, father = f) for an origin-resolved child state.
// Mendel-incompatible input yields 0. For a heterozygous child with
// origin == Ambiguous the two origin-resolved probabilities are summed.
double transmission_prob(Genotype m, Genotype f, ChildGenotype c);

// Multiplicative relative risk penetrance
//   P(D=1 | m, c) = delta * r1^[c=1] * r2^[c=2] * r_im^[c=1 maternal]
//                 * s1^[m=1] * s2^[m=2].
// The origin must be resolved; ambiguity is averaged at the joint-probability
// level, not here.
double penetrance(const Theta& theta, Genotype m, ChildGenotype c);

// P(M=m, F=f, C1=c1, C2=c2, D1=1, D2=0): mating probability times the two
// transmission probabilities times penetrance of the affected proband and the
// complement for the unaffected one. When a heterozygous child's origin is
// ambiguous (both parents heterozygous), the penetrance factor is the equally
// weighted average over the maternal and paternal paths, which is exactly the
// sum over origin-resolved transmission states. All 29 nonzero entries come
// out of this one formula; none is transcribed from a table.
double joint_ds_prob(const Theta& theta, const SimplexPoint& mu,
                     Genotype m, Genotype f, Genotype c1, Genotype c2);

// P(D1=1, D2=0) = sum of joint_ds_prob over all genotype configurations.
double ds_denominator(const Theta& theta, const SimplexPoint& mu);

// Product over the additional siblings of transmission times penetrance (or
// its complement). Empty sibling list yields 1. Mendel-incompatible sibling
// genotype yields 0.
double sibling_block_prob(const Theta& theta, Genotype m, Genotype f,
                          std::span<const SiblingRecord> siblings);

// Per-family child summaries for fixed (theta, m, f):
//   t[c]   = P(C = c | m, f)
//   a[c]   = sum over origin-resolved states with count c of
//            P(state | m, f) * penetrance(state),
// so a[c] is the joint "child = c and affected" probability and
// t[c] - a[c] its unaffected counterpart.
struct ChildTable {
    std::array<double, 3> t{};
    std::array<double, 3> a{};
};

ChildTable make_child_table(const Theta& theta, Genotype m, Genotype f);

// Static enumeration of the genotype configurations with nonzero probability
// for interior mu and valid theta (29 of them).
struct JointConfig {
    int m, f, c1, c2;
};

std::span<const JointConfig> joint_configs();  // size 29

// Sufficient statistics of a dataset for repeated likelihood evaluation:
// counts per joint configuration, parental pair counts, and grouped sibling
// terms. The per-family log-likelihood factorizes as
//   log mu_mf + log K_config(theta) - log denominator(theta, mu) + sibling(theta)
// so only the parental counts and the denominator involve mu.
class DatasetSummary {
public:
    explicit DatasetSummary(const Dataset& data);

    std::size_t n_families() const { return n_; }
    bool ds_only() const { return sib_groups_.empty(); }
    const std::array<double, 9>& parent_counts() const { return parent_counts_; }
    const std::array<double, 29>& config_counts() const { return config_counts_; }

    struct SibGroup {
        int m, f;
        Genotype genotype;
        bool affected;
        double count;
        std::size_t representative;  // index of one family in the group
    };
    const std::vector<SibGroup>& sib_groups() const { return sib_groups_; }
    std::size_t representative(int config) const { return config_rep_[config]; }

private:
    std::size_t n_ = 0;
    std::array<double, 29> config_counts_{};
    std::array<double, 9> parent_counts_{};
    std::array<std::size_t, 29> config_rep_{};
    std::vector<SibGroup> sib_groups_;
};

// log P(Y | Z = mu; theta) for a fixed dataset, evaluated at many mu. The
// theta-dependent tables are built once at construction:
//   value(mu) = theta_constant()
//             + sum_mf parent_counts[mf] * log mu_mf
//             - n * log( sum_mf mu_mf * denominator_weights()[mf] ).
class LogLikelihood {
public:
    LogLikelihood(const Theta& theta, const DatasetSummary& summary);

    double operator()(const SimplexPoint& z) const { return eval(z.values()); }
    double eval(const std::array<double, 9>& z) const;

    // Terms that do not involve mu: config and sibling log-probabilities.
    double theta_constant() const { return theta_constant_; }
    // Collapsed denominator weights w_mf with
    // ds_denominator(theta, mu) = sum_mf mu_mf * w_mf.
    const std::array<double, 9>& denominator_weights() const { return weights_; }
    const DatasetSummary& summary() const { return *summary_; }

private:
    const DatasetSummary* summary_;
    std::array<double, 9> weights_{};
    double theta_constant_ = 0.0;
    double n_ = 0.0;
};

// Convenience wrapper; builds the evaluator once and applies it.
double log_likelihood_given_z(const Theta& theta, const SimplexPoint& z,
                              const Dataset& data);

}  // namespace dspem

#include "dspem/oracle.hpp"

#include <array>

namespace dspem::oracle {

namespace {

// A parent's two alleles: 1 for the variant, 0 for the wild type.
std::array<int, 2> alleles(int genotype) {
    switch (genotype) {
        case 0: return {0, 0};
        case 1: return {1, 0};
        default: return {1, 1};
    }
}

double risk_factor(const Theta& theta, int mother, int from_mother, int from_father) {
    const int count = from_mother + from_father;
    double rr = 1.0;
    if (count == 1) {
        rr *= theta.r1();
        if (from_mother == 1) rr *= theta.r_im();
    }
    if (count == 2) rr *= theta.r2();
    if (mother == 1) rr *= theta.s1();
    if (mother == 2) rr *= theta.s2();
    return rr;
}

}  // namespace

EnumeratedTable enumerate_joint_table(const Theta& theta, const SimplexPoint& mu) {
    EnumeratedTable table;
    for (int m = 0; m <= 2; ++m) {
        for (int f = 0; f <= 2; ++f) {
            const double mu_mf = mu.at(m, f);
            const auto ma = alleles(m);
            const auto fa = alleles(f);
            // Each child independently inherits one of the mother's two
            // alleles and one of the father's two, each pick 1/2.
            for (int i1 = 0; i1 < 2; ++i1)
            for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
            for (int j2 = 0; j2 < 2; ++j2) {
                const int c1 = ma[i1] + fa[j1];
                const int c2 = ma[i2] + fa[j2];
                const double pen1 =
                    theta.delta() * risk_factor(theta, m, ma[i1], fa[j1]);
                const double pen2 =
                    theta.delta() * risk_factor(theta, m, ma[i2], fa[j2]);
                const double prob = mu_mf * (1.0 / 16.0) * pen1 * (1.0 - pen2);
                if (prob > 0.0) {
                    table.entries[{m, f, c1, c2}] += prob;
                    table.total += prob;
                }
            }
        }
    }
    return table;
}

double brute_force_prev(const Theta& theta, const SimplexPoint& mu) {
    double prev = 0.0;
    for (int m = 0; m <= 2; ++m) {
        for (int f = 0; f <= 2; ++f) {
            const auto ma = alleles(m);
            const auto fa = alleles(f);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    prev += mu.at(m, f) * 0.25 * theta.delta() *
                            risk_factor(theta, m, ma[i], fa[j]);
        }
    }
    return prev;
}

SimplexPoint recruitment_conditional_mu(const Theta& theta, const SimplexPoint& mu) {
    const EnumeratedTable table = enumerate_joint_table(theta, mu);
    std::array<double, 9> cond{};
    for (const auto& [key, prob] : table.entries) {
        cond[SimplexPoint::index(std::get<0>(key), std::get<1>(key))] +=
            prob / table.total;
    }
    return SimplexPoint(cond);
}

}  // namespace dspem::oracle

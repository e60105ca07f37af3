#pragma once

#include <map>
#include <tuple>

#include "dspem/genetics.hpp"

// Brute-force reference implementations used for verification only. Every
// probability here is assembled by enumerating which parental allele went to
// which child, with no closed-form shortcuts and no code shared with the
// production formulas beyond primitive arithmetic.

namespace dspem::oracle {

struct EnumeratedTable {
    std::map<std::tuple<int, int, int, int>, double> entries;  // (m,f,c1,c2) -> prob
    double total = 0.0;
};

// Joint law of (M, F, C1, C2, D1=1, D2=0) by exhaustive allele enumeration.
EnumeratedTable enumerate_joint_table(const Theta& theta, const SimplexPoint& mu);

// P(D = 1) for a randomly drawn child.
double brute_force_prev(const Theta& theta, const SimplexPoint& mu);

// P(M=m, F=f | D1=1, D2=0): the parental-pair law conditional on recruitment.
SimplexPoint recruitment_conditional_mu(const Theta& theta, const SimplexPoint& mu);

}  // namespace dspem::oracle

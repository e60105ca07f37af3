#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace dspem {

// Deterministic derivative-free simplex minimizer. The simplex is seeded at
// x0 plus axis steps; after convergence one restart from the best point with
// a quarter step guards against premature collapse. No randomness anywhere,
// so equal inputs give bit-equal outputs.
struct NelderMeadOptions {
    double initial_step = 0.25;
    double x_tol = 1e-6;
    int max_iter = 500;
    int restarts = 1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0,
                                    const NelderMeadOptions& options = {}) {
    const std::size_t d = x0.size();
    NelderMeadResult result;
    result.x = x0;
    result.value = f(x0);
    if (d == 0) {
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex;
    std::vector<double> values;

    const auto init_simplex = [&](const std::vector<double>& center, double step) {
        simplex.assign(1, center);
        values.assign(1, f(center));
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> v = center;
            v[i] += step;
            simplex.push_back(v);
            values.push_back(f(v));
        }
    };

    const auto order = [&]() {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (const std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(values[i]);
        }
        simplex.swap(s2);
        values.swap(v2);
    };

    double step = options.initial_step;
    int iterations = 0;
    bool converged = false;
    for (int round = 0; round <= options.restarts; ++round) {
        init_simplex(round == 0 ? x0 : simplex.front(), step);
        order();
        while (iterations < options.max_iter) {
            ++iterations;
            // Convergence: simplex diameter in parameter space.
            double diameter = 0.0;
            for (std::size_t i = 1; i < simplex.size(); ++i)
                for (std::size_t j = 0; j < d; ++j)
                    diameter = std::max(diameter,
                                        std::fabs(simplex[i][j] - simplex[0][j]));
            if (diameter < options.x_tol) {
                converged = true;
                break;
            }

            std::vector<double> centroid(d, 0.0);
            for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
                for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
            for (double& c : centroid) c /= static_cast<double>(d);

            const auto at = [&](double coef) {
                std::vector<double> p(d);
                for (std::size_t j = 0; j < d; ++j)
                    p[j] = centroid[j] + coef * (simplex.back()[j] - centroid[j]);
                return p;
            };

            const std::vector<double> reflected = at(-1.0);
            const double fr = f(reflected);
            if (fr < values.front()) {
                const std::vector<double> expanded = at(-2.0);
                const double fe = f(expanded);
                if (fe < fr) {
                    simplex.back() = expanded;
                    values.back() = fe;
                } else {
                    simplex.back() = reflected;
                    values.back() = fr;
                }
            } else if (fr < values[values.size() - 2]) {
                simplex.back() = reflected;
                values.back() = fr;
            } else {
                const std::vector<double> contracted = at(fr < values.back() ? -0.5 : 0.5);
                const double fc = f(contracted);
                if (fc < std::min(fr, values.back())) {
                    simplex.back() = contracted;
                    values.back() = fc;
                } else {
                    // Shrink toward the best vertex.
                    for (std::size_t i = 1; i < simplex.size(); ++i) {
                        for (std::size_t j = 0; j < d; ++j)
                            simplex[i][j] = simplex[0][j] +
                                            0.5 * (simplex[i][j] - simplex[0][j]);
                        values[i] = f(simplex[i]);
                    }
                }
            }
            order();
        }
        step *= 0.25;
        if (iterations >= options.max_iter) break;
    }

    result.iterations = iterations;
    result.converged = converged;
    if (values.front() < result.value) {
        result.x = simplex.front();
        result.value = values.front();
    }
    return result;
}

}  // namespace dspem

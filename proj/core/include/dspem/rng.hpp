#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace dspem {

// Seeded random stream. Normal and gamma variates are generated here rather
// than through std:: distributions so that a given seed produces the same
// stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform on (0, 1); never returns 0 or 1.
    double uniform() {
        const double u = (engine_() >> 11) * 0x1.0p-53;
        return u == 0.0 ? 0x1.0p-53 : u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Index in [0, n) with probabilities proportional to weights[0..n).
    int categorical(const double* weights, int n, double total) {
        double u = uniform() * total;
        for (int i = 0; i < n - 1; ++i) {
            u -= weights[i];
            if (u <= 0.0) return i;
        }
        return n - 1;
    }

    // Standard normal via the polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        have_spare_ = true;
        return u * factor;
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; the shape<1 case uses the boost
    // trick gamma(a) = gamma(a+1) * U^{1/a}.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            const double u = uniform();
            return g * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta(a, b) from two gammas, clamped strictly inside (0, 1).
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        double r = x / (x + y);
        const double eps = 0x1.0p-52;
        if (r < eps) r = eps;
        if (r > 1.0 - eps) r = 1.0 - eps;
        return r;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stable seed derivation for per-task streams (replicates, SNPs, EM variants):
// FNV-1a over the tag mixed with the base seed through splitmix64. The result
// depends only on (base, tag), never on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (h | 1ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace dspem

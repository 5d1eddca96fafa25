#pragma once

#include <cstdint>
#include <cmath>
#include <Eigen/Dense>

namespace nmsurf {

/// Deterministic 64-bit generator. All sampling in the library flows through
/// one seeded instance so that reruns with the same seed reproduce every
/// report value bit for bit, independently of the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Eigen::VectorXd point_in_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        Eigen::VectorXd p(lo.size());
        for (int i = 0; i < lo.size(); ++i) p[i] = uniform(lo[i], hi[i]);
        return p;
    }

    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v(n);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < n; ++i) v[i] = normal();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-12);
        return v / std::sqrt(norm2);
    }

private:
    std::uint64_t state_;
};

} // namespace nmsurf

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace epo {

// splitmix64 finalizer; bijective 64-bit mix used for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent substream seed per (master, row, trajectory). Adding rows or
// trajectories never shifts the randomness of existing ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t row,
                                 std::uint64_t traj) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ mix64(row + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ mix64(traj + 0x6a09e667f3bcc909ull));
    return s;
}

// Deterministic standard-normal stream: mt19937_64 + Box-Muller with a
// cached spare. std::normal_distribution is not bit-stable across standard
// libraries, so the transform is spelled out; the stream is reproducible on
// any IEEE-754 platform from the seed alone.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi_v<double> * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    // top 53 bits -> (0, 1]; never 0, so the log above is finite
    double uniform01() {
        return std::ldexp(static_cast<double>((eng_() >> 11) + 1), -53);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// n i.i.d. N(0, dt) increments, fully determined by (seed, dt, n).
inline std::vector<double> gaussian_increments(std::uint64_t seed, double dt,
                                               std::size_t n) {
    NormalStream g(seed);
    const double s = std::sqrt(dt);
    std::vector<double> out(n);
    for (auto& v : out) v = s * g.next();
    return out;
}

} // namespace epo

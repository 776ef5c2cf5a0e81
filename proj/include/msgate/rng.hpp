#ifndef MSGATE_RNG_HPP
#define MSGATE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace msgate {

// splitmix64 finalizer; used to derive independent stream seeds from
// (master seed, run index, shot index) so that results do not depend on
// how shots are distributed over worker threads.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(master ^ 0x6d736761ULL) ^ mix_seed(a) ^ (mix_seed(b) << 1));
}

// Fixed-consumption uniform/gaussian draws. The standard distributions are
// not pinned by the C++ standard and may consume a variable number of
// engine outputs, which would break bit-for-bit reproducibility of the
// seed lineage across library versions.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng, double mean = 0.0, double sigma = 1.0) {
    // Box-Muller, always two engine calls, cosine branch only.
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * M_PI * u2);
}

} // namespace msgate

#endif

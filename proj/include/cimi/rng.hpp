#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cimi {

// splitmix64 finalizer; decorrelates nearby integer inputs.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed for an independent stream (per sweep point, per worker chunk, ...)
// derived from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0x632be59bd9b4e019ull));
}

// Random stream with explicitly coded transforms. std::mt19937_64 output is
// pinned by the standard, but std::normal_distribution is not, so Gaussians
// go through Box-Muller here to keep results bit-identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // uniform in (0, 1], 53-bit resolution; never 0 so log() is safe
    double uniform01() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
    }

    // uniform integer in [0, n), multiply-shift (no modulo bias)
    std::uint64_t pick(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    // circularly symmetric complex Gaussian, E|z|^2 = sigma2
    std::complex<double> cgauss(double sigma2 = 1.0) {
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-std::log(u1) * sigma2);
        double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace cimi

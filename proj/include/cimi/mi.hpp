#pragma once

#include <cstdint>
#include <vector>

#include "cimi/channel.hpp"
#include "cimi/constellation.hpp"

namespace cimi {

// Monte Carlo mutual information estimate, bits per MIMO channel use.
struct MiEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long samples = 0;
};

enum class Scheme { cm, bicm, ci, ci_rotated };

struct SchemeSpec {
    Scheme scheme = Scheme::cm;
    Constellation base;
    MimoConfig cfg;
    double rotation_rad = 0.0; // used by ci_rotated only
};

struct EstimatorOptions {
    int workers = 0;             // 0: CIMI_WORKERS env var, else all cores
    int chunk_size = 256;        // samples per deterministic chunk
    bool fixed_unit_gain = false; // identity channel diagnostic (no fading)
};

// Mutual information with the full N-antenna symbol as the channel input,
// inputs uniform on the N-fold product of the constellation, fading known to
// the receiver. value = N log2|Q| - E[ log2( sum_z e^ll(z) / e^ll(x) ) ].
MiEstimate mi_cm(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt = {});

// Per-bit decomposition over the concatenated antenna labels (antenna 0 bits
// first, bit 0 the least significant bit of a label); each sample contributes
// one marginal-likelihood-ratio term per bit position.
MiEstimate mi_bicm(const Constellation& c, const MimoConfig& cfg,
                   const SnrPoint& snr, long long samples, std::uint64_t seed,
                   const EstimatorOptions& opt = {});

// Coordinate interleaving: the per-antenna alphabet becomes the enhanced
// constellation and the channel input is one real coordinate at a random
// switch position, the remaining 2N-1 coordinates being marginalized along
// with the noise (fading still known). Each sample evaluates all 2N switch
// positions. Coordinates are drawn from the union-alphabet marginal; when
// the constellation is CI-invariant with a uniform marginal this reduces to
// the uniform-prior form, otherwise prior weights enter every sum.
// Even positions carry quadrature coordinates, odd positions in-phase ones.
MiEstimate mi_ci(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt = {});

// mi_ci on the rotated constellation.
MiEstimate mi_ci_rotated(const Constellation& c, double phi,
                         const MimoConfig& cfg, const SnrPoint& snr,
                         long long samples, std::uint64_t seed,
                         const EstimatorOptions& opt = {});

// One estimate per grid point; point i runs with seed derive_seed(master, i),
// so results do not depend on the worker count or on other grid points.
std::vector<MiEstimate> run_sweep(const SchemeSpec& spec,
                                  const std::vector<SnrPoint>& grid,
                                  long long samples, std::uint64_t master_seed,
                                  int workers);

// Largest value the estimator of a scheme can converge to.
double scheme_ceiling_bits(Scheme scheme, const Constellation& c,
                           const MimoConfig& cfg);

// Straightforward single-threaded implementations of the same estimators,
// kept as a readable cross-check for tests and benchmarks. They consume
// random draws in the same order as the parallel kernels, so for equal
// (samples, seed, chunk_size) the results agree up to summation order.
namespace reference {

MiEstimate mi_cm(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt = {});
MiEstimate mi_bicm(const Constellation& c, const MimoConfig& cfg,
                   const SnrPoint& snr, long long samples, std::uint64_t seed,
                   const EstimatorOptions& opt = {});
MiEstimate mi_ci(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt = {});

} // namespace reference

} // namespace cimi

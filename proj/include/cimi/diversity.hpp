#pragma once

#include <vector>

#include "cimi/channel.hpp"
#include "cimi/constellation.hpp"
#include "cimi/rng.hpp"

namespace cimi {

// Two equal-length codewords, one transmit vector per channel use.
struct CodewordPair {
    std::vector<CVec> c;
    std::vector<CVec> e;
};

// Result of the rank-1 factorization of a Hermitian difference matrix:
// C = V diag(d) V^H with eigenvectors in the columns of V (row-major n x n)
// and i0 the index of the single nonzero eigenvalue.
struct RankOneDecomposition {
    std::vector<cplx> v;
    std::vector<double> d;
    int i0 = 0;
};

struct TrialRecord {
    bool applicable = true; // false when the drawn pair was identical
    bool rank_ok = false;
    double identity_residual = 0.0;
    double trace = 0.0;
};

struct DiversityReport {
    std::vector<TrialRecord> records;
    long long coordinate_hamming = 0; // summed over applicable trials
    double max_residual = 0.0;
    long long passed = 0;
    long long failed = 0;
    long long skipped = 0;
};

// C = (c - e)(c - e)^H, Hermitian with trace ||c - e||^2.
std::vector<cplx> difference_outer(const CVec& ck, const CVec& ek);

// Eigendecomposition of a Hermitian matrix expected to have rank one.
// Throws "zero difference" when C vanishes and "rank > 1" when more than one
// eigenvalue exceeds 1e-10 relative to the trace.
RankOneDecomposition rank_one_decompose(const std::vector<cplx>& C, int n);

// beta = omega * V; a unitary mix of the fading row, same norm.
CVec equivalent_channels(const CVec& omega, const std::vector<cplx>& V, int n);

// Random trials of the identity  omega C omega^H = |beta_i0|^2 trace(C):
// each trial draws a fading row and a random constellation pair, factors the
// difference matrix, and records the relative residual.
DiversityReport verify_theorem1(Rng& rng, const MimoConfig& cfg,
                                const Constellation& c, long long trials);

// Squared Euclidean distance between faded codewords,
// sum over uses and receive antennas of |sum_i h_ji (c_i - e_i)|^2.
double pairwise_exponent(const CodewordPair& pair,
                         const std::vector<ChannelRealization>& fading);

// Number of real coordinates (2 n_tx per channel use) that differ.
long long coordinate_hamming(const CodewordPair& pair);

} // namespace cimi

#pragma once

#include <vector>

#include "cimi/constellation.hpp"
#include "cimi/rng.hpp"

namespace cimi {

using CVec = std::vector<cplx>;

struct MimoConfig {
    int n_tx = 1;
    int n_rx = 1;
};

struct SnrPoint {
    double es_over_n0_db = 0.0;
};

// Flat-fading matrix for one channel use, rows indexed by receive antenna.
struct ChannelRealization {
    int n_rx = 0;
    int n_tx = 0;
    std::vector<cplx> h; // row-major n_rx x n_tx

    cplx at(int rx, int tx) const { return h[rx * n_tx + tx]; }
};

// Entries i.i.d. circularly symmetric complex Gaussian with E|h|^2 = 1.
ChannelRealization sample_channel(Rng& rng, const MimoConfig& cfg);

// Identity gains (ones on the diagonal), used by the no-fading diagnostic.
ChannelRealization unit_gain_channel(const MimoConfig& cfg);

// Noise variance per receive antenna for a total-power SNR convention: the
// transmit energy per channel use is n_tx times the per-antenna constellation
// energy, so N0 = n_tx * energy * 10^(-snr_db/10).
double noise_variance(const SnrPoint& snr, const MimoConfig& cfg,
                      double energy);

// y = h x + w with w i.i.d. complex Gaussian, E|w|^2 = n0 per entry.
CVec transmit(const ChannelRealization& h, const CVec& x, double n0, Rng& rng);

// Log density of y given (h, x) up to the additive constant -n_rx ln(pi n0),
// which is common to every candidate x and cancels in all likelihood ratios:
// returns -||y - h x||^2 / n0.
double log_likelihood(const CVec& y, const ChannelRealization& h,
                      const CVec& x, double n0);

} // namespace cimi

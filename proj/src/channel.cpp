#include "cimi/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace cimi {

ChannelRealization sample_channel(Rng& rng, const MimoConfig& cfg) {
    ChannelRealization ch;
    ch.n_rx = cfg.n_rx;
    ch.n_tx = cfg.n_tx;
    ch.h.resize(static_cast<std::size_t>(cfg.n_rx) * cfg.n_tx);
    for (auto& v : ch.h)
        v = rng.cgauss(1.0);
    return ch;
}

ChannelRealization unit_gain_channel(const MimoConfig& cfg) {
    ChannelRealization ch;
    ch.n_rx = cfg.n_rx;
    ch.n_tx = cfg.n_tx;
    ch.h.assign(static_cast<std::size_t>(cfg.n_rx) * cfg.n_tx, cplx(0.0, 0.0));
    for (int i = 0; i < std::min(cfg.n_rx, cfg.n_tx); ++i)
        ch.h[i * cfg.n_tx + i] = 1.0;
    return ch;
}

double noise_variance(const SnrPoint& snr, const MimoConfig& cfg,
                      double energy) {
    if (energy <= 0.0)
        throw std::invalid_argument("energy must be positive");
    return cfg.n_tx * energy * std::pow(10.0, -snr.es_over_n0_db / 10.0);
}

CVec transmit(const ChannelRealization& h, const CVec& x, double n0,
              Rng& rng) {
    if (static_cast<int>(x.size()) != h.n_tx)
        throw std::invalid_argument("dimension mismatch");
    if (n0 < 0.0)
        throw std::invalid_argument("negative noise variance");
    CVec y(h.n_rx, cplx(0.0, 0.0));
    for (int r = 0; r < h.n_rx; ++r) {
        cplx acc(0.0, 0.0);
        for (int t = 0; t < h.n_tx; ++t)
            acc += h.at(r, t) * x[t];
        y[r] = acc;
        if (n0 > 0.0)
            y[r] += rng.cgauss(n0);
    }
    return y;
}

double log_likelihood(const CVec& y, const ChannelRealization& h,
                      const CVec& x, double n0) {
    if (n0 <= 0.0)
        throw std::invalid_argument("noise variance must be positive");
    if (static_cast<int>(x.size()) != h.n_tx ||
        static_cast<int>(y.size()) != h.n_rx)
        throw std::invalid_argument("dimension mismatch");
    double d2 = 0.0;
    for (int r = 0; r < h.n_rx; ++r) {
        cplx acc(0.0, 0.0);
        for (int t = 0; t < h.n_tx; ++t)
            acc += h.at(r, t) * x[t];
        d2 += std::norm(y[r] - acc);
    }
    return -d2 / n0;
}

} // namespace cimi

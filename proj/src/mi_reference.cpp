#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cimi/mi.hpp"

// Plain single-threaded estimators. Each one re-derives the estimate with
// direct library calls (log_likelihood per candidate, explicit subset scans)
// instead of the fused tables the parallel kernels use. Random draws happen
// in the same order as in the kernels: fading matrix, then input indices,
// then transmit noise, chunk seeds derived identically.

namespace cimi::reference {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Welford {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
};

MiEstimate pooled(const std::vector<Welford>& chunks) {
    // fixed-order pooling of chunk moments
    long long n = 0;
    double mean = 0.0, m2 = 0.0;
    for (const auto& c : chunks) {
        if (c.n == 0)
            continue;
        if (n == 0) {
            n = c.n;
            mean = c.mean;
            m2 = c.m2;
            continue;
        }
        const double d = c.mean - mean;
        const long long t = n + c.n;
        mean += d * c.n / t;
        m2 += c.m2 + d * d * (static_cast<double>(n) * c.n / t);
        n = t;
    }
    MiEstimate est;
    est.value = mean;
    est.samples = n;
    est.std_error =
        n > 1 ? std::sqrt(m2 / (static_cast<double>(n) * (n - 1))) : 0.0;
    return est;
}

// iterate all length-N index tuples in place; returns false after the last
bool next_tuple(std::vector<int>& t, int q) {
    for (int a = static_cast<int>(t.size()) - 1; a >= 0; --a) {
        if (++t[a] < q)
            return true;
        t[a] = 0;
    }
    return false;
}

double logsumexp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - mx);
    return mx + std::log(s);
}

template <class PerSample>
MiEstimate run_serial(long long samples, std::uint64_t seed,
                      const EstimatorOptions& opt, PerSample per_sample) {
    if (samples < 1)
        throw std::invalid_argument("samples must be positive");
    const long long chunk = std::max(1, opt.chunk_size);
    const long long nchunks = (samples + chunk - 1) / chunk;
    std::vector<Welford> acc(nchunks);
    for (long long c = 0; c < nchunks; ++c) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        const long long hi = std::min(samples, (c + 1) * chunk);
        for (long long i = c * chunk; i < hi; ++i)
            acc[c].add(per_sample(rng));
    }
    return pooled(acc);
}

} // namespace

MiEstimate mi_cm(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt) {
    const int q = static_cast<int>(c.size());
    const double n0 = noise_variance(snr, cfg, c.average_energy());
    const ChannelRealization unit = unit_gain_channel(cfg);
    const double const_bits = cfg.n_tx * std::log2(static_cast<double>(q));

    auto per_sample = [&](Rng& rng) {
        const ChannelRealization h =
            opt.fixed_unit_gain ? unit : sample_channel(rng, cfg);
        std::vector<int> xi(cfg.n_tx);
        CVec x(cfg.n_tx);
        for (int a = 0; a < cfg.n_tx; ++a) {
            xi[a] = static_cast<int>(rng.pick(q));
            x[a] = c.points[xi[a]];
        }
        const CVec y = transmit(h, x, n0, rng);

        std::vector<double> ll;
        double ll_sent = 0.0;
        std::vector<int> t(cfg.n_tx, 0);
        CVec z(cfg.n_tx);
        do {
            for (int a = 0; a < cfg.n_tx; ++a)
                z[a] = c.points[t[a]];
            ll.push_back(log_likelihood(y, h, z, n0));
            if (t == xi)
                ll_sent = ll.back();
        } while (next_tuple(t, q));
        return const_bits - (logsumexp(ll) - ll_sent) / kLn2;
    };
    return run_serial(samples, seed, opt, per_sample);
}

MiEstimate mi_bicm(const Constellation& c, const MimoConfig& cfg,
                   const SnrPoint& snr, long long samples, std::uint64_t seed,
                   const EstimatorOptions& opt) {
    if (!c.has_labels())
        throw std::invalid_argument("constellation has no labeling");
    const int q = static_cast<int>(c.size());
    const int b = c.label_bits;
    const int m = cfg.n_tx * b;
    const double n0 = noise_variance(snr, cfg, c.average_energy());
    const ChannelRealization unit = unit_gain_channel(cfg);

    auto per_sample = [&](Rng& rng) {
        const ChannelRealization h =
            opt.fixed_unit_gain ? unit : sample_channel(rng, cfg);
        CVec x(cfg.n_tx);
        unsigned sent = 0;
        for (int a = 0; a < cfg.n_tx; ++a) {
            const int k = static_cast<int>(rng.pick(q));
            sent |= c.labels[k] << (a * b);
            x[a] = c.points[k];
        }
        const CVec y = transmit(h, x, n0, rng);

        std::vector<double> ll;
        std::vector<unsigned> lab;
        std::vector<int> t(cfg.n_tx, 0);
        CVec z(cfg.n_tx);
        do {
            unsigned L = 0;
            for (int a = 0; a < cfg.n_tx; ++a) {
                z[a] = c.points[t[a]];
                L |= c.labels[t[a]] << (a * b);
            }
            ll.push_back(log_likelihood(y, h, z, n0));
            lab.push_back(L);
        } while (next_tuple(t, q));

        const double all = logsumexp(ll);
        double v = m;
        std::vector<double> part;
        for (int j = 0; j < m; ++j) {
            part.clear();
            for (std::size_t i = 0; i < ll.size(); ++i)
                if (((lab[i] >> j) & 1u) == ((sent >> j) & 1u))
                    part.push_back(ll[i]);
            v -= (all - logsumexp(part)) / kLn2;
        }
        return v;
    };
    return run_serial(samples, seed, opt, per_sample);
}

MiEstimate mi_ci(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt) {
    const auto [qi, qq] = coordinate_alphabets(c);
    const CoordinateAlphabet u = union_alphabet(qi, qq);
    const Constellation enh = ci_enhanced(c);
    const int qu = static_cast<int>(u.size());
    const int ne = static_cast<int>(enh.size());
    const int positions = 2 * cfg.n_tx;
    const double n0 = noise_variance(snr, cfg, c.average_energy());
    const ChannelRealization unit = unit_gain_channel(cfg);

    bool flat = true;
    for (double p : u.probs)
        flat = flat && std::fabs(p - 1.0 / qu) < 1e-12;
    const bool uniform = flat && is_ci_invariant(c);

    std::vector<double> cdf(qu);
    double cum = 0.0;
    for (int i = 0; i < qu; ++i) {
        cum += u.probs[i];
        cdf[i] = cum;
    }
    cdf[qu - 1] = 1.0;

    auto per_sample = [&](Rng& rng) {
        const ChannelRealization h =
            opt.fixed_unit_gain ? unit : sample_channel(rng, cfg);
        std::vector<int> ki(positions);
        for (int p = 0; p < positions; ++p) {
            if (uniform)
                ki[p] = static_cast<int>(rng.pick(qu));
            else {
                const double r = rng.uniform01();
                int k = 0;
                while (k + 1 < qu && cdf[k] < r)
                    ++k;
                ki[p] = k;
            }
        }
        CVec x(cfg.n_tx);
        for (int a = 0; a < cfg.n_tx; ++a)
            x[a] = cplx(u.values[ki[2 * a + 1]], u.values[ki[2 * a]]);
        const CVec y = transmit(h, x, n0, rng);

        // prior-weighted log likelihood of every enhanced-alphabet tuple,
        // and each tuple's coordinate values for the subset scans below
        std::vector<double> lw;
        std::vector<std::vector<double>> coord(positions);
        std::vector<int> t(cfg.n_tx, 0);
        CVec z(cfg.n_tx);
        do {
            double w = 0.0;
            for (int a = 0; a < cfg.n_tx; ++a) {
                z[a] = enh.points[t[a]];
                coord[2 * a].push_back(z[a].imag());
                coord[2 * a + 1].push_back(z[a].real());
                if (!uniform)
                    w += std::log(enh.probs[t[a]]);
            }
            lw.push_back(log_likelihood(y, h, z, n0) + w);
        } while (next_tuple(t, ne));

        const double all = logsumexp(lw);
        double v = 0.0;
        std::vector<double> part;
        for (int p = 0; p < positions; ++p) {
            const double want = u.values[ki[p]];
            part.clear();
            for (std::size_t i = 0; i < lw.size(); ++i)
                if (std::fabs(coord[p][i] - want) < 1e-9)
                    part.push_back(lw[i]);
            const double bits =
                uniform ? std::log2(static_cast<double>(qu)) : -std::log2(u.probs[ki[p]]);
            v += bits - (all - logsumexp(part)) / kLn2;
        }
        return v;
    };
    return run_serial(samples, seed, opt, per_sample);
}

} // namespace cimi::reference

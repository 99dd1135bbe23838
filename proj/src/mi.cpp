#include "cimi/mi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <omp.h>
#include <stdexcept>

namespace cimi {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr long long kMaxCandidates = 1ll << 24;

int resolve_workers(int requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("CIMI_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0)
            return w;
    }
    return omp_get_num_procs();
}

// Streaming mean/variance; merge() is the pairwise-combine form, applied in
// fixed chunk order so the pooled result is independent of scheduling.
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
    void merge(const Welford& o) {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const long long t = n + o.n;
        mean += d * o.n / t;
        m2 += o.m2 + d * d * (static_cast<double>(n) * o.n / t);
        n = t;
    }
};

// All length-N tuples over a q-ary alphabet, antenna 0 the most significant
// digit of the tuple index.
struct CandidateTable {
    int q = 0;
    int N = 0;
    long long K = 0;
    std::vector<int> idx; // K*N alphabet indices

    void build(int q_, int N_) {
        q = q_;
        N = N_;
        K = 1;
        for (int a = 0; a < N; ++a) {
            K *= q;
            if (K > kMaxCandidates)
                throw std::runtime_error("candidate space too large");
        }
        idx.resize(static_cast<std::size_t>(K) * N);
        for (long long i = 0; i < K; ++i) {
            long long rem = i;
            for (int a = N - 1; a >= 0; --a) {
                idx[i * N + a] = static_cast<int>(rem % q);
                rem /= q;
            }
        }
    }
};

struct Scratch {
    std::vector<cplx> pa; // per-antenna point images at each rx: (a*q+k)*M+r
    std::vector<double> lw;
    CVec x;
    std::vector<int> draw;         // per-antenna or per-position draw indices
    std::vector<double> bucket;    // marginalization accumulators
};

// Log-likelihood of every candidate tuple for one received vector.
void candidate_lls(const CandidateTable& ct, const std::vector<cplx>& pts,
                   const ChannelRealization& h, const CVec& y, double n0,
                   Scratch& s) {
    const int M = h.n_rx;
    s.pa.resize(static_cast<std::size_t>(ct.N) * ct.q * M);
    for (int a = 0; a < ct.N; ++a)
        for (int k = 0; k < ct.q; ++k)
            for (int r = 0; r < M; ++r)
                s.pa[(static_cast<std::size_t>(a) * ct.q + k) * M + r] =
                    h.at(r, a) * pts[k];
    s.lw.resize(ct.K);
    for (long long i = 0; i < ct.K; ++i) {
        const int* ci = &ct.idx[i * ct.N];
        double d2 = 0.0;
        for (int r = 0; r < M; ++r) {
            cplx acc(0.0, 0.0);
            for (int a = 0; a < ct.N; ++a)
                acc += s.pa[(static_cast<std::size_t>(a) * ct.q + ci[a]) * M + r];
            d2 += std::norm(y[r] - acc);
        }
        s.lw[i] = -d2 / n0;
    }
}

template <class Kernel>
MiEstimate run_chunked(const Kernel& kernel, long long samples,
                       std::uint64_t seed, const EstimatorOptions& opt) {
    if (samples < 1)
        throw std::invalid_argument("samples must be positive");
    const long long chunk = std::max(1, opt.chunk_size);
    const long long nchunks = (samples + chunk - 1) / chunk;
    std::vector<Welford> acc(nchunks);
    const int workers = resolve_workers(opt.workers);

#pragma omp parallel num_threads(workers)
    {
        Scratch s;
#pragma omp for schedule(dynamic)
        for (long long c = 0; c < nchunks; ++c) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
            Welford w;
            const long long hi = std::min(samples, (c + 1) * chunk);
            for (long long i = c * chunk; i < hi; ++i)
                w.add(kernel.sample(rng, s));
            acc[c] = w;
        }
    }

    Welford total;
    for (const auto& w : acc)
        total.merge(w);
    MiEstimate est;
    est.value = total.mean;
    est.samples = total.n;
    est.std_error =
        total.n > 1 ? std::sqrt(total.m2 / (static_cast<double>(total.n) *
                                            (total.n - 1)))
                    : 0.0;
    return est;
}

struct CmKernel {
    MimoConfig cfg;
    double n0 = 0.0;
    std::vector<cplx> pts;
    CandidateTable ct;
    bool fixed_gain = false;
    ChannelRealization unit;
    double const_bits = 0.0; // N log2 q

    double sample(Rng& rng, Scratch& s) const {
        const ChannelRealization h =
            fixed_gain ? unit : sample_channel(rng, cfg);
        s.x.resize(cfg.n_tx);
        long long ix = 0;
        for (int a = 0; a < cfg.n_tx; ++a) {
            const int k = static_cast<int>(rng.pick(ct.q));
            ix = ix * ct.q + k;
            s.x[a] = pts[k];
        }
        const CVec y = transmit(h, s.x, n0, rng);
        candidate_lls(ct, pts, h, y, n0, s);
        const double mx = *std::max_element(s.lw.begin(), s.lw.end());
        double sum = 0.0;
        for (long long i = 0; i < ct.K; ++i)
            sum += std::exp(s.lw[i] - mx);
        return const_bits - (std::log(sum) + (mx - s.lw[ix])) / kLn2;
    }
};

struct BicmKernel {
    MimoConfig cfg;
    double n0 = 0.0;
    std::vector<cplx> pts;
    CandidateTable ct;
    bool fixed_gain = false;
    ChannelRealization unit;
    int bits_per_sym = 0;
    int m = 0; // total bit positions
    std::vector<unsigned> labels;
    std::vector<unsigned> clab; // concatenated label per candidate

    double sample(Rng& rng, Scratch& s) const {
        const ChannelRealization h =
            fixed_gain ? unit : sample_channel(rng, cfg);
        s.x.resize(cfg.n_tx);
        unsigned tlab = 0;
        for (int a = 0; a < cfg.n_tx; ++a) {
            const int k = static_cast<int>(rng.pick(ct.q));
            tlab |= labels[k] << (a * bits_per_sym);
            s.x[a] = pts[k];
        }
        const CVec y = transmit(h, s.x, n0, rng);
        candidate_lls(ct, pts, h, y, n0, s);
        const double mx = *std::max_element(s.lw.begin(), s.lw.end());
        s.bucket.assign(static_cast<std::size_t>(m) * 2, 0.0);
        double total = 0.0;
        for (long long i = 0; i < ct.K; ++i) {
            const double w = std::exp(s.lw[i] - mx);
            total += w;
            const unsigned L = clab[i];
            for (int j = 0; j < m; ++j)
                s.bucket[2 * j + ((L >> j) & 1u)] += w;
        }
        const double lt = std::log(total);
        double v = m;
        for (int j = 0; j < m; ++j)
            v -= (lt - std::log(s.bucket[2 * j + ((tlab >> j) & 1u)])) / kLn2;
        return v;
    }
};

struct CiKernel {
    MimoConfig cfg;
    double n0 = 0.0;
    std::vector<cplx> pts; // enhanced points, index e = ir * qu + ii
    CandidateTable ct;
    bool fixed_gain = false;
    ChannelRealization unit;
    int qu = 0;
    int positions = 0; // 2N
    bool uniform = false;
    std::vector<double> u_values;
    std::vector<double> u_cdf;
    std::vector<double> neglog2p;  // per union value
    std::vector<double> logp_cand; // prior log weight per candidate
    std::vector<int> cidx;         // K * positions coordinate value indices

    int draw_coord(Rng& rng) const {
        if (uniform)
            return static_cast<int>(rng.pick(qu));
        const double r = rng.uniform01();
        int k = 0;
        while (k + 1 < qu && u_cdf[k] < r)
            ++k;
        return k;
    }

    double sample(Rng& rng, Scratch& s) const {
        const ChannelRealization h =
            fixed_gain ? unit : sample_channel(rng, cfg);
        s.draw.resize(positions);
        for (int p = 0; p < positions; ++p)
            s.draw[p] = draw_coord(rng);
        s.x.resize(cfg.n_tx);
        for (int a = 0; a < cfg.n_tx; ++a)
            s.x[a] = cplx(u_values[s.draw[2 * a + 1]],
                          u_values[s.draw[2 * a]]);
        const CVec y = transmit(h, s.x, n0, rng);
        candidate_lls(ct, pts, h, y, n0, s);
        if (!uniform)
            for (long long i = 0; i < ct.K; ++i)
                s.lw[i] += logp_cand[i];
        const double mx = *std::max_element(s.lw.begin(), s.lw.end());
        s.bucket.assign(static_cast<std::size_t>(positions) * qu, 0.0);
        double total = 0.0;
        for (long long i = 0; i < ct.K; ++i) {
            const double w = std::exp(s.lw[i] - mx);
            total += w;
            const int* ci = &cidx[i * positions];
            for (int p = 0; p < positions; ++p)
                s.bucket[static_cast<std::size_t>(p) * qu + ci[p]] += w;
        }
        const double lt = std::log(total);
        double v = 0.0;
        for (int p = 0; p < positions; ++p) {
            const int k = s.draw[p];
            v += neglog2p[k] -
                 (lt - std::log(s.bucket[static_cast<std::size_t>(p) * qu + k])) /
                     kLn2;
        }
        return v;
    }
};

CiKernel make_ci_kernel(const Constellation& c, const MimoConfig& cfg,
                        const SnrPoint& snr, const EstimatorOptions& opt) {
    const auto [qi, qq] = coordinate_alphabets(c);
    const CoordinateAlphabet u = union_alphabet(qi, qq);
    const Constellation enh = ci_enhanced(c);

    CiKernel k;
    k.cfg = cfg;
    k.n0 = noise_variance(snr, cfg, c.average_energy());
    k.pts = enh.points;
    k.ct.build(static_cast<int>(enh.size()), cfg.n_tx);
    k.fixed_gain = opt.fixed_unit_gain;
    if (k.fixed_gain)
        k.unit = unit_gain_channel(cfg);
    k.qu = static_cast<int>(u.size());
    k.positions = 2 * cfg.n_tx;
    bool flat = true;
    for (double p : u.probs)
        flat = flat && std::fabs(p - 1.0 / k.qu) < 1e-12;
    k.uniform = flat && is_ci_invariant(c);
    k.u_values = u.values;
    k.u_cdf.resize(k.qu);
    double cum = 0.0;
    for (int i = 0; i < k.qu; ++i) {
        cum += u.probs[i];
        k.u_cdf[i] = cum;
    }
    k.u_cdf[k.qu - 1] = 1.0;
    k.neglog2p.resize(k.qu);
    for (int i = 0; i < k.qu; ++i)
        k.neglog2p[i] = k.uniform ? std::log2(static_cast<double>(k.qu))
                                  : -std::log2(u.probs[i]);

    // per-candidate coordinate indices and prior weights; enhanced point
    // e = ir*qu + ii, even positions carry the imaginary coordinate
    k.cidx.resize(static_cast<std::size_t>(k.ct.K) * k.positions);
    k.logp_cand.assign(k.ct.K, 0.0);
    std::vector<double> logp_u(k.qu);
    for (int i = 0; i < k.qu; ++i)
        logp_u[i] = std::log(u.probs[i]);
    for (long long i = 0; i < k.ct.K; ++i) {
        for (int a = 0; a < cfg.n_tx; ++a) {
            const int e = k.ct.idx[i * cfg.n_tx + a];
            const int ir = e / k.qu;
            const int ii = e % k.qu;
            k.cidx[i * k.positions + 2 * a] = ii;
            k.cidx[i * k.positions + 2 * a + 1] = ir;
            if (!k.uniform)
                k.logp_cand[i] += logp_u[ir] + logp_u[ii];
        }
    }
    return k;
}

} // namespace

MiEstimate mi_cm(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt) {
    CmKernel k;
    k.cfg = cfg;
    k.n0 = noise_variance(snr, cfg, c.average_energy());
    k.pts = c.points;
    k.ct.build(static_cast<int>(c.size()), cfg.n_tx);
    k.fixed_gain = opt.fixed_unit_gain;
    if (k.fixed_gain)
        k.unit = unit_gain_channel(cfg);
    k.const_bits = cfg.n_tx * std::log2(static_cast<double>(c.size()));
    return run_chunked(k, samples, seed, opt);
}

MiEstimate mi_bicm(const Constellation& c, const MimoConfig& cfg,
                   const SnrPoint& snr, long long samples, std::uint64_t seed,
                   const EstimatorOptions& opt) {
    if (!c.has_labels())
        throw std::invalid_argument("constellation has no labeling");
    BicmKernel k;
    k.cfg = cfg;
    k.n0 = noise_variance(snr, cfg, c.average_energy());
    k.pts = c.points;
    k.ct.build(static_cast<int>(c.size()), cfg.n_tx);
    k.fixed_gain = opt.fixed_unit_gain;
    if (k.fixed_gain)
        k.unit = unit_gain_channel(cfg);
    k.bits_per_sym = c.label_bits;
    k.m = cfg.n_tx * c.label_bits;
    k.labels = c.labels;
    k.clab.resize(k.ct.K);
    for (long long i = 0; i < k.ct.K; ++i) {
        unsigned L = 0;
        for (int a = 0; a < cfg.n_tx; ++a)
            L |= c.labels[k.ct.idx[i * cfg.n_tx + a]] << (a * c.label_bits);
        k.clab[i] = L;
    }
    return run_chunked(k, samples, seed, opt);
}

MiEstimate mi_ci(const Constellation& c, const MimoConfig& cfg,
                 const SnrPoint& snr, long long samples, std::uint64_t seed,
                 const EstimatorOptions& opt) {
    return run_chunked(make_ci_kernel(c, cfg, snr, opt), samples, seed, opt);
}

MiEstimate mi_ci_rotated(const Constellation& c, double phi,
                         const MimoConfig& cfg, const SnrPoint& snr,
                         long long samples, std::uint64_t seed,
                         const EstimatorOptions& opt) {
    return mi_ci(rotate(c, phi), cfg, snr, samples, seed, opt);
}

std::vector<MiEstimate> run_sweep(const SchemeSpec& spec,
                                  const std::vector<SnrPoint>& grid,
                                  long long samples, std::uint64_t master_seed,
                                  int workers) {
    if (grid.empty())
        throw std::invalid_argument("empty snr grid");
    EstimatorOptions opt;
    opt.workers = workers;
    std::vector<MiEstimate> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::uint64_t seed = derive_seed(master_seed, i);
        switch (spec.scheme) {
        case Scheme::cm:
            out.push_back(mi_cm(spec.base, spec.cfg, grid[i], samples, seed, opt));
            break;
        case Scheme::bicm:
            out.push_back(mi_bicm(spec.base, spec.cfg, grid[i], samples, seed, opt));
            break;
        case Scheme::ci:
            out.push_back(mi_ci(spec.base, spec.cfg, grid[i], samples, seed, opt));
            break;
        case Scheme::ci_rotated:
            out.push_back(mi_ci_rotated(spec.base, spec.rotation_rad, spec.cfg,
                                        grid[i], samples, seed, opt));
            break;
        }
    }
    return out;
}

double scheme_ceiling_bits(Scheme scheme, const Constellation& c,
                           const MimoConfig& cfg) {
    switch (scheme) {
    case Scheme::cm:
        return cfg.n_tx * std::log2(static_cast<double>(c.size()));
    case Scheme::bicm:
        return static_cast<double>(cfg.n_tx) * c.label_bits;
    case Scheme::ci:
    case Scheme::ci_rotated: {
        const auto [qi, qq] = coordinate_alphabets(c);
        return 2.0 * cfg.n_tx * entropy_bits(union_alphabet(qi, qq).probs);
    }
    }
    return 0.0;
}

} // namespace cimi

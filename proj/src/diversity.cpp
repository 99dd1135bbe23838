#include "cimi/diversity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace cimi {

namespace {

constexpr double kRankTol = 1e-10; // eigenvalue threshold relative to trace
constexpr double kCoordTol = 1e-9;

using EMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                           Eigen::Dynamic, Eigen::RowMajor>;

} // namespace

std::vector<cplx> difference_outer(const CVec& ck, const CVec& ek) {
    if (ck.size() != ek.size())
        throw std::invalid_argument("length mismatch");
    const int n = static_cast<int>(ck.size());
    std::vector<cplx> C(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const cplx di = ck[i] - ek[i];
        for (int j = 0; j < n; ++j)
            C[i * n + j] = di * std::conj(ck[j] - ek[j]);
    }
    return C;
}

RankOneDecomposition rank_one_decompose(const std::vector<cplx>& C, int n) {
    Eigen::Map<const EMat> m(C.data(), n, n);
    const double trace = m.trace().real();
    if (!(trace > 0.0))
        throw std::runtime_error("zero difference");

    Eigen::SelfAdjointEigenSolver<EMat> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");

    RankOneDecomposition out;
    out.d.resize(n);
    int above = 0;
    for (int i = 0; i < n; ++i) {
        out.d[i] = es.eigenvalues()(i);
        if (std::fabs(out.d[i]) > kRankTol * trace) {
            ++above;
            out.i0 = i;
        }
    }
    if (above == 0)
        throw std::runtime_error("zero difference");
    if (above > 1)
        throw std::runtime_error("rank > 1");

    out.v.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.v[i * n + j] = es.eigenvectors()(i, j);
    return out;
}

CVec equivalent_channels(const CVec& omega, const std::vector<cplx>& V,
                         int n) {
    if (static_cast<int>(omega.size()) != n ||
        static_cast<int>(V.size()) != n * n)
        throw std::invalid_argument("dimension mismatch");
    CVec beta(n, cplx(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < n; ++i)
            acc += omega[i] * V[i * n + j];
        beta[j] = acc;
    }
    return beta;
}

DiversityReport verify_theorem1(Rng& rng, const MimoConfig& cfg,
                                const Constellation& c, long long trials) {
    if (trials < 1)
        throw std::invalid_argument("trials must be positive");
    const int n = cfg.n_tx;
    const int q = static_cast<int>(c.size());
    DiversityReport rep;
    rep.records.reserve(trials);

    for (long long t = 0; t < trials; ++t) {
        CVec omega(n);
        for (auto& w : omega)
            w = rng.cgauss(1.0);
        CVec ck(n), ek(n);
        bool same = true;
        for (int i = 0; i < n; ++i) {
            const int a = static_cast<int>(rng.pick(q));
            const int b = static_cast<int>(rng.pick(q));
            ck[i] = c.points[a];
            ek[i] = c.points[b];
            same = same && a == b;
        }

        TrialRecord rec;
        if (same) {
            rec.applicable = false;
            rep.records.push_back(rec);
            ++rep.skipped;
            continue;
        }

        const auto C = difference_outer(ck, ek);
        double trace = 0.0;
        for (int i = 0; i < n; ++i)
            trace += C[i * n + i].real();
        rec.trace = trace;

        try {
            const auto ro = rank_one_decompose(C, n);
            rec.rank_ok = true;
            const CVec beta = equivalent_channels(omega, ro.v, n);

            // omega C omega^H directly
            cplx quad(0.0, 0.0);
            for (int i = 0; i < n; ++i) {
                cplx row(0.0, 0.0);
                for (int j = 0; j < n; ++j)
                    row += C[i * n + j] * std::conj(omega[j]);
                quad += omega[i] * row;
            }
            const double lhs = quad.real();
            const double rhs = std::norm(beta[ro.i0]) * trace;

            double omega2 = 0.0;
            for (const auto& w : omega)
                omega2 += std::norm(w);
            rec.identity_residual =
                std::fabs(lhs - rhs) / std::max(trace * omega2, 1e-300);
        } catch (const std::runtime_error&) {
            rec.rank_ok = false;
            rec.identity_residual = 1.0;
        }

        rep.max_residual = std::max(rep.max_residual, rec.identity_residual);
        if (rec.rank_ok && rec.identity_residual < 1e-9)
            ++rep.passed;
        else
            ++rep.failed;

        for (int i = 0; i < n; ++i) {
            const cplx d = ck[i] - ek[i];
            if (std::fabs(d.real()) > kCoordTol)
                ++rep.coordinate_hamming;
            if (std::fabs(d.imag()) > kCoordTol)
                ++rep.coordinate_hamming;
        }
        rep.records.push_back(rec);
    }
    return rep;
}

double pairwise_exponent(const CodewordPair& pair,
                         const std::vector<ChannelRealization>& fading) {
    if (pair.c.size() != pair.e.size() || pair.c.size() != fading.size())
        throw std::invalid_argument("length mismatch");
    double d2 = 0.0;
    for (std::size_t k = 0; k < pair.c.size(); ++k) {
        const auto& h = fading[k];
        const int n = h.n_tx;
        if (static_cast<int>(pair.c[k].size()) != n ||
            static_cast<int>(pair.e[k].size()) != n)
            throw std::invalid_argument("length mismatch");
        for (int j = 0; j < h.n_rx; ++j) {
            cplx acc(0.0, 0.0);
            for (int i = 0; i < n; ++i)
                acc += h.at(j, i) * (pair.c[k][i] - pair.e[k][i]);
            d2 += std::norm(acc);
        }
    }
    return d2;
}

long long coordinate_hamming(const CodewordPair& pair) {
    if (pair.c.size() != pair.e.size())
        throw std::invalid_argument("length mismatch");
    long long count = 0;
    for (std::size_t k = 0; k < pair.c.size(); ++k) {
        if (pair.c[k].size() != pair.e[k].size())
            throw std::invalid_argument("length mismatch");
        for (std::size_t i = 0; i < pair.c[k].size(); ++i) {
            const cplx d = pair.c[k][i] - pair.e[k][i];
            if (std::fabs(d.real()) > kCoordTol)
                ++count;
            if (std::fabs(d.imag()) > kCoordTol)
                ++count;
        }
    }
    return count;
}

} // namespace cimi

#include <cmath>
#include <cstdlib>

#include "cimi/mi.hpp"
#include "cimi/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cimi;

namespace {

// |a - b| within n standard errors of the combined estimate
bool within_sigma(const MiEstimate& a, const MiEstimate& b, double n) {
    const double s = std::hypot(a.std_error, b.std_error);
    return std::fabs(a.value - b.value) <= n * s;
}

} // namespace

TEST_CASE("estimates are reproducible and seed-sensitive") {
    const auto c = make_psk(4);
    const MimoConfig cfg{2, 2};
    const SnrPoint snr{5.0};
    const auto a = mi_cm(c, cfg, snr, 1024, 7);
    const auto b = mi_cm(c, cfg, snr, 1024, 7);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.samples == 1024);
    const auto d = mi_cm(c, cfg, snr, 1024, 8);
    CHECK(d.value != a.value);
}

TEST_CASE("worker count does not change the result") {
    const auto c = make_qam(16);
    const MimoConfig cfg{2, 1};
    const SnrPoint snr{8.0};
    EstimatorOptions one, four;
    one.workers = 1;
    four.workers = 4;
    for (auto fn : {mi_cm, mi_bicm, mi_ci}) {
        const auto a = fn(c, cfg, snr, 1536, 3, one);
        const auto b = fn(c, cfg, snr, 1536, 3, four);
        CHECK(a.value == b.value);
        CHECK(a.std_error == b.std_error);
    }
}

TEST_CASE("parallel kernels match the serial reference") {
    EstimatorOptions opt;
    opt.workers = 3;
    const SnrPoint snr{5.0};

    SUBCASE("cm, 2x2 4psk") {
        const auto a = mi_cm(make_psk(4), MimoConfig{2, 2}, snr, 2048, 11, opt);
        const auto b = reference::mi_cm(make_psk(4), MimoConfig{2, 2}, snr,
                                        2048, 11, opt);
        CHECK(std::fabs(a.value - b.value) < 1e-9);
        CHECK(std::fabs(a.std_error - b.std_error) < 1e-9);
    }
    SUBCASE("bicm, 2x2 16qam") {
        const auto a =
            mi_bicm(make_qam(16), MimoConfig{2, 2}, snr, 1024, 12, opt);
        const auto b = reference::mi_bicm(make_qam(16), MimoConfig{2, 2}, snr,
                                          1024, 12, opt);
        CHECK(std::fabs(a.value - b.value) < 1e-9);
        CHECK(std::fabs(a.std_error - b.std_error) < 1e-9);
    }
    SUBCASE("ci on a ci-invariant set, 2x1 4psk") {
        const auto a = mi_ci(make_psk(4), MimoConfig{2, 1}, snr, 2048, 13, opt);
        const auto b = reference::mi_ci(make_psk(4), MimoConfig{2, 1}, snr,
                                        2048, 13, opt);
        CHECK(std::fabs(a.value - b.value) < 1e-9);
        CHECK(std::fabs(a.std_error - b.std_error) < 1e-9);
    }
    SUBCASE("ci with a non-uniform coordinate prior, 1x1 32qam") {
        const auto a =
            mi_ci(make_qam(32), MimoConfig{1, 1}, snr, 1024, 14, opt);
        const auto b = reference::mi_ci(make_qam(32), MimoConfig{1, 1}, snr,
                                        1024, 14, opt);
        CHECK(std::fabs(a.value - b.value) < 1e-9);
        CHECK(std::fabs(a.std_error - b.std_error) < 1e-9);
    }
    SUBCASE("ci on a non-invariant uniform-marginal set, 1x2 8psk") {
        const auto a =
            mi_ci(make_psk(8), MimoConfig{1, 2}, snr, 1024, 15, opt);
        const auto b = reference::mi_ci(make_psk(8), MimoConfig{1, 2}, snr,
                                        1024, 15, opt);
        CHECK(std::fabs(a.value - b.value) < 1e-9);
        CHECK(std::fabs(a.std_error - b.std_error) < 1e-9);
    }
}

TEST_CASE("no-fading estimates match gauss-hermite quadrature") {
    EstimatorOptions opt;
    opt.fixed_unit_gain = true;
    const MimoConfig cfg{1, 1};
    const long long n = 20000;
    for (const auto& c : {make_psk(2), make_psk(4), make_qam(16)}) {
        for (double db : {0.0, 8.0}) {
            const SnrPoint snr{db};
            const double n0 = noise_variance(snr, cfg, c.average_energy());
            const double exact = oracle::awgn_mi_bits(c.points, c.probs, n0);
            const auto est = mi_cm(c, cfg, snr, n, 5, opt);
            CHECK(std::fabs(est.value - exact) <
                  std::max(0.01, 4.0 * est.std_error));
        }
    }
}

TEST_CASE("no-fading per-bit estimates match quadrature") {
    EstimatorOptions opt;
    opt.fixed_unit_gain = true;
    const MimoConfig cfg{1, 1};
    for (const auto& c : {make_psk(4), make_qam(16)}) {
        for (double db : {-5.0, 0.0, 8.0}) {
            const SnrPoint snr{db};
            const double n0 = noise_variance(snr, cfg, c.average_energy());
            const double exact = oracle::awgn_bicm_mi_bits(
                c.points, c.labels, c.label_bits, n0);
            const auto est = mi_bicm(c, cfg, snr, 40000, 6, opt);
            CHECK(std::fabs(est.value - exact) <
                  std::max(0.012, 4.0 * est.std_error));
            // the per-bit value never exceeds the joint one
            CHECK(exact <=
                  oracle::awgn_mi_bits(c.points, c.probs, n0) + 1e-9);
        }
    }
}

TEST_CASE("estimates respect zero and ceiling limits") {
    const auto c = make_psk(4);
    const MimoConfig cfg{2, 2};
    // very low snr: mutual information near zero
    const auto lo = mi_cm(c, cfg, SnrPoint{-40.0}, 4000, 2);
    CHECK(lo.value < 0.05);
    CHECK(lo.value > -4.0 * lo.std_error - 1e-9);
    // very high snr: saturates at the input entropy
    const auto hi = mi_cm(c, cfg, SnrPoint{40.0}, 1000, 2);
    CHECK(hi.value == doctest::Approx(4.0).epsilon(1e-6));
    const auto hib = mi_bicm(c, cfg, SnrPoint{40.0}, 1000, 2);
    CHECK(hib.value == doctest::Approx(4.0).epsilon(1e-6));
    const auto hic = mi_ci(c, cfg, SnrPoint{40.0}, 1000, 2);
    CHECK(hic.value == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("ci ceiling is the coordinate entropy, not the point count") {
    // one antenna, cross constellation: two coordinates per use, each worth
    // the union-marginal entropy of ~2.5613 bits
    const auto c = make_qam(32);
    const double ceiling = scheme_ceiling_bits(Scheme::ci, c, MimoConfig{1, 1});
    CHECK(ceiling == doctest::Approx(5.122556).epsilon(1e-4));
    const auto hi = mi_ci(c, MimoConfig{1, 1}, SnrPoint{50.0}, 3000, 6);
    CHECK(std::fabs(hi.value - ceiling) < std::max(4.0 * hi.std_error, 1e-6));
    CHECK(hi.value > 5.0 + 3.0 * hi.std_error); // beats log2(32)
}

TEST_CASE("scheme ceilings") {
    CHECK(scheme_ceiling_bits(Scheme::cm, make_psk(4), MimoConfig{2, 2}) ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(scheme_ceiling_bits(Scheme::bicm, make_qam(16), MimoConfig{2, 1}) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(scheme_ceiling_bits(Scheme::ci, make_qam(16), MimoConfig{2, 2}) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(scheme_ceiling_bits(Scheme::ci, make_qam(32), MimoConfig{2, 2}) ==
          doctest::Approx(10.245112).epsilon(1e-4));
    // bpsk spreads one bit over two coordinate slots
    CHECK(scheme_ceiling_bits(Scheme::ci, make_psk(2), MimoConfig{1, 1}) ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("bicm never exceeds cm, ci matches bicm for gray 4psk") {
    const MimoConfig cfg{1, 1};
    const SnrPoint snr{10.0};
    const auto cm = mi_cm(make_qam(16), cfg, snr, 20000, 9);
    const auto bicm = mi_bicm(make_qam(16), cfg, snr, 20000, 9);
    CHECK(bicm.value <= cm.value + 3.0 * std::hypot(cm.std_error,
                                                    bicm.std_error));

    const auto ci = mi_ci(make_psk(4), cfg, snr, 20000, 10);
    const auto bi = mi_bicm(make_psk(4), cfg, snr, 20000, 10);
    CHECK(within_sigma(ci, bi, 3.5));
}

TEST_CASE("zero rotation leaves the ci estimate unchanged") {
    const auto c = make_psk(4);
    const MimoConfig cfg{2, 1};
    const SnrPoint snr{6.0};
    const auto a = mi_ci(c, cfg, snr, 1024, 4);
    const auto b = mi_ci_rotated(c, 0.0, cfg, snr, 1024, 4);
    CHECK(a.value == b.value);

    // a rotation must not change the cm value beyond noise (circular noise)
    const auto r = mi_cm(rotate(c, 0.4), cfg, snr, 8000, 4);
    const auto u = mi_cm(c, cfg, snr, 8000, 4);
    CHECK(within_sigma(r, u, 4.0));
}

TEST_CASE("sweeps reuse per-point seeds, independent of worker count") {
    SchemeSpec spec;
    spec.scheme = Scheme::cm;
    spec.base = make_psk(4);
    spec.cfg = MimoConfig{1, 2};
    const std::vector<SnrPoint> grid{{0.0}, {5.0}, {10.0}};
    const auto rows1 = run_sweep(spec, grid, 512, 77, 1);
    const auto rows4 = run_sweep(spec, grid, 512, 77, 4);
    REQUIRE(rows1.size() == 3);
    REQUIRE(rows4.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows1[i].value == rows4[i].value);
        EstimatorOptions opt;
        opt.workers = 2;
        const auto direct = mi_cm(spec.base, spec.cfg, grid[i], 512,
                                  derive_seed(77, i), opt);
        CHECK(rows1[i].value == direct.value);
    }
    CHECK_THROWS_WITH_AS(run_sweep(spec, {}, 512, 77, 1), "empty snr grid",
                         std::invalid_argument);
}

TEST_CASE("invalid estimator inputs are rejected") {
    CHECK_THROWS_WITH_AS(
        mi_cm(make_psk(4), MimoConfig{1, 1}, SnrPoint{0.0}, 0, 1),
        "samples must be positive", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        mi_bicm(make_psk(3), MimoConfig{1, 1}, SnrPoint{0.0}, 100, 1),
        "constellation has no labeling", std::invalid_argument);
    // 8^9 candidate tuples exceed the enumeration guard
    CHECK_THROWS_WITH_AS(
        mi_cm(make_psk(8), MimoConfig{9, 1}, SnrPoint{0.0}, 100, 1),
        "candidate space too large", std::runtime_error);
}

// Timing harness: parallel estimator kernels against the single-threaded
// reference implementations, same seeds, with value agreement printed so a
// speedup never hides a numerical regression.
//
// usage: bench_mi [samples] [workers]   (workers 0 = all cores)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cimi/mi.hpp"

using namespace cimi;

namespace {

using Fn = MiEstimate (*)(const Constellation&, const MimoConfig&,
                          const SnrPoint&, long long, std::uint64_t,
                          const EstimatorOptions&);

struct Case {
    const char* name;
    Fn fast;
    Fn slow;
    Constellation c;
    MimoConfig cfg;
};

template <typename F> double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    long long samples = 4096;
    int workers = 0;
    if (argc > 1)
        samples = std::atoll(argv[1]);
    if (argc > 2)
        workers = std::atoi(argv[2]);
    if (samples <= 0) {
        std::fprintf(stderr, "samples must be positive\n");
        return 1;
    }

    const SnrPoint snr{10.0};
    const Case cases[] = {
        {"cm    qam16 2x2", &mi_cm, &reference::mi_cm, make_qam(16), {2, 2}},
        {"bicm  qam16 2x2", &mi_bicm, &reference::mi_bicm, make_qam(16),
         {2, 2}},
        {"ci    qam16 2x2", &mi_ci, &reference::mi_ci, make_qam(16), {2, 2}},
        {"ci    qam32 1x2", &mi_ci, &reference::mi_ci, make_qam(32), {1, 2}},
    };

    std::printf("samples per case: %lld\n", samples);
    std::printf("%-18s %12s %12s %9s %12s\n", "case", "reference[s]",
                "parallel[s]", "speedup", "|delta mi|");
    for (const auto& k : cases) {
        EstimatorOptions par;
        par.workers = workers;
        EstimatorOptions one;
        one.workers = 1;

        MiEstimate ref, fast;
        const double ts =
            timed([&] { ref = k.slow(k.c, k.cfg, snr, samples, 7, one); });
        const double tp =
            timed([&] { fast = k.fast(k.c, k.cfg, snr, samples, 7, par); });
        std::printf("%-18s %12.3f %12.3f %8.2fx %12.3e\n", k.name, ts, tp,
                    ts / tp, std::fabs(ref.value - fast.value));
        if (std::fabs(ref.value - fast.value) > 1e-9) {
            std::fprintf(stderr, "value mismatch on %s\n", k.name);
            return 1;
        }
    }
    return 0;
}

// Command line front end: mutual information sweeps to CSV, constellation
// reports, and the equivalent-channel identity check.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cimi/diversity.hpp"
#include "cimi/mi.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

cimi::Constellation make_by_name(const std::string& name) {
    if (name == "qam4")
        return cimi::make_qam(4);
    if (name == "qam16")
        return cimi::make_qam(16);
    if (name == "qam32")
        return cimi::make_qam(32);
    if (name == "qam64")
        return cimi::make_qam(64);
    if (name == "psk4")
        return cimi::make_psk(4);
    if (name == "psk8")
        return cimi::make_psk(8);
    throw std::invalid_argument("unknown constellation: " + name);
}

cimi::Scheme scheme_by_name(const std::string& name) {
    if (name == "cm")
        return cimi::Scheme::cm;
    if (name == "bicm")
        return cimi::Scheme::bicm;
    if (name == "ci")
        return cimi::Scheme::ci;
    return cimi::Scheme::ci_rotated;
}

struct SweepConfig {
    std::string scheme;
    std::string constellation;
    int n_tx = 1;
    int n_rx = 1;
    double snr_start_db = -5.0;
    double snr_stop_db = 30.0;
    double snr_step_db = 1.0;
    long long samples = 20000;
    std::uint64_t seed = 1;
    double rotation_deg = 0.0;
    int workers = 0; // 0: CIMI_WORKERS env var, else all cores
    std::string output = "-";
};

// Applies a flat key=value file to the sweep subcommand. Values given on the
// command line keep priority; unknown keys are an error. Lines may be blank
// or start with '#'.
int apply_config_file(CLI::App* mi, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "error: cannot read config file %s\n",
                     path.c_str());
        return 1;
    }
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::vector<CLI::Option*> pending;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: %s:%d: expected key=value\n",
                         path.c_str(), lineno);
            return 1;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        CLI::Option* op =
            key == "config" ? nullptr : mi->get_option_no_throw("--" + key);
        if (op == nullptr) {
            std::fprintf(stderr, "error: %s:%d: unknown config key '%s'\n",
                         path.c_str(), lineno, key.c_str());
            return 1;
        }
        if (op->count() > 0)
            continue; // command line wins
        op->add_result(value);
        pending.push_back(op);
    }
    try {
        for (auto* op : pending)
            op->run_callback();
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", path.c_str(), e.what());
        return 1;
    }
    return 0;
}

int run_mi(const SweepConfig& cfg, bool rotation_given) {
    if (cfg.scheme.empty() || cfg.constellation.empty()) {
        std::fprintf(stderr, "error: --scheme and --constellation are "
                             "required (flag or config file)\n");
        return 1;
    }
    if (cfg.scheme != "ci-rotated" && rotation_given) {
        std::fprintf(stderr, "error: rotation_deg only applies to scheme ci-rotated\n");
        return 1;
    }
    if (cfg.snr_stop_db < cfg.snr_start_db) {
        std::fprintf(stderr, "error: snr_stop_db is below snr_start_db\n");
        return 1;
    }

    cimi::SchemeSpec spec;
    spec.scheme = scheme_by_name(cfg.scheme);
    spec.base = make_by_name(cfg.constellation);
    spec.cfg = {cfg.n_tx, cfg.n_rx};
    spec.rotation_rad = cfg.rotation_deg * kPi / 180.0;
    if (spec.scheme == cimi::Scheme::bicm && !spec.base.has_labels()) {
        std::fprintf(stderr, "error: bicm needs a labeled constellation\n");
        return 1;
    }

    const int rows = static_cast<int>(std::floor(
                         (cfg.snr_stop_db - cfg.snr_start_db) / cfg.snr_step_db +
                         1e-9)) +
                     1;
    std::vector<cimi::SnrPoint> grid;
    grid.reserve(rows);
    for (int i = 0; i < rows; ++i)
        grid.push_back({cfg.snr_start_db + i * cfg.snr_step_db});

    const auto curve =
        cimi::run_sweep(spec, grid, cfg.samples, cfg.seed, cfg.workers);

    std::FILE* f = stdout;
    if (cfg.output != "-" && !cfg.output.empty()) {
        f = std::fopen(cfg.output.c_str(), "wb");
        if (!f) {
            std::fprintf(stderr, "error: cannot write %s\n", cfg.output.c_str());
            return 2;
        }
    }
    std::fprintf(f, "snr_db,mi_bits,std_error,samples\n");
    for (int i = 0; i < rows; ++i)
        std::fprintf(f, "%.6g,%.6g,%.6g,%lld\n", grid[i].es_over_n0_db,
                     curve[i].value, curve[i].std_error, curve[i].samples);
    if (f != stdout)
        std::fclose(f);
    return 0;
}

void print_constellation(const cimi::Constellation& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::printf("%3zu  % .6f  % .6f  %.6g", i, c.points[i].real(),
                    c.points[i].imag(), c.probs[i]);
        if (c.has_labels()) {
            std::printf("  ");
            for (int b = c.label_bits - 1; b >= 0; --b)
                std::printf("%u", (c.labels[i] >> b) & 1u);
        }
        std::printf("\n");
    }
}

int run_constellation(const std::string& name, double rotate_deg,
                      bool enhanced) {
    cimi::Constellation c = make_by_name(name);
    if (rotate_deg != 0.0)
        c = cimi::rotate(c, rotate_deg * kPi / 180.0);
    const auto [qi, qq] = cimi::coordinate_alphabets(c);
    const auto u = cimi::union_alphabet(qi, qq);
    const auto m = cimi::ci_enhanced(c);

    std::printf("constellation %s (%zu points)\n", name.c_str(), c.size());
    std::printf("index  re  im  prob  label\n");
    print_constellation(c);
    auto print_alpha = [](const char* tag, const cimi::CoordinateAlphabet& a) {
        std::printf("%s:", tag);
        for (std::size_t i = 0; i < a.size(); ++i)
            std::printf(" %.6g(p=%.6g)", a.values[i], a.probs[i]);
        std::printf("\n");
    };
    print_alpha("in-phase alphabet", qi);
    print_alpha("quadrature alphabet", qq);
    print_alpha("union alphabet", u);
    std::printf("q_union: %zu\n", u.size());
    std::printf("ci invariant: %s\n", cimi::is_ci_invariant(c) ? "yes" : "no");
    std::printf("entropy: %.6g bits\n", cimi::entropy_bits(c.probs));
    std::printf("enhanced points: %zu\n", m.size());
    std::printf("enhanced entropy: %.6g bits\n", cimi::entropy_bits(m.probs));
    if (c.has_labels())
        std::printf("gray penalty: %lld/%lld\n", cimi::gray_penalty(c).num,
                    cimi::gray_penalty(c).den);
    if (enhanced) {
        std::printf("enhanced constellation:\n");
        print_constellation(m);
    }
    return 0;
}

int run_diversity(int n_tx, int n_rx, const std::string& name,
                  long long trials, std::uint64_t seed) {
    cimi::Rng rng(seed);
    const cimi::Constellation c = make_by_name(name);
    const auto rep =
        cimi::verify_theorem1(rng, {n_tx, n_rx}, c, trials);
    std::printf("trials: %lld\n", trials);
    std::printf("applicable: %lld\n", rep.passed + rep.failed);
    std::printf("skipped (identical pair): %lld\n", rep.skipped);
    std::printf("passed: %lld\n", rep.passed);
    std::printf("failed: %lld\n", rep.failed);
    std::printf("max residual: %.3e\n", rep.max_residual);
    std::printf("coordinate hamming (total): %lld\n", rep.coordinate_hamming);
    return rep.failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained mutual information over MIMO fading channels"};
    app.require_subcommand(1);

    const std::vector<std::string> schemes = {"cm", "bicm", "ci", "ci-rotated"};
    const std::vector<std::string> names = {"qam4",  "qam16", "qam32",
                                            "qam64", "psk4",  "psk8"};

    SweepConfig mi_cfg;
    std::string mi_config_path;
    auto* mi = app.add_subcommand("mi", "mutual information sweep, CSV output");
    mi->add_option("--config", mi_config_path,
                   "flat key=value config file; flags take priority");
    mi->add_option("--scheme", mi_cfg.scheme, "cm | bicm | ci | ci-rotated")
        ->check(CLI::IsMember(schemes));
    mi->add_option("--constellation", mi_cfg.constellation,
                   "qam4 | qam16 | qam32 | qam64 | psk4 | psk8")
        ->check(CLI::IsMember(names));
    mi->add_option("--n_tx", mi_cfg.n_tx)->check(CLI::PositiveNumber);
    mi->add_option("--n_rx", mi_cfg.n_rx)->check(CLI::PositiveNumber);
    mi->add_option("--snr_start_db", mi_cfg.snr_start_db);
    mi->add_option("--snr_stop_db", mi_cfg.snr_stop_db);
    mi->add_option("--snr_step_db", mi_cfg.snr_step_db)
        ->check(CLI::PositiveNumber);
    mi->add_option("--samples", mi_cfg.samples)->check(CLI::PositiveNumber);
    mi->add_option("--seed", mi_cfg.seed);
    auto* rot = mi->add_option("--rotation_deg", mi_cfg.rotation_deg,
                               "rotation for ci-rotated, degrees");
    mi->add_option("--workers", mi_cfg.workers,
                   "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber);
    mi->add_option("--output,-o", mi_cfg.output, "CSV path, - for stdout");

    std::string con_name;
    double con_rot = 0.0;
    bool con_enh = false;
    auto* con = app.add_subcommand("constellation", "constellation report");
    con->add_option("name", con_name)->required()->check(CLI::IsMember(names));
    con->add_option("--rotate_deg", con_rot);
    con->add_flag("--enhanced", con_enh, "list the enhanced constellation");

    int div_ntx = 2, div_nrx = 1;
    long long div_trials = 10000;
    std::uint64_t div_seed = 1;
    std::string div_name = "psk4";
    auto* div = app.add_subcommand("diversity",
                                   "equivalent-channel identity check");
    div->add_option("--n_tx", div_ntx)->check(CLI::PositiveNumber);
    div->add_option("--n_rx", div_nrx)->check(CLI::PositiveNumber);
    div->add_option("--constellation", div_name)->check(CLI::IsMember(names));
    div->add_option("--trials", div_trials)->check(CLI::PositiveNumber);
    div->add_option("--seed", div_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (mi->parsed()) {
            if (!mi_config_path.empty()) {
                const int rc = apply_config_file(mi, mi_config_path);
                if (rc != 0)
                    return rc;
            }
            return run_mi(mi_cfg, rot->count() > 0);
        }
        if (con->parsed())
            return run_constellation(con_name, con_rot, con_enh);
        if (div->parsed())
            return run_diversity(div_ntx, div_nrx, div_name, div_trials,
                                 div_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

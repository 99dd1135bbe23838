// End-to-end checks of the installed command line tool. Each case shells out
// to the real binary (path injected by the build as CIMI_BIN) and inspects
// exit codes and produced files.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"

namespace {

std::string bin() { return CIMI_BIN; }

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

int run_to(const std::string& args, const std::string& path,
           std::string& text) {
    const std::string cmd =
        bin() + " " + args + " > " + path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        out.push_back(line);
    return out;
}

const std::string kQuick =
    " --samples 64 --snr_start_db 0 --snr_stop_db 10 --snr_step_db 5 ";

} // namespace

TEST_CASE("help and argument validation exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("mi --help") == 0);
    CHECK(run("") == 1);                       // subcommand required
    CHECK(run("mi --constellation psk4" + kQuick) == 1); // scheme required
    CHECK(run("mi --scheme cm --constellation psk3" + kQuick) == 1);
    CHECK(run("mi --scheme xxx --constellation psk4" + kQuick) == 1);
    CHECK(run("mi --scheme cm --constellation psk4" + kQuick +
              "--snr_step_db 0") == 1);
    CHECK(run("mi --scheme cm --constellation psk4 --samples 0") == 1);
    CHECK(run("mi --scheme cm --constellation psk4 --samples 64 "
              "--snr_start_db 10 --snr_stop_db 0") == 1);
    // rotation is only meaningful for ci-rotated
    CHECK(run("mi --scheme cm --constellation psk4 --rotation_deg 30" +
              kQuick) == 1);
    CHECK(run("mi --scheme ci-rotated --constellation psk4 "
              "--rotation_deg 30" + kQuick) == 0);
}

TEST_CASE("sweep writes the documented csv") {
    const std::string path = "/tmp/cimi_cli_sweep.csv";
    CHECK(run("mi --scheme cm --constellation psk4" + kQuick + "-o " + path) ==
          0);
    const auto rows = lines(slurp(path));
    REQUIRE(rows.size() == 4); // header + 3 grid points
    CHECK(rows[0] == "snr_db,mi_bits,std_error,samples");
    const char* starts[3] = {"0,", "5,", "10,"};
    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i + 1].rfind(starts[i], 0) == 0);
        double snr, mi, se;
        long long n;
        REQUIRE(std::sscanf(rows[i + 1].c_str(), "%lf,%lf,%lf,%lld", &snr,
                            &mi, &se, &n) == 4);
        CHECK(n == 64);
        CHECK(se > 0.0);
        CHECK(mi > -1.0);
        CHECK(mi < 2.0 + 0.5);
    }
}

TEST_CASE("default grid covers -5..30 dB in 1 dB steps") {
    std::string text;
    CHECK(run_to("mi --scheme cm --constellation psk4 --samples 16 --seed 1",
                 "/tmp/cimi_cli_default.csv", text) == 0);
    const auto rows = lines(text);
    REQUIRE(rows.size() == 37);
    CHECK(rows[1].rfind("-5,", 0) == 0);
    CHECK(rows[36].rfind("30,", 0) == 0);
}

TEST_CASE("csv output is byte-identical across reruns and worker counts") {
    const std::string a = "/tmp/cimi_cli_rep_a.csv";
    const std::string b = "/tmp/cimi_cli_rep_b.csv";
    const std::string base =
        "mi --scheme bicm --constellation qam16 --n_tx 2 --n_rx 2" + kQuick;
    CHECK(run(base + "--workers 1 -o " + a) == 0);
    CHECK(run(base + "--workers 3 -o " + b) == 0);
    const auto ta = slurp(a), tb = slurp(b);
    CHECK(ta == tb);
    CHECK_FALSE(ta.empty());

    // a different seed must move the estimates
    const std::string c = "/tmp/cimi_cli_rep_c.csv";
    CHECK(run(base + "--seed 4 -o " + c) == 0);
    CHECK(slurp(c) != ta);
}

TEST_CASE("config file drives a sweep, flags override it") {
    const std::string cfg = "/tmp/cimi_cli.conf";
    {
        std::ofstream out(cfg);
        out << "scheme=cm\n"
            << "constellation=psk4\n"
            << "samples=32\n"
            << "seed=9\n"
            << "snr_start_db=0\n"
            << "snr_stop_db=4\n"
            << "snr_step_db=2\n";
    }
    std::string text;
    CHECK(run_to("mi --config " + cfg, "/tmp/cimi_cli_cfg.csv", text) == 0);
    auto rows = lines(text);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].rfind("0,", 0) == 0);
    long long n = 0;
    double snr, mi, se;
    REQUIRE(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf,%lld", &snr, &mi, &se,
                        &n) == 4);
    CHECK(n == 32);

    // command line wins over the file
    CHECK(run_to("mi --config " + cfg + " --samples 16",
                 "/tmp/cimi_cli_cfg2.csv", text) == 0);
    rows = lines(text);
    REQUIRE(rows.size() == 4);
    REQUIRE(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf,%lld", &snr, &mi, &se,
                        &n) == 4);
    CHECK(n == 16);

    // unknown keys are rejected
    {
        std::ofstream out(cfg, std::ios::app);
        out << "snr_granularity=7\n";
    }
    CHECK(run("mi --config " + cfg) == 1);
}

TEST_CASE("unwritable output path is a runtime failure") {
    CHECK(run("mi --scheme cm --constellation psk4" + kQuick +
              "-o /nonexistent-dir/out.csv") == 2);
}

TEST_CASE("constellation report states the headline facts") {
    std::string text;
    CHECK(run_to("constellation qam32", "/tmp/cimi_cli_c32.txt", text) == 0);
    CHECK(text.find("q_union: 6") != std::string::npos);
    CHECK(text.find("ci invariant: no") != std::string::npos);
    CHECK(text.find("enhanced points: 36") != std::string::npos);
    CHECK(text.find("gray penalty: 7/6") != std::string::npos);
    CHECK(text.find("enhanced entropy: 5.12256") != std::string::npos);

    CHECK(run_to("constellation qam16", "/tmp/cimi_cli_c16.txt", text) == 0);
    CHECK(text.find("ci invariant: yes") != std::string::npos);
    CHECK(text.find("enhanced points: 16") != std::string::npos);
    CHECK(text.find("gray penalty: 1/1") != std::string::npos);

    CHECK(run("constellation nosuch") == 1);

    // --enhanced appends the 36-point table
    CHECK(run_to("constellation qam32 --enhanced", "/tmp/cimi_cli_enh.txt",
                 text) == 0);
    CHECK(text.find("enhanced constellation:") != std::string::npos);
    CHECK(lines(text).size() > 36u);
}

TEST_CASE("diversity check runs clean") {
    std::string text;
    CHECK(run_to("diversity --n_tx 2 --n_rx 2 --constellation psk4 "
                 "--trials 500 --seed 5",
                 "/tmp/cimi_cli_div.txt", text) == 0);
    CHECK(text.find("failed: 0") != std::string::npos);
    CHECK(text.find("passed: ") != std::string::npos);
}

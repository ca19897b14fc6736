// End-to-end checks of the cvqkd binary. The executable path arrives in the
// CVQKD_CLI environment variable.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string cli_path() {
    const char* p = std::getenv("CVQKD_CLI");
    REQUIRE(p != nullptr);
    return p;
}

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) {
    std::ifstream f(path);
    return f.good();
}

}  // namespace

TEST_CASE("keyrate at the published operating point") {
    const RunResult r = run(
        "keyrate --set v_a=0.29 --set t0=0.1 --set eta=0.8 --set upsilon=0.12 "
        "--set beta=0.8 --set convention=single");
    CHECK(r.exit_code == 0);
    // 46.8 kbits/s up to the formula-variant tolerance
    CHECK(r.out.find("\"key_rate_per_second\": 46819.5") != std::string::npos);
    CHECK(r.out.find("\"convention\": \"single\"") != std::string::npos);
}

TEST_CASE("keyrate via loss_db and a config file") {
    std::ofstream f("cli_test.conf");
    f << "v_a = 0.29\nloss_db = 10\neta = 0.8\nupsilon = 0.12\nbeta = 0.8\n";
    f.close();
    const RunResult a = run("keyrate --config cli_test.conf");
    const RunResult b = run("keyrate --set v_a=0.29 --set t0=0.1 --set eta=0.8 "
                            "--set upsilon=0.12 --set beta=0.8");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    std::remove("cli_test.conf");
}

TEST_CASE("missing required field names the field, exit 2") {
    const RunResult r = run("keyrate --set t0=0.1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("conflicting t0 and loss_db is a usage error") {
    const RunResult r = run("keyrate --set v_a=0.29 --set t0=0.5 --set loss_db=3");
    CHECK(r.exit_code == 2);
}

TEST_CASE("physicality failures exit 3") {
    // opaque-channel estimation: alice columns are all zero
    std::ofstream f("cli_zero.csv");
    f << "n,k,alice_x,alice_p,bob_x,bob_p\n";
    for (int i = 0; i < 1500; ++i)
        f << i << ",0,0,0,0.1,0.2\n";
    f.close();
    const RunResult r = run("estimate --set records=cli_zero.csv --set v_a=18 --set eta=0.8");
    CHECK(r.exit_code == 3);
    std::remove("cli_zero.csv");
}

TEST_CASE("sweep: single-point grid, determinism, manifest") {
    const std::string args =
        "sweep --format csv --set sweep_variable=v_a --set sweep_grid=0.29 "
        "--set t0=0.1 --set eta=0.8 --set upsilon=0.12 --set beta=0.8 "
        "--output cli_sweep.csv";
    CHECK(run(args).exit_code == 0);
    const std::string first = slurp("cli_sweep.csv");
    CHECK(first.find("swept_value,key_rate_per_symbol,key_rate_per_second,i_ab,holevo,"
                     "valid_flag\n") == 0);
    // exactly one data row
    CHECK(std::count(first.begin(), first.end(), '\n') == 2);
    CHECK(file_exists("cli_sweep.csv.manifest.json"));

    CHECK(run(args).exit_code == 0);
    CHECK(slurp("cli_sweep.csv") == first);  // byte-identical re-run
    std::remove("cli_sweep.csv");
    std::remove("cli_sweep.csv.manifest.json");
}

TEST_CASE("empty sweep grid is a usage error") {
    const RunResult r = run("sweep --set sweep_variable=v_a --set t0=0.1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("simulate then estimate round trip reproduces chi_t = 1.8") {
    CHECK(run("simulate --set v_a=18 --set t0=1 --set eta=0.8 --set upsilon=0.12 "
              "--set n_symbols=50000 --seed 5 --output cli_records.csv")
              .exit_code == 0);
    const RunResult est = run(
        "estimate --set records=cli_records.csv --set v_a=18 --set eta=0.8 "
        "--set t_known=1 --set eps_known=0");
    CHECK(est.exit_code == 0);
    const auto pos = est.out.find("\"chi_t_hat\": ");
    REQUIRE(pos != std::string::npos);
    const double chi = std::strtod(est.out.c_str() + pos + 13, nullptr);
    CHECK(std::abs(chi - 1.8) < 0.1);
    const auto upos = est.out.find("\"upsilon_hat\": ");
    REQUIRE(upos != std::string::npos);
    const double ups = std::strtod(est.out.c_str() + upos + 15, nullptr);
    CHECK(std::abs(ups - 0.12) < 0.02);
    std::remove("cli_records.csv");
    std::remove("cli_records.csv.manifest.json");
}

TEST_CASE("estimate on a missing or empty file") {
    CHECK(run("estimate --set records=does_not_exist.csv --set v_a=18 --set eta=0.8")
              .exit_code == 3);
    std::ofstream f("cli_empty.csv");
    f << "n,k,alice_x,alice_p,bob_x,bob_p\n";
    f.close();
    CHECK(run("estimate --set records=cli_empty.csv --set v_a=18 --set eta=0.8")
              .exit_code == 2);
    std::remove("cli_empty.csv");
}

TEST_CASE("calibrate fixes the convention used by later commands") {
    const RunResult r = run("calibrate --output cli_calibration.json");
    CHECK(r.exit_code == 0);
    const std::string cal = slurp("cli_calibration.json");
    CHECK(cal.find("\"convention\": \"single\"") != std::string::npos);
    CHECK(file_exists("cli_calibration.json.manifest.json"));

    const RunResult kr = run(
        "keyrate --set v_a=0.29 --set t0=0.1 --set eta=0.8 --set upsilon=0.12 "
        "--set beta=0.8 --set calibration=cli_calibration.json");
    CHECK(kr.exit_code == 0);
    CHECK(kr.out.find("\"convention\": \"single\"") != std::string::npos);
    std::remove("cli_calibration.json");
    std::remove("cli_calibration.json.manifest.json");
}

TEST_CASE("optimize command emits the optimum") {
    const RunResult r = run(
        "optimize --set t0=0.1 --set eta=0.8 --set upsilon=0.12 --set beta=0.8");
    CHECK(r.exit_code == 0);
    const auto pos = r.out.find("\"v_a_star\": ");
    REQUIRE(pos != std::string::npos);
    const double vstar = std::strtod(r.out.c_str() + pos + 12, nullptr);
    CHECK(std::abs(vstar - 0.29) < 0.05);
}

TEST_CASE("waveform simulate writes the binary arm waveforms") {
    CHECK(run("simulate --set fidelity=waveform --set v_a=18 --set t0=1 "
              "--set eta=0.8 --set upsilon=0.12 --set n_symbols=300 "
              "--set n_calibration=300 --set keep_waveforms=true "
              "--output cli_wf.csv")
              .exit_code == 0);
    CHECK(file_exists("cli_wf.csv"));
    CHECK(file_exists("cli_wf.csv.xarm.bin"));
    CHECK(file_exists("cli_wf.csv.xarm.bin.json"));
    CHECK(file_exists("cli_wf.csv.parm.bin"));
    for (const char* p : {"cli_wf.csv", "cli_wf.csv.manifest.json", "cli_wf.csv.xarm.bin",
                          "cli_wf.csv.xarm.bin.json", "cli_wf.csv.parm.bin",
                          "cli_wf.csv.parm.bin.json"})
        std::remove(p);
}

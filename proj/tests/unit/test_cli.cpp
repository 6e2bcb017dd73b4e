#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cavssh/csv.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

fs::path scratch() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() / ("cavssh_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << body;
    return p;
}

int run(const std::string& command, const fs::path& config, const fs::path& out, unsigned threads = 1) {
    const std::string line = std::string(CAVSSH_CLI_PATH) + " " + command + " --config '" + config.string() +
                             "' --out '" + out.string() + "' --threads " + std::to_string(threads) + " 2>" +
                             (scratch() / "stderr.txt").string();
    const int status = std::system(line.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double parse(const std::string& s) {
    double x = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), x);
    return x;
}

const std::string kSmall = R"({
  // small grids so each run takes a fraction of a second
  "model": {"t1": 1.0, "t2": 1.5},
  "cavity": {"omega_c": "gap", "mass_beta": 0.5, "g": 0.05, "eta": 0.01},
  "kernel": {"V0": 1.0, "zeta": 10.0},
  "thermal": {"temperature": 0.5},
  "grids": {"n_k": 512, "n_k2d": 64,
            "omega": {"start": 0.6, "stop": 1.4, "count": 24},
            "q": {"start": -0.5, "stop": 0.5, "count": 7},
            "k": {"start": -3.0, "stop": 3.0, "count": 31}},
  "kerr_scan": {"r_values": [0.5, 0.8, 1.3], "n_max": 4},
  "schmidt_scan": {"zeta_values": [0.0, 1.0, 5.0], "omega0": 1.0, "sigma": 0.1},
  "biphoton": {"omega0": 1.0, "sigma": 0.1, "vertex": "direct", "dump_state": true}
})";

}  // namespace

TEST_CASE("zak command reports the quantized phase", "[cli]") {
    for (double t2 : {0.5, 1.5}) {
        const auto cfg = write_config("zak.json", R"({"model": {"t1": 1.0, "t2": )" + std::to_string(t2) +
                                                      R"(}, "grids": {"n_k": 1024}})");
        const fs::path out = scratch() / ("zak_" + std::to_string(t2));
        REQUIRE(run("zak", cfg, out) == 0);
        const auto rows = read_csv(out / "zak.csv");
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == std::vector<std::string>{"t1", "t2", "zak_phase", "gap0", "curvature", "dipole_slope"});
        const double expected = t2 > 1.0 ? std::numbers::pi : 0.0;
        CHECK_THAT(parse(rows[1][2]), WithinAbs(expected, 1e-6 * 2.0 * std::numbers::pi));
        CHECK_THAT(parse(rows[1][3]), WithinAbs(2.0 * std::abs(1.0 - t2), 1e-12));
    }
}

TEST_CASE("malformed configs exit 2 and write nothing", "[cli]") {
    const std::vector<std::string> bad{
        R"({"model": {"t1": 1.0,)",                                   // not JSON
        R"({"model": {"t1": 1.0, "t3": 2.0}})",                       // unknown key
        R"({"modle": {}})",                                           // unknown section
        R"({"model": {"t1": -1.0}})",                                 // invariant
        R"({"cavity": {"omega_c": "resonant"}})",                     // bad enum
        R"({"grids": {"n_k": 16}})",                                  // too few k points
        R"({"grids": {"omega": {"start": 2.0, "stop": 1.0, "count": 10}}})",
        R"({"kerr_scan": {"r_values": [0.5, 1.01]}})",                // inside the critical guard
        R"({"biphoton": {"vertex": "stationary"}})",                  // not an option
    };
    for (std::size_t i = 0; i < bad.size(); ++i) {
        const auto cfg = write_config("bad.json", bad[i]);
        const fs::path out = scratch() / ("bad_" + std::to_string(i));
        INFO(bad[i]);
        CHECK(run("kerr-scan", cfg, out) == 2);
        CHECK_FALSE(fs::exists(out));
        const auto record = cli::json::parse(slurp(scratch() / "stderr.txt"));
        CHECK(record.at("error") == "ConfigInvalid");
        CHECK(record.at("exit_code") == 2);
    }
    // a command whose required grid is absent
    const auto cfg = write_config("nogrid.json", "{}");
    CHECK(run("spectrum", cfg, scratch() / "nogrid") == 2);
    CHECK_FALSE(fs::exists(scratch() / "nogrid"));
}

TEST_CASE("computation failures exit 3 with a flagged manifest", "[cli]") {
    // t1 = t2 closes the gap at k = pi, where the dipole is undefined.
    const auto cfg = write_config("critical.json", R"({"model": {"t1": 1.0, "t2": 1.0},
        "grids": {"k": {"start": -3.141592653589793, "stop": 3.141592653589793, "count": 11}}})");
    const fs::path out = scratch() / "critical";
    CHECK(run("bands", cfg, out) == 3);
    const auto manifest = cli::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("status") == "failed");
    CHECK(manifest.at("partial") == true);
    CHECK(cli::json::parse(slurp(scratch() / "stderr.txt")).at("error") == "ComputationFailed");
}

TEST_CASE("unwritable output exits 4", "[cli]") {
    const auto cfg = write_config("io.json", "{}");
    std::ofstream(scratch() / "plain_file") << "x";
    CHECK(run("zak", cfg, scratch() / "plain_file" / "sub") == 4);
    CHECK(cli::json::parse(slurp(scratch() / "stderr.txt")).at("error") == "IoError");
}

TEST_CASE("outputs are byte-identical across runs and thread counts", "[cli][property]") {
    const auto cfg = write_config("small.json", kSmall);
    for (const std::string command : {"bands", "self-energy", "spectrum", "hopfield", "kerr-scan", "vertex", "saddle",
                                      "biphoton", "schmidt-scan", "dressed-bands", "keldysh", "zak"}) {
        INFO(command);
        const fs::path a = scratch() / ("det_a_" + command);
        const fs::path b = scratch() / ("det_b_" + command);
        const fs::path c = scratch() / ("det_c_" + command);
        REQUIRE(run(command, cfg, a, 1) == 0);
        REQUIRE(run(command, cfg, b, 1) == 0);
        REQUIRE(run(command, cfg, c, 4) == 0);
        std::size_t csvs = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            if (entry.path().extension() != ".csv") continue;
            ++csvs;
            const std::string name = entry.path().filename().string();
            const std::string first = slurp(entry.path());
            CHECK(first == slurp(b / name));
            CHECK(first == slurp(c / name));
        }
        CHECK(csvs > 0);
    }
}

TEST_CASE("manifest checksums round-trip", "[cli]") {
    // FIPS 180-2 test vector
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto cfg = write_config("small.json", kSmall);
    const fs::path out = scratch() / "manifest";
    REQUIRE(run("biphoton", cfg, out) == 0);
    const auto manifest = cli::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("status") == "ok");
    CHECK(manifest.at("command") == "biphoton");
    CHECK(manifest.at("config") == cli::json::parse(kSmall, nullptr, true, true));
    CHECK(manifest.contains("wall_clock_seconds"));
    std::size_t listed = 0;
    for (const auto& entry : manifest.at("outputs")) {
        const std::string body = slurp(out / entry.at("file").get<std::string>());
        CHECK(entry.at("sha256") == cli::sha256_hex(body));
        CHECK(entry.at("bytes") == body.size());
        ++listed;
    }
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(out)) on_disk += e.path().filename() != "manifest.json";
    CHECK(listed == on_disk);
}

TEST_CASE("numbers carry 17 significant digits", "[cli]") {
    CHECK(cavssh::format_double(0.1) == "0.10000000000000001");
    CHECK(cavssh::format_double(1.0) == "1");
    for (double x : {-2.5e-300, 1.0 / 3.0, 6.02214076e23, -0.0, 123456.789}) {
        char ref[64];
        std::snprintf(ref, sizeof(ref), "%.17g", x);  // C locale
        CHECK(cavssh::format_double(x) == ref);
    }
    const auto cfg = write_config("small.json", kSmall);
    const fs::path out = scratch() / "digits";
    REQUIRE(run("bands", cfg, out) == 0);
    const auto rows = read_csv(out / "bands.csv");
    REQUIRE(rows.size() == 32);
    CHECK(rows[0] == std::vector<std::string>{"k", "valence", "conduction", "gap", "dipole", "theta"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        for (const auto& cell : rows[i]) {
            CHECK(cell.find(',') == std::string::npos);
            CHECK(cavssh::format_double(parse(cell)) == cell);  // exact round trip
        }
    }
    CHECK(parse(rows[1][0]) == -3.0);
}

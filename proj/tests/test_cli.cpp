#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bcq_bin() {
    const char* bin = std::getenv("BCQ_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "BCQ_BIN must point at the bcq binary");
    return bin;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("bcq_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& sub, const fs::path& config, const fs::path& out) {
    const std::string cmd = bcq_bin() + " " + sub + " --config " + config.string() +
                            " --out " + out.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

const std::string kParams =
    "params.nu = 1\n"
    "params.alpha = 0.4\n"
    "params.L = 3.141592653589793\n";

}  // namespace

TEST_CASE("spectra subcommand: deterministic outputs, exit codes") {
    fs::path dir = fresh_dir("spectra");
    write_file(dir / "cfg", kParams +
                                "spectra.k_list = 1\n"
                                "spectra.count_stokes = 5\n"
                                "spectra.count_dirichlet = 5\n");

    CHECK(run("spectra", dir / "cfg", dir / "out1") == 0);
    CHECK(fs::exists(dir / "out1/spectrum_k1.csv"));
    CHECK(fs::exists(dir / "out1/run_manifest.json"));

    const std::string csv = read_file(dir / "out1/spectrum_k1.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 10 rows
    CHECK(csv.find("\r") == std::string::npos);             // LF endings

    CHECK(run("spectra", dir / "cfg", dir / "out2") == 0);
    CHECK(read_file(dir / "out2/spectrum_k1.csv") == csv);  // byte-identical

    SUBCASE("0-mode rejected with exit 2") {
        write_file(dir / "cfg0", kParams + "spectra.k_list = 0, 1\n");
        CHECK(run("spectra", dir / "cfg0", dir / "out0") == 2);
    }
    SUBCASE("alpha = nu rejected with exit 2") {
        write_file(dir / "cfgan",
                   "params.nu = 1\nparams.alpha = 1\nparams.L = 1\n"
                   "spectra.k_list = 1\n");
        CHECK(run("spectra", dir / "cfgan", dir / "outan") == 2);
    }
    SUBCASE("missing key rejected with exit 2") {
        write_file(dir / "cfgm", "params.nu = 1\nparams.alpha = 0.4\n");
        CHECK(run("spectra", dir / "cfgm", dir / "outm") == 2);
    }
    SUBCASE("unknown key rejected with exit 2") {
        write_file(dir / "cfgu", kParams + "spectra.k_list = 1\nbogus.key = 1\n");
        CHECK(run("spectra", dir / "cfgu", dir / "outu") == 2);
    }
}

TEST_CASE("detcheck subcommand") {
    fs::path dir = fresh_dir("detcheck");
    write_file(dir / "cfg", kParams +
                                "detcheck.samples = 400\n"
                                "detcheck.seed = 20240817\n");
    CHECK(run("detcheck", dir / "cfg", dir / "out1") == 0);
    const std::string rep = read_file(dir / "out1/detcheck.json");
    CHECK(rep.find("\"pass\": true") != std::string::npos);

    CHECK(run("detcheck", dir / "cfg", dir / "out2") == 0);
    CHECK(read_file(dir / "out2/detcheck.json") == rep);  // same seed, same report
}

TEST_CASE("scan-alpha subcommand") {
    fs::path dir = fresh_dir("scan");
    write_file(dir / "cfg", kParams +
                                "spectra.k_list = 1\n"
                                "spectra.count_stokes = 1\n"
                                "scan.alpha_lo = 0.2\n"
                                "scan.alpha_hi = 0.3\n"
                                "scan.grid_step = 0.001\n");
    CHECK(run("scan-alpha", dir / "cfg", dir / "out") == 0);
    CHECK(fs::exists(dir / "out/alpha_scan.json"));
    CHECK(fs::exists(dir / "out/alpha_zeros.csv"));

    SUBCASE("interval reaching nu is rejected") {
        write_file(dir / "cfgbad", kParams +
                                       "spectra.k_list = 1\n"
                                       "scan.alpha_lo = 0.2\n"
                                       "scan.alpha_hi = 1.0\n");
        CHECK(run("scan-alpha", dir / "cfgbad", dir / "outbad") == 2);
    }
}

TEST_CASE("verdict subcommand") {
    fs::path dir = fresh_dir("verdict");
    write_file(dir / "cfg", kParams +
                                "spectra.k_list = 1\n"
                                "spectra.count_stokes = 2\n"
                                "spectra.count_dirichlet = 2\n");
    CHECK(run("verdict", dir / "cfg", dir / "out") == 0);
    const std::string rep = read_file(dir / "out/verdicts.json");
    CHECK(rep.find("\"verdict\": \"observable\"") != std::string::npos);
    CHECK(rep.find("not_observable") == std::string::npos);
    CHECK(rep.find("\"two_control_verdict\": \"observable\"") != std::string::npos);
    CHECK(fs::exists(dir / "out/eigenfunction_stokes_k1_j1.csv"));
    CHECK(fs::exists(dir / "out/eigenfunction_stokes_k1_j2.csv"));
}

TEST_CASE("control subcommand") {
    fs::path dir = fresh_dir("control");
    const std::string cfg = kParams +
                            "control.k = 1\n"
                            "control.grid_n = 64\n"
                            "control.n_u = 4\n"
                            "control.n_theta = 4\n"
                            "control.segments = 16\n"
                            "control.T = 1\n"
                            "control.dt = 0.0078125\n"
                            "control.seed = 7\n";
    write_file(dir / "cfg", cfg + "control.eps_bound = 0.1\n");
    CHECK(run("control", dir / "cfg", dir / "out") == 0);
    CHECK(fs::exists(dir / "out/control_experiment.json"));
    CHECK(fs::exists(dir / "out/trajectory.csv"));
    CHECK(fs::exists(dir / "out/gramian_sv.csv"));

    SUBCASE("unreachable bound exits 3") {
        write_file(dir / "cfgtight", cfg + "control.eps_bound = 1e-18\n");
        CHECK(run("control", dir / "cfgtight", dir / "outt") == 3);
    }
    SUBCASE("0-mode rejected") {
        write_file(dir / "cfg0", kParams + "control.k = 0\ncontrol.seed = 1\n");
        CHECK(run("control", dir / "cfg0", dir / "out0") == 2);
    }
}

TEST_CASE("manifest lists outputs that exist") {
    fs::path dir = fresh_dir("manifest");
    write_file(dir / "cfg", kParams + "spectra.k_list = 2\n");
    CHECK(run("spectra", dir / "cfg", dir / "out") == 0);
    const nlohmann::json manifest =
        nlohmann::json::parse(read_file(dir / "out/run_manifest.json"));
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("wall_time_seconds"));
    CHECK(manifest["subcommand"] == "spectra");
    REQUIRE(manifest["outputs"].is_array());
    CHECK(!manifest["outputs"].empty());
    bool saw_csv = false;
    for (const auto& out : manifest["outputs"]) {
        CHECK(fs::exists(out.get<std::string>()));
        saw_csv = saw_csv ||
                  out.get<std::string>().find("spectrum_k2.csv") != std::string::npos;
    }
    CHECK(saw_csv);
}

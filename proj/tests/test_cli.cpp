#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "largesol/field2d.hpp"
#include "largesol/io.hpp"

#ifndef LARGESOL_CLI_PATH
#define LARGESOL_CLI_PATH "largesol"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(LARGESOL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("check-ko exit codes follow the truth table") {
    const auto sat = write_config("ls_ko_sat.conf",
                                  "nonlinearity.family = power\nnonlinearity.q = 3\n");
    const auto vio = write_config("ls_ko_vio.conf",
                                  "nonlinearity.family = power\nnonlinearity.q = 1\n");
    CHECK(run("check-ko --config " + sat.string()) == 0);
    CHECK(run("check-ko --config " + vio.string()) == 2);
}

TEST_CASE("malformed config exits 64 and writes nothing") {
    const auto bad = write_config("ls_ko_bad.conf",
                                  "nonlinearity.family = power\nnonlinearity.q = 3\n"
                                  "grid.bogus = 7\n");
    const fs::path out = fs::temp_directory_path() / "ls_bad_out";
    fs::remove_all(out);
    CHECK(run("check-ko --config " + bad.string() + " --out " + out.string()) == 64);
    CHECK(!fs::exists(out / "ko_report.json"));
}

TEST_CASE("solve emits files, deterministic reports, verify consumes them") {
    const auto cfg = write_config("ls_solve.conf",
                                  "nonlinearity.family = power\n"
                                  "nonlinearity.q = 3\n"
                                  "geometry.kind = annulus\n"
                                  "geometry.R = 1.0\n"
                                  "geometry.r_in = 0.5\n"
                                  "problem.N = 2\n"
                                  "grid.n_r = 64\n"
                                  "grid.n_theta = 32\n"
                                  "radial.n_r = 256\n"
                                  "annulus.inner_const = 2.0\n"
                                  "annulus.inner_cos_amp = 0.5\n"
                                  "continuation.schedule = 1e3, 1e4, 1e5\n"
                                  "continuation.stop_tol = 5e-3\n");
    const fs::path out = fs::temp_directory_path() / "ls_solve_out";
    fs::remove_all(out);
    REQUIRE(run("solve --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "profile_annulus.csv"));
    CHECK(fs::exists(out / "field_annulus_k02.csv"));
    CHECK(fs::exists(out / "plot_r_rho.dat"));

    // Byte-identical reports for identical config + seed.
    const fs::path out2 = fs::temp_directory_path() / "ls_solve_out2";
    fs::remove_all(out2);
    REQUIRE(run("solve --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out / "report.json") == slurp(out2 / "report.json"));

    // verify over the emitted continuation fields.
    const fs::path vout = fs::temp_directory_path() / "ls_verify_out";
    fs::remove_all(vout);
    std::string fields;
    for (int i = 0; i < 3; ++i) {
        fields += " " + (out / ("field_annulus_k0" + std::to_string(i) + ".csv")).string();
    }
    CHECK(run("verify --config " + cfg.string() + " --out " + vout.string() + fields) == 0);
    CHECK(fs::exists(vout / "verify_report.json"));
}

TEST_CASE("verify without artifacts exits with a usage error") {
    const auto cfg = write_config("ls_verify_empty.conf",
                                  "nonlinearity.family = power\nnonlinearity.q = 3\n");
    const fs::path vout = fs::temp_directory_path() / "ls_verify_none";
    CHECK(run("verify --config " + cfg.string() + " --out " + vout.string()) == 64);
}

TEST_CASE("solve refuses a non-blow-up reaction without the override") {
    const auto cfg = write_config("ls_solve_lin.conf",
                                  "nonlinearity.family = power\n"
                                  "nonlinearity.q = 1\n"
                                  "geometry.kind = disk\n"
                                  "problem.N = 3\n"
                                  "radial.n_r = 128\n");
    const fs::path out = fs::temp_directory_path() / "ls_lin_out";
    fs::remove_all(out);
    CHECK(run("solve --config " + cfg.string() + " --out " + out.string()) == 2);
}

TEST_CASE("sweep emits a table with failed rows isolated") {
    const auto cfg = write_config("ls_sweep.conf",
                                  "nonlinearity.family = power\n"
                                  "nonlinearity.q = 3\n"
                                  "geometry.kind = disk\n"
                                  "problem.N = 3\n"
                                  "radial.n_r = 512\n"
                                  "radial.grading = 3\n"
                                  "sweep.parameter = nonlinearity.q\n"
                                  "sweep.values = 1, 2, 3\n");
    const fs::path out = fs::temp_directory_path() / "ls_sweep_out";
    fs::remove_all(out);
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out.string() +
                " --workers 2") == 0);
    const std::string table = slurp(out / "sweep.csv");
    CHECK(table.find("1,violated") != std::string::npos);
    CHECK(table.find("failed") != std::string::npos);
    CHECK(table.find("2,satisfied") != std::string::npos);
    CHECK(table.find("3,satisfied") != std::string::npos);

    // Empty grid: empty table, exit 0.
    const auto empty = write_config("ls_sweep_empty.conf",
                                    "nonlinearity.family = power\n"
                                    "nonlinearity.q = 3\n"
                                    "sweep.parameter = nonlinearity.q\n"
                                    "sweep.values =\n");
    const fs::path eout = fs::temp_directory_path() / "ls_sweep_empty_out";
    fs::remove_all(eout);
    CHECK(run("sweep --config " + empty.string() + " --out " + eout.string()) == 0);
    CHECK(fs::exists(eout / "sweep.csv"));
}

TEST_CASE("reaction-free config produces a constant field file") {
    const auto cfg = write_config("ls_zero.conf",
                                  "nonlinearity.family = zero\n"
                                  "geometry.kind = disk\n"
                                  "problem.N = 2\n"
                                  "grid.n_r = 32\n"
                                  "grid.n_theta = 16\n"
                                  "radial.n_r = 128\n"
                                  "init.kind = constant\n"
                                  "init.constant = 5\n"
                                  "continuation.schedule = 5\n");
    const fs::path out = fs::temp_directory_path() / "ls_zero_out";
    fs::remove_all(out);
    REQUIRE(run("solve --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string field = slurp(out / "field_disk.csv");
    CHECK(field.find(",5\n") != std::string::npos);
}

TEST_CASE("exhausted schedule without stabilization exits inconclusive") {
    const auto cfg = write_config("ls_inconclusive.conf",
                                  "nonlinearity.family = power\n"
                                  "nonlinearity.q = 3\n"
                                  "geometry.kind = disk\n"
                                  "problem.N = 3\n"
                                  "radial.n_r = 256\n"
                                  "continuation.schedule = 10, 100\n"
                                  "continuation.stop_tol = 1e-30\n");
    const fs::path out = fs::temp_directory_path() / "ls_inc_out";
    fs::remove_all(out);
    CHECK(run("solve --config " + cfg.string() + " --out " + out.string()) == 3);
    CHECK(fs::exists(out / "profile_continuation.csv")); // partial results kept
}

TEST_CASE("injected tilted field fails verify with exit 2") {
    using namespace largesol;
    auto grid = PolarGrid::build(0.0, 1.0, 96, 64);
    PolarField tilt;
    tilt.grid = grid;
    tilt.boundary_k = 1e3;
    tilt.converged = true;
    tilt.values.resize(static_cast<std::size_t>(grid.n_r) * grid.n_theta);
    for (int i = 0; i < grid.n_r; ++i) {
        for (int j = 0; j < grid.n_theta; ++j) {
            const double base = 2.88 + 0.02 / std::pow(1.01 - grid.r[i], 2.0);
            tilt.values[grid.idx(i, j)] =
                base + 0.2 * grid.r[i] * std::cos(grid.theta[j]);
        }
    }
    const fs::path csv = fs::temp_directory_path() / "ls_tilt_field.csv";
    write_field_csv(tilt, csv.string());
    const auto cfg = write_config("ls_tilt.conf",
                                  "nonlinearity.family = cubic_minus_linear\n"
                                  "nonlinearity.lambda = 5\n"
                                  "geometry.kind = disk\n"
                                  "problem.N = 2\n"
                                  "checks.run = moving_plane\n"
                                  "checks.tol_refl = 1e-6\n");
    const fs::path vout = fs::temp_directory_path() / "ls_tilt_out";
    fs::remove_all(vout);
    CHECK(run("verify --config " + cfg.string() + " --out " + vout.string() + " " +
              csv.string()) == 2);
}

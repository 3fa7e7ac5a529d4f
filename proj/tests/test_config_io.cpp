#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "largesol/config.hpp"
#include "largesol/field2d.hpp"
#include "largesol/io.hpp"
#include "largesol/radial.hpp"

using namespace largesol;
namespace fs = std::filesystem;

TEST_CASE("config parsing, comments and validation") {
    auto cfg = RunConfig::from_string(
        "# a comment\n"
        "nonlinearity.family = power\n"
        "nonlinearity.q = 3  # trailing comment\n"
        "grid.n_r = 128\n");
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.get_num("nonlinearity.q", 0.0) == 3.0);
    CHECK(cfg.get_int("grid.n_r", 0) == 128);
    CHECK(cfg.get_str("geometry.kind", "disk") == "disk");

    auto bad = RunConfig::from_string("nonlinearity.family = power\nnonlinearity.q = 3\nno.such.key = 1\n");
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    auto missing = RunConfig::from_string("grid.n_r = 128\n");
    CHECK_THROWS_AS(missing.validate(), std::invalid_argument);

    auto odd_theta = RunConfig::from_string(
        "nonlinearity.family = power\nnonlinearity.q = 3\ngrid.n_theta = 17\n");
    CHECK_THROWS_AS(odd_theta.validate(), std::invalid_argument);

    CHECK_THROWS_AS(RunConfig::from_string("just a line without equals\n"),
                    std::invalid_argument);
}

TEST_CASE("environment override") {
    setenv("LARGESOL_grid__n_r", "99", 1);
    auto cfg = RunConfig::from_string("nonlinearity.family = power\nnonlinearity.q = 3\n");
    cfg.apply_env_overrides();
    CHECK(cfg.get_int("grid.n_r", 0) == 99);
    unsetenv("LARGESOL_grid__n_r");
}

TEST_CASE("nonlinearity construction from config") {
    auto cfg = RunConfig::from_string(
        "nonlinearity.family = polynomial\nnonlinearity.coeffs = 0, 0, 3\n");
    auto nl = cfg.make_nonlinearity();
    CHECK(nl.g(2.0) == doctest::Approx(12.0));

    auto cm = RunConfig::from_string(
        "nonlinearity.family = cubic_minus_linear\nnonlinearity.lambda = 5\n");
    CHECK(cm.make_nonlinearity().g(1.0) == doctest::Approx(-4.0));

    auto unknown = RunConfig::from_string("nonlinearity.family = wavelet\n");
    CHECK_THROWS_AS(unknown.make_nonlinearity(), std::invalid_argument);
}

TEST_CASE("profile csv round trip") {
    auto cube = Nonlinearity::power(3.0);
    RadialOptions o;
    o.n_r = 128;
    auto p = solve_truncated(cube, 1.0, 3, 50.0, o);
    REQUIRE(p.converged);
    const fs::path path = fs::temp_directory_path() / "largesol_profile_test.csv";
    write_profile_csv(p, path.string());
    auto q = read_profile_csv(path.string());
    CHECK(q.R == p.R);
    CHECK(q.N == p.N);
    CHECK(q.k_level == p.k_level);
    REQUIRE(q.u_values.size() == p.u_values.size());
    for (std::size_t i = 0; i < p.u_values.size(); ++i) {
        CHECK(q.r_nodes[i] == p.r_nodes[i]);
        CHECK(q.u_values[i] == p.u_values[i]);
        CHECK(q.du_values[i] == p.du_values[i]);
    }
    fs::remove(path);
}

TEST_CASE("field csv round trip") {
    auto cube = Nonlinearity::power(3.0);
    auto grid = PolarGrid::build(0.5, 1.0, 32, 16);
    std::vector<double> inner(grid.n_theta, 2.0);
    auto f = solve_annulus_2d(cube, grid, 100.0, inner);
    REQUIRE(f.converged);
    const fs::path path = fs::temp_directory_path() / "largesol_field_test.csv";
    write_field_csv(f, path.string());
    auto g = read_field_csv(path.string());
    CHECK(g.grid.n_r == f.grid.n_r);
    CHECK(g.grid.n_theta == f.grid.n_theta);
    CHECK(g.boundary_k == f.boundary_k);
    for (std::size_t q = 0; q < f.values.size(); ++q) CHECK(g.values[q] == f.values[q]);
    fs::remove(path);

    CHECK_THROWS(read_field_csv("/nonexistent/file.csv"));
}

TEST_CASE("graded field csv round trip keeps the grid consistent") {
    auto cube = Nonlinearity::power(3.0);
    auto grid = PolarGrid::build(0.0, 1.0, 48, 16, 2.0);
    auto f = solve_disk(cube, grid, 100.0, DiskInit::radial_lift());
    REQUIRE(f.converged);
    const fs::path path = fs::temp_directory_path() / "largesol_graded_field.csv";
    write_field_csv(f, path.string());
    auto g = read_field_csv(path.string());
    for (int i = 0; i <= grid.n_r; ++i) {
        CHECK(g.grid.faces[i] == doctest::Approx(grid.faces[i]).epsilon(1e-12));
    }
    // The recomputed residual of the loaded field matches the solve.
    CHECK(field_max_scaled_residual(g, cube) <= 1e-7);
    fs::remove(path);
}

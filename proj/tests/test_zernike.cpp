#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/field.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/zernike.hpp"

using namespace phaseloom;

TEST_CASE("fringe index table spot checks") {
    struct Row {
        std::size_t j;
        int n, m;
    };
    for (Row row : {Row{1, 0, 0}, Row{2, 1, 1}, Row{3, 1, -1}, Row{4, 2, 0}, Row{5, 2, 2},
                    Row{6, 2, -2}, Row{7, 3, 1}, Row{8, 3, -1}, Row{9, 4, 0}, Row{10, 3, 3},
                    Row{16, 6, 0}, Row{17, 4, 4}, Row{25, 8, 0}, Row{26, 5, 5},
                    Row{36, 10, 0}, Row{37, 12, 0}}) {
        const ZernikeMode mode = fringe_mode(row.j);
        CHECK(mode.radial_degree == row.n);
        CHECK(mode.azimuthal_order == row.m);
    }
}

TEST_CASE("mode index range") {
    CHECK_THROWS_AS(fringe_mode(0), ParameterError);
    CHECK_THROWS_AS(fringe_mode(38), ParameterError);
    Grid grid(32, 12.0);
    CHECK_THROWS_AS(zernike(38, grid), ParameterError);
}

TEST_CASE("piston is 1 on the aperture, 0 outside") {
    Grid grid(32, 10.0);
    const RealField z1 = zernike(1, grid);
    for (std::size_t i = 0; i < z1.size(); ++i) {
        if (grid.inside(i))
            CHECK(z1[i] == doctest::Approx(1.0));
        else
            CHECK(z1[i] == 0.0);
    }
}

TEST_CASE("defocus is proportional to 2 rho^2 - 1") {
    Grid grid(64, 24.0);
    const RealField z4 = zernike(4, grid);
    // ratio against the raw radial polynomial away from its zero circle
    const double expected_factor = std::sqrt(3.0);
    for (std::size_t i = 0; i < z4.size(); ++i) {
        if (!grid.inside(i)) continue;
        const double raw = 2.0 * grid.rho(i) * grid.rho(i) - 1.0;
        CHECK(z4[i] == doctest::Approx(expected_factor * raw).epsilon(1e-12));
    }
}

TEST_CASE("tilt and astigmatism follow the radial polynomial definition") {
    Grid grid(48, 20.0);
    const RealField z2 = zernike(2, grid);   // n=1, m=+1: 2 rho cos(theta)
    const RealField z6 = zernike(6, grid);   // n=2, m=-2: sqrt(6) rho^2 sin(2 theta)
    for (std::size_t i = 0; i < z2.size(); ++i) {
        if (!grid.inside(i)) continue;
        const double rho = grid.rho(i);
        const double th = grid.theta(i);
        CHECK(z2[i] == doctest::Approx(2.0 * rho * std::cos(th)).epsilon(1e-12));
        CHECK(z6[i] ==
              doctest::Approx(std::sqrt(6.0) * rho * rho * std::sin(2.0 * th)).epsilon(1e-12));
    }
}

TEST_CASE("tilt pair is orthogonal within quadrature tolerance") {
    Grid grid(128, 50.0);
    const RealField z2 = zernike(2, grid);
    const RealField z3 = zernike(3, grid);
    const double ip = dot(z2, z3);
    CHECK(std::abs(ip) <= 1e-2 * static_cast<double>(grid.aperture_pixel_count()));
}

TEST_CASE("gram matrix of the first 10 modes is near identity on a 256 grid") {
    const Grid grid = Grid::from_physical(256, 0.25, 0.633, 0.44);
    CHECK(grid.aperture_radius_px() == doctest::Approx(44.487).epsilon(1e-3));
    const auto basis = zernike_basis(10, grid);
    const double n_ap = static_cast<double>(grid.aperture_pixel_count());
    double worst = 0.0;
    for (std::size_t a = 0; a < 10; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double g = dot(basis[a], basis[b]) / n_ap;
            worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    }
    CHECK(worst <= 2e-2);
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(0, 1.0), ParameterError);
    CHECK_THROWS_AS(Grid(16, 0.0), ParameterError);
    CHECK_THROWS_AS(Grid(16, -1.0), ParameterError);
    Grid g(16, 5.0);
    CHECK(g.aperture_pixel_count() > 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.pixel_count(); ++i)
        if (g.inside(i)) ++count;
    CHECK(count == g.aperture_pixel_count());
    // mask is the centered disk
    for (std::size_t i = 0; i < g.pixel_count(); ++i)
        CHECK(g.inside(i) == (g.rho(i) <= 1.0));
}

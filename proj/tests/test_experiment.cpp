#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/experiment.hpp"

#include <cmath>
#include <numbers>

using namespace dnls;

namespace {

struct Setup {
    Grid grid{512, 30.0};
    SolitonParams params;
    Soliton sol;
    SpectralData sd;

    Setup()
        : params(classify_params(1.0, 1.0, 2.0 * find_kappa0(1.0, Grid(2048, 30.0)).kappa0)),
          sol(params, grid),
          sd(spectral_decompose(assemble_Ltilde(sol)))
    {
    }
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

// Brute force: scan y on a fine lattice, for each y scan theta on a fine lattice.
double brute_distance(const ComplexField& u, const Soliton& sol)
{
    double best = 1e300;
    for (int iy = -60; iy <= 60; ++iy) {
        const double y = 0.005 * iy;
        const auto shifted = fourier::translate(sol.phi, y);
        for (int it = 0; it < 720; ++it) {
            const double th = 2.0 * std::numbers::pi * it / 720.0;
            best = std::min(best, norm_h1(u - std::polar(1.0, th) * shifted));
        }
    }
    return best;
}

} // namespace

TEST_CASE("unstable initial data")
{
    const auto& s = setup();
    const auto d = build_unstable_data(s.sol, s.sd.chi, 1e-2);
    for (double r : d.residuals) CHECK(std::abs(r) < 1e-10);
    CHECK(norm_h1(d.eps0) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(d.eps_dot_phi > 0.0);

    const auto d2 = build_unstable_data(s.sol, s.sd.chi, 5e-3);
    CHECK(d2.beta_ratio == doctest::Approx(0.5 * d.beta_ratio).epsilon(1e-10));

    const auto c0 = conserved(s.sol.phi, s.params.b);
    const auto c1 = conserved(d.u0, s.params.b);
    CHECK(c1.energy < 0.0);
    CHECK(c1.mass > c0.mass);

    CHECK_THROWS_AS(build_unstable_data(s.sol, s.sd.chi, 0.0), InvalidArgument);
    const cplx i(0.0, 1.0);
    CHECK_THROWS_AS(build_unstable_data(s.sol, s.sd.chi, 1e-2, i * s.sol.phi), DegenerateSeed);
}

TEST_CASE("tube distance on the symmetry orbit")
{
    const auto& s = setup();
    CHECK(tube_distance(s.sol.phi, s.sol).distance < 1e-8);
    const auto moved = std::polar(1.0, 1.9) * fourier::translate(s.sol.phi, -2.3);
    const auto td = tube_distance(moved, s.sol);
    CHECK(td.distance < 1e-6);
    CHECK(td.shift == doctest::Approx(-2.3).epsilon(1e-6));
}

TEST_CASE("tube distance against a brute-force scan")
{
    const auto& s = setup();
    const double delta = 0.05;
    const auto d = build_unstable_data(s.sol, s.sd.chi, delta);
    const auto td = tube_distance(d.u0, s.sol);
    CHECK(td.distance > 0.0);
    CHECK(td.distance <= delta * (1.0 + 1e-12));
    const double brute = brute_distance(d.u0, s.sol);
    CHECK(td.distance <= brute + 1e-12);
    CHECK(td.distance == doctest::Approx(brute).epsilon(1e-3));

    // equivariance
    const auto moved = std::polar(1.0, -0.6) * fourier::translate(d.u0, 1.1);
    CHECK(tube_distance(moved, s.sol).distance == doctest::Approx(td.distance).epsilon(1e-8));
}

TEST_CASE("instability run leaves the tube with a growing Lyapunov functional")
{
    const auto& p = setup().params;
    const Grid g(1024, 30.0);
    const double h1 = norm_h1(soliton_phi(p, g));
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 20.0;
    cfg.record_every = 50;

    const auto up = run_instability(p, g, 1e-2 * h1, 0.1 * h1, cfg);
    REQUIRE(up.exit_time.has_value());
    CHECK(up.monotone);
    CHECK(up.ceiling_ok);
    CHECK(up.min_slope >= 0.5 * up.initial_slope);
    CHECK(up.tube_distance_series.back() >= up.alpha);

    InstabilityOptions flip;
    flip.flip_sign = true;
    const auto down = run_instability(p, g, 1e-2 * h1, 0.1 * h1, cfg, flip);
    REQUIRE(down.exit_time.has_value());
    CHECK(down.eps_dot_phi < 0.0);
    CHECK(down.monotone);
    for (std::size_t k = 1; k < down.lyapunov_series.size(); ++k)
        CHECK(down.lyapunov_series[k] < down.lyapunov_series[k - 1]);

    const auto slow = run_instability(p, g, 0.5e-2 * h1, 0.1 * h1, cfg);
    REQUIRE(slow.exit_time.has_value());
    CHECK(*slow.exit_time > *up.exit_time);
    CHECK(slow.monotone);
}

TEST_CASE("algebraic soliton runs are exploratory")
{
    const auto p = classify_params(0.0, 1.0, 2.0);
    const Grid g(256, 30.0);
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.record_every = 10;
    InstabilityOptions o;
    o.spectral_n = 256;
    const auto r = run_instability(p, g, 1e-2, 0.5, cfg, o);
    CHECK(r.exploratory);
    CHECK_THROWS_AS(run_instability(classify_params(0.0, 1.0, 3.0), g, 1e-2, 0.5, cfg), InvalidParams);
}

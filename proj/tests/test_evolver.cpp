#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/evolver.hpp"

#include <cmath>

using namespace dnls;

namespace {

const SolitonParams& degenerate()
{
    static const SolitonParams p = classify_params(1.0, 1.0, 2.0 * find_kappa0(1.0, Grid(2048, 30.0)).kappa0);
    return p;
}

double tracking_error(const Grid& g, double dt, double t_end)
{
    const auto& p = degenerate();
    EvolveConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.record_every = static_cast<int>(std::lround(t_end / dt));
    const auto traj = evolve(soliton_phi(p, g), cfg, p.b);
    double err = 0.0;
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        const double t = traj.times[r];
        for (std::size_t k = 0; k < g.n(); ++k) {
            const cplx exact = std::polar(1.0, p.omega * t) * soliton_phi_at(p, g.x(k) - p.c * t);
            err = std::max(err, std::abs(traj.snapshots[r][k] - exact));
        }
    }
    return err;
}

ComplexField gaussian(const Grid& g)
{
    ComplexField u(g);
    for (std::size_t k = 0; k < g.n(); ++k) u[k] = std::exp(-g.x(k) * g.x(k));
    return u;
}

} // namespace

TEST_CASE("configuration validation")
{
    EvolveConfig c;
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.record_every = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.dealias = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("exact soliton is transported with fourth-order accuracy")
{
    const Grid g(1024, 30.0);
    const double e1 = tracking_error(g, 4e-3, 0.4);
    const double e2 = tracking_error(g, 2e-3, 0.4);
    CHECK(e2 < 1e-6);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("conserved quantities along a soliton run")
{
    const Grid g(1024, 30.0);
    const auto& p = degenerate();
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.record_every = 100;
    cfg.keep_snapshots = false;
    const auto traj = evolve(soliton_phi(p, g), cfg, p.b);
    CHECK(traj.snapshots.empty());
    const auto& c0 = traj.conserved_series.front();
    for (const auto& c : traj.conserved_series) {
        CHECK(std::abs(c.mass - c0.mass) < 1e-9 * c0.mass);
        CHECK(std::abs(c.energy - c0.energy) < 1e-9);
        CHECK(std::abs(c.momentum - c0.momentum) < 1e-9);
    }
}

TEST_CASE("virial rate of a Gaussian")
{
    const Grid g(1024, 30.0);
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.2;
    cfg.record_every = 100;
    const double b = 0.5;
    const auto traj = evolve(gaussian(g), cfg, b);
    const auto v = virial_rate_check(traj, cfg);
    CHECK(v.window_ok);
    CHECK(v.predicted == doctest::Approx(4.0 * conserved(gaussian(g), b).energy));
    CHECK(v.relative_error < 1e-2);
    const auto w = variance_rate_check(traj, cfg);
    CHECK(w.relative_error < 1e-2);
}

TEST_CASE("variance identity at degenerate soliton data")
{
    // a soliton centred at x0 moving at speed c: d/dt int x^2 |u|^2 = 2 c x0 M
    const Grid g(1024, 30.0);
    const auto& p = degenerate();
    const double x0 = 1.5;
    const auto u = fourier::translate(soliton_phi(p, g), x0);
    const auto wi = window_integrals(u, 0.8);
    const double mass = conserved(u, p.b).mass;
    CHECK(wi.variance_rhs == doctest::Approx(2.0 * p.c * x0 * mass).epsilon(1e-9));
    CHECK(std::abs(wi.variance_rhs) > 1e-3);
    CHECK(wi.tail_fraction < 1e-10);
}

TEST_CASE("observers can stop a run")
{
    const Grid g(256, 20.0);
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.record_every = 10;
    int calls = 0;
    const auto traj = evolve(gaussian(g), cfg, 0.0, {[&](double t, const ComplexField&) {
                                 ++calls;
                                 return t < 0.05;
                             }});
    CHECK(traj.stopped_by_observer);
    CHECK(traj.times.back() < 0.1);
    CHECK(calls == static_cast<int>(traj.times.size()));
}

TEST_CASE("non-finite data raises an evolution error")
{
    const Grid g(64, 10.0);
    ComplexField u = gaussian(g);
    u[3] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(evolve(u, EvolveConfig{}, 0.0), EvolutionError);
}

TEST_CASE("stepper and single-step wrapper agree")
{
    const Grid g(128, 10.0);
    const auto u = gaussian(g);
    Stepper st(g, 1e-3, 0.3);
    st.load(u);
    st.step();
    const auto a = st.state();
    const auto b = step(u, 1e-3, 0.3);
    CHECK(norm_l2(a - b) < 1e-14);
}

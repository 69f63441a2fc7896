#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/soliton.hpp"

#include <cmath>
#include <numbers>

using namespace dnls;
using std::numbers::pi;

TEST_CASE("parameter classification")
{
    CHECK(classify_params(0.0, 1.0, 2.0).regime == Regime::endpoint);
    CHECK(classify_params(0.0, 1.0, 3.0).regime == Regime::invalid);
    CHECK(classify_params(0.0, 1.0, 0.0).regime == Regime::interior);

    const auto p = classify_params(-1.0, 1.0, 0.0);
    CHECK(p.regime == Regime::invalid);
    REQUIRE(p.kappa_star.has_value());
    CHECK(*p.kappa_star == doctest::Approx(std::sqrt(13.0) / 4.0).epsilon(1e-14));
    // -2 < c < -2 kappa* is admissible for b <= -3/16
    CHECK(classify_params(-1.0, 1.0, -1.9).regime == Regime::interior);
    CHECK(classify_params(-1.0, 1.0, -1.5).regime == Regime::invalid);
    CHECK(classify_params(1.0, 1.0, 0.0).gamma == doctest::Approx(1.0 + 16.0 / 3.0));
    CHECK_THROWS_AS(classify_params(0.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("profile values at the origin")
{
    const Grid g(512, 30.0);
    const auto p0 = classify_params(0.0, 1.0, 0.0);
    const auto pe = classify_params(0.0, 1.0, 2.0);
    CHECK(profile_Phi(p0, g)[g.center_index()] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(profile_Phi(pe, g)[g.center_index()] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(profile_Phi(p0, g)[0]) < 1e-12);
    CHECK_THROWS_AS(profile_Phi(classify_params(0.0, 1.0, 3.0), g), InvalidParams);
}

TEST_CASE("phase eta at the origin and its slope at the edges")
{
    const Grid g(2048, 30.0);
    const auto p0 = classify_params(0.0, 1.0, 0.0);
    const auto eta = phase_eta(p0, g);
    CHECK(eta[g.center_index()] == doctest::Approx(-pi / 4.0).epsilon(1e-10));

    const auto p1 = classify_params(1.0, 1.0, 0.7);
    const auto eta1 = phase_eta(p1, g);
    const auto Phi = profile_Phi(p1, g);
    double mass = 0.0;
    for (double v : Phi.values) mass += v * v;
    mass *= g.dx();
    CHECK(eta1[g.center_index()] == doctest::Approx(-mass / 8.0).epsilon(1e-10));
    const double slope = (eta1[5] - eta1[4]) / g.dx();
    CHECK(slope == doctest::Approx(0.35).epsilon(1e-8));
    // two independent constructions of eta agree
    for (std::size_t k = 0; k < g.n(); k += 97) CHECK(eta1[k] == doctest::Approx(phase_eta_closed_form(p1, g.x(k))).epsilon(1e-9));
}

TEST_CASE("soliton modulus and gauge invariance of the mass")
{
    const Grid g(1024, 30.0);
    const auto p = classify_params(1.0, 1.0, 0.5);
    const auto phi = soliton_phi(p, g);
    const auto Phi = profile_Phi(p, g);
    double err = 0.0, mphi = 0.0, mPhi = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        err = std::max(err, std::abs(std::abs(phi[k]) - Phi[k]));
        mphi += std::norm(phi[k]);
        mPhi += Phi[k] * Phi[k];
    }
    CHECK(err < 1e-14);
    CHECK(mphi == doctest::Approx(mPhi).epsilon(1e-14));
    CHECK(conserved(phi, p.b).mass == doctest::Approx(mass_closed_form(p)).epsilon(1e-12));
}

TEST_CASE("endpoint soliton carries mass 4 pi once the algebraic tail is added")
{
    const Grid g(8192, 400.0);
    const auto p = classify_params(0.0, 1.0, 2.0);
    const double mass = conserved(soliton_phi(p, g), 0.0).mass + profile_tail_mass(p, g.half_width());
    CHECK(mass == doctest::Approx(4.0 * pi).epsilon(1e-4));
}

TEST_CASE("conserved quantities on simple fields")
{
    const Grid g(256, 12.0);
    const auto zero = conserved(ComplexField(g), 1.0);
    CHECK(zero.energy == 0.0);
    CHECK(zero.mass == 0.0);
    CHECK(zero.momentum == 0.0);

    ComplexField gauss(g);
    for (std::size_t k = 0; k < g.n(); ++k) gauss[k] = std::exp(-g.x(k) * g.x(k));
    const auto c = conserved(gauss, 0.0);
    CHECK(c.mass == doctest::Approx(std::sqrt(pi / 2.0)).epsilon(1e-13));
    CHECK(std::abs(c.momentum) < 1e-15);
    // real data: the derivative term vanishes, E = ||u_x||^2 / 2
    CHECK(c.energy == doctest::Approx(0.5 * std::sqrt(pi / 2.0)).epsilon(1e-12));

    // a boost e^{ivx} shifts the momentum by -v M
    ComplexField boosted(g);
    for (std::size_t k = 0; k < g.n(); ++k) boosted[k] = gauss[k] * std::polar(1.0, 0.8 * g.x(k));
    CHECK(conserved(boosted, 0.0).momentum == doctest::Approx(-0.8 * c.mass).epsilon(1e-12));
}

TEST_CASE("stationary residuals")
{
    const Grid g(2048, 30.0);
    const auto r0 = stationary_residual(classify_params(0.0, 1.0, 0.0), g);
    CHECK(r0.complex_equation < 1e-8);
    CHECK(r0.profile_equation < 1e-8);

    const auto k = find_kappa0(1.0, g);
    const auto p = classify_params(1.0, 1.0, 2.0 * k.kappa0);
    const auto r1 = stationary_residual(p, g);
    CHECK(r1.complex_equation < 1e-8);
    CHECK(r1.profile_equation < 1e-8);

    RealField Phi = profile_Phi(p, g);
    for (double& v : Phi.values) v *= 1.01;
    CHECK(profile_equation_residual(p, Phi) > 1e-3);
}

TEST_CASE("stationary residual decays spectrally under refinement")
{
    const auto p = classify_params(1.0, 1.0, 0.3);
    const double coarse = stationary_residual(p, Grid(128, 30.0)).complex_equation;
    const double fine = stationary_residual(p, Grid(256, 30.0)).complex_equation;
    CHECK(fine < 1e-2 * coarse);
}

TEST_CASE("kappa0 root")
{
    const Grid g(2048, 30.0);
    const auto k0 = find_kappa0(0.0, g);
    CHECK(k0.kappa0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(k0.endpoint);
    for (double b : {0.1, 1.0}) {
        const auto k = find_kappa0(b, g);
        CHECK(k.kappa0 > 0.0);
        CHECK(k.kappa0 < 1.0);
        CHECK(std::abs(k.momentum) < 1e-8);
        CHECK(std::abs(k.energy) < 1e-6);
        CHECK(std::abs(k.kappa0 - k.kappa0_closed) < 1e-8);
        CHECK(std::abs(find_kappa0(b, Grid(4096, 30.0)).kappa0 - k.kappa0) < 1e-8);
    }
    CHECK_THROWS_AS(find_kappa0(-0.5, g), InvalidArgument);
}

TEST_CASE("frequency scaling of the soliton family")
{
    const Grid g(2048, 30.0);
    CHECK(scaling_check(1.0, 0.3, 1.0, g) == 0.0);
    CHECK(scaling_check(0.0, 0.0, 4.0, g) < 1e-8);
    CHECK(scaling_check(1.0, find_kappa0(1.0, g).kappa0, 2.0, g) < 1e-8);
}

TEST_CASE("action Hessian determinant against the closed form")
{
    const Grid g(2048, 30.0);
    for (double b : {0.0, 1.0}) {
        const auto h = action_hessian_det(classify_params(b, 1.0, 0.0), 1e-2, g);
        CHECK(h.finite_difference == doctest::Approx(h.closed_form).epsilon(1e-5));
    }
    const double k = find_kappa0(1.0, g).kappa0;
    const auto hd = action_hessian_det(classify_params(1.0, 1.0, 2.0 * k), 1e-2, g);
    CHECK(std::abs(hd.closed_form) < 1e-8);
    CHECK(std::abs(hd.finite_difference) < 1e-6);
    CHECK_THROWS_AS(action_hessian_det(classify_params(0.0, 1.0, 1.99), 1e-2, g), InvalidArgument);
}

TEST_CASE("generator of L2 scaling")
{
    const Grid g(512, 15.0);
    ComplexField f(g);
    for (std::size_t k = 0; k < g.n(); ++k) f[k] = 1.7 * std::exp(-g.x(k) * g.x(k));
    const auto lf = apply_Lambda(f);
    CHECK(std::abs(inner(lf, f)) < 1e-13);

    // central difference in lambda of lambda^{1/2} f(lambda y)
    const double h = 1e-4;
    auto scaled = [&](double lam, double y) { return std::sqrt(lam) * 1.7 * std::exp(-lam * lam * y * y); };
    double err = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double y = g.x(k);
        const double fd = (scaled(1.0 + h, y) - scaled(1.0 - h, y)) / (2.0 * h);
        err = std::max(err, std::abs(lf[k] - cplx(fd)));
    }
    CHECK(err < 1e-7);
    // even in, even out
    for (std::size_t k = 1; k < g.n(); ++k) CHECK(std::abs(lf[k] - lf[g.n() - k]) < 1e-12);
}

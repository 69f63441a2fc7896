#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/gkdv.hpp"
#include "dnls/random_fields.hpp"

#include <cmath>

using namespace dnls;

namespace {

const gkdv::Profile& profile()
{
    static const gkdv::Profile p(Grid(1024, 30.0));
    return p;
}

} // namespace

TEST_CASE("ground state is even, positive and peaks at 3^{1/4}")
{
    const auto& p = profile();
    const std::size_t n = p.grid.n();
    CHECK(p.q[p.grid.center_index()] == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-15));
    for (std::size_t k = 1; k < n; ++k) {
        CHECK(p.q[k] > 0.0);
        CHECK(p.q[k] == doctest::Approx(p.q[n - k]).epsilon(1e-14));
    }
}

TEST_CASE("linearized operator identities")
{
    const auto r = gkdv::identity_residuals(profile());
    CHECK(r.cubic < 1e-8);
    CHECK(r.scaling < 1e-8);
    CHECK(r.kernel < 1e-8);
    CHECK(std::abs(r.energy) < 1e-8);
}

TEST_CASE("closed-form integrals")
{
    const auto& p = profile();
    double m = 0.0, s = 0.0;
    for (std::size_t k = 0; k < p.grid.n(); ++k) {
        m += p.q[k] * p.q[k];
        s += p.q[k];
    }
    CHECK(m * p.grid.dx() == doctest::Approx(gkdv::mass_Q()).epsilon(1e-12));
    // Q decays like e^{-|x|}; the truncated tail at L = 30 is ~1e-13
    CHECK(s * p.grid.dx() == doctest::Approx(gkdv::integral_Q()).epsilon(1e-11));
}

TEST_CASE("J functional")
{
    const auto& p = profile();
    const Grid& g = p.grid;
    CHECK(gkdv::j_functional(RealField(g), p) == 0.0);

    // eps = Lambda Q: int f F = F(inf)^2 / 2 with F the cumulative of f, and int Lambda Q = (int Q)/2
    const double half_int = 0.5 * gkdv::integral_Q();
    CHECK(gkdv::j_functional(p.lambda_q, p) == doctest::Approx(0.5 * half_int * half_int).epsilon(1e-9));

    // odd eps against a nested quadrature: Lambda Q = (x Q)' - Q/2, so its primitive is
    // x Q(x) - (1/2) int_{-inf}^x Q, and the inner integral is done by a refined trapezoid rule
    RealField eps(g);
    for (std::size_t k = 0; k < g.n(); ++k) eps[k] = g.x(k) * std::exp(-g.x(k) * g.x(k) / 2.0);
    const double value = gkdv::j_functional(eps, p);
    double brute = 0.0;
    std::vector<double> cum(g.n(), 0.0);
    const int sub = 64;
    double running = 0.0;
    double prev_x = -g.half_width();
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double x = g.x(k);
        if (k > 0) {
            const double h = (x - prev_x) / sub;
            for (int j = 0; j < sub; ++j) {
                const double a = prev_x + j * h;
                running += 0.5 * h * (gkdv::Q_at(a) + gkdv::Q_at(a + h));
            }
        }
        prev_x = x;
        cum[k] = x * gkdv::Q_at(x) - 0.5 * running;
        brute += eps[k] * cum[k];
    }
    brute *= g.dx();
    CHECK(value == doctest::Approx(brute).epsilon(1e-6));
    CHECK(std::abs(value - brute) < 1e-10 + 1e-6 * std::abs(brute));
}

TEST_CASE("Gagliardo-Nirenberg inequality")
{
    const auto& p = profile();
    const auto eq = gkdv::gn_inequality_probe(p.q, p);
    CHECK(eq.left == doctest::Approx(eq.right).epsilon(1e-8));

    RealField gauss(p.grid);
    for (std::size_t k = 0; k < p.grid.n(); ++k) gauss[k] = std::exp(-p.grid.x(k) * p.grid.x(k));
    const auto g1 = gkdv::gn_inequality_probe(gauss, p);
    CHECK(g1.left < g1.right);

    RealField twice(p.grid);
    for (std::size_t k = 0; k < p.grid.n(); ++k) twice[k] = 2.0 * p.q[k];
    const auto t = gkdv::gn_inequality_probe(twice, p);
    CHECK(t.left == doctest::Approx(64.0 * eq.left).epsilon(1e-12));
    CHECK(t.right == doctest::Approx(64.0 * eq.right).epsilon(1e-12));

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = gkdv::gn_inequality_probe(random_smooth_real_field(p.grid, seed), p);
        CHECK(s.left <= s.right);
    }
}

TEST_CASE("spectrum of the gKdV operator")
{
    const gkdv::Profile p(Grid(512, 30.0));
    const auto c = gkdv::eigen_counts(p, 1e-5);
    CHECK(c.negative == 1);
    CHECK(c.kernel == 1);
    CHECK(c.lowest == doctest::Approx(-8.0).epsilon(1e-6));
}

TEST_CASE("grid mismatch is rejected")
{
    CHECK_THROWS_AS(gkdv::apply_L(profile(), RealField(Grid(64, 30.0))), GridMismatch);
}

#include "dnls/gkdv.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace dnls::gkdv {

namespace {

double norm(const RealField& f)
{
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.dx());
}

} // namespace

double Q_at(double x) { return std::pow(3.0, 0.25) / std::sqrt(std::cosh(2.0 * x)); }

double integral_Q()
{
    return std::pow(3.0, 0.25) * std::sqrt(std::numbers::pi) * std::tgamma(0.25) / (2.0 * std::tgamma(0.75));
}

double mass_Q() { return std::sqrt(3.0) * std::numbers::pi / 2.0; }

Profile::Profile(const Grid& g) : grid(g), q(g), q_prime(g), q_cubed(g), lambda_q(g)
{
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double x = g.x(k);
        const double Q = Q_at(x);
        q[k] = Q;
        q_prime[k] = -Q * std::tanh(2.0 * x);
        q_cubed[k] = Q * Q * Q;
        lambda_q[k] = 0.5 * Q + x * q_prime[k];
    }
}

RealField apply_L(const Profile& p, const RealField& v)
{
    require_same_grid(p.grid, v.grid, "gkdv::apply_L");
    const RealField vxx = fourier::derivative(v, 2);
    RealField out(v.grid);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double q2 = p.q[k] * p.q[k];
        out[k] = -vxx[k] + v[k] - 5.0 * q2 * q2 * v[k];
    }
    return out;
}

Eigen::MatrixXd assemble_L(const Profile& p)
{
    Eigen::MatrixXd M = -fourier::derivative_matrix(p.grid, 2);
    for (std::size_t k = 0; k < p.grid.n(); ++k) {
        const double q2 = p.q[k] * p.q[k];
        const auto i = static_cast<Eigen::Index>(k);
        M(i, i) += 1.0 - 5.0 * q2 * q2;
    }
    return M;
}

IdentityResiduals identity_residuals(const Profile& p)
{
    IdentityResiduals r;
    const RealField lq3 = apply_L(p, p.q_cubed);
    const RealField llq = apply_L(p, p.lambda_q);
    const RealField lqp = apply_L(p, p.q_prime);
    RealField a(p.grid), b(p.grid);
    for (std::size_t k = 0; k < p.grid.n(); ++k) {
        a[k] = lq3[k] + 8.0 * p.q_cubed[k];
        b[k] = llq[k] + 2.0 * p.q[k];
    }
    r.cubic = norm(a) / norm(p.q_cubed);
    r.scaling = norm(b) / norm(p.q);
    r.kernel = norm(lqp) / norm(p.q_prime);

    const RealField qx = fourier::derivative(p.q);
    double kin = 0.0, pot = 0.0;
    for (std::size_t k = 0; k < p.grid.n(); ++k) {
        kin += qx[k] * qx[k];
        pot += std::pow(p.q[k], 6);
    }
    r.energy = (0.5 * kin - pot / 6.0) * p.grid.dx();
    return r;
}

double j_functional(const RealField& eps, const Profile& p)
{
    require_same_grid(p.grid, eps.grid, "gkdv::j_functional");
    const RealField cumulative = fourier::antiderivative(p.lambda_q);
    double s = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) s += eps[k] * cumulative[k];
    return s * p.grid.dx();
}

GnSides gn_inequality_probe(const RealField& f, const Profile& p)
{
    require_same_grid(p.grid, f.grid, "gkdv::gn_inequality_probe");
    const RealField fx = fourier::derivative(f);
    double l6 = 0.0, l2 = 0.0, grad = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        l6 += std::pow(f[k], 6);
        l2 += f[k] * f[k];
        grad += fx[k] * fx[k];
    }
    const double dx = f.grid.dx();
    const double ratio = l2 * dx / mass_Q();
    return {l6 * dx / 6.0, 0.5 * ratio * ratio * grad * dx};
}

EigenCounts eigen_counts(const Profile& p, double kernel_tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_L(p), Eigen::EigenvaluesOnly);
    EigenCounts c;
    const auto& ev = es.eigenvalues();
    c.lowest = ev(0);
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
        if (ev(j) < -kernel_tol) {
            ++c.negative;
        } else if (ev(j) < kernel_tol) {
            ++c.kernel;
            c.kernel_value = ev(j);
        } else {
            ++c.positive;
        }
    }
    return c;
}

} // namespace dnls::gkdv

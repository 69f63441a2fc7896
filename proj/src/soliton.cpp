#include "dnls/soliton.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dnls {

namespace {

constexpr double kEndpointRelTol = 1e-12;
constexpr double kBisectionTol = 1e-12;
constexpr double kKappaUpper = 1.0 - 1e-6;
constexpr double kGridBracket = 1e-4;

struct InteriorShape {
    double a;  // sqrt(4 omega - c^2)
    double s;  // sqrt(c^2 + gamma a^2)
};

InteriorShape interior_shape(const SolitonParams& p)
{
    const double a = std::sqrt(4.0 * p.omega - p.c * p.c);
    return {a, std::sqrt(p.c * p.c + p.gamma * a * a)};
}

void require_admissible(const SolitonParams& p, const char* where)
{
    if (p.regime == Regime::invalid) {
        std::ostringstream os;
        os << where << ": parameters (b=" << p.b << ", omega=" << p.omega << ", c=" << p.c
           << ") are not admissible; admissible c-range is " << p.admissible_range();
        throw InvalidParams(os.str());
    }
}

void require_positive_gamma(const SolitonParams& p, const char* where)
{
    require_admissible(p, where);
    if (!(p.gamma > 0.0)) {
        throw InvalidArgument(std::string(where) + ": closed form implemented for gamma > 0 only");
    }
}

} // namespace

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::interior: return "interior";
    case Regime::endpoint: return "endpoint";
    case Regime::invalid: return "invalid";
    }
    return "invalid";
}

std::string SolitonParams::admissible_range() const
{
    std::ostringstream os;
    os.precision(10);
    const double two_root = 2.0 * std::sqrt(omega);
    if (b > -3.0 / 16.0) {
        os << "(" << -two_root << ", " << two_root << "]";
    } else {
        os << "(" << -two_root << ", " << -two_root * kappa_star.value_or(0.0) << ")";
    }
    return os.str();
}

SolitonParams classify_params(double b, double omega, double c)
{
    if (!(omega > 0.0)) throw InvalidArgument("classify_params: omega must be positive");
    SolitonParams p;
    p.b = b;
    p.omega = omega;
    p.c = c;
    p.gamma = 1.0 + (16.0 / 3.0) * b;
    const double two_root = 2.0 * std::sqrt(omega);
    p.kappa = c / two_root;
    if (b <= -3.0 / 16.0) {
        p.kappa_star = std::sqrt((3.0 + 16.0 * b) / (16.0 * b));
        const bool inside = c > -two_root && c < -two_root * *p.kappa_star;
        p.regime = inside ? Regime::interior : Regime::invalid;
        return p;
    }
    if (std::abs(c - two_root) <= kEndpointRelTol * two_root) {
        p.c = two_root;
        p.kappa = 1.0;
        p.regime = Regime::endpoint;
    } else if (c > -two_root && c < two_root) {
        p.regime = Regime::interior;
    } else {
        p.regime = Regime::invalid;
    }
    return p;
}

double profile_Phi_squared_at(const SolitonParams& p, double x)
{
    if (p.regime == Regime::endpoint) {
        return 4.0 * p.c / (p.c * p.c * x * x + p.gamma);
    }
    const auto [a, s] = interior_shape(p);
    return 2.0 * a * a / (s * std::cosh(a * x) - p.c);
}

double profile_Phi_at(const SolitonParams& p, double x) { return std::sqrt(profile_Phi_squared_at(p, x)); }

double profile_log_derivative_at(const SolitonParams& p, double x)
{
    if (p.regime == Regime::endpoint) {
        return -p.c * p.c * x / (p.c * p.c * x * x + p.gamma);
    }
    const auto [a, s] = interior_shape(p);
    const double ch = std::cosh(a * x);
    return -0.5 * s * a * std::tanh(a * x) / (s - p.c / ch);
}

RealField profile_Phi(const SolitonParams& p, const Grid& grid)
{
    require_admissible(p, "profile_Phi");
    RealField out(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) out[k] = profile_Phi_at(p, grid.x(k));
    return out;
}

RealField profile_Phi_prime(const SolitonParams& p, const Grid& grid)
{
    require_admissible(p, "profile_Phi_prime");
    RealField out(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) {
        const double x = grid.x(k);
        out[k] = profile_Phi_at(p, x) * profile_log_derivative_at(p, x);
    }
    return out;
}

namespace {

// int_{-inf}^{x} Phi^2 in closed form.
double cumulative_mass_closed_form(const SolitonParams& p, double x)
{
    const double sg = std::sqrt(p.gamma);
    if (p.regime == Regime::endpoint) {
        return 4.0 / sg * (std::atan(p.c * x / sg) + std::numbers::pi / 2.0);
    }
    const auto [a, s] = interior_shape(p);
    const double r = std::sqrt((s + p.c) / (s - p.c));
    return 4.0 / sg * (std::atan(r * std::tanh(a * x / 2.0)) + std::atan(r));
}

// int_{-inf}^{-L} Phi^2 in closed form, written to avoid cancellation.
double left_tail_mass(const SolitonParams& p, double L)
{
    const double sg = std::sqrt(p.gamma);
    if (p.regime == Regime::endpoint) {
        return 4.0 / sg * std::atan(sg / (p.c * L));
    }
    const auto [a, s] = interior_shape(p);
    const double r = std::sqrt((s + p.c) / (s - p.c));
    const double one_minus_t = 2.0 / (std::exp(a * L) + 1.0);  // 1 - tanh(aL/2)
    const double t = 1.0 - one_minus_t;
    return 4.0 / sg * std::atan(r * one_minus_t / (1.0 + r * r * t));
}

} // namespace

RealField phase_eta(const SolitonParams& p, const Grid& grid)
{
    require_admissible(p, "phase_eta");
    RealField Phi2(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) Phi2[k] = profile_Phi_squared_at(p, grid.x(k));
    const RealField cumulative = fourier::antiderivative(Phi2);
    double tail = 0.0;
    if (p.regime == Regime::endpoint) tail = left_tail_mass(p, grid.half_width());
    RealField eta(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) {
        eta[k] = 0.5 * p.c * grid.x(k) - 0.25 * (tail + cumulative[k]);
    }
    return eta;
}

double phase_eta_closed_form(const SolitonParams& p, double x)
{
    require_positive_gamma(p, "phase_eta_closed_form");
    return 0.5 * p.c * x - 0.25 * cumulative_mass_closed_form(p, x);
}

cplx soliton_phi_at(const SolitonParams& p, double x)
{
    return profile_Phi_at(p, x) * std::polar(1.0, phase_eta_closed_form(p, x));
}

ComplexField soliton_phi(const SolitonParams& p, const Grid& grid)
{
    const RealField Phi = profile_Phi(p, grid);
    const RealField eta = phase_eta(p, grid);
    ComplexField out(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) out[k] = Phi[k] * std::polar(1.0, eta[k]);
    return out;
}

double mass_closed_form(const SolitonParams& p)
{
    require_positive_gamma(p, "mass_closed_form");
    const double sg = std::sqrt(p.gamma);
    if (p.regime == Regime::endpoint) return 4.0 * std::numbers::pi / sg;
    const auto [a, s] = interior_shape(p);
    return 4.0 / sg * std::acos(-p.c / s);
}

double momentum_closed_form(const SolitonParams& p)
{
    require_positive_gamma(p, "momentum_closed_form");
    // P = -(c/2) int Phi^2 + (1/4) int Phi^4
    const double g = p.gamma;
    if (p.regime == Regime::endpoint) {
        return 2.0 * p.c * std::numbers::pi * (1.0 - g) / std::pow(g, 1.5);
    }
    const auto [a, s] = interior_shape(p);
    return 2.0 * a / g + 2.0 * p.c * std::acos(-p.c / s) * (1.0 - g) / std::pow(g, 1.5);
}

double profile_tail_mass(const SolitonParams& p, double half_width)
{
    require_positive_gamma(p, "profile_tail_mass");
    return 2.0 * left_tail_mass(p, half_width);
}

ConservedTriple conserved(const ComplexField& u, double b)
{
    const ComplexField ux = fourier::derivative(u);
    double grad2 = 0.0, cubic = 0.0, mass = 0.0, mom = 0.0, sixth = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double m = std::norm(u[k]);
        const double im = std::imag(ux[k] * std::conj(u[k]));
        grad2 += std::norm(ux[k]);
        mass += m;
        mom -= im;
        // Re(i |u|^2 u_x conj(u)) = -|u|^2 Im(u_x conj(u))
        cubic -= m * im;
        sixth += m * m * m;
    }
    const double dx = u.grid.dx();
    ConservedTriple t;
    t.mass = mass * dx;
    t.momentum = mom * dx;
    t.energy = (0.5 * grad2 - 0.25 * cubic - b / 6.0 * sixth) * dx;
    return t;
}

double complex_equation_residual(const SolitonParams& p, const ComplexField& phi)
{
    const ComplexField d1 = fourier::derivative(phi, 1);
    const ComplexField d2 = fourier::derivative(phi, 2);
    const cplx I(0.0, 1.0);
    double r = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double m = std::norm(phi[k]);
        const cplx res = -d2[k] + p.omega * phi[k] + p.c * I * d1[k] - I * m * d1[k] - p.b * m * m * phi[k];
        r = std::max(r, std::abs(res));
    }
    return r;
}

double profile_equation_residual(const SolitonParams& p, const RealField& Phi)
{
    const RealField d2 = fourier::derivative(Phi, 2);
    const double lin = p.omega - p.c * p.c / 4.0;
    double r = 0.0;
    for (std::size_t k = 0; k < Phi.size(); ++k) {
        const double f = Phi[k];
        const double f3 = f * f * f;
        const double res = -d2[k] + lin * f + 0.5 * p.c * f3 - 3.0 / 16.0 * p.gamma * f3 * f * f;
        r = std::max(r, std::abs(res));
    }
    return r;
}

StationaryResidual stationary_residual(const SolitonParams& p, const Grid& grid)
{
    require_admissible(p, "stationary_residual");
    return {complex_equation_residual(p, soliton_phi(p, grid)), profile_equation_residual(p, profile_Phi(p, grid))};
}

double find_kappa0_closed_form(double b)
{
    if (!(b >= 0.0)) throw InvalidArgument("find_kappa0: b must be non-negative");
    auto P = [b](double kappa) { return momentum_closed_form(classify_params(b, 1.0, 2.0 * kappa)); };
    double lo = 0.0, hi = kKappaUpper;
    const double p_lo = P(lo);
    const double p_hi = P(hi);
    if (p_hi >= 0.0) return 1.0;  // no interior sign change: the root sits at the endpoint
    if (p_lo <= 0.0) throw RootBracketError("find_kappa0: momentum not positive at kappa = 0");
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        if (P(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Kappa0Result find_kappa0(double b, const Grid& grid, double momentum_tol, double energy_tol)
{
    Kappa0Result res;
    res.kappa0_closed = find_kappa0_closed_form(b);
    if (res.kappa0_closed == 1.0) {
        res.kappa0 = 1.0;
        res.endpoint = true;
        const auto t = conserved(soliton_phi(classify_params(b, 1.0, 2.0), grid), b);
        res.momentum = t.momentum;
        res.energy = t.energy;
        return res;
    }

    auto grid_momentum = [&](double kappa) {
        return conserved(soliton_phi(classify_params(b, 1.0, 2.0 * kappa), grid), b).momentum;
    };
    double lo = std::max(0.0, res.kappa0_closed - kGridBracket);
    double hi = std::min(kKappaUpper, res.kappa0_closed + kGridBracket);
    double p_lo = grid_momentum(lo);
    const double p_hi = grid_momentum(hi);
    if (!(p_lo > 0.0 && p_hi < 0.0)) {
        std::ostringstream os;
        os << "find_kappa0: no sign change of the grid momentum on [" << lo << ", " << hi << "] (P=" << p_lo
           << ", " << p_hi << "); check the grid half-width against the decay length";
        throw RootBracketError(os.str());
    }
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        const double pm = grid_momentum(mid);
        if (pm > 0.0) {
            lo = mid;
            p_lo = pm;
        } else {
            hi = mid;
        }
    }
    res.kappa0 = 0.5 * (lo + hi);
    const auto t = conserved(soliton_phi(classify_params(b, 1.0, 2.0 * res.kappa0), grid), b);
    res.momentum = t.momentum;
    res.energy = t.energy;
    if (std::abs(res.momentum) > momentum_tol || std::abs(res.energy) > energy_tol) {
        std::ostringstream os;
        os << "find_kappa0: post-verification failed, |P|=" << std::abs(res.momentum) << " |E|=" << std::abs(res.energy);
        throw RootBracketError(os.str());
    }
    return res;
}

double scaling_check(double b, double kappa, double omega, const Grid& grid)
{
    if (omega == 1.0) return 0.0;
    const auto unit = classify_params(b, 1.0, 2.0 * kappa);
    const auto scaled = classify_params(b, omega, 2.0 * kappa * std::sqrt(omega));
    require_admissible(scaled, "scaling_check");
    const ComplexField lhs = soliton_phi(scaled, grid);
    const ComplexField base = soliton_phi(unit, grid);
    const ComplexField rhs = std::pow(omega, 0.25) * fourier::rescale_translate(base, std::sqrt(omega), 0.0, Outside::zero);
    return max_abs(lhs - rhs);
}

double action_value(double b, double omega, double c, const Grid& grid)
{
    const auto p = classify_params(b, omega, c);
    require_admissible(p, "action_value");
    const auto t = conserved(soliton_phi(p, grid), b);
    return t.energy + 0.5 * omega * t.mass + 0.5 * c * t.momentum;
}

HessianCheck action_hessian_det(const SolitonParams& p, double h, const Grid& grid)
{
    if (p.regime != Regime::interior) throw InvalidParams("action_hessian_det: interior regime required");
    if (!(h > 0.0)) throw InvalidArgument("action_hessian_det: step must be positive");
    for (double dw : {-2.0 * h, 2.0 * h}) {
        for (double dc : {-2.0 * h, 2.0 * h}) {
            if (p.omega + dw <= 0.0 || classify_params(p.b, p.omega + dw, p.c + dc).regime != Regime::interior) {
                throw InvalidArgument("action_hessian_det: step too large relative to the distance to the boundary");
            }
        }
    }
    auto d = [&](double w, double c) { return action_value(p.b, w, c, grid); };
    struct Entries {
        double ww, wc, cc;
    };
    auto entries = [&](double step) {
        const double w = p.omega, c = p.c;
        const double d0 = d(w, c);
        Entries e{};
        e.ww = (d(w + step, c) - 2.0 * d0 + d(w - step, c)) / (step * step);
        e.cc = (d(w, c + step) - 2.0 * d0 + d(w, c - step)) / (step * step);
        e.wc = (d(w + step, c + step) - d(w + step, c - step) - d(w - step, c + step) + d(w - step, c - step)) /
               (4.0 * step * step);
        return e;
    };
    const Entries coarse = entries(h);
    const Entries fine = entries(h / 2.0);
    auto extrapolate = [](double c, double f) { return (4.0 * f - c) / 3.0; };
    HessianCheck out;
    out.d_ww = extrapolate(coarse.ww, fine.ww);
    out.d_wc = extrapolate(coarse.wc, fine.wc);
    out.d_cc = extrapolate(coarse.cc, fine.cc);
    out.finite_difference = out.d_ww * out.d_cc - out.d_wc * out.d_wc;

    const double P = conserved(soliton_phi(p, grid), p.b).momentum;
    const double q = 4.0 * p.omega - p.c * p.c;
    out.closed_form = -2.0 * P / (std::sqrt(q) * (p.c * p.c + p.gamma * q));
    return out;
}

ComplexField apply_Lambda(const ComplexField& f)
{
    const ComplexField fx = fourier::derivative(f);
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = 0.5 * f[k] + f.grid.x(k) * fx[k];
    return out;
}

Soliton::Soliton(const SolitonParams& p, const Grid& g)
    : params(p), grid(g), Phi(g), Phi_prime(g), log_derivative(g), eta(g), phi(g), phi_prime(g), Lambda_phi(g)
{
    require_admissible(p, "Soliton");
    Phi = profile_Phi(p, g);
    eta = phase_eta(p, g);
    const cplx I(0.0, 1.0);
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double x = g.x(k);
        log_derivative[k] = profile_log_derivative_at(p, x);
        Phi_prime[k] = Phi[k] * log_derivative[k];
        const cplx phase = std::polar(1.0, eta[k]);
        const double eta_x = 0.5 * p.c - 0.25 * Phi[k] * Phi[k];
        phi[k] = Phi[k] * phase;
        phi_prime[k] = phase * (Phi_prime[k] + I * eta_x * Phi[k]);
        Lambda_phi[k] = 0.5 * phi[k] + x * phi_prime[k];
    }
}

} // namespace dnls

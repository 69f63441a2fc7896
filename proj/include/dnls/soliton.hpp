#pragma once

#include "dnls/fourier.hpp"
#include "dnls/grid.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace dnls {

enum class Regime { interior, endpoint, invalid };

std::string to_string(Regime r);

/// Soliton parameters (b, omega, c) together with their classification.
struct SolitonParams {
    double b = 0.0;
    double omega = 1.0;
    double c = 0.0;
    double gamma = 1.0;  ///< 1 + 16 b / 3
    double kappa = 0.0;  ///< c / (2 sqrt(omega))
    Regime regime = Regime::invalid;
    std::optional<double> kappa_star;  ///< attached when b <= -3/16

    /// Admissible c-range as a human-readable interval, for diagnostics.
    std::string admissible_range() const;
};

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

SolitonParams classify_params(double b, double omega, double c);

struct ConservedTriple {
    double energy = 0.0;
    double mass = 0.0;
    double momentum = 0.0;
};

// Closed-form profile pieces; valid for interior and endpoint regimes.
double profile_Phi_at(const SolitonParams& p, double x);
double profile_Phi_squared_at(const SolitonParams& p, double x);
/// Phi'(x) / Phi(x); finite everywhere, so no division by a decaying profile is needed.
double profile_log_derivative_at(const SolitonParams& p, double x);

RealField profile_Phi(const SolitonParams& p, const Grid& grid);
RealField profile_Phi_prime(const SolitonParams& p, const Grid& grid);

/**
 * eta(x) = (c/2) x - (1/4) int_{-inf}^x Phi^2 by spectral cumulative quadrature.
 *
 * Interior: the tail int_{-inf}^{-L} Phi^2 is below the decay budget and is set to 0.
 * Endpoint: the algebraic tail is added in closed form.
 */
RealField phase_eta(const SolitonParams& p, const Grid& grid);

/// eta from the closed-form antiderivative of Phi^2 (gamma > 0 or endpoint).
double phase_eta_closed_form(const SolitonParams& p, double x);
/// phi evaluated pointwise from closed forms (gamma > 0 or endpoint).
cplx soliton_phi_at(const SolitonParams& p, double x);

ComplexField soliton_phi(const SolitonParams& p, const Grid& grid);

// Whole-line integrals of the explicit profile (gamma > 0).
double mass_closed_form(const SolitonParams& p);
double momentum_closed_form(const SolitonParams& p);
/// int_{|x| > L} Phi^2 in closed form (gamma > 0).
double profile_tail_mass(const SolitonParams& p, double half_width);

/// E, M, P with spectral differentiation and trapezoid quadrature.
ConservedTriple conserved(const ComplexField& u, double b);

struct StationaryResidual {
    double complex_equation = 0.0;  ///< max-norm residual of the equation for phi
    double profile_equation = 0.0;  ///< max-norm residual of the equation for Phi
};

StationaryResidual stationary_residual(const SolitonParams& p, const Grid& grid);
double complex_equation_residual(const SolitonParams& p, const ComplexField& phi);
double profile_equation_residual(const SolitonParams& p, const RealField& Phi);

class RootBracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Kappa0Result {
    double kappa0 = 1.0;          ///< root of the momentum on the grid
    double kappa0_closed = 1.0;   ///< root of the closed-form momentum
    double momentum = 0.0;        ///< P(phi_{1,2 kappa0}) on the grid
    double energy = 0.0;          ///< E(phi_{1,2 kappa0}) on the grid
    bool endpoint = false;        ///< kappa0 = 1 (b = 0): algebraic soliton
};

/// Bisection for the closed-form momentum root on [0, 1 - 1e-6]; returns 1 when no interior root exists.
double find_kappa0_closed_form(double b);

/**
 * kappa0(b): closed-form bracket, then bisection of the grid momentum inside
 * [kappa - 1e-4, kappa + 1e-4]. Post-verifies |P| and |E| on the grid.
 */
Kappa0Result find_kappa0(double b, const Grid& grid, double momentum_tol = 1e-8, double energy_tol = 1e-6);

/// Max discrepancy between phi_{omega, 2 kappa sqrt(omega)} and omega^{1/4} phi_{1,2 kappa}(sqrt(omega) x).
double scaling_check(double b, double kappa, double omega, const Grid& grid);

/// d(omega, c) = S_{omega,c}(phi_{omega,c}) evaluated on the grid.
double action_value(double b, double omega, double c, const Grid& grid);

struct HessianCheck {
    double finite_difference = 0.0;  ///< Richardson-extrapolated det d''
    double closed_form = 0.0;        ///< -2P / (sqrt(4w - c^2) (c^2 + gamma (4w - c^2)))
    double d_ww = 0.0, d_wc = 0.0, d_cc = 0.0;
};

HessianCheck action_hessian_det(const SolitonParams& p, double h, const Grid& grid);

/// Lambda f = f/2 + y f_y.
ComplexField apply_Lambda(const ComplexField& f);

/**
 * Cached soliton background on one grid: every downstream module needs the
 * same profile, phase and derivatives.
 */
struct Soliton {
    SolitonParams params;
    Grid grid;
    RealField Phi;
    RealField Phi_prime;
    RealField log_derivative;  ///< Phi'/Phi
    RealField eta;
    ComplexField phi;
    ComplexField phi_prime;
    ComplexField Lambda_phi;

    Soliton(const SolitonParams& p, const Grid& g);
};

} // namespace dnls

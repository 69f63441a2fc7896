#pragma once

#include "dnls/fourier.hpp"
#include "dnls/grid.hpp"

namespace dnls::gkdv {

/// Ground state Q = 3^{1/4} sech^{1/2}(2x) of the critical gKdV equation, sampled on a grid.
struct Profile {
    Grid grid;
    RealField q;
    RealField q_prime;
    RealField q_cubed;
    RealField lambda_q;  ///< Q/2 + x Q'

    explicit Profile(const Grid& g);
};

double Q_at(double x);
/// int Q over the real line, 3^{1/4} sqrt(pi) Gamma(1/4) / (2 Gamma(3/4)).
double integral_Q();
/// M(Q) = ||Q||^2 = sqrt(3) pi / 2.
double mass_Q();

/// L v = -v'' + v - 5 Q^4 v.
RealField apply_L(const Profile& p, const RealField& v);

/// Dense symmetric matrix of L on the grid.
Eigen::MatrixXd assemble_L(const Profile& p);

struct IdentityResiduals {
    double cubic = 0.0;    ///< ||L Q^3 + 8 Q^3|| / ||Q^3||
    double scaling = 0.0;  ///< ||L Lambda Q + 2 Q|| / ||Q||
    double kernel = 0.0;   ///< ||L Q'|| / ||Q'||
    double energy = 0.0;   ///< E(Q) = ||Q'||^2 / 2 - ||Q||_6^6 / 6
};

IdentityResiduals identity_residuals(const Profile& p);

/// J = int eps(y) int_{-inf}^y Lambda Q.
double j_functional(const RealField& eps, const Profile& p);

struct GnSides {
    double left = 0.0;   ///< ||f||_6^6 / 6
    double right = 0.0;  ///< (M(f)/M(Q))^2 ||f_x||^2 / 2
};

GnSides gn_inequality_probe(const RealField& f, const Profile& p);

struct EigenCounts {
    int negative = 0;
    int kernel = 0;
    int positive = 0;
    double lowest = 0.0;
    double kernel_value = 0.0;
};

EigenCounts eigen_counts(const Profile& p, double kernel_tol = 1e-6);

} // namespace dnls::gkdv

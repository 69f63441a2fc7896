#pragma once

#include "dnls/evolver.hpp"
#include "dnls/soliton.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

struct SymmetryGuess {
    double lambda = 1.0;
    double theta = 0.0;
    double xshift = 0.0;
};

struct DecomposeOptions {
    double tol_factor = 1e-10;  ///< Newton tolerance is tol_factor * ||phi||_{L^2}
    int max_iter = 50;
    int max_halvings = 5;
    double lambda_bound = 0.5;  ///< lambda outside (1 - bound, 1 + bound) is flagged
};

class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModulationState {
    double lambda = 1.0;
    double theta = 0.0;
    double xshift = 0.0;
    ComplexField eps;
    std::array<double, 3> residuals{};  ///< (eps, chi), (eps, i phi), (eps, phi')
    int iterations = 0;
    bool lambda_in_bound = true;

    explicit ModulationState(const Grid& g) : eps(g) {}
};

/// eps = lambda^{1/2} e^{-i theta} u(lambda y + x) - phi(y).
ComplexField modulation_residual(const ComplexField& u, const Soliton& sol, double lambda, double theta, double xshift);

/**
 * Newton solve for (lambda, theta, x) making eps orthogonal to chi, i phi and phi'.
 * Throws DecompositionError when Newton does not converge.
 */
ModulationState decompose(const ComplexField& u, const Soliton& sol, const ComplexField& chi,
                          const SymmetryGuess& guess = {}, const DecomposeOptions& opts = {});

struct ErrorFunctionals {
    double energy = 0.0;  ///< E(phi + eps) - E(phi)
    double mass = 0.0;
    double momentum = 0.0;
    double action = 0.0;  ///< S = E + (omega/2) M + (c/2) P
};

ErrorFunctionals error_functionals(const ComplexField& eps, const Soliton& sol);

/// (eps, i Lambda phi).
double lyapunov(const ComplexField& eps, const Soliton& sol);

/// J[v] = Im int y v_y conj(v) over the centred window |y| <= window_fraction * L.
double j_weighted(const ComplexField& v, double window_fraction);

struct SolitonIdentities {
    double lambda_iphi = 0.0;   ///< (Lambda phi, i phi)
    double lambda_phip = 0.0;   ///< (Lambda phi, phi')
    double iphip_lambda = 0.0;  ///< (i phi', Lambda phi)
    double iphip_phi = 0.0;     ///< (i phi', phi)
    double lambda_chi = 0.0;    ///< (Lambda phi, chi)
};

SolitonIdentities soliton_identities(const Soliton& sol, const ComplexField& chi);

struct ModulationTrack {
    std::vector<double> t, s;
    std::vector<double> lambda, theta, xshift;
    std::vector<double> eps_l2, eps_h1;
    std::vector<double> lyapunov;
    std::vector<double> forcing;  ///< (eps, 2 omega phi + c i phi')
    std::vector<double> E_e, M_e, P_e, S_e;
    std::vector<double> res_chi, res_iphi, res_phip;
    std::vector<double> j_eps, j_u;  ///< windowed J[eps] and J[u]
    std::vector<double> momentum;    ///< P(u) at each sample
    std::optional<std::size_t> exit_index;  ///< first sample where decomposition failed
    std::string exit_reason;

    std::size_t size() const { return t.size(); }
};

/// Streaming tracker: warm-started decomposition of each pushed state.
class ModulationTracker {
public:
    ModulationTracker(const Soliton& sol, const ComplexField& chi, DecomposeOptions opts = {},
                      double window_fraction = 0.8);

    /// Returns false once a decomposition has failed; later pushes are ignored.
    bool push(double t, const ComplexField& u);

    const ModulationTrack& track() const { return track_; }
    const Soliton& soliton() const { return sol_; }
    /// Last successful decomposition, if any.
    const std::optional<ModulationState>& last() const { return last_; }

private:
    Soliton sol_;
    ComplexField chi_;
    DecomposeOptions opts_;
    double window_fraction_;
    ModulationTrack track_;
    std::optional<ModulationState> last_;
    bool failed_ = false;
};

ModulationTrack track(const Trajectory& traj, const Soliton& sol, const ComplexField& chi,
                      const DecomposeOptions& opts = {}, double window_fraction = 0.8);

struct ScalingLawsReport {
    double mass_max_rel = 0.0;      ///< max |M_e(s) - M_e(0)| / |M_e(0)|
    double momentum_max_rel = 0.0;  ///< max |P_e(s) - lambda P_e(0)| / |P_e(0)|
    double energy_max_rel = 0.0;    ///< max |E_e(s) - lambda^2 E_e(0)| / |E_e(0)|
};

ScalingLawsReport scaling_laws_check(const ModulationTrack& trk);

struct ParameterRateReport {
    std::vector<double> s;
    std::vector<double> lambda_rate;  ///< lambda_s / lambda
    std::vector<double> theta_rate;   ///< theta_s - omega
    std::vector<double> x_rate;       ///< x_s / lambda - c
    std::vector<double> ratio;        ///< sum of the three over ||eps||_{L^2}
    double max_ratio = 0.0;
    double max_theta_jump = 0.0;      ///< largest |theta[k+1] - theta[k]|
};

ParameterRateReport parameter_rate_probe(const ModulationTrack& trk, const SolitonParams& params);

struct LyapunovRateReport {
    std::vector<double> s;
    std::vector<double> rate;        ///< central-difference d/ds (eps, i Lambda phi)
    std::vector<double> forcing;     ///< (eps, 2 omega phi + c i phi')
    std::vector<double> leading;     ///< 2 omega (eps0, phi) + c lambda (eps0, i phi')
    double max_residual_ratio = 0.0;  ///< max |rate - forcing| / ||eps||_{H^1}^2
    double max_leading_ratio = 0.0;   ///< max |rate - leading| / ||eps||_{H^1}^2
    double min_rate = 0.0;
    double max_j_relation = 0.0;     ///< max |J[eps] - 2 lyapunov - J[u] - x P(u0)|
};

LyapunovRateReport lyapunov_rate_check(const ModulationTrack& trk, const ComplexField& eps0, const Soliton& sol);

} // namespace dnls

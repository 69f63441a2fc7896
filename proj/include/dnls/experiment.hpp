#pragma once

#include "dnls/evolver.hpp"
#include "dnls/linop.hpp"
#include "dnls/modulation.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

class DegenerateSeed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UnstableData {
    ComplexField u0;
    ComplexField eps0;             ///< u0 - phi
    std::array<double, 4> residuals{};  ///< (eps0, chi), (eps0, i phi), (eps0, phi'), (eps0, i phi')
    double eps_dot_phi = 0.0;      ///< (eps0, phi)
    double beta_ratio = 0.0;       ///< ||eps0||_{H^1}^2 / |(eps0, phi)|

    explicit UnstableData(const Grid& g) : u0(g), eps0(g) {}
};

/**
 * u0 = phi + delta * eps1 / ||eps1||_{H^1}, where eps1 is the seed with the
 * directions chi, i phi, phi', i phi' removed (modified Gram-Schmidt, real L^2).
 * The default seed is phi itself.
 */
UnstableData build_unstable_data(const Soliton& sol, const ComplexField& chi, double delta,
                                 const std::optional<ComplexField>& seed = std::nullopt);

struct TubeDistance {
    double distance = 0.0;
    double shift = 0.0;  ///< optimal y
    double phase = 0.0;  ///< optimal theta
};

/// inf over (theta, y) of ||u - e^{i theta} phi(. - y)||_{H^1} on the periodic grid.
TubeDistance tube_distance(const ComplexField& u, const Soliton& sol);

struct InstabilityOptions {
    std::size_t spectral_n = 512;       ///< grid used for the dense eigensolve of chi
    double spectral_half_width = 30.0;
    double slope_tol = 0.0;             ///< allowed decrease between consecutive Lyapunov samples
    bool flip_sign = false;             ///< use -eps1 so that (eps0, phi) < 0
    bool exploratory = false;           ///< set automatically for b = 0
};

struct InstabilityReport {
    SolitonParams params;
    double delta = 0.0;
    double alpha = 0.0;
    double phi_h1 = 0.0;
    double eps_dot_phi = 0.0;
    std::optional<double> exit_time;
    std::vector<double> times;
    std::vector<double> s;
    std::vector<double> lyapunov_series;
    std::vector<double> tube_distance_series;
    std::vector<double> eps_l2;
    bool monotone = false;
    double initial_slope = 0.0;  ///< d/ds lyapunov over the first interval
    double min_slope = 0.0;      ///< smallest d/ds lyapunov before exit (sign-adjusted)
    bool ceiling_ok = true;      ///< |lyapunov| <= ||Lambda phi|| ||eps|| at every sample
    double ceiling_horizon = 0.0;  ///< s at which the initial slope would cross the ceiling
    bool exploratory = false;
    std::string note;
    ModulationTrack track;
};

InstabilityReport run_instability(const SolitonParams& params, const Grid& grid, double delta, double alpha,
                                  const EvolveConfig& cfg, const InstabilityOptions& opts = {});

} // namespace dnls

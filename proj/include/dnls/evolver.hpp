#pragma once

#include "dnls/soliton.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace dnls {

struct EvolveConfig {
    double dt = 1e-4;
    double t_end = 1.0;
    double dealias = 2.0 / 3.0;
    int record_every = 100;
    double window_fraction = 0.8;  ///< x-weighted integrals use |x| <= window_fraction * L
    double tail_budget = 1e-10;    ///< allowed mass fraction outside the window
    double blowup_factor = 1e3;    ///< abort when ||u_x|| exceeds this multiple of its initial value
    bool keep_snapshots = true;

    void validate() const;
};

/// Raised when the integrator produces non-finite values or the blow-up guard trips.
class EvolutionError : public std::runtime_error {
public:
    EvolutionError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

struct Trajectory {
    Grid grid;
    double b = 0.0;
    std::vector<double> times;
    std::vector<ComplexField> snapshots;  // empty unless keep_snapshots
    std::vector<ConservedTriple> conserved_series;
    std::vector<double> virial;        ///< Im int_W x u_x conj(u)
    std::vector<double> variance;      ///< int_W x^2 |u|^2
    std::vector<double> variance_rhs;  ///< 4 Im int_W x u_x conj(u) + int_W x |u|^4
    std::vector<double> window_tail;   ///< mass fraction outside W
    bool stopped_by_observer = false;

    explicit Trajectory(const Grid& g) : grid(g) {}
};

/**
 * Integrating-factor RK4 for  u_t = i u_xx - |u|^2 u_x + i b |u|^4 u.
 *
 * The linear part is exact in Fourier space; the nonlinearity is evaluated
 * pseudospectrally and its spectrum is truncated to the dealiasing band.
 * The state is kept as a spectrum between steps.
 */
class Stepper {
public:
    Stepper(const Grid& grid, double dt, double b, double dealias = 2.0 / 3.0);

    void load(const ComplexField& u);
    ComplexField state() const;
    void step();
    void advance(long steps);

    /// ||u_x||_{L^2} from the current spectrum.
    double derivative_norm() const;
    bool finite() const;
    const Grid& grid() const { return grid_; }
    double dt() const { return dt_; }

private:
    CplxVec nonlinear(const CplxVec& hat) const;

    Grid grid_;
    double dt_;
    double b_;
    RealVec k_;
    CplxVec half_;  // e^{-i k^2 dt/2}
    std::vector<char> keep_;
    CplxVec spec_;
};

/// One step from u (convenience wrapper around Stepper).
ComplexField step(const ComplexField& u, double dt, double b, double dealias = 2.0 / 3.0);

/// Observer invoked at every recorded time; returning false stops the run.
using Observer = std::function<bool(double t, const ComplexField& u)>;

Trajectory evolve(const ComplexField& u0, const EvolveConfig& cfg, double b,
                  const std::vector<Observer>& observers = {});

struct WindowIntegrals {
    double virial = 0.0;
    double variance = 0.0;
    double variance_rhs = 0.0;
    double tail_fraction = 0.0;
};

WindowIntegrals window_integrals(const ComplexField& u, double window_fraction);

struct RateCheck {
    double numerical = 0.0;          ///< measured rate (least-squares slope or worst sample)
    double predicted = 0.0;
    double relative_error = 0.0;     ///< worst relative disagreement over the samples
    double max_tail_fraction = 0.0;
    bool window_ok = true;
};

/// d/dt Im int x u_x conj(u) against 4 E(u0).
RateCheck virial_rate_check(const Trajectory& traj, const EvolveConfig& cfg);

/// d/dt int x^2 |u|^2 against 4 Im int x u_x conj(u) + int x |u|^4, by central differences.
RateCheck variance_rate_check(const Trajectory& traj, const EvolveConfig& cfg);

} // namespace dnls

#include "dnls/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnls {

void EvolveConfig::validate() const
{
    if (!(dt > 0.0)) throw InvalidArgument("EvolveConfig: dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidArgument("EvolveConfig: t_end must be non-negative");
    if (!(dealias > 0.0 && dealias <= 1.0)) throw InvalidArgument("EvolveConfig: dealias must lie in (0, 1]");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw InvalidArgument("EvolveConfig: window_fraction must lie in (0, 1]");
    }
    if (record_every < 1) throw InvalidArgument("EvolveConfig: record_every must be at least 1");
}

Stepper::Stepper(const Grid& grid, double dt, double b, double dealias)
    : grid_(grid), dt_(dt), b_(b), k_(grid.wavenumbers()), half_(grid.n()), keep_(grid.n()), spec_(grid.n())
{
    if (dt == 0.0 || !std::isfinite(dt)) throw InvalidArgument("Stepper: dt must be finite and nonzero");
    if (!(dealias > 0.0 && dealias <= 1.0)) throw InvalidArgument("Stepper: dealias must lie in (0, 1]");
    const auto n = grid.n();
    const double cutoff = dealias * static_cast<double>(n) / 2.0;
    for (std::size_t j = 0; j < n; ++j) {
        half_[j] = std::polar(1.0, -k_[j] * k_[j] * dt / 2.0);
        const double m = j < n / 2 ? static_cast<double>(j) : static_cast<double>(n) - static_cast<double>(j);
        keep_[j] = dealias >= 1.0 ? 1 : static_cast<char>(m < cutoff);
    }
}

void Stepper::load(const ComplexField& u)
{
    require_same_grid(grid_, u.grid, "Stepper::load");
    spec_ = fourier::forward(u.values);
}

ComplexField Stepper::state() const { return ComplexField(grid_, fourier::backward(spec_)); }

CplxVec Stepper::nonlinear(const CplxVec& hat) const
{
    const auto n = grid_.n();
    CplxVec dspec(n);
    for (std::size_t j = 0; j < n; ++j) dspec[j] = j == n / 2 ? cplx{} : cplx(0.0, k_[j]) * hat[j];
    const CplxVec u = fourier::backward(hat);
    const CplxVec ux = fourier::backward(dspec);
    CplxVec nl(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double m = std::norm(u[j]);
        nl[j] = -m * ux[j] + cplx(0.0, b_ * m * m) * u[j];
    }
    CplxVec out = fourier::forward(nl);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = keep_[j] ? out[j] * dt_ : cplx{};
    }
    return out;
}

void Stepper::step()
{
    const auto n = grid_.n();
    const CplxVec& u = spec_;
    CplxVec tmp(n);

    const CplxVec a = nonlinear(u);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = half_[j] * (u[j] + 0.5 * a[j]);
    const CplxVec b = nonlinear(tmp);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = half_[j] * u[j] + 0.5 * b[j];
    const CplxVec c = nonlinear(tmp);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = half_[j] * (half_[j] * u[j] + c[j]);
    const CplxVec d = nonlinear(tmp);

    for (std::size_t j = 0; j < n; ++j) {
        const cplx e = half_[j];
        spec_[j] = e * e * u[j] + (e * e * a[j] + 2.0 * e * (b[j] + c[j]) + d[j]) / 6.0;
    }
}

void Stepper::advance(long steps)
{
    for (long s = 0; s < steps; ++s) step();
}

double Stepper::derivative_norm() const
{
    // Parseval: sum |u_x|^2 dx = (dx / n) sum k^2 |u^|^2.
    double s = 0.0;
    for (std::size_t j = 0; j < spec_.size(); ++j) s += k_[j] * k_[j] * std::norm(spec_[j]);
    return std::sqrt(s * grid_.dx() / static_cast<double>(grid_.n()));
}

bool Stepper::finite() const
{
    return std::all_of(spec_.begin(), spec_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexField step(const ComplexField& u, double dt, double b, double dealias)
{
    Stepper s(u.grid, dt, b, dealias);
    s.load(u);
    s.step();
    return s.state();
}

WindowIntegrals window_integrals(const ComplexField& u, double window_fraction)
{
    const Grid& g = u.grid;
    const double edge = window_fraction * g.half_width();
    const ComplexField ux = fourier::derivative(u);
    WindowIntegrals w;
    double inside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double x = g.x(k);
        const double m = std::norm(u[k]);
        total += m;
        if (std::abs(x) > edge) continue;
        inside += m;
        const double j = std::imag(ux[k] * std::conj(u[k]));
        w.virial += x * j;
        w.variance += x * x * m;
        w.variance_rhs += 4.0 * x * j + x * m * m;
    }
    const double dx = g.dx();
    w.virial *= dx;
    w.variance *= dx;
    w.variance_rhs *= dx;
    w.tail_fraction = total > 0.0 ? (total - inside) / total : 0.0;
    return w;
}

namespace {

void record(Trajectory& traj, double t, const ComplexField& u, const EvolveConfig& cfg)
{
    traj.times.push_back(t);
    traj.conserved_series.push_back(conserved(u, traj.b));
    const auto w = window_integrals(u, cfg.window_fraction);
    traj.virial.push_back(w.virial);
    traj.variance.push_back(w.variance);
    traj.variance_rhs.push_back(w.variance_rhs);
    traj.window_tail.push_back(w.tail_fraction);
    if (cfg.keep_snapshots) traj.snapshots.push_back(u);
}

} // namespace

Trajectory evolve(const ComplexField& u0, const EvolveConfig& cfg, double b, const std::vector<Observer>& observers)
{
    cfg.validate();
    if (!all_finite(u0)) throw EvolutionError("evolve: initial data is not finite", 0.0);

    Trajectory traj(u0.grid);
    traj.b = b;
    Stepper stepper(u0.grid, cfg.dt, b, cfg.dealias);
    stepper.load(u0);
    const double dx0 = stepper.derivative_norm();
    const long total = std::lround(cfg.t_end / cfg.dt);

    auto notify = [&](double t, const ComplexField& u) {
        bool go = true;
        for (const auto& obs : observers) go = obs(t, u) && go;
        return go;
    };

    record(traj, 0.0, u0, cfg);
    if (!notify(0.0, u0)) {
        traj.stopped_by_observer = true;
        return traj;
    }

    for (long s = 1; s <= total; ++s) {
        stepper.step();
        const double t = static_cast<double>(s) * cfg.dt;
        if (!stepper.finite()) {
            std::ostringstream os;
            os << "evolve: non-finite values at t = " << t << " (scheme instability or blow-up)";
            throw EvolutionError(os.str(), t);
        }
        if (dx0 > 0.0 && stepper.derivative_norm() > cfg.blowup_factor * dx0) {
            std::ostringstream os;
            os << "evolve: ||u_x|| exceeded " << cfg.blowup_factor << " times its initial value at t = " << t;
            throw EvolutionError(os.str(), t);
        }
        if (s % cfg.record_every == 0 || s == total) {
            const ComplexField u = stepper.state();
            record(traj, t, u, cfg);
            if (!notify(t, u)) {
                traj.stopped_by_observer = true;
                break;
            }
        }
    }
    return traj;
}

namespace {

double least_squares_slope(const std::vector<double>& t, const std::vector<double>& y)
{
    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        st += t[k];
        sy += y[k];
    }
    const double tm = st / n, ym = sy / n;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        num += (t[k] - tm) * (y[k] - ym);
        den += (t[k] - tm) * (t[k] - tm);
    }
    return num / den;
}

void require_samples(const Trajectory& traj, const char* where)
{
    if (traj.times.size() < 3) throw InvalidArgument(std::string(where) + ": need at least 3 recorded samples");
}

} // namespace

RateCheck virial_rate_check(const Trajectory& traj, const EvolveConfig& cfg)
{
    require_samples(traj, "virial_rate_check");
    RateCheck rc;
    rc.predicted = 4.0 * traj.conserved_series.front().energy;
    rc.numerical = least_squares_slope(traj.times, traj.virial);
    const double scale = std::max(std::abs(rc.predicted), 1e-300);
    for (std::size_t k = 1; k + 1 < traj.times.size(); ++k) {
        const double d = (traj.virial[k + 1] - traj.virial[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        rc.relative_error = std::max(rc.relative_error, std::abs(d - rc.predicted) / scale);
    }
    rc.relative_error = std::max(rc.relative_error, std::abs(rc.numerical - rc.predicted) / scale);
    rc.max_tail_fraction = *std::max_element(traj.window_tail.begin(), traj.window_tail.end());
    rc.window_ok = rc.max_tail_fraction <= cfg.tail_budget;
    return rc;
}

RateCheck variance_rate_check(const Trajectory& traj, const EvolveConfig& cfg)
{
    require_samples(traj, "variance_rate_check");
    RateCheck rc;
    double worst = -1.0;
    for (std::size_t k = 1; k + 1 < traj.times.size(); ++k) {
        const double d = (traj.variance[k + 1] - traj.variance[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        const double rhs = traj.variance_rhs[k];
        const double err = std::abs(d - rhs) / std::max(std::abs(rhs), 1e-300);
        if (err > worst) {
            worst = err;
            rc.numerical = d;
            rc.predicted = rhs;
        }
    }
    rc.relative_error = worst;
    rc.max_tail_fraction = *std::max_element(traj.window_tail.begin(), traj.window_tail.end());
    rc.window_ok = rc.max_tail_fraction <= cfg.tail_budget;
    return rc;
}

} // namespace dnls

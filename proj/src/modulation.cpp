#include "dnls/modulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnls {

namespace {

constexpr cplx I{0.0, 1.0};

struct Evaluation {
    ComplexField v;   // lambda^{1/2} e^{-i theta} u(lambda y + x)
    ComplexField du;  // lambda^{1/2} e^{-i theta} u'(lambda y + x)
    Evaluation(const Grid& g) : v(g), du(g) {}
};

// Periodic evaluation: the state lives on the torus, so a soliton that has
// travelled across the box edge is still decomposed correctly.
Evaluation evaluate(const ComplexField& u, double lambda, double theta, double xshift, bool with_derivative)
{
    Evaluation e(u.grid);
    const cplx factor = std::sqrt(lambda) * std::polar(1.0, -theta);
    e.v = factor * fourier::rescale_translate(u, lambda, xshift, Outside::periodic, 0);
    if (with_derivative) e.du = factor * fourier::rescale_translate(u, lambda, xshift, Outside::periodic, 1);
    return e;
}

std::array<double, 3> orthogonality(const ComplexField& eps, const Soliton& sol, const ComplexField& chi)
{
    return {inner(eps, chi), inner(eps, I * sol.phi), inner(eps, sol.phi_prime)};
}

double norm3(const std::array<double, 3>& f) { return std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]); }

double max3(const std::array<double, 3>& f)
{
    return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
}

} // namespace

ComplexField modulation_residual(const ComplexField& u, const Soliton& sol, double lambda, double theta, double xshift)
{
    require_same_grid(u.grid, sol.grid, "modulation_residual");
    if (!(lambda > 0.0)) throw InvalidArgument("modulation_residual: lambda must be positive");
    return evaluate(u, lambda, theta, xshift, false).v - sol.phi;
}

ModulationState decompose(const ComplexField& u, const Soliton& sol, const ComplexField& chi,
                          const SymmetryGuess& guess, const DecomposeOptions& opts)
{
    require_same_grid(u.grid, sol.grid, "decompose");
    require_same_grid(chi.grid, sol.grid, "decompose");
    if (!(guess.lambda > 0.0)) throw InvalidArgument("decompose: lambda guess must be positive");

    const Grid& g = u.grid;
    const double tol = opts.tol_factor * norm_l2(sol.phi);
    const ComplexField iphi = I * sol.phi;

    double lam = guess.lambda, th = guess.theta, x = guess.xshift;
    Evaluation ev = evaluate(u, lam, th, x, true);
    ComplexField eps = ev.v - sol.phi;
    auto F = orthogonality(eps, sol, chi);

    int it = 0;
    for (; it < opts.max_iter && max3(F) >= tol; ++it) {
        // Columns: d eps / d lambda, d eps / d theta, d eps / d x.
        ComplexField d_lam(g), d_th(g);
        for (std::size_t k = 0; k < g.n(); ++k) {
            d_lam[k] = ev.v[k] / (2.0 * lam) + g.x(k) * ev.du[k];
            d_th[k] = -I * ev.v[k];
        }
        const ComplexField* cols[3] = {&d_lam, &d_th, &ev.du};
        const ComplexField* dirs[3] = {&chi, &iphi, &sol.phi_prime};
        Eigen::Matrix3d J;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) J(r, c) = inner(*cols[c], *dirs[r]);
        }
        const Eigen::Vector3d rhs(-F[0], -F[1], -F[2]);
        const Eigen::Vector3d delta = J.fullPivLu().solve(rhs);
        if (!delta.allFinite()) throw DecompositionError("decompose: singular modulation Jacobian");

        const double f0 = norm3(F);
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
            const double lam_try = lam + step * delta(0);
            if (!(lam_try > 0.0)) continue;
            Evaluation trial = evaluate(u, lam_try, th + step * delta(1), x + step * delta(2), true);
            ComplexField eps_try = trial.v - sol.phi;
            const auto F_try = orthogonality(eps_try, sol, chi);
            if (norm3(F_try) < f0 || h == opts.max_halvings) {
                lam = lam_try;
                th += step * delta(1);
                x += step * delta(2);
                ev = std::move(trial);
                eps = std::move(eps_try);
                F = F_try;
                accepted = norm3(F_try) < f0;
                break;
            }
        }
        if (!accepted && max3(F) >= tol) {
            std::ostringstream os;
            os << "decompose: line search stalled at iteration " << it << " with residual " << max3(F);
            throw DecompositionError(os.str());
        }
    }
    if (!(max3(F) < tol)) {
        std::ostringstream os;
        os << "decompose: no convergence after " << opts.max_iter << " iterations (residual " << max3(F)
           << ", tolerance " << tol << ")";
        throw DecompositionError(os.str());
    }

    ModulationState st(g);
    st.lambda = lam;
    st.theta = th;
    st.xshift = x;
    st.eps = std::move(eps);
    st.residuals = F;
    st.iterations = it;
    st.lambda_in_bound = std::abs(lam - 1.0) < opts.lambda_bound;
    return st;
}

ErrorFunctionals error_functionals(const ComplexField& eps, const Soliton& sol)
{
    require_same_grid(eps.grid, sol.grid, "error_functionals");
    const auto& p = sol.params;
    const auto base = conserved(sol.phi, p.b);
    const auto pert = conserved(sol.phi + eps, p.b);
    ErrorFunctionals e;
    e.energy = pert.energy - base.energy;
    e.mass = pert.mass - base.mass;
    e.momentum = pert.momentum - base.momentum;
    e.action = e.energy + 0.5 * p.omega * e.mass + 0.5 * p.c * e.momentum;
    return e;
}

double lyapunov(const ComplexField& eps, const Soliton& sol)
{
    require_same_grid(eps.grid, sol.grid, "lyapunov");
    return inner(eps, I * sol.Lambda_phi);
}

double j_weighted(const ComplexField& v, double window_fraction)
{
    const Grid& g = v.grid;
    const double edge = window_fraction * g.half_width();
    const ComplexField vy = fourier::derivative(v);
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double y = g.x(k);
        if (std::abs(y) <= edge) s += y * std::imag(vy[k] * std::conj(v[k]));
    }
    return s * g.dx();
}

SolitonIdentities soliton_identities(const Soliton& sol, const ComplexField& chi)
{
    SolitonIdentities r;
    const ComplexField iphip = I * sol.phi_prime;
    r.lambda_iphi = inner(sol.Lambda_phi, I * sol.phi);
    r.lambda_phip = inner(sol.Lambda_phi, sol.phi_prime);
    r.iphip_lambda = inner(iphip, sol.Lambda_phi);
    r.iphip_phi = inner(iphip, sol.phi);
    r.lambda_chi = inner(sol.Lambda_phi, chi);
    return r;
}

ModulationTracker::ModulationTracker(const Soliton& sol, const ComplexField& chi, DecomposeOptions opts,
                                     double window_fraction)
    : sol_(sol), chi_(chi), opts_(opts), window_fraction_(window_fraction)
{
    require_same_grid(sol.grid, chi.grid, "ModulationTracker");
}

bool ModulationTracker::push(double t, const ComplexField& u)
{
    if (failed_) return false;
    const auto& p = sol_.params;
    SymmetryGuess guess;
    if (last_) {
        // Leading-order rates: theta_s = omega, x_s = c lambda, with ds/dt = 1/lambda^2.
        const double dt = t - track_.t.back();
        const double lam = last_->lambda;
        guess = {lam, last_->theta + p.omega * dt / (lam * lam), last_->xshift + p.c * dt / lam};
    }

    ModulationState st(sol_.grid);
    try {
        st = decompose(u, sol_, chi_, guess, opts_);
    } catch (const DecompositionError& e) {
        failed_ = true;
        track_.exit_index = track_.size();
        track_.exit_reason = e.what();
        return false;
    }

    double theta = st.theta;
    if (last_) {
        // Continuous branch: choose the 2 pi shift closest to the previous value.
        constexpr double two_pi = 2.0 * std::numbers::pi;
        theta -= two_pi * std::round((theta - last_->theta) / two_pi);
        st.theta = theta;
    }

    double s = 0.0;
    if (!track_.t.empty()) {
        const double l0 = track_.lambda.back();
        s = track_.s.back() + 0.5 * (t - track_.t.back()) * (1.0 / (l0 * l0) + 1.0 / (st.lambda * st.lambda));
    }

    const auto ef = error_functionals(st.eps, sol_);
    track_.t.push_back(t);
    track_.s.push_back(s);
    track_.lambda.push_back(st.lambda);
    track_.theta.push_back(theta);
    track_.xshift.push_back(st.xshift);
    track_.eps_l2.push_back(norm_l2(st.eps));
    track_.eps_h1.push_back(norm_h1(st.eps));
    track_.lyapunov.push_back(lyapunov(st.eps, sol_));
    ComplexField force(sol_.grid);
    for (std::size_t k = 0; k < force.size(); ++k) {
        force[k] = 2.0 * p.omega * sol_.phi[k] + p.c * I * sol_.phi_prime[k];
    }
    track_.forcing.push_back(inner(st.eps, force));
    track_.E_e.push_back(ef.energy);
    track_.M_e.push_back(ef.mass);
    track_.P_e.push_back(ef.momentum);
    track_.S_e.push_back(ef.action);
    track_.res_chi.push_back(st.residuals[0]);
    track_.res_iphi.push_back(st.residuals[1]);
    track_.res_phip.push_back(st.residuals[2]);
    track_.j_eps.push_back(j_weighted(st.eps, window_fraction_));
    track_.j_u.push_back(j_weighted(u, window_fraction_));
    track_.momentum.push_back(conserved(u, p.b).momentum);
    last_ = std::move(st);
    return true;
}

ModulationTrack track(const Trajectory& traj, const Soliton& sol, const ComplexField& chi,
                      const DecomposeOptions& opts, double window_fraction)
{
    if (traj.snapshots.size() != traj.times.size()) {
        throw InvalidArgument("track: trajectory was recorded without snapshots");
    }
    ModulationTracker tracker(sol, chi, opts, window_fraction);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (!tracker.push(traj.times[k], traj.snapshots[k])) break;
    }
    return tracker.track();
}

ScalingLawsReport scaling_laws_check(const ModulationTrack& trk)
{
    ScalingLawsReport r;
    if (trk.size() == 0) return r;
    const double m0 = trk.M_e.front(), p0 = trk.P_e.front(), e0 = trk.E_e.front();
    for (std::size_t k = 0; k < trk.size(); ++k) {
        const double lam = trk.lambda[k];
        if (m0 != 0.0) r.mass_max_rel = std::max(r.mass_max_rel, std::abs(trk.M_e[k] - m0) / std::abs(m0));
        if (p0 != 0.0) {
            r.momentum_max_rel = std::max(r.momentum_max_rel, std::abs(trk.P_e[k] - lam * p0) / std::abs(p0));
        }
        if (e0 != 0.0) {
            r.energy_max_rel = std::max(r.energy_max_rel, std::abs(trk.E_e[k] - lam * lam * e0) / std::abs(e0));
        }
    }
    return r;
}

namespace {

// Central difference in s at interior sample k (one-sided at the ends).
double ds_derivative(const std::vector<double>& s, const std::vector<double>& y, std::size_t k)
{
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == s.size() ? k : k + 1;
    return (y[hi] - y[lo]) / (s[hi] - s[lo]);
}

} // namespace

ParameterRateReport parameter_rate_probe(const ModulationTrack& trk, const SolitonParams& params)
{
    if (trk.size() < 3) throw InvalidArgument("parameter_rate_probe: need at least 3 samples");
    ParameterRateReport r;
    for (std::size_t k = 0; k < trk.size(); ++k) {
        const double lam = trk.lambda[k];
        const double lr = ds_derivative(trk.s, trk.lambda, k) / lam;
        const double tr = ds_derivative(trk.s, trk.theta, k) - params.omega;
        const double xr = ds_derivative(trk.s, trk.xshift, k) / lam - params.c;
        r.s.push_back(trk.s[k]);
        r.lambda_rate.push_back(lr);
        r.theta_rate.push_back(tr);
        r.x_rate.push_back(xr);
        const double ratio = (std::abs(lr) + std::abs(tr) + std::abs(xr)) / std::max(trk.eps_l2[k], 1e-300);
        r.ratio.push_back(ratio);
        r.max_ratio = std::max(r.max_ratio, ratio);
        if (k + 1 < trk.size()) r.max_theta_jump = std::max(r.max_theta_jump, std::abs(trk.theta[k + 1] - trk.theta[k]));
    }
    return r;
}

LyapunovRateReport lyapunov_rate_check(const ModulationTrack& trk, const ComplexField& eps0, const Soliton& sol)
{
    if (trk.size() < 3) throw InvalidArgument("lyapunov_rate_check: need at least 3 samples");
    const auto& p = sol.params;
    const double a = 2.0 * p.omega * inner(eps0, sol.phi);
    const double b = p.c * inner(eps0, I * sol.phi_prime);
    const double p0 = trk.momentum.front();

    LyapunovRateReport r;
    r.min_rate = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < trk.size(); ++k) {
        const double rate = ds_derivative(trk.s, trk.lyapunov, k);
        const double lead = a + b * trk.lambda[k];
        const double h1sq = trk.eps_h1[k] * trk.eps_h1[k];
        r.s.push_back(trk.s[k]);
        r.rate.push_back(rate);
        r.forcing.push_back(trk.forcing[k]);
        r.leading.push_back(lead);
        r.max_residual_ratio = std::max(r.max_residual_ratio, std::abs(rate - trk.forcing[k]) / h1sq);
        r.max_leading_ratio = std::max(r.max_leading_ratio, std::abs(rate - lead) / h1sq);
        r.min_rate = std::min(r.min_rate, rate);
    }
    for (std::size_t k = 0; k < trk.size(); ++k) {
        const double rel = trk.j_eps[k] - 2.0 * trk.lyapunov[k] - trk.j_u[k] - trk.xshift[k] * p0;
        r.max_j_relation = std::max(r.max_j_relation, std::abs(rel));
    }
    return r;
}

} // namespace dnls

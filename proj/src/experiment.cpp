#include "dnls/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnls {

namespace {

constexpr cplx I{0.0, 1.0};

} // namespace

UnstableData build_unstable_data(const Soliton& sol, const ComplexField& chi, double delta,
                                 const std::optional<ComplexField>& seed)
{
    require_same_grid(sol.grid, chi.grid, "build_unstable_data");
    if (!(delta > 0.0)) throw InvalidArgument("build_unstable_data: delta must be positive");
    const Grid& g = sol.grid;

    std::vector<ComplexField> basis;
    for (const ComplexField& d : {chi, I * sol.phi, sol.phi_prime, I * sol.phi_prime}) {
        ComplexField e = d;
        for (const auto& q : basis) e = e - inner(e, q) * q;
        const double nrm = norm_l2(e);
        if (nrm < 1e-12) continue;  // direction already spanned
        basis.push_back((1.0 / nrm) * e);
    }

    ComplexField eps1 = seed ? *seed : sol.phi;
    require_same_grid(eps1.grid, g, "build_unstable_data seed");
    const double seed_h1 = norm_h1(eps1);
    // Two passes of modified Gram-Schmidt keep the residuals at round-off.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) eps1 = eps1 - inner(eps1, q) * q;
    }
    const double h1 = norm_h1(eps1);
    const double along = inner(eps1, sol.phi);
    if (h1 <= 1e-10 * seed_h1 || std::abs(along) < 1e-10 * h1 * norm_l2(sol.phi)) {
        throw DegenerateSeed("build_unstable_data: seed has no component along phi after projection; "
                             "choose a different seed");
    }

    UnstableData out(g);
    out.eps0 = (delta / h1) * eps1;
    out.u0 = sol.phi + out.eps0;
    out.residuals = {inner(out.eps0, chi), inner(out.eps0, I * sol.phi), inner(out.eps0, sol.phi_prime),
                     inner(out.eps0, I * sol.phi_prime)};
    out.eps_dot_phi = inner(out.eps0, sol.phi);
    const double e_h1 = norm_h1(out.eps0);
    out.beta_ratio = e_h1 * e_h1 / std::abs(out.eps_dot_phi);
    return out;
}

TubeDistance tube_distance(const ComplexField& u, const Soliton& sol)
{
    require_same_grid(u.grid, sol.grid, "tube_distance");
    const Grid& g = u.grid;
    const std::size_t n = g.n();
    const double dx = g.dx();
    const auto uh = fourier::forward(u.values);
    const auto ph = fourier::forward(sol.phi.values);
    const auto k = g.wavenumbers();

    // Pairing C(y) = <u, phi(. - y)>_{H^1} = (dx / n) sum (1 + k^2) u^ conj(phi^) e^{i k y}.
    CplxVec w(n);
    double nu = 0.0, np = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) continue;  // Nyquist bin has no well-defined shift
        const double weight = 1.0 + k[j] * k[j];
        w[j] = weight * uh[j] * std::conj(ph[j]);
        nu += weight * std::norm(uh[j]);
        np += weight * std::norm(ph[j]);
    }
    nu *= dx / static_cast<double>(n);
    np *= dx / static_cast<double>(n);
    const auto corr = fourier::backward(w);  // corr[m] * dx = C(m dx)

    std::size_t best = 0;
    for (std::size_t m = 1; m < n; ++m) {
        if (std::abs(corr[m]) > std::abs(corr[best])) best = m;
    }

    auto pairing = [&](double y) {
        cplx s{};
        for (std::size_t j = 0; j < n; ++j) s += w[j] * std::polar(1.0, k[j] * y);
        return s * (dx / static_cast<double>(n));
    };

    // Golden-section search for the maximum of |C| on the bracket around the best node.
    const double phi_g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = (static_cast<double>(best) - 1.0) * dx, b = (static_cast<double>(best) + 1.0) * dx;
    double c = b - phi_g * (b - a), d = a + phi_g * (b - a);
    double fc = std::abs(pairing(c)), fd = std::abs(pairing(d));
    for (int it = 0; it < 80 && (b - a) > 1e-13 * g.length(); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi_g * (b - a);
            fc = std::abs(pairing(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi_g * (b - a);
            fd = std::abs(pairing(d));
        }
    }
    double y = 0.5 * (a + b);
    cplx C = pairing(y);
    const cplx C_node = corr[best] * dx;
    if (std::abs(C_node) > std::abs(C)) {
        C = C_node;
        y = static_cast<double>(best) * dx;
    }

    // Map the shift into [-L, L).
    y = std::fmod(y + g.half_width(), g.length());
    if (y < 0.0) y += g.length();
    y -= g.half_width();

    TubeDistance td;
    td.distance = std::sqrt(std::max(0.0, nu + np - 2.0 * std::abs(C)));
    td.shift = y;
    td.phase = std::arg(C);
    return td;
}

InstabilityReport run_instability(const SolitonParams& params, const Grid& grid, double delta, double alpha,
                                  const EvolveConfig& cfg, const InstabilityOptions& opts)
{
    if (params.regime == Regime::invalid) {
        throw InvalidParams("run_instability: parameters outside the admissible range " + params.admissible_range());
    }
    if (!(alpha > 0.0)) throw InvalidArgument("run_instability: alpha must be positive");
    cfg.validate();

    InstabilityReport rep;
    rep.params = params;
    rep.delta = delta;
    rep.alpha = alpha;
    rep.exploratory = opts.exploratory || params.b == 0.0 || params.regime == Regime::endpoint;

    const Soliton sol(params, grid);
    const Soliton coarse(params, Grid(opts.spectral_n, opts.spectral_half_width));
    const auto op = assemble_Ltilde(coarse);
    const auto sd = spectral_decompose(op, -1.0, -1.0, !rep.exploratory);
    const ComplexField chi = transfer_chi(sd, coarse, sol);

    std::optional<ComplexField> seed;
    if (opts.flip_sign) seed = -1.0 * sol.phi;
    const auto data = build_unstable_data(sol, chi, delta, seed);
    rep.phi_h1 = norm_h1(sol.phi);
    rep.eps_dot_phi = data.eps_dot_phi;

    ModulationTracker tracker(sol, chi);
    bool tracking = true;
    auto observer = [&](double t, const ComplexField& u) {
        const double dist = tube_distance(u, sol).distance;
        rep.times.push_back(t);
        rep.tube_distance_series.push_back(dist);
        if (tracking) tracking = tracker.push(t, u);
        return dist < alpha;
    };
    EvolveConfig run_cfg = cfg;
    run_cfg.keep_snapshots = false;
    evolve(data.u0, run_cfg, params.b, {observer});

    rep.track = tracker.track();
    const auto& trk = rep.track;
    rep.s = trk.s;
    rep.lyapunov_series = trk.lyapunov;
    rep.eps_l2 = trk.eps_l2;

    // Exit time by linear interpolation of the distance across alpha.
    const auto& d = rep.tube_distance_series;
    std::size_t in_tube = d.size();
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] >= alpha) {
            in_tube = k;
            if (k == 0) {
                rep.exit_time = rep.times[0];
            } else {
                const double f = (alpha - d[k - 1]) / (d[k] - d[k - 1]);
                rep.exit_time = rep.times[k - 1] + f * (rep.times[k] - rep.times[k - 1]);
            }
            break;
        }
    }

    // Lyapunov certification on the samples that are both tracked and inside the tube.
    const std::size_t m = std::min(in_tube, trk.size());
    const double sign = rep.eps_dot_phi >= 0.0 ? 1.0 : -1.0;
    const double lam_phi = norm_l2(sol.Lambda_phi);
    rep.monotone = m >= 2;
    rep.min_slope = std::numeric_limits<double>::infinity();
    double eps_max = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        eps_max = std::max(eps_max, trk.eps_l2[k]);
        if (std::abs(trk.lyapunov[k]) > lam_phi * trk.eps_l2[k] * (1.0 + 1e-12)) rep.ceiling_ok = false;
        if (k + 1 < m) {
            const double step = sign * (trk.lyapunov[k + 1] - trk.lyapunov[k]);
            const double slope = step / (trk.s[k + 1] - trk.s[k]);
            if (k == 0) rep.initial_slope = slope;
            rep.min_slope = std::min(rep.min_slope, slope);
            if (!(step > -opts.slope_tol)) rep.monotone = false;
        }
    }
    if (m < 2) rep.min_slope = 0.0;
    if (rep.initial_slope > 0.0) {
        rep.ceiling_horizon = (lam_phi * eps_max + std::abs(trk.lyapunov.front())) / rep.initial_slope;
    }

    std::ostringstream note;
    if (rep.exploratory) note << "exploratory run (endpoint soliton); ";
    if (trk.exit_index) note << "modulation lost at sample " << *trk.exit_index << ": " << trk.exit_reason << "; ";
    if (!rep.exit_time) note << "no tube exit before t_end; ";
    rep.note = note.str();
    return rep;
}

} // namespace dnls

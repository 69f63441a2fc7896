// Command-line driver. Each subcommand turns its flags into a run config
// (JSON), writes it next to the outputs and executes it; `replay` re-executes
// a saved config.

#include "dnls/experiment.hpp"
#include "dnls/gkdv.hpp"
#include "dnls/io.hpp"
#include "dnls/random_fields.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace dnls;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit : int { ok = 0, bad_params = 2, classification = 3, evolve_failed = 4, instability_failed = 5, gkdv_failed = 6 };

std::mutex print_mutex;

void say(const std::string& line)
{
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cout << line << '\n';
}

void warn(const std::string& line)
{
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cerr << line << '\n';
}

// Resolve (b, omega, c) from a config, honouring the "kappa0" switch.
SolitonParams resolve_params(const json& cfg, const Grid& grid)
{
    const double b = cfg.at("b");
    const double omega = cfg.at("omega");
    double c = cfg.value("c", 0.0);
    if (cfg.value("kappa0", false)) {
        if (b < 0.0) throw InvalidParams("--kappa0 requires b >= 0");
        const auto k = find_kappa0(b, grid);
        c = 2.0 * k.kappa0 * std::sqrt(omega);
    }
    auto p = classify_params(b, omega, c);
    if (p.regime == Regime::invalid) {
        std::ostringstream os;
        os << "parameters (b=" << b << ", omega=" << omega << ", c=" << c << ") are not admissible; c must lie in "
           << p.admissible_range();
        throw InvalidParams(os.str());
    }
    return p;
}

Grid grid_of(const json& cfg) { return Grid(cfg.at("n").get<std::size_t>(), cfg.at("half_width").get<double>()); }

int run_soliton(const json& cfg, const fs::path& out)
{
    const Grid g = grid_of(cfg);
    const auto p = resolve_params(cfg, g);
    const Soliton sol(p, g);
    const auto triple = conserved(sol.phi, p.b);
    const auto res = stationary_residual(p, g);

    json rep = {{"params", io::to_json(p)}, {"conserved", io::to_json(triple)},
                {"residuals", {{"complex_equation", res.complex_equation}, {"profile_equation", res.profile_equation}}}};
    double mass = triple.mass;
    if (p.gamma > 0.0) {
        const double tail = profile_tail_mass(p, g.half_width());
        mass += tail;
        rep["tail_mass"] = tail;
        rep["mass_closed_form"] = mass_closed_form(p);
        rep["momentum_closed_form"] = momentum_closed_form(p);
    }
    rep["mass"] = mass;
    if (cfg.value("kappa0", false)) rep["kappa0"] = p.kappa;

    io::write_csv(out / "profile.csv", io::profile_table(sol), cfg, &g);
    io::write_json(out / "soliton.json", rep, cfg, &g);
    say("soliton " + to_string(p.regime) + ": mass " + io::format_double(mass) + ", residuals " +
        io::format_double(res.complex_equation) + " / " + io::format_double(res.profile_equation));
    return ok;
}

int run_spectrum(const json& cfg, const fs::path& out)
{
    const Grid g = grid_of(cfg);
    const auto p = resolve_params(cfg, g);
    const bool diagnostic = p.regime == Regime::endpoint;
    const auto op = assemble_Ltilde(p, g);
    json rep = {{"params", io::to_json(p)}, {"asymmetry", op.asymmetry}, {"diagnostic_only", diagnostic}};

    auto write_counts = [&](const SignatureCounts& c) {
        rep["signature"] = {{"negative", c.negative}, {"kernel", c.kernel}, {"positive", c.positive},
                            {"ambiguous", c.ambiguous}};
    };

    std::optional<SpectralData> sd;
    try {
        sd.emplace(spectral_decompose(op, cfg.value("gap", -1.0), cfg.value("kernel_tol", -1.0), !diagnostic));
    } catch (const ClassificationError& e) {
        write_counts(e.counts());
        rep["error"] = e.what();
        io::write_json(out / "spectrum.json", rep, cfg, &g);
        warn(e.what());
        return classification;
    }
    write_counts(sd->counts);
    rep["lambda_neg"] = sd->lambda_neg;
    rep["smallest_positive"] = sd->smallest_positive;
    rep["kernel_angle"] = sd->kernel_angle;

    const auto seed = cfg.value("seed", std::uint64_t{7});
    const auto cr = coercivity_probe(*sd, op, cfg.value("coercivity_trials", 20), seed);
    rep["coercivity_min_ratio"] = cr.min_ratio;

    if (cfg.value("check_factorization", false)) {
        double worst = 0.0;
        const int trials = cfg.value("trials", 10);
        for (int t = 0; t < trials; ++t) {
            const auto q = quadratic_form_identity(op, random_smooth_field(g, seed + 1000 + static_cast<std::uint64_t>(t)));
            worst = std::max(worst, std::abs(q.direct - q.factorized) / std::abs(q.direct));
        }
        const auto cs = build_chi_star(op);
        const auto q = quadratic_form_identity(op, cs.chi_star);
        rep["quadratic_form"] = {{"trials", trials},
                                 {"max_relative_error", worst},
                                 {"lambda11", cs.lambda11},
                                 {"chi_star_direct", q.direct},
                                 {"chi_star_factorized", q.factorized}};
        say("quadratic-form identity: max relative error " + io::format_double(worst));
    }

    io::write_csv(out / "eigenvalues.csv", io::eigenvalue_table(*sd), cfg, &g);
    io::write_csv(out / "chi.csv", io::chi_table(*sd), cfg, &g);
    io::write_json(out / "spectrum.json", rep, cfg, &g);
    std::ostringstream os;
    os << "signature (" << sd->counts.negative << " negative, " << sd->counts.kernel << " kernel, "
       << sd->counts.positive << " positive)" << (diagnostic ? " [diagnostic-only]" : "");
    say(os.str());
    return ok;
}

int run_evolve(const json& cfg, const fs::path& out)
{
    const Grid g = grid_of(cfg);
    EvolveConfig ec;
    ec.dt = cfg.at("dt");
    ec.t_end = cfg.at("t_end");
    ec.record_every = cfg.at("record_every");
    ec.keep_snapshots = cfg.value("snapshots", false) || cfg.value("soliton_check", false);

    const std::string initial = cfg.value("initial", std::string("soliton"));
    double b = cfg.at("b");
    ComplexField u0(g);
    std::optional<SolitonParams> p;
    if (initial == "gaussian") {
        for (std::size_t k = 0; k < g.n(); ++k) u0[k] = std::exp(-g.x(k) * g.x(k));
    } else {
        p = resolve_params(cfg, g);
        u0 = soliton_phi(*p, g);
        b = p->b;
    }

    Trajectory traj(g);
    try {
        traj = evolve(u0, ec, b);
    } catch (const EvolutionError& e) {
        warn(e.what());
        return evolve_failed;
    }

    const auto& c0 = traj.conserved_series.front();
    const auto& c1 = traj.conserved_series.back();
    const double T = std::max(traj.times.back(), 1e-300);
    json rep = {{"evolve", io::to_json(ec)},
                {"initial", initial},
                // E and P vanish at degenerate parameters, so their drift is absolute; mass drift is relative
                {"drift_per_unit_time",
                 {{"energy", std::abs(c1.energy - c0.energy) / T},
                  {"mass_relative", std::abs(c1.mass - c0.mass) / c0.mass / T},
                  {"momentum", std::abs(c1.momentum - c0.momentum) / T}}}};
    if (traj.times.size() >= 3) {
        const auto v = virial_rate_check(traj, ec);
        rep["virial"] = {{"numerical", v.numerical}, {"predicted", v.predicted}, {"relative_error", v.relative_error},
                         {"window_ok", v.window_ok}};
    }
    if (cfg.value("soliton_check", false) && p) {
        json rows = json::array();
        for (std::size_t r = 0; r < traj.times.size(); ++r) {
            const double t = traj.times[r];
            double err = 0.0;
            for (std::size_t k = 0; k < g.n(); ++k) {
                const cplx exact = std::polar(1.0, p->omega * t) * soliton_phi_at(*p, g.x(k) - p->c * t);
                err = std::max(err, std::abs(traj.snapshots[r][k] - exact));
            }
            const auto& c = traj.conserved_series[r];
            rows.push_back({{"t", t}, {"tracking_error", err}, {"dE", c.energy - c0.energy},
                            {"dM", c.mass - c0.mass}, {"dP", c.momentum - c0.momentum}});
        }
        rep["soliton_check"] = rows;
        say("soliton check: final tracking error " + io::format_double(rows.back()["tracking_error"]));
    }
    io::write_csv(out / "conserved.csv", io::conserved_table(traj), cfg, &g);
    if (cfg.value("snapshots", false)) {
        for (std::size_t r = 0; r < traj.snapshots.size(); ++r) {
            io::Table t = io::snapshot_table(traj.snapshots[r]);
            t.meta.emplace_back("t", io::format_double(traj.times[r]));
            io::write_csv(out / ("snapshot_" + std::to_string(r) + ".csv"), t, cfg, &g);
        }
    }
    io::write_json(out / "evolve.json", rep, cfg, &g);
    say("evolve: " + std::to_string(traj.times.size()) + " samples written");
    return ok;
}

int run_instability_cmd(const json& cfg, const fs::path& out)
{
    const Grid g = grid_of(cfg);
    json pc = cfg;
    pc["kappa0"] = true;
    const auto p = resolve_params(pc, g);
    EvolveConfig ec;
    ec.dt = cfg.at("dt");
    ec.t_end = cfg.at("t_end");
    ec.record_every = cfg.at("record_every");
    InstabilityOptions opts;
    opts.flip_sign = cfg.value("flip_sign", false);

    const double h1 = norm_h1(soliton_phi(p, g));
    InstabilityReport rep;
    try {
        rep = run_instability(p, g, cfg.at("delta").get<double>() * h1, cfg.at("alpha_frac").get<double>() * h1, ec, opts);
    } catch (const InvalidParams&) {
        throw;
    } catch (const std::exception& e) {
        warn(std::string("instability run failed: ") + e.what());
        return instability_failed;
    }
    io::write_csv(out / "instability_series.csv", io::instability_table(rep), cfg, &g);
    io::write_csv(out / "modulation_track.csv", io::track_table(rep.track), cfg, &g);
    json j = io::to_json(rep);
    j["series_files"] = {"instability_series.csv", "modulation_track.csv"};
    io::write_json(out / "instability.json", j, cfg, &g);
    say("instability: exit_time " + (rep.exit_time ? io::format_double(*rep.exit_time) : std::string("none")) +
        ", monotone " + (rep.monotone ? "yes" : "no"));
    return rep.exit_time ? ok : instability_failed;
}

int run_gkdv(const json& cfg, const fs::path& out)
{
    const Grid g = grid_of(cfg);
    const gkdv::Profile prof(g);
    const auto r = gkdv::identity_residuals(prof);
    const auto eq = gkdv::gn_inequality_probe(prof.q, prof);
    const int trials = cfg.value("trials", 20);
    const auto seed = cfg.value("seed", std::uint64_t{7});
    int violations = 0;
    io::Table t;
    t.columns = {"trial", "gn_left", "gn_right"};
    for (int k = 0; k < trials; ++k) {
        const auto f = random_smooth_real_field(g, seed + static_cast<std::uint64_t>(k));
        const auto s = gkdv::gn_inequality_probe(f, prof);
        if (s.left > s.right) ++violations;
        t.rows.push_back({static_cast<double>(k), s.left, s.right});
    }
    const auto counts = gkdv::eigen_counts(prof);
    json rep = {{"identities",
                 {{"LQ3_plus_8Q3", r.cubic}, {"LLambdaQ_plus_2Q", r.scaling}, {"LQprime", r.kernel}, {"energy_Q", r.energy}}},
                {"gn_at_Q", {{"left", eq.left}, {"right", eq.right}}},
                {"gn_random_violations", violations},
                {"j_lambda_q", {{"value", gkdv::j_functional(prof.lambda_q, prof)},
                                {"closed_form", std::pow(gkdv::integral_Q(), 2) / 8.0}}},
                {"eigen_counts", {{"negative", counts.negative}, {"kernel", counts.kernel}, {"lowest", counts.lowest}}}};
    io::write_csv(out / "gn_probe.csv", t, cfg, &g);
    io::write_json(out / "gkdv.json", rep, cfg, &g);
    std::ostringstream os;
    os << "gkdv: |LQ^3+8Q^3|/|Q^3| = " << r.cubic << ", |L LambdaQ + 2Q|/|Q| = " << r.scaling << ", E(Q) = " << r.energy
       << ", GN violations " << violations << "/" << trials;
    say(os.str());
    return violations == 0 ? ok : gkdv_failed;
}

int dispatch(const json& cfg, const fs::path& out)
{
    const std::string cmd = cfg.at("command");
    try {
        fs::create_directories(out);
        {
            std::ofstream f(out / "run_config.json");
            f << cfg.dump(2) << '\n';
        }
        if (cmd == "soliton") return run_soliton(cfg, out);
        if (cmd == "spectrum") return run_spectrum(cfg, out);
        if (cmd == "evolve") return run_evolve(cfg, out);
        if (cmd == "instability") return run_instability_cmd(cfg, out);
        if (cmd == "gkdv") return run_gkdv(cfg, out);
    } catch (const InvalidParams& e) {
        warn(std::string("invalid parameters: ") + e.what());
        return bad_params;
    } catch (const InvalidArgument& e) {
        warn(std::string("invalid argument: ") + e.what());
        return bad_params;
    } catch (const std::exception& e) {
        warn(std::string(cmd) + " failed: " + e.what());
        if (cmd == "spectrum") return classification;
        if (cmd == "evolve") return evolve_failed;
        if (cmd == "instability") return instability_failed;
        if (cmd == "gkdv") return gkdv_failed;
        return bad_params;
    }
    warn("unknown command " + cmd);
    return bad_params;
}

// Run one config per b value on a small worker pool; each run gets its own directory.
int sweep(const json& base, const std::vector<double>& bs, const fs::path& out, unsigned jobs)
{
    std::atomic<std::size_t> next{0};
    std::vector<int> codes(bs.size(), ok);
    auto worker = [&] {
        for (std::size_t i = next++; i < bs.size(); i = next++) {
            json cfg = base;
            cfg["b"] = bs[i];
            codes[i] = dispatch(cfg, out / ("b_" + io::format_double(bs[i])));
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int worst = ok;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

void add_param_flags(CLI::App* sub, double& b, double& omega, std::optional<double>& c, bool& kappa0)
{
    sub->add_option("--b", b, "quintic coefficient")->capture_default_str();
    sub->add_option("--omega", omega, "frequency")->capture_default_str();
    sub->add_option("--c", c, "wave speed");
    sub->add_flag("--kappa0", kappa0, "use the degenerate speed c = 2 kappa0(b) sqrt(omega)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Derivative NLS soliton laboratory"};
    app.require_subcommand(1);
    std::string out_dir = io::default_output_dir().string();
    app.add_option("--out", out_dir, "output directory (default from $DNLS_OUTPUT_DIR)")->capture_default_str();
    std::uint64_t seed = 7;
    app.add_option("--seed", seed, "seed for randomized probes")->capture_default_str();
    std::vector<double> sweep_b;
    app.add_option("--sweep-b", sweep_b, "run the command once per b value")->delimiter(',');
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for --sweep-b")->capture_default_str();

    json cfg;
    double b = 0.0, omega = 1.0;
    std::optional<double> c;
    bool kappa0 = false;
    std::size_t n = 0;
    double half_width = 30.0;

    auto* sol = app.add_subcommand("soliton", "profile, conserved quantities and residuals");
    add_param_flags(sol, b, omega, c, kappa0);
    sol->add_option("--n", n, "grid nodes (default 2048)");
    sol->add_option("--half-width", half_width, "domain half-width")->capture_default_str();

    auto* spectrum_cmd = app.add_subcommand("spectrum", "dense spectrum of the linearized operator");
    add_param_flags(spectrum_cmd, b, omega, c, kappa0);
    spectrum_cmd->add_option("--n", n, "grid nodes (default 512)");
    spectrum_cmd->add_option("--half-width", half_width, "domain half-width")->capture_default_str();
    double gap = -1.0, kernel_tol = -1.0;
    spectrum_cmd->add_option("--gap", gap, "negative/positive threshold (default 1e-3 omega)");
    spectrum_cmd->add_option("--kernel-tol", kernel_tol, "kernel threshold (default 1e-6 omega)");
    bool check_factorization = false;
    int trials = 10;
    spectrum_cmd->add_flag("--check-factorization,--check-2-9", check_factorization,
                  "verify the quadratic-form factorization on random fields");
    spectrum_cmd->add_option("--trials", trials, "random fields for --check-factorization")->capture_default_str();
    int coercivity_trials = 20;
    spectrum_cmd->add_option("--coercivity-trials", coercivity_trials, "random fields for the coercivity probe")
        ->capture_default_str();

    auto* ev = app.add_subcommand("evolve", "time integration with conservation monitoring");
    add_param_flags(ev, b, omega, c, kappa0);
    ev->add_option("--n", n, "grid nodes (default 2048)");
    ev->add_option("--half-width", half_width, "domain half-width")->capture_default_str();
    double dt = 1e-4, t_end = 1.0;
    int record_every = 0;
    std::string initial = "soliton";
    bool soliton_check = false, snapshots = false;
    ev->add_option("--dt", dt, "time step")->capture_default_str();
    ev->add_option("--t-end", t_end, "final time")->capture_default_str();
    ev->add_option("--record-every", record_every, "steps between samples (default 0.1 time units)");
    ev->add_option("--initial", initial, "soliton or gaussian")->check(CLI::IsMember({"soliton", "gaussian"}));
    ev->add_flag("--soliton-check", soliton_check, "compare against the exact travelling soliton");
    ev->add_flag("--snapshots", snapshots, "write one CSV per recorded time");

    auto* ins = app.add_subcommand("instability", "perturbed degenerate soliton until tube exit");
    ins->add_option("--b", b, "quintic coefficient (default 1)");
    ins->add_option("--omega", omega, "frequency")->capture_default_str();
    ins->add_option("--n", n, "grid nodes (default 2048)");
    ins->add_option("--half-width", half_width, "domain half-width")->capture_default_str();
    double delta = 1e-2, alpha_frac = 0.1;
    ins->add_option("--delta", delta, "perturbation size as a fraction of ||phi||_H1")->capture_default_str();
    ins->add_option("--alpha-frac", alpha_frac, "tube radius as a fraction of ||phi||_H1")->capture_default_str();
    double idt = 1e-3, it_end = 50.0;
    ins->add_option("--dt", idt, "time step")->capture_default_str();
    ins->add_option("--t-end", it_end, "maximal time")->capture_default_str();
    bool flip = false;
    ins->add_flag("--flip-sign", flip, "perturb so that (eps0, phi) < 0");

    auto* gk = app.add_subcommand("gkdv", "gKdV ground-state identity suite");
    bool identities = true;
    gk->add_flag("--identities", identities, "run the identity suite (default)");
    gk->add_option("--n", n, "grid nodes (default 1024)");
    gk->add_option("--half-width", half_width, "domain half-width")->capture_default_str();
    int gn_trials = 20;
    gk->add_option("--trials", gn_trials, "random fields for the GN probe")->capture_default_str();

    auto* rep = app.add_subcommand("replay", "re-run a saved run_config.json");
    std::string replay_path;
    rep->add_option("config", replay_path, "path to run_config.json")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_params;
    }

    auto base = [&](const char* command, std::size_t default_n) {
        json j = {{"command", command}, {"n", n ? n : default_n}, {"half_width", half_width}, {"seed", seed}};
        return j;
    };
    auto add_params = [&](json& j) {
        j["b"] = b;
        j["omega"] = omega;
        j["kappa0"] = kappa0;
        if (c) j["c"] = *c;
    };

    if (rep->parsed()) {
        cfg = io::read_json(replay_path);
    } else if (sol->parsed()) {
        cfg = base("soliton", 2048);
        add_params(cfg);
    } else if (spectrum_cmd->parsed()) {
        cfg = base("spectrum", 512);
        add_params(cfg);
        cfg["gap"] = gap;
        cfg["kernel_tol"] = kernel_tol;
        cfg["check_factorization"] = check_factorization;
        cfg["trials"] = trials;
        cfg["coercivity_trials"] = coercivity_trials;
    } else if (ev->parsed()) {
        cfg = base("evolve", 2048);
        add_params(cfg);
        cfg["dt"] = dt;
        cfg["t_end"] = t_end;
        cfg["record_every"] = record_every > 0 ? record_every : std::max(1L, std::lround(0.1 / dt));
        cfg["initial"] = initial;
        cfg["soliton_check"] = soliton_check;
        cfg["snapshots"] = snapshots;
    } else if (ins->parsed()) {
        cfg = base("instability", 2048);
        cfg["b"] = ins->count("--b") ? b : 1.0;
        cfg["omega"] = omega;
        cfg["delta"] = delta;
        cfg["alpha_frac"] = alpha_frac;
        cfg["dt"] = idt;
        cfg["t_end"] = it_end;
        cfg["record_every"] = std::max(1L, std::lround(0.05 / idt));
        cfg["flip_sign"] = flip;
    } else if (gk->parsed()) {
        cfg = base("gkdv", 1024);
        cfg["identities"] = identities;
        cfg["trials"] = gn_trials;
    }

    if (!sweep_b.empty()) return sweep(cfg, sweep_b, out_dir, jobs);
    return dispatch(cfg, out_dir);
}

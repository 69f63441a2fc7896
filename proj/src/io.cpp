#include "dnls/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dnls::io {

std::string config_hash(const json& config)
{
    // nlohmann::json stores objects in a sorted map, so dump() is canonical.
    const std::string text = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::filesystem::path default_output_dir()
{
    const char* env = std::getenv(output_dir_env);
    if (env != nullptr && *env != '\0') return env;
    return "dnls_out";
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void ensure_parent(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::ofstream open_out(const std::filesystem::path& path)
{
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const Table& table, const json& config, const Grid* grid)
{
    auto out = open_out(path);
    out << "# schema_version: " << schema_version << '\n';
    out << "# config_hash: " << config_hash(config) << '\n';
    if (grid != nullptr) out << "# grid: " << grid->describe() << '\n';
    for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

Table read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Table t;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto value = line.substr(colon + 1);
                if (!value.empty() && value[0] == ' ') value.erase(0, 1);
                t.meta.emplace_back(line.substr(2, colon - 2), value);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!have_columns) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            have_columns = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_json(const std::filesystem::path& path, const json& report, const json& config, const Grid* grid)
{
    json doc = report;
    doc["schema_version"] = schema_version;
    doc["config_hash"] = config_hash(config);
    doc["config"] = config;
    if (grid != nullptr) doc["grid"] = to_json(*grid);
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

json to_json(const Grid& g) { return {{"n", g.n()}, {"half_width", g.half_width()}, {"dx", g.dx()}}; }

json to_json(const SolitonParams& p)
{
    json j = {{"b", p.b},         {"omega", p.omega}, {"c", p.c},
              {"gamma", p.gamma}, {"kappa", p.kappa}, {"regime", to_string(p.regime)}};
    if (p.kappa_star) j["kappa_star"] = *p.kappa_star;
    return j;
}

json to_json(const ConservedTriple& c) { return {{"energy", c.energy}, {"mass", c.mass}, {"momentum", c.momentum}}; }

json to_json(const EvolveConfig& c)
{
    return {{"dt", c.dt},
            {"t_end", c.t_end},
            {"dealias", c.dealias},
            {"record_every", c.record_every},
            {"window_fraction", c.window_fraction},
            {"tail_budget", c.tail_budget},
            {"blowup_factor", c.blowup_factor}};
}

json to_json(const InstabilityReport& r)
{
    json j = {{"params", to_json(r.params)},
              {"delta", r.delta},
              {"alpha", r.alpha},
              {"phi_h1", r.phi_h1},
              {"eps_dot_phi", r.eps_dot_phi},
              {"monotone", r.monotone},
              {"initial_slope", r.initial_slope},
              {"min_slope", r.min_slope},
              {"ceiling_ok", r.ceiling_ok},
              {"ceiling_horizon", r.ceiling_horizon},
              {"exploratory", r.exploratory},
              {"samples", r.times.size()},
              {"tracked_samples", r.track.size()},
              {"note", r.note}};
    j["exit_time"] = r.exit_time ? json(*r.exit_time) : json(nullptr);
    return j;
}

Table profile_table(const Soliton& sol)
{
    Table t;
    t.columns = {"x", "Phi", "eta", "re_phi", "im_phi"};
    for (std::size_t k = 0; k < sol.grid.n(); ++k) {
        t.rows.push_back({sol.grid.x(k), sol.Phi[k], sol.eta[k], sol.phi[k].real(), sol.phi[k].imag()});
    }
    return t;
}

Table snapshot_table(const ComplexField& u)
{
    Table t;
    t.columns = {"x", "re_u", "im_u"};
    for (std::size_t k = 0; k < u.size(); ++k) t.rows.push_back({u.grid.x(k), u[k].real(), u[k].imag()});
    return t;
}

Table conserved_table(const Trajectory& traj)
{
    Table t;
    t.columns = {"t", "E", "M", "P", "virial", "variance", "variance_rhs", "window_tail"};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& c = traj.conserved_series[k];
        t.rows.push_back({traj.times[k], c.energy, c.mass, c.momentum, traj.virial[k], traj.variance[k],
                          traj.variance_rhs[k], traj.window_tail[k]});
    }
    return t;
}

Table eigenvalue_table(const SpectralData& sd)
{
    Table t;
    t.columns = {"index", "eigenvalue", "class"};  // class: -1 negative, 0 kernel, 1 positive, 2 ambiguous
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
        const double lam = sd.eigenvalues(j);
        double cls = 2.0;
        if (lam < -sd.gap) {
            cls = -1.0;
        } else if (std::abs(lam) < sd.kernel_tol) {
            cls = 0.0;
        } else if (lam > sd.gap) {
            cls = 1.0;
        }
        t.rows.push_back({static_cast<double>(j), lam, cls});
    }
    return t;
}

Table chi_table(const SpectralData& sd)
{
    Table t;
    t.columns = {"x", "re_chi", "im_chi", "re_chi_tilde", "im_chi_tilde"};
    const Grid& g = sd.chi.grid;
    for (std::size_t k = 0; k < g.n(); ++k) {
        t.rows.push_back({g.x(k), sd.chi[k].real(), sd.chi[k].imag(), sd.chi_tilde[k].real(), sd.chi_tilde[k].imag()});
    }
    return t;
}

Table track_table(const ModulationTrack& trk)
{
    Table t;
    t.columns = {"t",   "s",   "lambda", "theta", "x",       "eps_l2",   "eps_h1",  "lyapunov",
                 "E_e", "M_e", "P_e",    "S_e",   "res_chi", "res_iphi", "res_phip"};
    for (std::size_t k = 0; k < trk.size(); ++k) {
        t.rows.push_back({trk.t[k], trk.s[k], trk.lambda[k], trk.theta[k], trk.xshift[k], trk.eps_l2[k],
                          trk.eps_h1[k], trk.lyapunov[k], trk.E_e[k], trk.M_e[k], trk.P_e[k], trk.S_e[k],
                          trk.res_chi[k], trk.res_iphi[k], trk.res_phip[k]});
    }
    if (trk.exit_index) t.meta.emplace_back("modulation_exit_index", std::to_string(*trk.exit_index));
    return t;
}

Table instability_table(const InstabilityReport& r)
{
    Table t;
    t.columns = {"t", "tube_distance", "s", "lyapunov", "eps_l2"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const bool tracked = k < r.lyapunov_series.size();
        t.rows.push_back({r.times[k], r.tube_distance_series[k], tracked ? r.s[k] : nan,
                          tracked ? r.lyapunov_series[k] : nan, tracked ? r.eps_l2[k] : nan});
    }
    return t;
}

} // namespace dnls::io

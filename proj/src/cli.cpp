#include "entroprod/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace entroprod::cli {

using json = nlohmann::ordered_json;
using linalg::Operator;
using production::ProductionSeries;
using production::ScanConfig;
using production::ScanReport;

namespace {

const linalg::FactorLayout kTwoQubits{2, 2};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Typed accessors over the flat config map.
struct ConfigView {
    KeyValues kv;
    std::set<std::string> touched;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        touched.insert(key);
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) {
        touched.insert(key);
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
        }
    }

    long integer(const std::string& key, long fallback) {
        const double v = num(key, static_cast<double>(fallback));
        const long n = std::lround(v);
        if (std::abs(v - static_cast<double>(n)) > 1e-9) {
            throw ConfigError("config: key '" + key + "' is not an integer");
        }
        return n;
    }

    bool boolean(const std::string& key, bool fallback) {
        touched.insert(key);
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config: key '" + key + "' is not a boolean: " + it->second);
    }

    // Every key must have been consumed by the scenario.
    void reject_unknown(const std::string& scenario) const {
        for (const auto& [key, value] : kv) {
            if (key != "scenario" && touched.count(key) == 0) {
                throw ConfigError("config: unknown key '" + key + "' for scenario " + scenario);
            }
        }
    }
};

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("io: cannot open " + tmp + " for writing");
        os << contents;
        if (!os.flush()) throw Error("io: write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("io: rename to " + path + " failed: " + ec.message());
}

std::vector<double> make_grid(double t_start, double t_max, int points) {
    if (points < 2) throw ConfigError("config: points must be >= 2");
    if (t_max <= t_start) throw ConfigError("config: t_max must exceed the grid start");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = t_start + (t_max - t_start) * i / (points - 1);
    }
    return grid;
}

std::string series_csv(const ProductionSeries& s) {
    std::ostringstream os;
    os << "t,S,E,sigma,sigmaE,concurrence,negativity\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        os << format_double(s.times[i]) << ',' << format_double(s.entropy[i]) << ','
           << format_double(s.ent[i]) << ',' << format_double(s.sigma[i]) << ','
           << format_double(s.sigma_e[i]) << ',' << format_double(s.concurrence[i]) << ','
           << format_double(s.negativity[i]) << '\n';
    }
    return os.str();
}

std::string collision_csv(const papermodels::CollisionAudit& audit) {
    std::ostringstream os;
    os << "step,time,coherence,s_ab,e_ab,delta_e,s_env,mi_ab_env,delta_s_total,ssa_slack\n";
    for (const auto& st : audit.steps) {
        os << st.step << ',' << format_double(st.time) << ',' << format_double(st.coherence)
           << ',' << format_double(st.s_ab) << ',' << format_double(st.e_ab) << ','
           << format_double(st.delta_e) << ',' << format_double(st.s_env) << ','
           << format_double(st.mi_ab_env) << ',' << format_double(st.delta_s_total) << ','
           << format_double(st.ssa_slack) << '\n';
    }
    return os.str();
}

// ------------------------------- scenarios ----------------------------------

void run_paper(ConfigView& cfg, const std::string& out) {
    papermodels::PaperModelParams p;
    p.a0sq = cfg.num("a0sq", 0.5);
    p.omega = cfg.num("omega", 0.0);
    p.gamma = cfg.num("gamma", 0.0);
    p.kappa = cfg.num("kappa", 0.0);
    p.eta = cfg.num("eta", 0.0);
    const double t_start = cfg.num("t_start", 0.0);
    const double t_max = cfg.num("t_max", 5.0);
    const int points = static_cast<int>(cfg.integer("points", 200));
    cfg.reject_unknown("paper");

    const auto model = papermodels::paper_lindblad_model(p);  // verifies calibration
    const auto rho0 = papermodels::closed_form_state(p, t_start);
    const auto series = production::production_series(model, rho0, make_grid(t_start, t_max, points));
    atomic_write(out, series_csv(series));
}

void run_simulate(ConfigView& cfg, const std::string& out) {
    const Operator id2 = linalg::identity(2);
    const Operator h = 0.5 * cfg.num("omega_a", 0.0) * linalg::kron(linalg::pauli_z(), id2) +
                       0.5 * cfg.num("omega_b", 0.0) * linalg::kron(id2, linalg::pauli_z());
    std::vector<Operator> jumps;
    auto add_jump = [&](const std::string& key, const Operator& op, bool on_a) {
        const double r = cfg.num(key, 0.0);
        if (r < 0.0) throw ConfigError("config: rate '" + key + "' must be nonnegative");
        if (r == 0.0) return;
        jumps.push_back(std::sqrt(r) * (on_a ? linalg::kron(op, id2) : linalg::kron(id2, op)));
    };
    add_jump("gamma_minus_a", linalg::sigma_minus(), true);
    add_jump("gamma_minus_b", linalg::sigma_minus(), false);
    add_jump("gamma_plus_a", linalg::sigma_plus(), true);
    add_jump("gamma_plus_b", linalg::sigma_plus(), false);
    // coherence decay rate eta: Gamma = (sqrt(eta)/2) sigma_z
    add_jump("eta_z_a", 0.5 * linalg::pauli_z(), true);
    add_jump("eta_z_b", 0.5 * linalg::pauli_z(), false);

    const std::string init = cfg.str("init", "superposition");
    states::DensityMatrix rho0{Operator::Identity(4, 4) / 4.0, kTwoQubits};
    if (init == "superposition") {
        const double a0sq = cfg.num("a0sq", 0.5);
        const double ab = std::sqrt(a0sq * (1.0 - a0sq));
        rho0 = entanglement::x_family_density({a0sq, ab});
    } else if (init == "ground") {
        Operator op = Operator::Zero(4, 4);
        op(0, 0) = 1.0;
        rho0 = states::make_density(op, kTwoQubits);
    } else if (init == "mixed") {
        rho0 = states::relabel(
            states::random_mixed(4, static_cast<std::uint64_t>(cfg.integer("seed", 1))), kTwoQubits);
    } else {
        throw ConfigError("config: init must be superposition, ground, or mixed");
    }
    const double t_start = cfg.num("t_start", 0.0);
    const double t_max = cfg.num("t_max", 5.0);
    const int points = static_cast<int>(cfg.integer("points", 200));
    cfg.reject_unknown("simulate");

    const auto model = dynamics::make_model(h, std::move(jumps), kTwoQubits);
    const auto series = production::production_series(model, rho0, make_grid(t_start, t_max, points));
    atomic_write(out, series_csv(series));
}

void run_collision(ConfigView& cfg, const std::string& out) {
    papermodels::CollisionConfig c;
    c.a0sq = cfg.num("a0sq", 0.5);
    c.eta = cfg.num("eta", 1.0);
    c.total_time = cfg.num("total_time", 1.0);
    c.k = static_cast<int>(cfg.integer("k", 10));
    const std::string env = cfg.str("env", "pure");
    if (env == "pure") {
        c.env_kind = papermodels::EnvKind::pure;
    } else if (env == "mixed") {
        c.env_kind = papermodels::EnvKind::dephased_mixed;
    } else {
        throw ConfigError("config: env must be pure or mixed");
    }
    c.retain_environment = cfg.boolean("retain", false);
    cfg.reject_unknown("collision");

    const auto [state, audit] = papermodels::collision_run(c);
    (void)state;
    atomic_write(out, collision_csv(audit));
}

void run_scan(ConfigView& cfg, const std::string& out, int threads) {
    ScanConfig sc;
    sc.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    sc.samples = static_cast<int>(cfg.integer("samples", 100));
    sc.rate_min = cfg.num("rate_min", 0.1);
    sc.rate_max = cfg.num("rate_max", 2.0);
    sc.time_horizon = cfg.num("time_horizon", 5.0);
    sc.grid_points = static_cast<int>(cfg.integer("grid_points", 101));
    sc.tolerance = cfg.num("tolerance", 1e-5);
    const std::string family = cfg.str("family", "local");
    if (family == "local") {
        sc.family = production::ScanFamily::local_random;
    } else if (family == "paper") {
        sc.family = production::ScanFamily::paper;
    } else {
        throw ConfigError("config: family must be local or paper");
    }
    sc.threads = threads;
    cfg.reject_unknown("scan");

    if (sc.samples == 0) {
        ScanReport report;
        report.config = sc;
        atomic_write(out, scan_report_json(report));
        return;
    }
    atomic_write(out, scan_report_json(production::conjecture_scan(sc)));
}

void run_ree(ConfigView& cfg, const std::string& out) {
    const std::string state = cfg.str("state", "bell");
    states::DensityMatrix rho{Operator::Identity(4, 4) / 4.0, kTwoQubits};
    if (state == "bell") {
        rho = entanglement::x_family_density({0.5, 0.5});
    } else if (state == "xfamily") {
        rho = entanglement::x_family_density(
            {cfg.num("a", 0.5), {cfg.num("m_re", 0.0), cfg.num("m_im", 0.0)}});
    } else if (state == "random_pure" || state == "random_mixed") {
        const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
        rho = states::relabel(state == "random_pure" ? states::random_pure(4, seed)
                                                     : states::random_mixed(4, seed),
                              kTwoQubits);
    } else {
        throw ConfigError("config: state must be bell, xfamily, random_pure, or random_mixed");
    }
    cfg.reject_unknown("ree");

    const auto approx = entanglement::ree_optimize(rho);
    json j;
    j["schema"] = 1;
    j["scenario"] = "ree";
    j["value_nats"] = approx.value.nats;
    j["converged"] = approx.converged;
    j["iterations"] = approx.iterations;
    j["ppt_min_eig"] = approx.ppt_min_eig;
    json sep = json::array();
    for (Eigen::Index r = 0; r < 4; ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < 4; ++c) {
            row.push_back({approx.sep.op(r, c).real(), approx.sep.op(r, c).imag()});
        }
        sep.push_back(row);
    }
    j["closest_separable"] = sep;
    atomic_write(out, j.dump(2) + "\n");
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

KeyValues load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--set expects key=value, got: " + s);
        }
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
}

void emit_series(const ProductionSeries& series, const std::string& path) {
    atomic_write(path, series_csv(series));
}

std::string scan_report_json(const ScanReport& report) {
    json j;
    j["schema"] = 1;
    j["scenario"] = "scan";
    j["samples_run"] = report.samples_run;
    j["failures"] = report.failures;
    j["max_excess"] = report.max_excess;
    json cfg;
    cfg["seed"] = report.config.seed;
    cfg["samples"] = report.config.samples;
    cfg["rate_min"] = report.config.rate_min;
    cfg["rate_max"] = report.config.rate_max;
    cfg["time_horizon"] = report.config.time_horizon;
    cfg["grid_points"] = report.config.grid_points;
    cfg["tolerance"] = report.config.tolerance;
    cfg["family"] = report.config.family == production::ScanFamily::paper ? "paper" : "local";
    j["config"] = cfg;
    json viols = json::array();
    for (const auto& v : report.violations) {
        json jv;
        jv["sample"] = v.sample;
        jv["model"] = v.model;
        jv["time"] = v.time;
        jv["sigma"] = v.sigma;
        jv["abs_sigma_e"] = v.abs_sigma_e;
        jv["excess"] = v.excess;
        viols.push_back(jv);
    }
    j["violations"] = viols;
    return j.dump(2) + "\n";
}

int run_scenario(const std::string& scenario, const std::string& config_path,
                 const std::vector<std::string>& overrides, const std::string& out_override,
                 int threads, std::string& diagnostic) {
    try {
        ConfigView cfg;
        cfg.kv = load_config(config_path);
        apply_overrides(cfg.kv, overrides);
        if (cfg.kv.count("scenario") != 0 && cfg.kv["scenario"] != scenario) {
            throw ConfigError("config: scenario key '" + cfg.kv["scenario"] +
                              "' does not match subcommand '" + scenario + "'");
        }
        const std::string config_out = cfg.str("out", "");
        const std::string out = out_override.empty() ? config_out : out_override;
        if (out.empty()) throw ConfigError("config: no output path (set 'out' or pass --out)");
        if (threads < 1) throw ConfigError("--threads must be >= 1");

        if (scenario == "paper") {
            run_paper(cfg, out);
        } else if (scenario == "simulate") {
            run_simulate(cfg, out);
        } else if (scenario == "collision") {
            run_collision(cfg, out);
        } else if (scenario == "scan") {
            run_scan(cfg, out, threads);
        } else if (scenario == "ree") {
            run_ree(cfg, out);
        } else {
            throw ConfigError("unknown scenario: " + scenario);
        }
        return 0;
    } catch (const ConfigError& e) {
        diagnostic = e.what();
        return 1;
    } catch (const std::exception& e) {
        diagnostic = e.what();
        return 2;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"entroprod: entropy and entanglement production along Lindblad dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::vector<std::string> sets;
    int threads = 1;

    for (const auto& name : {"simulate", "paper", "collision", "scan", "ree"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file")->required();
        sub->add_option("--set", sets, "override config entries (key=value)");
        sub->add_option("--out", out_override, "output path (overrides config 'out')");
        sub->add_option("--threads", threads, "worker threads (scan scenario)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string scenario = app.get_subcommands().front()->get_name();
    std::string diagnostic;
    const int code = run_scenario(scenario, config_path, sets, out_override, threads, diagnostic);
    if (code != 0) std::cerr << "entroprod: " << diagnostic << "\n";
    return code;
}

}  // namespace entroprod::cli

#include "entroprod/production.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace entroprod::production {

using entanglement::ReeOptions;
using linalg::Complex;
using linalg::FactorLayout;
using linalg::Operator;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConcurrenceZero = 1e-9;
const FactorLayout kTwoQubits{2, 2};

double uniform_spacing(const std::vector<double>& times) {
    if (times.size() < 2) throw Error("production: need at least two grid points");
    const double h = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1];
        if (std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw Error("production: grid must be uniformly spaced");
        }
    }
    return h;
}

// Segment boundaries where entanglement switches between zero and nonzero;
// E(t) is continuous but not differentiable at a sudden-death kink.
std::vector<std::pair<std::size_t, std::size_t>> zero_segments(const std::vector<double>& conc) {
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    std::size_t start = 0;
    auto dead = [&](std::size_t i) { return conc[i] <= kConcurrenceZero; };
    for (std::size_t i = 1; i <= conc.size(); ++i) {
        if (i == conc.size() || dead(i) != dead(start)) {
            segments.emplace_back(start, i);
            start = i;
        }
    }
    return segments;
}

std::vector<double> differentiate(const std::vector<double>& e, const std::vector<double>& conc,
                                  double h) {
    const std::size_t n = e.size();
    std::vector<double> de(n, 0.0);
    for (const auto& [lo, hi] : zero_segments(conc)) {
        const std::size_t len = hi - lo;
        if (len == 1) {
            de[lo] = 0.0;
            continue;
        }
        if (len == 2) {
            de[lo] = de[lo + 1] = (e[lo + 1] - e[lo]) / h;
            continue;
        }
        for (std::size_t i = lo; i < hi; ++i) {
            if (i == lo) {
                de[i] = (-3.0 * e[i] + 4.0 * e[i + 1] - e[i + 2]) / (2.0 * h);
            } else if (i == hi - 1) {
                de[i] = (3.0 * e[i] - 4.0 * e[i - 1] + e[i - 2]) / (2.0 * h);
            } else {
                de[i] = (e[i + 1] - e[i - 1]) / (2.0 * h);
            }
        }
    }
    return de;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> entanglement_series(const Trajectory& traj) {
    if (traj.model.layout.dims != std::vector<int>{2, 2}) {
        throw LayoutMismatchError("entanglement_series: requires a two-qubit layout");
    }
    const double h = uniform_spacing(traj.times);
    const std::size_t n = traj.states.size();

    std::vector<double> ent(n, 0.0), conc(n, 0.0);
    Operator warm;
    bool have_warm = false;
    for (std::size_t i = 0; i < n; ++i) {
        const DensityMatrix& rho = traj.states[i];
        conc[i] = entanglement::concurrence(rho);
        if (const auto x = entanglement::as_x_family(rho, 1e-11)) {
            ent[i] = entanglement::ree_x_family(*x).nats;
        } else {
            ReeOptions opts;
            if (have_warm) opts.warm_start = &warm;
            const auto approx = entanglement::ree_optimize(rho, opts);
            ent[i] = approx.value.nats;
            warm = approx.sep.op;
            have_warm = true;
        }
    }
    return {ent, differentiate(ent, conc, h)};
}

ProductionSeries production_series(const LindbladModel& model, const DensityMatrix& rho0,
                                   const std::vector<double>& grid) {
    if (model.layout.dims != std::vector<int>{2, 2}) {
        throw LayoutMismatchError("production_series: requires a two-qubit layout");
    }
    const Trajectory traj = dynamics::integrate(model, rho0, grid);
    const DensityMatrix ref = dynamics::stationary_state(model).state;

    ProductionSeries series;
    series.times = traj.times;
    const std::size_t n = traj.states.size();
    series.entropy.resize(n);
    series.sigma.resize(n);
    series.concurrence.resize(n);
    series.negativity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const DensityMatrix& rho = traj.states[i];
        series.entropy[i] = states::von_neumann_entropy(rho).nats;
        series.sigma[i] = dynamics::entropy_production(model, rho, ref);
        series.concurrence[i] = entanglement::concurrence(rho);
        series.negativity[i] = entanglement::negativity(rho);
    }
    auto [ent, sigma_e] = entanglement_series(traj);
    series.ent = std::move(ent);
    series.sigma_e = std::move(sigma_e);
    return series;
}

double gap_formula(const PaperModelParams& p, double t) {
    papermodels::validate(p);
    const double c = p.gamma + p.kappa;
    if (c <= 0.0) throw DegenerateParamsError("gap_formula: gamma + kappa must be positive");
    const double a_inf = p.gamma / c;
    if (a_inf <= 0.0 || a_inf >= 1.0) {
        throw DegenerateParamsError("gap_formula: a_inf must lie strictly inside (0,1)");
    }
    const double adot = papermodels::population_rate(p, t);
    if (adot == 0.0) return 0.0;  // a0^2 = a_inf: stationary populations
    const double a = papermodels::population(p, t);
    if (a <= 0.0 || a >= 1.0) throw DegenerateParamsError("gap_formula: a(t) outside (0,1)");
    double gap = adot * std::log((1.0 - a) * a_inf / (a * (1.0 - a_inf)));
    if (gap < 0.0 && gap >= -1e-12) gap = 0.0;
    return gap;
}

std::optional<double> sudden_death_time(const ProductionSeries& series) {
    const auto& c = series.concurrence;
    const auto& t = series.times;
    if (c.empty() || c.back() > kConcurrenceZero) return std::nullopt;
    std::size_t j = c.size() - 1;
    while (j > 0 && c[j - 1] <= kConcurrenceZero) --j;
    if (j == 0) return t[0];
    // interpolate the crossing of the threshold between j-1 and j
    const double c0 = c[j - 1], c1 = c[j];
    const double frac = (c0 - kConcurrenceZero) / (c0 - c1);
    return t[j - 1] + frac * (t[j] - t[j - 1]);
}

// ------------------------------- conjecture scan ----------------------------

void validate(const ScanConfig& cfg) {
    if (cfg.samples < 0) throw ConfigError("scan: samples must be >= 0");
    if (cfg.rate_min <= 0.0 || cfg.rate_max < cfg.rate_min) {
        throw ConfigError("scan: rate range must be positive and ordered");
    }
    if (cfg.time_horizon <= 0.0) throw ConfigError("scan: time_horizon must be positive");
    if (cfg.grid_points < 3) throw ConfigError("scan: grid_points must be >= 3");
    if (cfg.tolerance <= 0.0) throw ConfigError("scan: tolerance must be positive");
    if (cfg.threads < 1) throw ConfigError("scan: threads must be >= 1");
}

namespace {

struct SampleOutcome {
    bool failed = false;
    double max_excess = -kInf;
    std::vector<ScanViolation> violations;
};

Operator random_local_hermitian(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g;
    Eigen::Vector3d n(g(rng), g(rng), g(rng));
    n.normalize();
    return 0.5 * scale *
           (n(0) * linalg::pauli_x() + n(1) * linalg::pauli_y() + n(2) * linalg::pauli_z());
}

Operator random_jump_2x2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Operator l(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) l(i, j) = Complex(g(rng), g(rng));
    }
    l /= l.norm();
    return l;
}

SampleOutcome run_sample(const ScanConfig& cfg, int sample) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(sample);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rate(cfg.rate_min, cfg.rate_max);

    SampleOutcome out;
    try {
        LindbladModel model;
        DensityMatrix rho0{Operator::Identity(4, 4) / 4.0, kTwoQubits};
        double t0 = 0.0;
        std::string descriptor;
        if (cfg.family == ScanFamily::local_random) {
            // Undriven: local Hamiltonian only, no A-B coupling, one random
            // local jump per qubit.
            const Operator id2 = linalg::identity(2);
            const Operator h = linalg::kron(random_local_hermitian(rng, rate(rng)), id2) +
                               linalg::kron(id2, random_local_hermitian(rng, rate(rng)));
            std::vector<Operator> jumps;
            jumps.push_back(std::sqrt(rate(rng)) * linalg::kron(random_jump_2x2(rng), id2));
            jumps.push_back(std::sqrt(rate(rng)) * linalg::kron(id2, random_jump_2x2(rng)));
            model = dynamics::make_model(h, std::move(jumps), kTwoQubits);
            rho0 = states::relabel(states::random_mixed(4, seed ^ 0x9e3779b97f4a7c15ull), kTwoQubits);
            descriptor = "local_random seed=" + std::to_string(seed);
        } else {
            PaperModelParams p;
            p.gamma = rate(rng);
            p.kappa = rate(rng);
            p.eta = rate(rng);
            p.omega = rate(rng);
            std::uniform_real_distribution<double> pop(0.05, 0.95);
            p.a0sq = pop(rng);
            model = papermodels::paper_lindblad_model(p, false);
            // Start past the pure initial instant, where the entropy rate's
            // logarithmic divergence makes pointwise comparison ill-posed.
            t0 = 0.25 / (p.gamma + p.kappa);
            rho0 = papermodels::closed_form_state(p, t0);
            descriptor = "paper seed=" + std::to_string(seed);
        }

        std::vector<double> grid(static_cast<std::size_t>(cfg.grid_points));
        for (int i = 0; i < cfg.grid_points; ++i) {
            grid[static_cast<std::size_t>(i)] = t0 + cfg.time_horizon * i / (cfg.grid_points - 1);
        }
        const ProductionSeries series = production_series(model, rho0, grid);
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            if (!std::isfinite(series.sigma[i])) continue;
            const double excess = std::abs(series.sigma_e[i]) - series.sigma[i];
            out.max_excess = std::max(out.max_excess, excess);
            if (excess > cfg.tolerance) {
                out.violations.push_back({sample, descriptor, series.times[i], series.sigma[i],
                                          std::abs(series.sigma_e[i]), excess});
            }
        }
    } catch (const Error&) {
        out.failed = true;
    }
    return out;
}

}  // namespace

ScanReport conjecture_scan(const ScanConfig& cfg) {
    validate(cfg);
    ScanReport report;
    report.config = cfg;

    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(cfg.samples));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.samples) return;
            outcomes[static_cast<std::size_t>(i)] = run_sample(cfg, i);
        }
    };
    const int nthreads = std::min(cfg.threads, std::max(cfg.samples, 1));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double max_excess = -kInf;
    for (const auto& o : outcomes) {  // ordered merge by sample index
        if (o.failed) {
            ++report.failures;
            continue;
        }
        ++report.samples_run;
        max_excess = std::max(max_excess, o.max_excess);
        report.violations.insert(report.violations.end(), o.violations.begin(), o.violations.end());
    }
    report.max_excess = std::isfinite(max_excess) ? max_excess : 0.0;
    return report;
}

}  // namespace entroprod::production

// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "entroprod/cli.hpp"
#include "entroprod/production.hpp"

using namespace entroprod;
using linalg::Complex;
using linalg::FactorLayout;
using linalg::Operator;
using papermodels::PaperModelParams;

namespace {

const FactorLayout kTwoQubits{2, 2};
int failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(const char* id, bool pass, const std::string& detail, double seconds) {
    std::printf("%-3s %s  %s  [%.1f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
    return g;
}

PaperModelParams draw_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.1, 2.0);
    std::uniform_real_distribution<double> pop(0.05, 0.95);
    PaperModelParams p;
    p.a0sq = pop(rng);
    p.omega = rate(rng);
    p.gamma = rate(rng);
    p.kappa = rate(rng);
    p.eta = rate(rng);
    return p;
}

// A1: closed form vs ODE integration, 20 random parameter sets.
void a1() {
    Timer timer;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const PaperModelParams p = draw_params(rng);
        const auto model = papermodels::paper_lindblad_model(p, false);
        const double horizon = 5.0 / std::max({p.gamma, p.kappa, p.eta});
        const auto grid = uniform_grid(0.0, horizon, 100);
        const auto traj = dynamics::integrate(model, papermodels::closed_form_state(p, 0.0), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, linalg::trace_distance(
                                        traj.states[i].op,
                                        papermodels::closed_form_state(p, grid[i]).op));
        }
    }
    const double elapsed = timer.seconds();
    std::ostringstream os;
    os << "closed form vs RK4, 20 sets x 100 points: max trace distance " << worst;
    report("A1", worst <= 1e-6 && elapsed < 10.0, os.str(), elapsed);
}

// A2: gap identity, positivity, and the published decay-rate claim.
void a2() {
    Timer timer;
    std::mt19937_64 rng(202);
    double worst_dev = 0.0, worst_gap = 0.0, worst_rate_err = 0.0;
    for (int s = 0; s < 10; ++s) {
        const PaperModelParams p = draw_params(rng);
        const double c = p.gamma + p.kappa;
        const double t0 = 0.25 / c;
        const auto model = papermodels::paper_lindblad_model(p, false);
        const auto grid = uniform_grid(t0, t0 + 5.0 / c, 40001);
        const auto series =
            production::production_series(model, papermodels::closed_form_state(p, t0), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(series.sigma[i])) continue;
            const double gap = series.sigma[i] - std::abs(series.sigma_e[i]);
            worst_gap = std::min(worst_gap, gap);
            worst_dev = std::max(worst_dev,
                                 std::abs(gap - production::gap_formula(p, grid[i])));
        }
        // least-squares log-slope of the gap over t in [2, 5] / (gamma+kappa)
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            if (t < 2.0 / c || t > 5.0 / c) continue;
            const double g = production::gap_formula(p, t);
            if (g <= 0.0) continue;
            sx += t;
            sy += std::log(g);
            sxx += t * t;
            sxy += t * std::log(g);
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        worst_rate_err = std::max(worst_rate_err, std::abs(-slope - c) / c);
    }
    const bool identity_ok = worst_dev <= 1e-4;
    const bool positive_ok = worst_gap >= -1e-6;
    const bool rate_ok = worst_rate_err <= 0.02;
    std::ostringstream os;
    os << "gap identity dev " << worst_dev << (identity_ok ? " (ok)" : " (FAIL)")
       << ", min gap " << worst_gap << (positive_ok ? " (ok)" : " (FAIL)")
       << ", fitted decay rate off (gamma+kappa) by " << worst_rate_err * 100.0
       << "% (measured rate is ~2(gamma+kappa))" << (rate_ok ? "" : " (FAIL)");
    report("A2", identity_ok && positive_ok && rate_ok, os.str(), timer.seconds());
}

// A3: pure-dephasing balance sigma_E + sigma = 0.
void a3() {
    Timer timer;
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> rate(0.1, 2.0);
    std::uniform_real_distribution<double> pop(0.05, 0.95);
    double worst = 0.0;
    int finite_points = 0;
    for (int s = 0; s < 5; ++s) {
        PaperModelParams p;
        p.a0sq = pop(rng);
        p.omega = rate(rng);
        p.gamma = 0.0;
        p.kappa = 0.0;
        p.eta = rate(rng);
        const auto model = papermodels::paper_lindblad_model(p, false);
        const double t0 = 0.25 / p.eta;
        const auto grid = uniform_grid(t0, t0 + 5.0 / p.eta, 8001);
        const auto series =
            production::production_series(model, papermodels::closed_form_state(p, t0), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(series.sigma[i])) continue;
            ++finite_points;
            worst = std::max(worst, std::abs(series.sigma_e[i] + series.sigma[i]));
        }
    }
    std::ostringstream os;
    os << "dephasing balance |sigma_E + sigma| max " << worst << " over " << finite_points
       << " points";
    report("A3", worst <= 1e-5 && finite_points > 0, os.str(), timer.seconds());
}

// A4: collision overlap limit and exact coherence product.
void a4() {
    Timer timer;
    bool ok = true;
    double worst_ratio = 0.0;
    for (double x : {0.25, 0.5, 1.0}) {  // x = eta t
        for (int k : {100, 1000, 10000}) {
            const double overlap = papermodels::overlap_after_k(1.0, x, k);
            const double bound = std::exp(-x) * x * x / k;
            const double err = std::abs(overlap - std::exp(-x));
            worst_ratio = std::max(worst_ratio, err / bound);
            if (err > bound) ok = false;
        }
    }
    papermodels::CollisionConfig cfg;
    cfg.a0sq = 0.7;
    cfg.eta = 1.0;
    cfg.total_time = 1.0;
    cfg.k = 10000;
    const auto state = papermodels::collision_run(cfg).first;
    const double ab = std::sqrt(0.7 * 0.3);
    const double coherence_err =
        std::abs(std::abs(state.op(0, 3)) -
                 ab * papermodels::overlap_after_k(cfg.eta, cfg.total_time, cfg.k));
    if (coherence_err > 1e-12) ok = false;
    std::ostringstream os;
    os << "overlap error/bound max " << worst_ratio << ", coherence defect " << coherence_err;
    report("A4", ok, os.str(), timer.seconds());
}

// A5: pure environment, mutual information = 2 S(rho_AB) at k = 10.
void a5() {
    Timer timer;
    papermodels::CollisionConfig cfg;
    cfg.a0sq = 0.5;
    cfg.eta = 1.0;
    cfg.total_time = 1.0;
    cfg.k = 10;
    cfg.env_kind = papermodels::EnvKind::pure;
    const auto audit = papermodels::collision_audits(cfg);
    double worst = 0.0;
    for (const auto& st : audit.steps) {
        worst = std::max(worst, std::abs(st.mi_ab_env - 2.0 * st.s_ab));
    }
    std::ostringstream os;
    os << "max |I(AB:env) - 2 S_AB| " << worst << " over " << audit.steps.size() << " steps";
    report("A5", worst <= 1e-8, os.str(), timer.seconds());
}

// A6: dephased-mixed environment entropy/entanglement balance at k = 8.
void a6() {
    Timer timer;
    double worst = 0.0;
    for (double x : {0.2, 0.5, 1.0}) {  // x = eta t
        papermodels::CollisionConfig cfg;
        cfg.a0sq = 0.5;
        cfg.eta = 1.0;
        cfg.total_time = x;
        cfg.k = 8;
        cfg.env_kind = papermodels::EnvKind::dephased_mixed;
        const auto audit = papermodels::collision_audits(cfg);
        for (const auto& st : audit.steps) {
            worst = std::max(worst, std::abs(st.delta_s_total + st.delta_e));
        }
    }
    std::ostringstream os;
    os << "max cumulative |dS_total + dE| " << worst;
    report("A6", worst <= 1e-4, os.str(), timer.seconds());
}

// A7: Spohn nonnegativity across 100 random two-qubit models.
void a7() {
    Timer timer;
    std::mt19937_64 rng(707);
    std::normal_distribution<double> g;
    auto random_op = [&](double scale) {
        Operator m(4, 4);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) m(i, j) = scale * Complex(g(rng), g(rng));
        }
        return m;
    };
    double worst = 0.0;
    int finite_points = 0;
    for (int s = 0; s < 100; ++s) {
        const auto model = dynamics::make_model(linalg::hermitize(random_op(0.5)),
                                                {random_op(0.4), random_op(0.4)}, kTwoQubits);
        const auto rho0 = states::relabel(states::random_mixed(4, 9000 + s), kTwoQubits);
        const auto ss = dynamics::stationary_state(model);
        const auto traj = dynamics::integrate(model, rho0, uniform_grid(0.0, 3.0, 21));
        for (const auto& st : traj.states) {
            const double sigma = dynamics::entropy_production(model, st, ss.state);
            if (!std::isfinite(sigma)) continue;
            ++finite_points;
            worst = std::min(worst, sigma);
        }
    }
    std::ostringstream os;
    os << "min sigma " << worst << " over " << finite_points << " finite points";
    report("A7", worst >= -1e-9 && finite_points > 1500, os.str(), timer.seconds());
}

// A8: REE optimizer validation against closed forms and separability.
void a8() {
    Timer timer;
    bool ok = true;
    std::ostringstream os;

    const auto bell = entanglement::ree_optimize(entanglement::x_family_density({0.5, 0.5}));
    const double bell_err = std::abs(bell.value.nats - std::log(2.0));
    if (bell_err > 1e-4) ok = false;
    os << "bell dev " << bell_err;

    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> pop(0.1, 0.9);
    std::uniform_real_distribution<double> frac(0.2, 0.999);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    double worst_x = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double a = pop(rng);
        const double mag = frac(rng) * std::sqrt(a * (1.0 - a));
        const Complex m = mag * std::exp(Complex(0.0, phase(rng)));
        const auto closed = entanglement::ree_x_family({a, m}).nats;
        const auto approx = entanglement::ree_optimize(entanglement::x_family_density({a, m}));
        worst_x = std::max(worst_x, std::abs(approx.value.nats - closed));
    }
    if (worst_x > 1e-4) ok = false;
    os << ", x-family dev " << worst_x;

    std::normal_distribution<double> g;
    double worst_sep = 0.0;
    for (int i = 0; i < 50; ++i) {
        // random mixture of 8 product states
        Operator mix = Operator::Zero(4, 4);
        double wsum = 0.0;
        std::uniform_real_distribution<double> wdist(0.0, 1.0);
        for (int s = 0; s < 8; ++s) {
            auto qubit = [&]() {
                Eigen::Vector2cd v(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
                v.normalize();
                return Operator(v * v.adjoint());
            };
            const double w = wdist(rng) + 1e-3;
            wsum += w;
            mix += w * linalg::kron(qubit(), qubit());
        }
        mix /= wsum;
        const auto rho = states::make_density(linalg::hermitize(mix), kTwoQubits);
        worst_sep = std::max(worst_sep, entanglement::ree_optimize(rho).value.nats);
    }
    if (worst_sep > 1e-5) ok = false;
    os << ", separable max " << worst_sep;
    report("A8", ok, os.str(), timer.seconds());
}

// A9: sudden death of entanglement under both-qubit amplitude damping.
void a9() {
    Timer timer;
    const Operator id2 = linalg::identity(2);
    const auto model = dynamics::make_model(
        Operator::Zero(4, 4),
        {linalg::kron(linalg::sigma_minus(), id2), linalg::kron(id2, linalg::sigma_minus())},
        kTwoQubits);
    const auto rho0 = entanglement::x_family_density({0.25, std::sqrt(0.25 * 0.75)});
    const auto grid = uniform_grid(0.0, 15.0, 601);
    const auto series = production::production_series(model, rho0, grid);
    const auto tstar = production::sudden_death_time(series);

    bool ok = tstar.has_value();
    std::ostringstream os;
    if (!tstar) {
        os << "no sudden death detected";
    } else {
        os << "t* = " << *tstar;
        const auto ss = dynamics::stationary_state(model);
        const auto traj = dynamics::integrate(model, rho0, grid);
        double worst_e = 0.0, worst_de = 0.0;
        int checked = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] <= *tstar) continue;
            worst_e = std::max(worst_e, series.ent[i]);
            worst_de = std::max(worst_de, std::abs(series.sigma_e[i]));
            const double to_ss = linalg::trace_distance(traj.states[i].op, ss.state.op);
            if (to_ss > 1e-6) {
                ++checked;
                // infinite sigma (rank-one reference) counts as > 1e-6
                if (!(series.sigma[i] > 1e-6)) ok = false;
            }
        }
        if (worst_e > 1e-6 || worst_de > 1e-6 || checked == 0) ok = false;
        os << ", post-kink max E " << worst_e << ", max |sigma_E| " << worst_de << ", sigma > 1e-6 at "
           << checked << " pre-stationary points";
    }

    // the paper X-family model never loses entanglement at finite time
    std::mt19937_64 rng(909);
    const PaperModelParams p = draw_params(rng);
    const auto paper_model = papermodels::paper_lindblad_model(p, false);
    const double c = p.gamma + p.kappa;
    const auto paper_series = production::production_series(
        paper_model, papermodels::closed_form_state(p, 0.25 / c),
        uniform_grid(0.25 / c, 0.25 / c + 5.0 / std::max({p.gamma, p.kappa, p.eta}), 301));
    if (production::sudden_death_time(paper_series).has_value()) {
        ok = false;
        os << ", paper family unexpectedly died";
    } else {
        os << ", paper family alive";
    }
    report("A9", ok, os.str(), timer.seconds());
}

// A10: randomized conjecture scan, deterministic reports.
void a10() {
    Timer timer;
    production::ScanConfig cfg;
    cfg.seed = 777;
    cfg.samples = 1000;
    cfg.rate_min = 0.1;
    cfg.rate_max = 2.0;
    cfg.time_horizon = 3.0;
    cfg.grid_points = 101;
    cfg.tolerance = 1e-3;  // above the sigma_E differencing error at this grid
    cfg.family = production::ScanFamily::local_random;
    cfg.threads = 2;
    const auto report1 = production::conjecture_scan(cfg);
    production::ScanConfig again = cfg;
    again.threads = 1;
    const auto report2 = production::conjecture_scan(again);
    again.threads = cfg.threads;  // thread count must not enter the report
    const bool deterministic =
        cli::scan_report_json(report1) == cli::scan_report_json(report2);

    production::ScanConfig paper_cfg;
    paper_cfg.seed = 778;
    paper_cfg.samples = 200;
    paper_cfg.time_horizon = 4.0;
    paper_cfg.grid_points = 4001;
    paper_cfg.tolerance = 5e-5;  // ~10x the sigma_E differencing error at this grid
    paper_cfg.family = production::ScanFamily::paper;
    paper_cfg.threads = 2;
    const auto paper_report = production::conjecture_scan(paper_cfg);

    const bool ok = deterministic && report1.samples_run + report1.failures == 1000 &&
                    paper_report.violations.empty() && paper_report.failures == 0;
    std::ostringstream os;
    os << "local family: " << report1.samples_run << " run, " << report1.failures
       << " failed, " << report1.violations.size() << " violations, max_excess "
       << report1.max_excess << (deterministic ? ", deterministic" : ", NON-DETERMINISTIC")
       << "; paper family violations " << paper_report.violations.size() << " (max_excess "
       << paper_report.max_excess << ")";
    report("A10", ok, os.str(), timer.seconds());
}

// A11: strong subadditivity on 500 random three-qubit states.
void a11() {
    Timer timer;
    const FactorLayout three{2, 2, 2};
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto rho = states::relabel(states::random_mixed(8, 11000 + i), three);
        auto entropy_of = [&](const std::vector<int>& keep) {
            const Operator red = linalg::partial_trace(rho.op, rho.layout, keep);
            const auto lam = linalg::hermitian_eigenvalues(red);
            double s = 0.0;
            for (Eigen::Index k = 0; k < lam.size(); ++k) {
                if (lam(k) > 1e-12) s -= lam(k) * std::log(lam(k));
            }
            return s;
        };
        const double lhs = states::von_neumann_entropy(rho).nats + entropy_of({1});
        const double rhs = entropy_of({0, 1}) + entropy_of({1, 2});
        worst = std::max(worst, lhs - rhs);
        if (lhs > rhs + 1e-9) ++violations;
    }
    std::ostringstream os;
    os << "max (S_ABE + S_B) - (S_AB + S_BE) = " << worst << ", violations " << violations;
    report("A11", violations == 0, os.str(), timer.seconds());
}

}  // namespace

int main() {
    Timer total;
    a1();
    a2();
    a3();
    a4();
    a5();
    a6();
    a7();
    a8();
    a9();
    a10();
    a11();
    std::printf("%d of 11 criteria failed  [total %.1f s]\n", failures, total.seconds());
    return failures == 0 ? 0 : 1;
}

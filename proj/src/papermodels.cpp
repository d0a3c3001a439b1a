#include "entroprod/papermodels.hpp"

#include <cmath>
#include <sstream>

namespace entroprod::papermodels {

using entanglement::XFamilyState;
using linalg::Complex;
using linalg::FactorLayout;
using linalg::Operator;
using linalg::RealVector;

namespace {

const FactorLayout kTwoQubits{2, 2};

}  // namespace

void validate(const PaperModelParams& p) {
    if (p.a0sq < 0.0 || p.a0sq > 1.0) throw ConfigError("paper model: a0sq outside [0,1]");
    if (p.gamma < 0.0 || p.kappa < 0.0 || p.eta < 0.0) {
        throw ConfigError("paper model: rates must be nonnegative");
    }
}

double population(const PaperModelParams& p, double t) {
    const double c = p.gamma + p.kappa;
    if (c == 0.0) return p.a0sq;
    const double a_inf = p.gamma / c;
    return a_inf + (p.a0sq - a_inf) * std::exp(-c * t);
}

double population_rate(const PaperModelParams& p, double t) {
    const double c = p.gamma + p.kappa;
    if (c == 0.0) return 0.0;
    const double a_inf = p.gamma / c;
    return -c * (p.a0sq - a_inf) * std::exp(-c * t);
}

Complex coherence_factor(const PaperModelParams& p, double t) {
    const double decay = 0.5 * (p.gamma + p.kappa + p.eta) * t;
    return std::exp(-decay) * Complex(std::cos(p.omega * t), -std::sin(p.omega * t));
}

DensityMatrix closed_form_state(const PaperModelParams& p, double t) {
    validate(p);
    if (t < 0.0) throw ConfigError("closed_form_state: t must be nonnegative");
    const double ab = std::sqrt(p.a0sq * (1.0 - p.a0sq));
    const double a_t = population(p, t);
    Complex m = coherence_factor(p, t) * ab;
    // Guard the pure-state boundary against rounding above the PSD bound.
    const double bound = std::sqrt(std::max(a_t * (1.0 - a_t), 0.0));
    if (std::abs(m) > bound) m *= bound / std::abs(m);
    return entanglement::x_family_density({a_t, m});
}

LindbladModel paper_lindblad_model(const PaperModelParams& p, bool verify) {
    validate(p);
    const Operator id2 = linalg::identity(2);
    const Operator z_a = linalg::kron(linalg::pauli_z(), id2);

    Operator lower = Operator::Zero(4, 4);   // |00><11|
    lower(0, 3) = 1.0;
    Operator raise = Operator::Zero(4, 4);   // |11><00|
    raise(3, 0) = 1.0;

    std::vector<Operator> jumps;
    if (p.gamma > 0.0) jumps.push_back(std::sqrt(p.gamma) * lower);
    if (p.kappa > 0.0) jumps.push_back(std::sqrt(p.kappa) * raise);
    if (p.eta > 0.0) jumps.push_back(0.5 * std::sqrt(p.eta) * z_a);

    LindbladModel model = dynamics::make_model(0.5 * p.omega * z_a, std::move(jumps), kTwoQubits);
    if (verify) {
        const double err = calibration_error(p);
        if (err > 1e-6) {
            std::ostringstream os;
            os << "paper_lindblad_model: calibration failure, max trace distance " << err;
            throw CalibrationError(os.str());
        }
    }
    return model;
}

double calibration_error(const PaperModelParams& p, int grid_points) {
    validate(p);
    const LindbladModel model = paper_lindblad_model(p, false);
    const double maxrate =
        std::max({p.gamma, p.kappa, p.eta, std::abs(p.omega), 0.2});
    const double horizon = 5.0 / maxrate;
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] = horizon * i / (grid_points - 1);
    }
    const auto traj = dynamics::integrate(model, closed_form_state(p, 0.0), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, linalg::trace_distance(traj.states[i].op,
                                                       closed_form_state(p, grid[i]).op));
    }
    return worst;
}

// ------------------------------ collision model -----------------------------

void validate(const CollisionConfig& cfg) {
    if (cfg.a0sq < 0.0 || cfg.a0sq > 1.0) throw ConfigError("collision: a0sq outside [0,1]");
    if (cfg.eta < 0.0) throw ConfigError("collision: eta must be nonnegative");
    if (cfg.total_time <= 0.0) throw ConfigError("collision: total_time must be positive");
    if (cfg.k < 1) throw ConfigError("collision: k must be >= 1");
    if (cfg.eta * cfg.total_time / cfg.k >= 1.0) {
        throw ConfigError("collision: overlap 1 - eta*t/k must stay positive");
    }
    if (cfg.retain_environment) {
        const int cap = cfg.env_kind == EnvKind::pure ? 14 : 9;
        if (cfg.k > cap) {
            std::ostringstream os;
            os << "collision: retained environment capped at k <= " << cap
               << (cfg.env_kind == EnvKind::pure ? " (pure units)" : " (mixed units)");
            throw ConfigError(os.str());
        }
    }
}

double overlap_after_k(double eta, double t, int k) {
    if (k < 1) throw ConfigError("overlap_after_k: k must be >= 1");
    if (eta < 0.0 || t < 0.0) throw ConfigError("overlap_after_k: eta, t must be nonnegative");
    const double x = 1.0 - eta * t / k;
    if (x <= 0.0) throw ConfigError("overlap_after_k: eta*t/k must be < 1");
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

namespace {

using Matrix2 = Eigen::Matrix2cd;

double entropy_of_eigs(const RealVector& lam) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > linalg::kSupportCutoff) s -= lam(i) * std::log(lam(i));
    }
    return s;
}

double entropy_of(const Operator& herm) {
    return entropy_of_eigs(linalg::hermitian_eigenvalues(herm));
}

double ree_ab(const DensityMatrix& rho_ab) {
    if (const auto x = entanglement::as_x_family(rho_ab, 1e-11)) {
        return entanglement::ree_x_family(*x).nats;
    }
    return entanglement::ree_optimize(rho_ab).value.nats;
}

// Controlled interaction on (AB, unit j): |00> branch applies ua, |11>
// branch applies ub, middle AB states leave the unit alone.  Index layout
// is (AB, u1, ..., uk) with unit 1 the most significant environment bit.
void apply_collision_left(Eigen::VectorXcd& v, int k, int j, const Matrix2& ua, const Matrix2& ub) {
    const Eigen::Index env_dim = Eigen::Index(1) << k;
    const Eigen::Index stride = Eigen::Index(1) << (k - j);
    for (int ab : {0, 3}) {
        const Matrix2& u = ab == 0 ? ua : ub;
        const Eigen::Index base = ab * env_dim;
        for (Eigen::Index e = 0; e < env_dim; ++e) {
            if ((e / stride) % 2 != 0) continue;
            const Eigen::Index i0 = base + e;
            const Eigen::Index i1 = i0 + stride;
            const Complex v0 = v(i0), v1 = v(i1);
            v(i0) = u(0, 0) * v0 + u(0, 1) * v1;
            v(i1) = u(1, 0) * v0 + u(1, 1) * v1;
        }
    }
}

void apply_collision_unitary(Operator& rho, int k, int j, const Matrix2& ua, const Matrix2& ub) {
    const Eigen::Index env_dim = Eigen::Index(1) << k;
    const Eigen::Index stride = Eigen::Index(1) << (k - j);
    const Eigen::Index dim = rho.rows();
    // Left multiply by U.
    for (int ab : {0, 3}) {
        const Matrix2& u = ab == 0 ? ua : ub;
        const Eigen::Index base = ab * env_dim;
        for (Eigen::Index e = 0; e < env_dim; ++e) {
            if ((e / stride) % 2 != 0) continue;
            const Eigen::Index i0 = base + e;
            const Eigen::Index i1 = i0 + stride;
            for (Eigen::Index c = 0; c < dim; ++c) {
                const Complex r0 = rho(i0, c), r1 = rho(i1, c);
                rho(i0, c) = u(0, 0) * r0 + u(0, 1) * r1;
                rho(i1, c) = u(1, 0) * r0 + u(1, 1) * r1;
            }
        }
    }
    // Right multiply by U^dag.
    for (int ab : {0, 3}) {
        const Matrix2& u = ab == 0 ? ua : ub;
        const Eigen::Index base = ab * env_dim;
        for (Eigen::Index e = 0; e < env_dim; ++e) {
            if ((e / stride) % 2 != 0) continue;
            const Eigen::Index c0 = base + e;
            const Eigen::Index c1 = c0 + stride;
            for (Eigen::Index r = 0; r < dim; ++r) {
                const Complex r0 = rho(r, c0), r1 = rho(r, c1);
                rho(r, c0) = r0 * std::conj(u(0, 0)) + r1 * std::conj(u(0, 1));
                rho(r, c1) = r0 * std::conj(u(1, 0)) + r1 * std::conj(u(1, 1));
            }
        }
    }
}

// rho_AB from a pure ABE vector: contract over the environment index.
Operator reduce_ab(const Eigen::VectorXcd& v, Eigen::Index env_dim) {
    Operator out = Operator::Zero(4, 4);
    for (Eigen::Index r = 0; r < 4; ++r) {
        for (Eigen::Index c = 0; c < 4; ++c) {
            Complex s = 0.0;
            for (Eigen::Index e = 0; e < env_dim; ++e) s += v(r * env_dim + e) * std::conj(v(c * env_dim + e));
            out(r, c) = s;
        }
    }
    return out;
}

// Entropy of the marginal complementary to the leading left_dim factor of a
// pure state, through the singular values of the coefficient matrix.  This
// is an independent numerical route from the left-side eigendecomposition.
double schmidt_complement_entropy(const Eigen::VectorXcd& v, Eigen::Index left_dim) {
    const Eigen::Index right_dim = v.size() / left_dim;
    Eigen::Map<const Operator> coeff(v.data(), right_dim, left_dim);
    Eigen::JacobiSVD<Operator> svd(coeff);
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double p = svd.singularValues()(i) * svd.singularValues()(i);
        if (p > linalg::kSupportCutoff) s -= p * std::log(p);
    }
    return s;
}

Operator reduce_b(const Eigen::VectorXcd& v, Eigen::Index env_dim) {
    Operator out = Operator::Zero(2, 2);
    for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index r = 0; r < 2; ++r) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                Complex s = 0.0;
                for (Eigen::Index e = 0; e < env_dim; ++e) {
                    s += v((a * 2 + r) * env_dim + e) * std::conj(v((a * 2 + c) * env_dim + e));
                }
                out(r, c) += s;
            }
        }
    }
    return out;
}

FactorLayout retained_layout(int k) {
    std::vector<int> dims{2, 2};
    dims.insert(dims.end(), static_cast<std::size_t>(k), 2);
    return FactorLayout{std::move(dims)};
}

struct StepEntropies {
    double s_ab, s_env, s_abe, s_be, s_b;
};

CollisionStep make_step(int j, double dt, const Operator& rho_ab, const StepEntropies& ent,
                        double e0, double s_total0) {
    CollisionStep st;
    st.step = j;
    st.time = j * dt;
    st.coherence = std::abs(rho_ab(0, 3));
    st.s_ab = ent.s_ab;
    st.e_ab = ree_ab({rho_ab, kTwoQubits});
    st.delta_e = st.e_ab - e0;
    st.s_env = ent.s_env;
    st.mi_ab_env = ent.s_ab + ent.s_env - ent.s_abe;
    st.delta_s_total = (ent.s_ab + ent.s_env) - s_total0;
    st.ssa_slack = ent.s_ab + ent.s_be - ent.s_abe - ent.s_b;
    return st;
}

CollisionAudit run_retained_pure(const CollisionConfig& cfg, DensityMatrix* final_state) {
    const int k = cfg.k;
    const Eigen::Index env_dim = Eigen::Index(1) << k;
    const double dt = cfg.total_time / k;
    const double c = 1.0 - cfg.eta * dt;
    const double s = std::sqrt(std::max(1.0 - c * c, 0.0));
    Matrix2 ua = Matrix2::Identity();
    Matrix2 ub;
    ub << c, -s, s, c;

    const double a = std::sqrt(cfg.a0sq), b = std::sqrt(1.0 - cfg.a0sq);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4 * env_dim);
    psi(0 * env_dim) = a;   // |00> |0...0>
    psi(3 * env_dim) = b;   // |11> |0...0>

    CollisionAudit audit;
    auto record = [&](int j) {
        const Operator rho_ab = reduce_ab(psi, env_dim);
        StepEntropies ent;
        ent.s_ab = entropy_of(rho_ab);
        ent.s_env = schmidt_complement_entropy(psi, 4);
        const double norm_sq = psi.squaredNorm();
        ent.s_abe = -norm_sq * std::log(norm_sq);  // rank-1 projector
        ent.s_be = schmidt_complement_entropy(psi, 2);
        ent.s_b = entropy_of(reduce_b(psi, env_dim));
        const double e0 = audit.steps.empty() ? ree_ab({rho_ab, kTwoQubits}) : audit.steps[0].e_ab;
        const double s0 = audit.steps.empty() ? ent.s_ab + ent.s_env
                                              : audit.steps[0].s_ab + audit.steps[0].s_env;
        audit.steps.push_back(make_step(j, dt, rho_ab, ent, e0, s0));
    };

    record(0);
    for (int j = 1; j <= k; ++j) {
        apply_collision_left(psi, k, j, ua, ub);
        if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) {
            throw StateInvalidError("collision: norm drift", j * dt);
        }
        record(j);
    }
    audit.final_overlap = overlap_after_k(cfg.eta, cfg.total_time, k);
    if (final_state != nullptr) {
        *final_state = states::make_density(reduce_ab(psi, env_dim), kTwoQubits);
    }
    return audit;
}

CollisionAudit run_retained_mixed(const CollisionConfig& cfg, DensityMatrix* final_state) {
    const int k = cfg.k;
    const Eigen::Index env_dim = Eigen::Index(1) << k;
    const double dt = cfg.total_time / k;
    const double c = 1.0 - cfg.eta * dt;
    const double s = std::sqrt(std::max(1.0 - c * c, 0.0));
    Matrix2 ua = Matrix2::Identity();
    Matrix2 ub;
    ub << c, -s, s, c;

    const double a = std::sqrt(cfg.a0sq), b = std::sqrt(1.0 - cfg.a0sq);
    Operator rho_ab0 = Operator::Zero(4, 4);
    rho_ab0(0, 0) = cfg.a0sq;
    rho_ab0(3, 3) = 1.0 - cfg.a0sq;
    rho_ab0(0, 3) = a * b;
    rho_ab0(3, 0) = a * b;
    Operator env = Operator::Identity(env_dim, env_dim) / static_cast<double>(env_dim);
    Operator rho = linalg::kron(rho_ab0, env);

    const FactorLayout layout = retained_layout(k);
    const std::vector<int> ab_factors{0, 1};
    std::vector<int> env_factors, be_factors{1};
    for (int f = 0; f < k; ++f) env_factors.push_back(2 + f);
    for (int f : env_factors) be_factors.push_back(f);

    CollisionAudit audit;
    auto record = [&](int j) {
        const Operator rho_ab = linalg::partial_trace(rho, layout, ab_factors);
        StepEntropies ent;
        ent.s_ab = entropy_of(rho_ab);
        ent.s_env = entropy_of(linalg::partial_trace(rho, layout, env_factors));
        ent.s_abe = entropy_of(rho);
        ent.s_be = entropy_of(linalg::partial_trace(rho, layout, be_factors));
        ent.s_b = entropy_of(linalg::partial_trace(rho, layout, {1}));
        const double e0 = audit.steps.empty() ? ree_ab({rho_ab, kTwoQubits}) : audit.steps[0].e_ab;
        const double s0 = audit.steps.empty() ? ent.s_ab + ent.s_env
                                              : audit.steps[0].s_ab + audit.steps[0].s_env;
        audit.steps.push_back(make_step(j, dt, rho_ab, ent, e0, s0));
    };

    record(0);
    for (int j = 1; j <= k; ++j) {
        apply_collision_unitary(rho, k, j, ua, ub);
        if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
            throw StateInvalidError("collision: trace drift", j * dt);
        }
        record(j);
    }
    audit.final_overlap = overlap_after_k(cfg.eta, cfg.total_time, k);
    if (final_state != nullptr) {
        *final_state = states::make_density(linalg::partial_trace(rho, layout, ab_factors), kTwoQubits);
    }
    return audit;
}

CollisionAudit run_traced(const CollisionConfig& cfg, DensityMatrix* final_state) {
    const int k = cfg.k;
    const double dt = cfg.total_time / k;
    const double c = 1.0 - cfg.eta * dt;
    const double s = std::sqrt(std::max(1.0 - c * c, 0.0));
    Matrix2 ua = Matrix2::Identity();
    Matrix2 ub;
    ub << c, -s, s, c;

    const double a = std::sqrt(cfg.a0sq), b = std::sqrt(1.0 - cfg.a0sq);
    Operator rho_ab = Operator::Zero(4, 4);
    rho_ab(0, 0) = cfg.a0sq;
    rho_ab(3, 3) = 1.0 - cfg.a0sq;
    rho_ab(0, 3) = a * b;
    rho_ab(3, 0) = a * b;

    Operator unit0;
    double s_unit_before;
    if (cfg.env_kind == EnvKind::pure) {
        unit0 = Operator::Zero(2, 2);
        unit0(0, 0) = 1.0;
        s_unit_before = 0.0;
    } else {
        unit0 = 0.5 * Operator::Identity(2, 2);
        s_unit_before = std::log(2.0);
    }

    const FactorLayout joint{2, 2, 2};

    CollisionAudit audit;
    double used_units_entropy = 0.0;  // discarded units, correlations dropped
    double e0 = 0.0, s_ab0 = 0.0;
    double last_mi = 0.0, last_ssa = 0.0;

    auto record = [&](int j) {
        CollisionStep st;
        st.step = j;
        st.time = j * dt;
        st.coherence = std::abs(rho_ab(0, 3));
        st.s_ab = entropy_of(rho_ab);
        st.e_ab = ree_ab({rho_ab, kTwoQubits});
        if (j == 0) {
            e0 = st.e_ab;
            s_ab0 = st.s_ab;
        }
        st.delta_e = st.e_ab - e0;
        st.s_env = used_units_entropy;
        st.mi_ab_env = last_mi;  // AB : just-used unit, before discarding
        st.delta_s_total = (st.s_ab - s_ab0) + (used_units_entropy - j * s_unit_before);
        st.ssa_slack = last_ssa;
        audit.steps.push_back(st);
    };

    record(0);
    for (int j = 1; j <= k; ++j) {
        Operator joint_rho = linalg::kron(rho_ab, unit0);
        apply_collision_unitary(joint_rho, 1, 1, ua, ub);
        rho_ab = linalg::partial_trace(joint_rho, joint, {0, 1});
        if (std::abs(rho_ab.trace().real() - 1.0) > 1e-10 ||
            linalg::hermitian_eigenvalues(rho_ab)(0) < -1e-10) {
            throw StateInvalidError("collision: state invalid after trace-out", j * dt);
        }
        const Operator unit_after = linalg::partial_trace(joint_rho, joint, {2});
        const double s_unit_after = entropy_of(unit_after);
        used_units_entropy += s_unit_after;
        const double s_joint = entropy_of(joint_rho);
        const double s_ab_now = entropy_of(rho_ab);
        last_mi = s_ab_now + s_unit_after - s_joint;
        // tripartite (A, B, unit) strong subadditivity on the joint state
        const double s_b = entropy_of(linalg::partial_trace(joint_rho, joint, {1}));
        const double s_bu = entropy_of(linalg::partial_trace(joint_rho, joint, {1, 2}));
        last_ssa = s_ab_now + s_bu - s_joint - s_b;
        record(j);
    }
    audit.final_overlap = overlap_after_k(cfg.eta, cfg.total_time, k);
    if (final_state != nullptr) *final_state = states::make_density(rho_ab, kTwoQubits);
    return audit;
}

}  // namespace

std::pair<DensityMatrix, CollisionAudit> collision_run(const CollisionConfig& cfg) {
    validate(cfg);
    DensityMatrix final_state{Operator::Identity(4, 4) / 4.0, kTwoQubits};
    CollisionAudit audit;
    if (!cfg.retain_environment) {
        audit = run_traced(cfg, &final_state);
    } else if (cfg.env_kind == EnvKind::pure) {
        audit = run_retained_pure(cfg, &final_state);
    } else {
        audit = run_retained_mixed(cfg, &final_state);
    }
    return {std::move(final_state), std::move(audit)};
}

CollisionAudit collision_audits(const CollisionConfig& cfg) {
    CollisionConfig retained = cfg;
    retained.retain_environment = true;
    validate(retained);
    return collision_run(retained).second;
}

}  // namespace entroprod::papermodels

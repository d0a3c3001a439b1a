#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entroprod/papermodels.hpp"

namespace entroprod::production {

using dynamics::LindbladModel;
using dynamics::Trajectory;
using papermodels::PaperModelParams;
using states::DensityMatrix;

// Per-time-point record along a trajectory.  Entropies and entanglement in
// nats, production rates in nats per unit time; sigma entries may be +inf
// (rank-deficient or support-violating states).
struct ProductionSeries {
    std::vector<double> times;
    std::vector<double> entropy;
    std::vector<double> ent;          // relative entropy of entanglement
    std::vector<double> sigma;        // entropy production
    std::vector<double> sigma_e;      // entanglement production dE/dt
    std::vector<double> concurrence;
    std::vector<double> negativity;
};

enum class ScanFamily { local_random, paper };

struct ScanConfig {
    std::uint64_t seed = 1;
    int samples = 100;
    double rate_min = 0.1;
    double rate_max = 2.0;
    double time_horizon = 5.0;
    int grid_points = 101;
    double tolerance = 1e-5;
    ScanFamily family = ScanFamily::local_random;
    int threads = 1;
};

void validate(const ScanConfig& cfg);

struct ScanViolation {
    int sample = 0;
    std::string model;  // descriptor: family + per-sample seed
    double time = 0.0;
    double sigma = 0.0;
    double abs_sigma_e = 0.0;
    double excess = 0.0;
};

struct ScanReport {
    int samples_run = 0;
    int failures = 0;
    std::vector<ScanViolation> violations;
    double max_excess = 0.0;  // max over all finite-sigma points of |sigma_E| - sigma
    ScanConfig config;
};

// REE along a trajectory (closed form for X-family states, optimizer
// otherwise) and its time derivative by central differences; one-sided at
// the ends and across a sudden-death kink.
std::pair<std::vector<double>, std::vector<double>> entanglement_series(const Trajectory& traj);

// Integrate and fill every series in one pass; sigma references the
// stationary state of the model.
ProductionSeries production_series(const LindbladModel& model, const DensityMatrix& rho0,
                                   const std::vector<double>& grid);

// adot(t) ln[(1-a(t)) a_inf / (a(t) (1-a_inf))]; the closed-form value of
// sigma - |sigma_E| for the dissipative two-qubit model.
double gap_formula(const PaperModelParams& p, double t);

// First time concurrence falls to <= 1e-9 and stays there, located by
// linear interpolation; absent when entanglement never dies on the grid.
std::optional<double> sudden_death_time(const ProductionSeries& series);

// Randomized evidence harness for |sigma_E| <= sigma on undriven models.
ScanReport conjecture_scan(const ScanConfig& cfg);

}  // namespace entroprod::production

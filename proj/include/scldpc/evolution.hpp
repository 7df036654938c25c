#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scldpc/ensemble.hpp"
#include "scldpc/scaling_params.hpp"

namespace scldpc {

struct DeOptions {
    double x_tol = 1e-9;       // converged when max message below this
    double stall_tol = 1e-13;  // stalled fixed point when updates fall below
    int max_iter = 300000;
};

enum class DeVerdict { Converged, Stalled, Indeterminate };

// One density-evolution run for the terminated semi-structured ensemble at
// erasure probability eps. CN update mixes VN positions uniformly over dv
// slots with out-of-range slots contributing zero erasure probability. (The
// truncated chain keeps boundary messages pinned at eps by construction --
// its clipped VNs live behind the size-2 expurgation instead.)
DeVerdict de_run(int dv, int dc, int L, double eps, const DeOptions& opts = {});

// BP threshold of the terminated chain via bisection to width tol.
// Indeterminate runs count as above-threshold.
double de_threshold(int dv, int dc, int L, double tol,
                    const DeOptions& opts = {});

// Classic scalar recursion x = eps (1-(1-x)^{dc-1})^{dv-1}.
double uncoupled_bp_threshold(int dv, int dc, double tol);

// Fraction of all bits the uncoupled (dv,dc) BP decoder recovers before
// stalling at erasure probability eps; alpha_LB = L times this value.
double uncoupled_decoded_fraction(int dv, int dc, double eps);

struct TrajectoryOptions {
    int stride = 0;                  // 0 -> max(1, N/100)
    double min_survivor_frac = 0.9;  // at tau = eps*L/2
    bool keep_trial_r1 = false;
};

struct MeanTrajectory {
    double epsilon = 0;
    int N = 0, L = 0, stride = 1, n_trials = 0;
    std::vector<double> tau;
    std::vector<double> r1_bar;       // survivor-conditioned mean
    std::vector<int32_t> survivors;   // trials alive per grid point
    std::vector<double> cleared_bar;  // mean fully-decoded positions
    std::vector<std::vector<double>> v_bar;  // [position][grid], / N
    bool usable = true;
    std::string note;

    std::vector<std::vector<double>> trial_r1;  // when keep_trial_r1
    std::vector<uint8_t> trial_failed;
};

MeanTrajectory estimate_mean_trajectory(const EnsembleParams& params,
                                        double epsilon, int n_trials,
                                        uint64_t seed,
                                        const TrajectoryOptions& opts = {});

struct PlateauFit {
    double alpha = 0, beta = 0, gamma = 0, plateau = 0;
    bool usable = true;
    std::string note;
};

// Plateau value = median of r1_bar over the central third of [0, eps*L];
// steady state = maximal contiguous run within plateau_tol of it.
PlateauFit extract_alpha_beta_gamma(const MeanTrajectory& traj, double epsilon,
                                    double eps_star, double plateau_tol = 0.02,
                                    double min_len_frac = 0.1);

// Wave speed from the mean VN count at the chain middle at mid-steady-state.
double estimate_speed(const MeanTrajectory& traj, double alpha, double beta);

struct NuThetaOptions {
    int stride = 0;
    double central_frac = 0.5;    // central part of [alpha, beta] used
    double lag_floor_frac = 0.1;  // fit lags until autocov drops below this
    double plateau_tol = 0.02;
};

struct NuThetaResult {
    double nu = 0, theta = 0;
    double alpha = 0, beta = 0;
    std::vector<double> autocov;  // per fitted lag, starting at lag 0
    double dtau = 0;
    int n_trials = 0;
    bool usable = true;
    std::string note;
};

// nu = N * pooled steady-state variance of r1; theta from a least-squares
// fit of log autocovariance against lag.
NuThetaResult estimate_nu_theta(const EnsembleParams& params, double epsilon,
                                double eps_star, int n_trials, uint64_t seed,
                                const NuThetaOptions& opts = {});

struct EstimateConfig {
    int dv = 0, dc = 0, L = 0;
    int N = 10000;
    int trials = 600;
    std::vector<double> eps_grid;
    double nu_theta_eps = 0;
    int nu_theta_trials = 200;
    double plateau_tol = 0.02;
    double de_tol = 1e-4;
    double olmos_theta_hat = 0;  // 0 -> estimate from the terminated chain
    uint64_t seed = 1;
};

struct EstimateDiagnostics {
    struct Sensitivity {
        double epsilon, tol, alpha, beta, gamma;
        bool terminated;
    };
    std::vector<Sensitivity> sensitivity;
    std::vector<double> gamma_ratio;  // gamma_term / gamma_trunc per grid eps
    double nu_theta_alpha = 0, nu_theta_beta = 0;
};

// Full estimation pipeline: DE threshold, per-epsilon trajectories for both
// chain kinds, nu/theta at the configured point, baseline constants.
ScalingParams build_scaling_params(const EstimateConfig& cfg,
                                   EstimateDiagnostics* diag = nullptr);

}  // namespace scldpc

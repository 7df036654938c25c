#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scldpc {

// One epsilon grid point of estimated scaling constants. Terminated-chain
// quantities carry _term, truncated-chain quantities _trunc; speed is the
// block-clearing rate in positions per N iterations.
struct ScalingRow {
    double epsilon = 0;
    double alpha_term = 0;
    double beta_term = 0;
    double gamma_term = 0;
    double alpha_trunc = 0;
    double beta_trunc = 0;
    double gamma_trunc = 0;
    double speed = 0;
};

struct ScalingParams {
    int dv = 0, dc = 0, L = 0;
    int N_est = 0, trials = 0;
    double eps_star = 0;

    std::vector<ScalingRow> rows;  // strictly increasing epsilon

    // truncated-ensemble process constants, epsilon-independent
    double nu = 0, theta = 0;
    double nu_theta_epsilon = 0;

    // single-process baseline constants
    double gamma_hat = 0, nu_hat = 0, theta_hat = 0;
    double alpha_lb_frac = 0;  // alpha_LB / L
    std::string theta_hat_source;

    // Linear interpolation between grid rows; throws std::domain_error for
    // queries outside the estimated grid (no extrapolation).
    ScalingRow interpolate(double epsilon) const;

    void validate() const;
};

void write_scaling_params(std::ostream& os, const ScalingParams& p);
ScalingParams read_scaling_params(std::istream& is);
ScalingParams load_scaling_params(const std::string& path);
void save_scaling_params(const std::string& path, const ScalingParams& p);

}  // namespace scldpc

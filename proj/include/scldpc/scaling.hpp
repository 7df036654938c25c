#pragma once

#include <string>
#include <vector>

#include "scldpc/scaling_params.hpp"

namespace scldpc {

struct Mu0Result {
    double value = 0;      // +inf when saturated
    double log_value = 0;  // -inf at epsilon == eps_star
    bool saturated = false;
};

// Mean of the exponential first-hit-time approximation,
//   mu0 = sqrt(2 pi)/theta * int_0^Z Phi(z) e^{z^2/2} dz,
//   Z = gamma sqrt(N/nu) (eps_star - epsilon),
// evaluated by adaptive quadrature on the exponent-scaled integrand
// (relative error <= 1e-8; log-domain beyond the double range).
Mu0Result mu0(double gamma, double nu, double theta, double N,
              double eps_star, double epsilon);

struct PredictInput {
    int L = 0;
    int N = 0;
    double epsilon = 0;
    const ScalingParams* params = nullptr;
};

struct PredictWarnings {
    std::vector<std::string> notes;
    void add(std::string s) { notes.push_back(std::move(s)); }
};

// Full-BP laws for the terminated chain of length input.L. Terminated
// (alpha, beta) with beta capped at eps*L, truncated (gamma, nu, theta)
// behind mu0. The first-hit time is Erlang-2 (two decoding waves).
double fer_terminated(const PredictInput& in, PredictWarnings* w = nullptr);
double ber_terminated(const PredictInput& in, PredictWarnings* w = nullptr);
double bler_terminated(const PredictInput& in, PredictWarnings* w = nullptr);

// The paper prints the BLER bracket with "+ 2" where the re-derived integral
// int_0^xi u^2 e^{-u} du = 2 - e^{-xi}(xi^2 + 2 xi + 2) requires "2 -"; the
// printed variant is kept only for the reconciliation report.
double bler_terminated_printed(const PredictInput& in,
                               PredictWarnings* w = nullptr);
// Direct numerical integration of the BLER integral (reference path).
double bler_terminated_quadrature(const PredictInput& in,
                                  PredictWarnings* w = nullptr);

// Single-process baseline law. Constants default to the table's
// (alpha_lb_frac*L, gamma_hat, nu_hat, theta_hat); pass explicit constants to
// reproduce published baseline curves.
struct OlmosConstants {
    double alpha_lb = 0, gamma_hat = 0, nu_hat = 0, theta_hat = 0;
};
double fer_olmos_terminated(const PredictInput& in,
                            const OlmosConstants* constants = nullptr,
                            PredictWarnings* w = nullptr);

// Unterminated chain evaluated over its first Lp positions (single wave,
// exponential first-hit time, beta = eps*Lp, alpha from the truncated chain).
double fer_unterminated(const PredictInput& in, int Lp,
                        PredictWarnings* w = nullptr);
double ber_unterminated(const PredictInput& in, int Lp,
                        PredictWarnings* w = nullptr);
double bler_unterminated(const PredictInput& in, int Lp,
                         PredictWarnings* w = nullptr);

// Two-phase window-decoding laws over a terminated chain of length input.L
// with window size W (in positions, W <= L).
double fer_window(const PredictInput& in, int W, PredictWarnings* w = nullptr);
double ber_window(const PredictInput& in, int W, PredictWarnings* w = nullptr);
double bler_window(const PredictInput& in, int W,
                   PredictWarnings* w = nullptr);

struct Intermediates {
    double mu0 = 0, alpha = 0, beta = 0, gamma = 0, speed = 0;
};

struct RatePrediction {
    double fer = 0, ber = 0, bler = 0;
    Intermediates used;
};

RatePrediction predict_full_bp(const PredictInput& in,
                               PredictWarnings* w = nullptr);
RatePrediction predict_window(const PredictInput& in, int W,
                              PredictWarnings* w = nullptr);
RatePrediction predict_olmos(const PredictInput& in,
                             const OlmosConstants* constants = nullptr,
                             PredictWarnings* w = nullptr);

// Side-by-side derived / quadrature / printed BLER values at the given
// operating point.
std::string eq13_reconciliation_report(const PredictInput& in);

}  // namespace scldpc

#include "scldpc/evolution.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "scldpc/numerics.hpp"
#include "scldpc/peeling.hpp"
#include "scldpc/rng.hpp"

namespace scldpc {

// ---------------------------------------------------------------------------
// density evolution

DeVerdict de_run(int dv, int dc, int L, double eps, const DeOptions& opts) {
    const int ncp = L + dv - 1;
    auto valid = [&](int i, int t) { return i + t < ncp; };
    std::vector<double> x(static_cast<size_t>(L) * dv, 0.0);
    std::vector<double> xn(x.size(), 0.0);
    std::vector<double> S(ncp, 0.0), y(ncp, 0.0);
    for (int i = 0; i < L; ++i)
        for (int t = 0; t < dv; ++t)
            if (valid(i, t)) x[i * dv + t] = eps;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        std::fill(S.begin(), S.end(), 0.0);
        for (int i = 0; i < L; ++i)
            for (int t = 0; t < dv; ++t)
                if (valid(i, t)) S[i + t] += x[i * dv + t];
        for (int j = 0; j < ncp; ++j)
            y[j] = 1.0 - std::pow(1.0 - S[j] / dv, dc - 1);
        double max_x = 0.0, max_diff = 0.0;
        for (int i = 0; i < L; ++i) {
            for (int t = 0; t < dv; ++t) {
                if (!valid(i, t)) continue;
                double p = eps;
                for (int t2 = 0; t2 < dv; ++t2)
                    if (t2 != t && valid(i, t2)) p *= y[i + t2];
                xn[i * dv + t] = p;
                max_x = std::max(max_x, p);
                max_diff = std::max(max_diff, std::abs(p - x[i * dv + t]));
            }
        }
        x.swap(xn);
        if (max_x < opts.x_tol) return DeVerdict::Converged;
        if (max_diff < opts.stall_tol) return DeVerdict::Stalled;
    }
    return DeVerdict::Indeterminate;
}

double de_threshold(int dv, int dc, int L, double tol, const DeOptions& opts) {
    if (dv < 2 || dc <= dv || L < 1 || !(tol > 0))
        throw std::invalid_argument("bad density evolution arguments");
    double lo = 0.05, hi = 0.95;
    if (de_run(dv, dc, L, lo, opts) != DeVerdict::Converged)
        throw std::runtime_error("density evolution failed at the lower bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (de_run(dv, dc, L, mid, opts) == DeVerdict::Converged)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// scalar recursion for the uncoupled (dv, dc) ensemble
double uncoupled_fixed_point(int dv, int dc, double eps) {
    double x = eps;
    for (int iter = 0; iter < 1000000; ++iter) {
        const double y = 1.0 - std::pow(1.0 - x, dc - 1);
        const double nx = eps * std::pow(y, dv - 1);
        if (std::abs(nx - x) < 1e-15) return nx;
        x = nx;
    }
    return x;
}

}  // namespace

double uncoupled_bp_threshold(int dv, int dc, double tol) {
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (uncoupled_fixed_point(dv, dc, mid) < 1e-9)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double uncoupled_decoded_fraction(int dv, int dc, double eps) {
    const double x = uncoupled_fixed_point(dv, dc, eps);
    const double y = 1.0 - std::pow(1.0 - x, dc - 1);
    return eps * (1.0 - std::pow(y, dv));
}

// ---------------------------------------------------------------------------
// mean trajectory

MeanTrajectory estimate_mean_trajectory(const EnsembleParams& params,
                                        double epsilon, int n_trials,
                                        uint64_t seed,
                                        const TrajectoryOptions& opts) {
    params.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (n_trials < 1) throw std::invalid_argument("n_trials must be positive");

    const int stride = opts.stride > 0 ? opts.stride : std::max(1, params.N / 100);
    const auto k_max = static_cast<size_t>(params.vn_count() / stride + 2);

    MeanTrajectory traj;
    traj.epsilon = epsilon;
    traj.N = params.N;
    traj.L = params.L;
    traj.stride = stride;
    traj.n_trials = n_trials;

    std::vector<double> r1_sum(k_max, 0.0);
    std::vector<int32_t> surv(k_max, 0);
    std::vector<int64_t> cleared_sum(k_max, 0);
    std::vector<std::vector<int64_t>> v_sum(
        params.L, std::vector<int64_t>(k_max, 0));
    if (opts.keep_trial_r1) {
        traj.trial_r1.resize(n_trials);
        traj.trial_failed.assign(n_trials, 0);
    }

    PeelOptions po;
    po.record_r1 = true;
    po.record_vn_counts = true;
    po.stride = stride;

    const int chunk = std::max(4 * omp_get_max_threads(), 8);
    std::vector<DecodeTrace> traces(chunk);
    for (int base = 0; base < n_trials; base += chunk) {
        const int m = std::min(chunk, n_trials - base);
#pragma omp parallel
        {
            PeelDecoder dec;
            TannerGraph g;
            ErasurePattern e;
#pragma omp for schedule(dynamic)
            for (int i = 0; i < m; ++i) {
                const uint64_t s = rng::derive_seed(seed, base + i);
                sample_graph_into(params, rng::derive_seed(s, 1), g);
                sample_erasures_into(params.vn_count(), epsilon,
                                     rng::derive_seed(s, 2), e);
                traces[i] = dec.decode(g, e, rng::derive_seed(s, 3), po);
            }
        }
        // fold in trial order so results do not depend on the thread count
        for (int i = 0; i < m; ++i) {
            DecodeTrace& t = traces[i];
            const size_t kt = t.r1.size();
            for (size_t k = 0; k < kt; ++k) {
                r1_sum[k] += t.r1[k];
                ++surv[k];
                cleared_sum[k] += t.cleared[k];
            }
            for (int u = 0; u < params.L; ++u) {
                auto& dst = v_sum[u];
                const auto& src = t.vn_per_position[u];
                for (size_t k = 0; k < kt; ++k) dst[k] += src[k];
            }
            if (opts.keep_trial_r1) {
                traj.trial_failed[base + i] =
                    t.outcome == PeelOutcome::Success ? 0 : 1;
                traj.trial_r1[base + i] = std::move(t.r1);
            }
        }
    }

    size_t k_used = 0;
    for (size_t k = 0; k < k_max; ++k)
        if (surv[k] > 0) k_used = k + 1;
    traj.tau.resize(k_used);
    traj.r1_bar.resize(k_used);
    traj.survivors.assign(surv.begin(), surv.begin() + k_used);
    traj.cleared_bar.resize(k_used);
    traj.v_bar.assign(params.L, std::vector<double>(k_used, 0.0));
    for (size_t k = 0; k < k_used; ++k) {
        traj.tau[k] = static_cast<double>(k) * stride / params.N;
        traj.r1_bar[k] = r1_sum[k] / surv[k];
        traj.cleared_bar[k] = static_cast<double>(cleared_sum[k]) / surv[k];
        for (int u = 0; u < params.L; ++u)
            traj.v_bar[u][k] =
                static_cast<double>(v_sum[u][k]) / surv[k] / params.N;
    }

    const auto k_half = static_cast<size_t>(
        std::llround(0.5 * epsilon * params.L * params.N / stride));
    if (k_half >= k_used ||
        surv[k_half] < opts.min_survivor_frac * n_trials) {
        traj.usable = false;
        traj.note = "fewer than the required fraction of trials reached the "
                    "steady state";
    }
    return traj;
}

PlateauFit extract_alpha_beta_gamma(const MeanTrajectory& traj, double epsilon,
                                    double eps_star, double plateau_tol,
                                    double min_len_frac) {
    PlateauFit fit;
    const double eps_l = epsilon * traj.L;

    // moving-average smoothing over ~0.15 tau units keeps the finite-trial
    // noise well inside the plateau band
    const double dtau = static_cast<double>(traj.stride) / traj.N;
    const int half = std::clamp(static_cast<int>(0.075 / dtau), 1, 15);
    const auto n = traj.r1_bar.size();
    std::vector<double> smooth(n, 0.0);
    for (size_t k = 0; k < n; ++k) {
        const size_t a = k >= static_cast<size_t>(half) ? k - half : 0;
        const size_t b = std::min(n - 1, k + half);
        double s = 0.0;
        for (size_t j = a; j <= b; ++j) s += traj.r1_bar[j];
        smooth[k] = s / (b - a + 1);
    }

    std::vector<double> central;
    for (size_t k = 0; k < traj.tau.size(); ++k)
        if (traj.tau[k] >= eps_l / 3.0 && traj.tau[k] <= 2.0 * eps_l / 3.0)
            central.push_back(smooth[k]);
    if (central.size() < 3) {
        fit.usable = false;
        fit.note = "trajectory grid too coarse for a plateau";
        return fit;
    }
    auto mid = central.begin() + central.size() / 2;
    std::nth_element(central.begin(), mid, central.end());
    const double p = *mid;
    fit.plateau = p;
    fit.gamma = p / (eps_star - epsilon);

    const int min_surv = std::max(1, traj.n_trials / 2);
    auto surv_ok = [&](size_t k) { return traj.survivors[k] >= min_surv; };
    auto in_band = [&](double v) { return std::abs(v - p) <= plateau_tol * p; };

    std::vector<std::pair<size_t, size_t>> runs;
    for (size_t k = 0; k < n; ++k) {
        if (!(surv_ok(k) && in_band(smooth[k]))) continue;
        if (!runs.empty() && k <= runs.back().second + half + 1)
            runs.back().second = k;  // excursions shorter than the smoothing
                                     // window do not break the plateau
        else
            runs.push_back({k, k});
    }
    if (runs.empty()) {
        fit.usable = false;
        fit.note = "no contiguous plateau interval found";
        return fit;
    }
    auto best = runs.front();
    for (const auto& r : runs)
        if (r.second - r.first > best.second - best.first) best = r;
    size_t a = best.first, b = best.second;
    // refine the smoothed endpoints on the raw series
    while (a > 0 && surv_ok(a - 1) && in_band(traj.r1_bar[a - 1])) --a;
    while (a <= b && !in_band(traj.r1_bar[a])) ++a;
    while (b + 1 < n && surv_ok(b + 1) && in_band(traj.r1_bar[b + 1])) ++b;
    while (b > a && !in_band(traj.r1_bar[b])) --b;
    fit.alpha = traj.tau[a];
    fit.beta = traj.tau[b];
    if (fit.beta - fit.alpha < min_len_frac * eps_l) {
        fit.usable = false;
        fit.note = "steady-state interval shorter than the configured minimum";
    }
    return fit;
}

double estimate_speed(const MeanTrajectory& traj, double alpha, double beta) {
    const double dtau = static_cast<double>(traj.stride) / traj.N;
    auto k = static_cast<size_t>(std::llround(0.5 * (alpha + beta) / dtau));
    if (k >= traj.tau.size()) k = traj.tau.size() - 1;
    const double v = traj.v_bar[traj.L / 2][k];
    if (v < 1e-9)
        throw std::runtime_error(
            "decoding wave already passed the mid-chain speed probe");
    return 1.0 / v;
}

// ---------------------------------------------------------------------------
// nu / theta

NuThetaResult estimate_nu_theta(const EnsembleParams& params, double epsilon,
                                double eps_star, int n_trials, uint64_t seed,
                                const NuThetaOptions& opts) {
    NuThetaResult out;
    out.n_trials = n_trials;

    TrajectoryOptions to;
    to.stride = opts.stride;
    to.keep_trial_r1 = true;
    const MeanTrajectory traj =
        estimate_mean_trajectory(params, epsilon, n_trials, seed, to);
    if (!traj.usable) {
        out.usable = false;
        out.note = traj.note;
        return out;
    }
    const PlateauFit fit =
        extract_alpha_beta_gamma(traj, epsilon, eps_star, opts.plateau_tol);
    if (!fit.usable) {
        out.usable = false;
        out.note = fit.note;
        return out;
    }
    out.alpha = fit.alpha;
    out.beta = fit.beta;

    const double dtau = static_cast<double>(traj.stride) / traj.N;
    out.dtau = dtau;
    const double len = fit.beta - fit.alpha;
    const double lo = fit.alpha + 0.5 * (1.0 - opts.central_frac) * len;
    const double hi = fit.beta - 0.5 * (1.0 - opts.central_frac) * len;
    const auto k0 = static_cast<size_t>(std::ceil(lo / dtau));
    const auto k1 = static_cast<size_t>(std::floor(hi / dtau));
    if (k1 <= k0 + 8) {
        out.usable = false;
        out.note = "steady-state sub-interval too short for covariance";
        return out;
    }

    // only trials alive through the sub-interval contribute
    std::vector<int> inc;
    for (int t = 0; t < n_trials; ++t)
        if (traj.trial_r1[t].size() > k1) inc.push_back(t);
    const auto T = static_cast<int>(inc.size());
    if (T < 20) {
        out.usable = false;
        out.note = "too few trials survive the steady state";
        return out;
    }

    const size_t K = k1 - k0 + 1;
    std::vector<double> mean(K, 0.0);
    for (int t : inc)
        for (size_t k = 0; k < K; ++k) mean[k] += traj.trial_r1[t][k0 + k];
    for (auto& m : mean) m /= T;

    // deviations, trials as rows
    std::vector<double> dev(static_cast<size_t>(T) * K);
    for (int r = 0; r < T; ++r)
        for (size_t k = 0; k < K; ++k)
            dev[r * K + k] = traj.trial_r1[inc[r]][k0 + k] - mean[k];

    const auto max_lag = static_cast<size_t>(K / 4);
    auto autocov_at = [&](size_t d) {
        double acc = 0.0;
        for (int r = 0; r < T; ++r) {
            const double* row = dev.data() + static_cast<size_t>(r) * K;
            for (size_t k = 0; k + d < K; ++k) acc += row[k] * row[k + d];
        }
        const auto pairs = static_cast<double>(K - d);
        return acc / (pairs * (T - 1));
    };

    const double c0 = autocov_at(0);
    if (!(c0 > 0.0)) {
        out.usable = false;
        out.note = "non-positive steady-state variance";
        return out;
    }
    out.nu = params.N * c0;
    out.autocov.push_back(c0);
    for (size_t d = 1; d <= max_lag; ++d) {
        const double c = autocov_at(d);
        if (c <= 0.0) {
            if (d <= 2) {
                out.usable = false;
                out.note = "non-positive autocovariance at small lags";
                return out;
            }
            break;
        }
        out.autocov.push_back(c);
        if (c < opts.lag_floor_frac * c0) break;
    }
    if (out.autocov.size() < 4) {
        out.usable = false;
        out.note = "autocovariance decays too fast for a lag fit";
        return out;
    }

    std::vector<double> xs(out.autocov.size()), ys(out.autocov.size());
    for (size_t d = 0; d < out.autocov.size(); ++d) {
        xs[d] = static_cast<double>(d) * dtau;
        ys[d] = std::log(out.autocov[d]);
    }
    const auto [c_intercept, slope] =
        num::linear_fit(xs.data(), ys.data(), static_cast<int>(xs.size()));
    (void)c_intercept;
    out.theta = -slope;
    if (!(out.theta > 0.0)) {
        out.usable = false;
        out.note = "autocovariance fit produced a non-positive decay rate";
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimation pipeline

ScalingParams build_scaling_params(const EstimateConfig& cfg,
                                   EstimateDiagnostics* diag) {
    if (cfg.eps_grid.empty())
        throw std::invalid_argument("estimation grid must not be empty");
    for (size_t i = 1; i < cfg.eps_grid.size(); ++i)
        if (!(cfg.eps_grid[i] > cfg.eps_grid[i - 1]))
            throw std::invalid_argument("estimation grid must be ascending");
    if (!(cfg.nu_theta_eps > 0))
        throw std::invalid_argument("nu_theta_eps must be set");

    ScalingParams table;
    table.dv = cfg.dv;
    table.dc = cfg.dc;
    table.L = cfg.L;
    table.N_est = cfg.N;
    table.trials = cfg.trials;
    table.eps_star = de_threshold(cfg.dv, cfg.dc, cfg.L, cfg.de_tol);
    if (cfg.eps_grid.back() >= table.eps_star)
        throw std::invalid_argument("estimation grid must stay below eps_star");

    EnsembleParams term{cfg.dv, cfg.dc, cfg.L, cfg.N, ChainKind::Terminated};
    EnsembleParams trunc{cfg.dv, cfg.dc, cfg.L, cfg.N, ChainKind::Truncated};

    for (size_t gi = 0; gi < cfg.eps_grid.size(); ++gi) {
        const double eps = cfg.eps_grid[gi];
        const auto seed_t = rng::derive_seed(cfg.seed, 1, gi);
        const auto seed_u = rng::derive_seed(cfg.seed, 2, gi);
        const MeanTrajectory tt =
            estimate_mean_trajectory(term, eps, cfg.trials, seed_t);
        const MeanTrajectory tu =
            estimate_mean_trajectory(trunc, eps, cfg.trials, seed_u);
        if (!tt.usable || !tu.usable)
            throw std::runtime_error("trajectory estimation unusable at eps=" +
                                     std::to_string(eps));
        const PlateauFit ft = extract_alpha_beta_gamma(
            tt, eps, table.eps_star, cfg.plateau_tol);
        const PlateauFit fu = extract_alpha_beta_gamma(
            tu, eps, table.eps_star, cfg.plateau_tol);
        if (!ft.usable || !fu.usable)
            throw std::runtime_error("no usable steady state at eps=" +
                                     std::to_string(eps));
        ScalingRow row;
        row.epsilon = eps;
        row.alpha_term = ft.alpha;
        row.beta_term = ft.beta;
        row.gamma_term = ft.gamma;
        row.alpha_trunc = fu.alpha;
        row.beta_trunc = fu.beta;
        row.gamma_trunc = fu.gamma;
        row.speed = estimate_speed(tt, ft.alpha, ft.beta);
        table.rows.push_back(row);

        if (diag) {
            diag->gamma_ratio.push_back(ft.gamma / fu.gamma);
            for (double scale : {0.5, 1.0, 2.0}) {
                const PlateauFit st = extract_alpha_beta_gamma(
                    tt, eps, table.eps_star, cfg.plateau_tol * scale);
                const PlateauFit su = extract_alpha_beta_gamma(
                    tu, eps, table.eps_star, cfg.plateau_tol * scale);
                diag->sensitivity.push_back({eps, cfg.plateau_tol * scale,
                                             st.alpha, st.beta, st.gamma,
                                             true});
                diag->sensitivity.push_back({eps, cfg.plateau_tol * scale,
                                             su.alpha, su.beta, su.gamma,
                                             false});
            }
        }
    }

    const NuThetaResult nt =
        estimate_nu_theta(trunc, cfg.nu_theta_eps, table.eps_star,
                          cfg.nu_theta_trials, rng::derive_seed(cfg.seed, 3));
    if (!nt.usable)
        throw std::runtime_error("nu/theta estimation unusable: " + nt.note);
    table.nu = nt.nu;
    table.theta = nt.theta;
    table.nu_theta_epsilon = cfg.nu_theta_eps;
    if (diag) {
        diag->nu_theta_alpha = nt.alpha;
        diag->nu_theta_beta = nt.beta;
    }

    // single-process baseline constants
    const double eps_g = std::clamp(cfg.nu_theta_eps,
                                    table.rows.front().epsilon,
                                    table.rows.back().epsilon);
    table.gamma_hat = 2.0 * table.interpolate(eps_g).gamma_trunc;
    table.nu_hat = 2.0 * table.nu;
    if (cfg.olmos_theta_hat > 0) {
        table.theta_hat = cfg.olmos_theta_hat;
        table.theta_hat_source = "external";
    } else {
        const NuThetaResult ntt =
            estimate_nu_theta(term, cfg.nu_theta_eps, table.eps_star,
                              cfg.nu_theta_trials, rng::derive_seed(cfg.seed, 4));
        if (!ntt.usable)
            throw std::runtime_error("baseline theta estimation unusable: " +
                                     ntt.note);
        table.theta_hat = ntt.theta;
        table.theta_hat_source = "mc-terminated";
    }
    table.alpha_lb_frac =
        uncoupled_decoded_fraction(cfg.dv, cfg.dc, table.eps_star);

    table.validate();
    return table;
}

}  // namespace scldpc

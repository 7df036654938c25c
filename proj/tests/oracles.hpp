#pragma once

// Test-side quadrature oracles. These deliberately avoid the library's
// adaptive Simpson path: Gauss-Legendre nodes are generated here by Newton
// iteration on the Legendre recurrence, and the first-hit-time integrals are
// written out directly from the densities.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

struct GaussRule {
    std::vector<double> node, weight;  // on [-1, 1]
};

inline const GaussRule& gauss20() {
    static const GaussRule rule = [] {
        constexpr int n = 20;
        GaussRule r;
        r.node.resize(n);
        r.weight.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            r.node[i] = x;
            r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <class F>
double gauss_panel(F&& f, double a, double b) {
    const auto& r = gauss20();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < r.node.size(); ++i)
        s += r.weight[i] * f(c + h * r.node[i]);
    return s * h;
}

template <class F>
double gauss_composite(F&& f, double a, double b, int panels) {
    if (!(b > a)) return 0.0;
    double s = 0.0;
    const double w = (b - a) / panels;
    for (int i = 0; i < panels; ++i)
        s += gauss_panel(f, a + i * w, a + (i + 1) * w);
    return s;
}

inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// mu0 by plain uniform midpoint rule (the cheap cross-check). Valid while
// e^{Z^2/2} stays inside the double range, i.e. Z below ~35.
inline double mu0_midpoint(double gamma, double nu, double theta, double N,
                           double eps_star, double eps, long panels) {
    const double Z = gamma * std::sqrt(N / nu) * (eps_star - eps);
    if (Z <= 0.0) return 0.0;
    if (Z > 35.0) throw std::invalid_argument("midpoint oracle: Z too large");
    const double h = Z / panels;
    double s = 0.0;
    for (long i = 0; i < panels; ++i) {
        const double z = (i + 0.5) * h;
        s += phi_cdf(z) * std::exp(0.5 * z * z);
    }
    return std::sqrt(2.0 * M_PI) / theta * s * h;
}

// mu0 by composite Gauss-Legendre with panels refined toward Z where the
// integrand concentrates.
inline double mu0_gauss(double gamma, double nu, double theta, double N,
                        double eps_star, double eps) {
    const double Z = gamma * std::sqrt(N / nu) * (eps_star - eps);
    if (Z <= 0.0) return 0.0;
    if (Z > 35.0) throw std::invalid_argument("gauss oracle: Z too large");
    auto f = [](double z) { return phi_cdf(z) * std::exp(0.5 * z * z); };
    double total = 0.0;
    double right = Z;
    double width = std::min(Z, 1.0 / std::max(1.0, Z));
    while (right > 0.0) {
        const double left = std::max(0.0, right - width);
        total += gauss_composite(f, left, right, 64);
        right = left;
        width *= 2.0;
    }
    return std::sqrt(2.0 * M_PI) / theta * total;
}

// Erlang-2 density with unit scale: u e^{-u}.
inline double fer_erlang2_quad(double U, int panels = 512) {
    return gauss_composite([](double u) { return u * std::exp(-u); }, 0.0,
                           U, panels);
}

// int_alpha^beta (eps - x/L) f2(x) dx in the u = (x-alpha)/mu substitution.
inline double ber_term_quad(double eps, double alpha, double beta, double mu,
                            double L, int panels = 512) {
    auto f = [&](double u) {
        return (eps - (alpha + mu * u) / L) * u * std::exp(-u);
    };
    return gauss_composite(f, 0.0, (beta - alpha) / mu, panels);
}

// int_alpha^beta (x - alpha) f2(x) dx  (the BLER integral, scaled by mu)
inline double bler_integral_quad(double alpha, double beta, double mu,
                                 int panels = 512) {
    auto f = [](double u) { return u * u * std::exp(-u); };
    return mu * gauss_composite(f, 0.0, (beta - alpha) / mu, panels);
}

inline double fer_exp_quad(double U, int panels = 512) {
    return gauss_composite([](double u) { return std::exp(-u); }, 0.0, U,
                           panels);
}

inline double ber_unterm_quad(double eps, double alpha, double Lp, double mu,
                              int panels = 512) {
    const double U = (eps * Lp - alpha) / mu;
    auto f = [&](double u) {
        return (eps - (alpha + mu * u) / Lp) * std::exp(-u);
    };
    return gauss_composite(f, 0.0, U, panels);
}

// int floor((x - alpha) s) f1(x) dx, integrated exactly per unit step of the
// floor so the discontinuities never cross a panel.
inline double bler_floor_quad(double omega, double s, double mu,
                              double Lp, int panels_per_piece = 64) {
    const double U = omega / mu;  // in u units; floor arg = u * mu * s
    const auto steps = static_cast<long>(std::floor(omega * s));
    double total = 0.0;
    for (long i = 0; i <= steps; ++i) {
        const double u_lo = i / (s * mu);
        const double u_hi = std::min(U, (i + 1) / (s * mu));
        if (u_hi <= u_lo) break;
        total += i * gauss_composite([](double u) { return std::exp(-u); },
                                     u_lo, u_hi, panels_per_piece);
    }
    const double fer = fer_exp_quad(U, 512);
    return fer - total / Lp;
}

}  // namespace oracle

#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>

namespace scldpc::num {

// Standard normal CDF.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

// log(Phi(z)), accurate for large positive z where Phi(z) -> 1.
inline double log_normal_cdf(double z) {
    if (z >= 0.0) return std::log1p(-0.5 * std::erfc(z * M_SQRT1_2));
    const double p = 0.5 * std::erfc(-z * M_SQRT1_2);
    if (p > 0.0) return std::log(p);
    // far negative tail, Phi(z) ~ phi(z)/(-z)
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * M_PI);
}

// 1 - (1+x)e^{-x}: CDF of an Erlang(2) variable at x (unit scale). Series
// expansion below the cancellation regime.
inline double erlang2_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 0.02) {
        // sum_{k>=2} (-1)^k (k-1)/k! x^k
        double term = 0.5 * x * x;  // k = 2
        double sum = term;
        for (int k = 3; k <= 14; ++k) {
            term *= -x * (k - 1) / (k * (k - 2));
            sum += term;
        }
        return sum;
    }
    if (x > 745.0) return 1.0;
    return 1.0 - (1.0 + x) * std::exp(-x);
}

// int_0^x u^2 e^{-u} du = 2 - e^{-x}(x^2 + 2x + 2), series-guarded.
inline double gamma3_lower(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 0.05) {
        // sum_{k>=0} (-1)^k x^{k+3} / (k! (k+3))
        double pow = x * x * x;
        double sum = pow / 3.0;
        double fact = 1.0;
        for (int k = 1; k <= 12; ++k) {
            pow *= x;
            fact *= k;
            const double t = pow / (fact * (k + 3));
            sum += (k % 2 == 1) ? -t : t;
        }
        return sum;
    }
    if (x > 745.0) return 2.0;
    return 2.0 - std::exp(-x) * (x * x + 2.0 * x + 2.0);
}

// Adaptive Simpson with Richardson correction.
namespace detail {
template <class F>
double simpson_rec(F& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(F f, double a, double b, double abs_tol,
                        int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol,
                               max_depth);
}

// Least-squares line y = c0 + c1 x over spans of equal length.
inline std::pair<double, double> linear_fit(const double* xs, const double* ys,
                                            int n) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    const double c1 = (n * sxy - sx * sy) / det;
    const double c0 = (sy - c1 * sx) / n;
    return {c0, c1};
}

}  // namespace scldpc::num

#include "scldpc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scldpc/rng.hpp"

namespace scldpc {

namespace {

double cv_squared(const std::vector<double>& x) {
    const auto n = static_cast<double>(x.size());
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= (n - 1);
    return var / (mean * mean);
}

// mean of an exponential(lambda) truncated to [0, T]
double truncated_mean(double lambda, double T) {
    const double r = T / lambda;
    if (r > 700.0) return lambda;
    const double em = std::expm1(-r);
    return lambda + T * (1.0 + 1.0 / em);
}

double fit_lambda(double sample_mean, double T) {
    if (sample_mean >= 0.5 * T) return 1e6 * T;  // flatter than any exponential
    double lo = sample_mean, hi = 1e6 * T;
    // truncated mean is increasing in lambda and always below lambda
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_mean(mid, T) < sample_mean)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ExpFitTest exponentiality_test(const std::vector<double>& samples,
                               double shift, double cap, int n_boot,
                               uint64_t seed) {
    ExpFitTest out;
    std::vector<double> x;
    x.reserve(samples.size());
    for (double t : samples) {
        if (t > shift && t <= cap)
            x.push_back(t - shift);
        else
            ++out.dropped;
    }
    out.n = static_cast<int>(x.size());
    if (out.n < 50) throw std::invalid_argument("too few samples for the test");

    const double T = cap - shift;
    double mean = 0;
    for (double v : x) mean += v;
    mean /= out.n;
    out.lambda = fit_lambda(mean, T);
    out.cv2 = cv_squared(x);

    rng::Engine gen(seed);
    const double full = -std::expm1(-T / out.lambda);
    int le = 0, ge = 0;
    std::vector<double> boot(out.n);
    for (int b = 0; b < n_boot; ++b) {
        for (int i = 0; i < out.n; ++i) {
            const double u = rng::uniform_unit(gen);
            boot[i] = -out.lambda * std::log1p(-u * full);
        }
        const double c = cv_squared(boot);
        if (c <= out.cv2) ++le;
        if (c >= out.cv2) ++ge;
    }
    const double p_lo = static_cast<double>(1 + le) / (n_boot + 1);
    const double p_hi = static_cast<double>(1 + ge) / (n_boot + 1);
    out.p_value = std::min(1.0, 2.0 * std::min(p_lo, p_hi));
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

}  // namespace scldpc

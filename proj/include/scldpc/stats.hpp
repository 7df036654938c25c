#pragma once

#include <cstdint>
#include <vector>

namespace scldpc {

struct ExpFitTest {
    double cv2 = 0;      // squared coefficient of variation of shifted data
    double p_value = 0;  // parametric bootstrap, two-sided
    double lambda = 0;   // fitted truncated-exponential scale
    int n = 0;           // samples used
    int dropped = 0;     // samples outside (shift, cap]
};

// Tests whether first-hit samples follow a shifted exponential law truncated
// at `cap`. The statistic is CV^2 (1 for an exponential, 1/2 for Erlang-2);
// the null distribution comes from a parametric bootstrap at the fitted
// scale, which also absorbs the truncation.
ExpFitTest exponentiality_test(const std::vector<double>& samples,
                               double shift, double cap, int n_boot,
                               uint64_t seed);

double median(std::vector<double> v);

}  // namespace scldpc

// Throughput comparison: serial reference loop vs the OpenMP harness on the
// same frame workload.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "scldpc/montecarlo.hpp"

using namespace scldpc;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_case(const char* name, const ExperimentSpec& spec) {
    auto t0 = Clock::now();
    const ErrorStats serial = run_experiment_serial(spec);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    const ErrorStats parallel = run_experiment(spec);
    const double tp = seconds_since(t0);

    bool identical = serial.points.size() == parallel.points.size();
    for (size_t i = 0; identical && i < serial.points.size(); ++i)
        identical = serial.points[i].frame_errors ==
                        parallel.points[i].frame_errors &&
                    serial.points[i].bit_errors ==
                        parallel.points[i].bit_errors &&
                    serial.points[i].frames == parallel.points[i].frames;

    const double frames = static_cast<double>(serial.points[0].frames);
    std::printf("%-28s frames=%-7.0f serial %7.2f f/s | omp(%d) %7.2f f/s | "
                "speedup %.2fx | results %s\n",
                name, frames, frames / ts, omp_get_max_threads(), frames / tp,
                ts / tp, identical ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    int frames = 400;
    if (argc > 1) frames = std::stoi(argv[1]);

    ExperimentSpec spec;
    spec.params = {5, 10, 50, 1000, ChainKind::Terminated};
    spec.epsilons = {0.47};
    spec.max_frames = frames;
    spec.target_frame_errors = 0;
    spec.master_seed = 7;

    bench_case("full-bp (5,10,L=50,N=1000)", spec);

    spec.decoder = WindowConfig{20, false};
    bench_case("window W=20 (5,10,L=50)", spec);

    spec.decoder = FullBp{};
    spec.params.N = 4000;
    spec.max_frames = std::max(frames / 4, 32);
    bench_case("full-bp (5,10,L=50,N=4000)", spec);
    return 0;
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scldpc/window.hpp"

namespace scldpc {

struct ExperimentSpec {
    EnsembleParams params;
    std::vector<double> epsilons;
    DecoderSpec decoder = FullBp{};
    int64_t max_frames = 100000;
    int64_t target_frame_errors = 200;  // 0 disables the event target
    uint64_t master_seed = 1;
    bool expurgate = true;
    // Trials are processed in fixed-size batches; the stopping rule is
    // checked between batches, so results do not depend on the worker count.
    int64_t batch_size = 1024;
    bool fixed_graph = false;  // debug mode: one graph for all frames

    void validate() const;
};

enum class StopReason { TargetEvents, FrameCap };

struct PointStats {
    double epsilon = 0;
    int64_t frames = 0;
    int64_t frame_errors = 0;
    int64_t bit_errors = 0;
    int64_t block_errors = 0;
    int64_t expurgated = 0;
    StopReason stop_reason = StopReason::FrameCap;
    double fer = 0, fer_lo = 0, fer_hi = 0;
    double ber = 0, ber_lo = 0, ber_hi = 0;
    double bler = 0, bler_lo = 0, bler_hi = 0;
};

struct ErrorStats {
    std::vector<PointStats> points;
};

// OpenMP-parallel over trials within each batch.
ErrorStats run_experiment(const ExperimentSpec& spec);
// Plain-loop reference; must produce results identical to run_experiment.
ErrorStats run_experiment_serial(const ExperimentSpec& spec);

struct WilsonInterval {
    double lo = 0, hi = 1;
};
WilsonInterval wilson(int64_t successes, int64_t n,
                      double z = 1.959963984540054);

void write_stats_csv(std::ostream& os, const ErrorStats& stats);
ErrorStats read_stats_csv(std::istream& is);
void write_manifest(std::ostream& os, const ExperimentSpec& spec,
                    const ErrorStats& stats);

struct PredictionRow {
    double epsilon = 0;
    double fer = 0, ber = 0, bler = 0;
};

struct CompareEntry {
    double epsilon = 0;
    std::string metric;
    double simulated = 0, sim_lo = 0, sim_hi = 0;
    int64_t sim_events = 0;
    double predicted = 0;
    double ratio = 0;
    bool flagged = false;  // prediction outside [sim/2, 2*sim]
};

struct CompareReport {
    std::vector<CompareEntry> rows;
    int flagged_count = 0;
};

CompareReport compare(const ErrorStats& stats,
                      const std::vector<PredictionRow>& predictions);
void write_compare_csv(std::ostream& os, const CompareReport& report);

}  // namespace scldpc

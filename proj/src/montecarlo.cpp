#include "scldpc/montecarlo.hpp"

#include <omp.h>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scldpc/peeling.hpp"
#include "scldpc/rng.hpp"

namespace scldpc {

void ExperimentSpec::validate() const {
    params.validate();
    if (epsilons.empty()) throw std::invalid_argument("epsilon grid is empty");
    for (double e : epsilons)
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument("epsilon outside [0, 1]");
    if (max_frames < 1 && target_frame_errors < 1)
        throw std::invalid_argument("need a frame budget or an event target");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (std::holds_alternative<WindowConfig>(decoder)) {
        const int W = std::get<WindowConfig>(decoder).W;
        if (W < 1 || W > params.cn_position_count())
            throw std::invalid_argument("window size out of range");
        if (params.kind != ChainKind::Terminated)
            throw std::invalid_argument("window decoding requires Terminated");
    }
}

namespace {

struct TrialCounts {
    int64_t frame_errors = 0;
    int64_t bit_errors = 0;
    int64_t block_errors = 0;
    int64_t expurgated = 0;
};

// Per-thread scratch so graphs and decoder state are reused across frames.
struct Workspace {
    TannerGraph graph;
    ErasurePattern erasures;
    PeelDecoder peel;
    WindowDecoder window;
};

TrialCounts run_trial(Workspace& ws, const ExperimentSpec& spec,
                      size_t point_idx, int64_t trial_idx) {
    const uint64_t seed =
        rng::derive_seed(spec.master_seed, point_idx + 1, trial_idx);
    const uint64_t graph_seed =
        spec.fixed_graph ? rng::derive_seed(spec.master_seed, point_idx + 1, 0)
                         : rng::derive_seed(seed, 1);
    sample_graph_into(spec.params, graph_seed, ws.graph);
    sample_erasures_into(spec.params.vn_count(), spec.epsilons[point_idx],
                         rng::derive_seed(seed, 2), ws.erasures);
    const uint64_t peel_seed = rng::derive_seed(seed, 3);

    const PeelState* state = nullptr;
    if (std::holds_alternative<WindowConfig>(spec.decoder)) {
        ws.window.decode(ws.graph, ws.erasures,
                         std::get<WindowConfig>(spec.decoder), peel_seed);
        state = &ws.window.state();
    } else {
        ws.peel.decode(ws.graph, ws.erasures, peel_seed);
        state = &ws.peel.state();
    }

    TrialCounts c;
    if (state->active_vn_count() == 0) return c;
    if (spec.expurgate &&
        classify_residual(ws.graph, *state) ==
            ResidualClass::OnlySize2StoppingSets) {
        c.expurgated = 1;  // counted as success; residual bits excluded
        return c;
    }
    c.frame_errors = 1;
    c.bit_errors = state->active_vn_count();
    for (int u = 0; u < spec.params.L; ++u)
        if (state->active_vn_at(u) > 0) ++c.block_errors;
    return c;
}

PointStats finalize_point(const ExperimentSpec& spec, double epsilon,
                          int64_t frames, const TrialCounts& c) {
    PointStats p;
    p.epsilon = epsilon;
    p.frames = frames;
    p.frame_errors = c.frame_errors;
    p.bit_errors = c.bit_errors;
    p.block_errors = c.block_errors;
    p.expurgated = c.expurgated;
    p.stop_reason = (spec.target_frame_errors > 0 &&
                     c.frame_errors >= spec.target_frame_errors)
                        ? StopReason::TargetEvents
                        : StopReason::FrameCap;
    const int64_t bits = frames * spec.params.vn_count();
    const int64_t blocks = frames * spec.params.L;
    p.fer = frames ? static_cast<double>(c.frame_errors) / frames : 0.0;
    p.ber = bits ? static_cast<double>(c.bit_errors) / bits : 0.0;
    p.bler = blocks ? static_cast<double>(c.block_errors) / blocks : 0.0;
    const auto fi = wilson(c.frame_errors, frames);
    const auto bi = wilson(c.bit_errors, bits);
    const auto ki = wilson(c.block_errors, blocks);
    p.fer_lo = fi.lo;
    p.fer_hi = fi.hi;
    p.ber_lo = bi.lo;
    p.ber_hi = bi.hi;
    p.bler_lo = ki.lo;
    p.bler_hi = ki.hi;
    return p;
}

template <bool Parallel>
ErrorStats run_impl(const ExperimentSpec& spec) {
    spec.validate();
    ErrorStats stats;
    for (size_t pi = 0; pi < spec.epsilons.size(); ++pi) {
        TrialCounts total;
        int64_t frames = 0;
        std::vector<Workspace> pool;
        if constexpr (Parallel)
            pool.resize(omp_get_max_threads());
        else
            pool.resize(1);
        while (frames < spec.max_frames) {
            const int64_t batch =
                std::min<int64_t>(spec.batch_size, spec.max_frames - frames);
            TrialCounts acc;
            if constexpr (Parallel) {
                int64_t fe = 0, be = 0, bl = 0, ex = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : fe, be, bl, ex)
                for (int64_t i = 0; i < batch; ++i) {
                    Workspace& ws = pool[omp_get_thread_num()];
                    const TrialCounts c = run_trial(ws, spec, pi, frames + i);
                    fe += c.frame_errors;
                    be += c.bit_errors;
                    bl += c.block_errors;
                    ex += c.expurgated;
                }
                acc = {fe, be, bl, ex};
            } else {
                for (int64_t i = 0; i < batch; ++i) {
                    const TrialCounts c = run_trial(pool[0], spec, pi, frames + i);
                    acc.frame_errors += c.frame_errors;
                    acc.bit_errors += c.bit_errors;
                    acc.block_errors += c.block_errors;
                    acc.expurgated += c.expurgated;
                }
            }
            total.frame_errors += acc.frame_errors;
            total.bit_errors += acc.bit_errors;
            total.block_errors += acc.block_errors;
            total.expurgated += acc.expurgated;
            frames += batch;
            if (spec.target_frame_errors > 0 &&
                total.frame_errors >= spec.target_frame_errors)
                break;
        }
        stats.points.push_back(
            finalize_point(spec, spec.epsilons[pi], frames, total));
    }
    return stats;
}

}  // namespace

ErrorStats run_experiment(const ExperimentSpec& spec) {
    return run_impl<true>(spec);
}

ErrorStats run_experiment_serial(const ExperimentSpec& spec) {
    return run_impl<false>(spec);
}

WilsonInterval wilson(int64_t successes, int64_t n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w;
    w.lo = std::max(0.0, (center - half) / denom);
    w.hi = std::min(1.0, (center + half) / denom);
    return w;
}

void write_stats_csv(std::ostream& os, const ErrorStats& stats) {
    os << std::setprecision(17);
    os << "epsilon,frames,fer,fer_lo,fer_hi,ber,ber_lo,ber_hi,bler,bler_lo,"
          "bler_hi,expurgated\n";
    for (const auto& p : stats.points)
        os << p.epsilon << ',' << p.frames << ',' << p.fer << ',' << p.fer_lo
           << ',' << p.fer_hi << ',' << p.ber << ',' << p.ber_lo << ','
           << p.ber_hi << ',' << p.bler << ',' << p.bler_lo << ',' << p.bler_hi
           << ',' << p.expurgated << '\n';
}

ErrorStats read_stats_csv(std::istream& is) {
    ErrorStats stats;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("simulation csv: empty file");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        PointStats p;
        if (!(ls >> p.epsilon >> p.frames >> p.fer >> p.fer_lo >> p.fer_hi >>
              p.ber >> p.ber_lo >> p.ber_hi >> p.bler >> p.bler_lo >>
              p.bler_hi >> p.expurgated))
            throw std::runtime_error("simulation csv: bad row: " + line);
        p.frame_errors = std::llround(p.fer * p.frames);
        stats.points.push_back(p);
    }
    return stats;
}

void write_manifest(std::ostream& os, const ExperimentSpec& spec,
                    const ErrorStats& stats) {
    os << std::setprecision(17);
    os << "scldpc simulation manifest\n";
    os << "version 0.1.0\n";
    os << "dv " << spec.params.dv << "\ndc " << spec.params.dc << "\nL "
       << spec.params.L << "\nN " << spec.params.N << "\nkind "
       << to_string(spec.params.kind) << '\n';
    if (std::holds_alternative<WindowConfig>(spec.decoder))
        os << "decoder window W=" << std::get<WindowConfig>(spec.decoder).W
           << '\n';
    else
        os << "decoder full-bp\n";
    os << "master_seed " << spec.master_seed << '\n';
    os << "max_frames " << spec.max_frames << '\n';
    os << "target_frame_errors " << spec.target_frame_errors << '\n';
    os << "batch_size " << spec.batch_size << '\n';
    os << "expurgate " << (spec.expurgate ? 1 : 0) << '\n';
    os << "fixed_graph " << (spec.fixed_graph ? 1 : 0) << '\n';
    os << "epsilons";
    for (double e : spec.epsilons) os << ' ' << e;
    os << '\n';
    for (const auto& p : stats.points)
        os << "point eps=" << p.epsilon << " frames=" << p.frames
           << " frame_errors=" << p.frame_errors << " stop="
           << (p.stop_reason == StopReason::TargetEvents ? "target_events"
                                                         : "frame_cap")
           << '\n';
}

CompareReport compare(const ErrorStats& stats,
                      const std::vector<PredictionRow>& predictions) {
    CompareReport report;
    for (const auto& p : stats.points) {
        const PredictionRow* match = nullptr;
        for (const auto& q : predictions)
            if (std::abs(q.epsilon - p.epsilon) < 1e-12) {
                match = &q;
                break;
            }
        if (!match) continue;
        struct Item {
            const char* name;
            double sim, lo, hi, pred;
            int64_t events;
        };
        const Item items[] = {
            {"fer", p.fer, p.fer_lo, p.fer_hi, match->fer, p.frame_errors},
            {"ber", p.ber, p.ber_lo, p.ber_hi, match->ber, p.bit_errors},
            {"bler", p.bler, p.bler_lo, p.bler_hi, match->bler,
             p.block_errors},
        };
        for (const auto& it : items) {
            if (std::isnan(it.pred)) continue;
            CompareEntry e;
            e.epsilon = p.epsilon;
            e.metric = it.name;
            e.simulated = it.sim;
            e.sim_lo = it.lo;
            e.sim_hi = it.hi;
            e.sim_events = it.events;
            e.predicted = it.pred;
            if (it.sim > 0.0)
                e.ratio = it.pred / it.sim;
            else
                e.ratio = it.pred > 0.0
                              ? std::numeric_limits<double>::infinity()
                              : 1.0;
            e.flagged = e.ratio < 0.5 || e.ratio > 2.0;
            if (e.flagged) ++report.flagged_count;
            report.rows.push_back(e);
        }
    }
    return report;
}

void write_compare_csv(std::ostream& os, const CompareReport& report) {
    os << std::setprecision(17);
    os << "epsilon,metric,simulated,sim_lo,sim_hi,sim_events,predicted,ratio,"
          "flagged\n";
    for (const auto& r : report.rows)
        os << r.epsilon << ',' << r.metric << ',' << r.simulated << ','
           << r.sim_lo << ',' << r.sim_hi << ',' << r.sim_events << ','
           << r.predicted << ',' << r.ratio << ',' << (r.flagged ? 1 : 0)
           << '\n';
}

}  // namespace scldpc

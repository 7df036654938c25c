#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "scldpc/ensemble.hpp"
#include "scldpc/rng.hpp"

namespace scldpc {

// Residual-graph state of peeling decoding plus degree-one CN bookkeeping.
// Degree-one membership supports O(1) amortized insert/remove/sample so one
// full decode costs O(edges). Window decoding samples from per-position
// lists restricted to the active window.
class PeelState {
  public:
    void attach(const TannerGraph& g);
    void init(const ErasurePattern& erasures);

    int64_t iterations() const { return iterations_; }
    int64_t active_vn_count() const { return active_count_; }
    int64_t degree_one_total() const {
        return static_cast<int64_t>(flat_.size());
    }
    int32_t degree_one_at(int cn_pos) const {
        return static_cast<int32_t>(by_pos_[cn_pos].size());
    }
    int64_t degree_one_in_range(int pos_a, int pos_b) const;
    int32_t active_vn_at(int vn_pos) const { return vn_active_by_pos_[vn_pos]; }
    int cleared_positions() const { return cleared_; }
    const std::vector<uint8_t>& active_vn() const { return active_; }
    const std::vector<int32_t>& cn_degree() const { return cn_degree_; }
    const std::vector<int64_t>& cn_active_sum() const { return cn_sum_; }
    const TannerGraph& graph() const { return *g_; }

    // Remove one uniformly chosen degree-one CN together with its VN and all
    // of that VN's edges. Pre: degree_one_total() > 0.
    void peel_one(rng::Engine& gen);
    // Same, restricted to CNs in positions [pos_a, pos_b].
    void peel_one_in_range(rng::Engine& gen, int pos_a, int pos_b);

  private:
    void resolve_vn(int64_t v);
    void d1_insert(int32_t c);
    void d1_remove(int32_t c);

    const TannerGraph* g_ = nullptr;
    std::vector<int32_t> cn_degree_;
    std::vector<int64_t> cn_sum_;  // sum of active VN ids attached to each CN
    std::vector<uint8_t> active_;
    std::vector<int32_t> flat_;
    std::vector<int32_t> flat_slot_;
    std::vector<std::vector<int32_t>> by_pos_;
    std::vector<int32_t> pos_slot_;
    std::vector<int32_t> vn_active_by_pos_;
    int cleared_ = 0;
    int64_t iterations_ = 0;
    int64_t active_count_ = 0;
};

enum class PeelOutcome { Success, Failure, ExpurgatedFailure };

struct PeelOptions {
    bool record_r1 = false;
    bool record_positions = false;  // per-position degree-one series
    bool record_vn_counts = false;  // per-position active-VN series
    int stride = 1;                 // iterations between trace samples
};

struct DecodeTrace {
    // Sampled at iteration k*stride while decoding is live; empty when the
    // channel erased nothing.
    std::vector<double> r1;
    std::vector<std::vector<int32_t>> r1_per_position;  // [cn_pos][sample]
    std::vector<std::vector<int32_t>> vn_per_position;  // [vn_pos][sample]
    std::vector<int32_t> cleared;                       // per sample

    int stride = 1;
    int N = 0;
    int64_t iterations = 0;
    int64_t residual_vn_count = 0;
    std::vector<int32_t> residual_blocks;  // positions with unresolved VNs
    std::optional<double> tau0;
    PeelOutcome outcome = PeelOutcome::Success;
};

// Full-graph peeling decoder with reusable buffers; one instance per thread.
class PeelDecoder {
  public:
    DecodeTrace decode(const TannerGraph& g, const ErasurePattern& erasures,
                       uint64_t seed, const PeelOptions& opts = {});
    const PeelState& state() const { return state_; }

  private:
    PeelState state_;
};

// One-shot convenience wrapper.
DecodeTrace peel(const TannerGraph& g, const ErasurePattern& erasures,
                 uint64_t seed, bool record_positions = false);

enum class ResidualClass { Empty, OnlySize2StoppingSets, LargeResidual };

// A size-2 stopping set is a pair of VNs with identical CN sets, every such
// CN retaining residual degree exactly 2. Mixed residuals (any larger
// component) classify as LargeResidual.
ResidualClass classify_residual(const TannerGraph& g, const PeelState& st);

// CSV dump: iteration, r1, degree_one_total [, R1_u per CN position].
void write_trace_csv(std::ostream& os, const DecodeTrace& t);

}  // namespace scldpc

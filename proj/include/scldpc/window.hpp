#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "scldpc/peeling.hpp"

namespace scldpc {

// Sliding-window decoding over W CN positions; latency N(W + dv - 1) bits.
struct WindowConfig {
    int W = 0;
    // Reference decoder in the literature delays the decision by dv-1 VN
    // positions; the two-phase scaling model does not, so the default is off.
    bool delay_decision = false;
};

// A VN is counted as errored by its state at the end of the whole decode
// (AtEnd, default) or frozen at the moment its position was finalized.
enum class ErrorAccounting { AtEnd, AtFinalize };

struct WindowOutcome {
    bool frame_error = false;
    int64_t bit_errors = 0;
    int32_t block_errors = 0;
    std::vector<int32_t> per_position_unresolved;
};

class WindowDecoder {
  public:
    WindowOutcome decode(const TannerGraph& g, const ErasurePattern& erasures,
                         const WindowConfig& cfg, uint64_t seed,
                         ErrorAccounting acc = ErrorAccounting::AtEnd);
    const PeelState& state() const { return state_; }

  private:
    PeelState state_;
};

WindowOutcome window_decode(const TannerGraph& g,
                            const ErasurePattern& erasures,
                            const WindowConfig& cfg, uint64_t seed,
                            ErrorAccounting acc = ErrorAccounting::AtEnd);

struct FullBp {};
using DecoderSpec = std::variant<FullBp, WindowConfig>;

// One trial: fresh graph, fresh erasures, one decode (ensemble-average
// semantics). Sub-seeds are derived from `seed` for each stage.
WindowOutcome run_frame(const EnsembleParams& params, double epsilon,
                        const DecoderSpec& decoder, uint64_t seed);

}  // namespace scldpc

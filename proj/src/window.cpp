#include "scldpc/window.hpp"

#include <stdexcept>

namespace scldpc {

namespace {

WindowOutcome outcome_from_counts(const std::vector<int32_t>& unresolved) {
    WindowOutcome out;
    out.per_position_unresolved = unresolved;
    for (int32_t u : unresolved) {
        out.bit_errors += u;
        if (u > 0) ++out.block_errors;
    }
    out.frame_error = out.bit_errors > 0;
    return out;
}

}  // namespace

WindowOutcome WindowDecoder::decode(const TannerGraph& g,
                                    const ErasurePattern& erasures,
                                    const WindowConfig& cfg, uint64_t seed,
                                    ErrorAccounting acc) {
    const auto& p = g.params;
    if (p.kind != ChainKind::Terminated)
        throw std::invalid_argument("window decoding requires a Terminated graph");
    const int ncp = p.cn_position_count();
    if (cfg.W < 1 || cfg.W > ncp)
        throw std::invalid_argument("window size out of range");

    state_.attach(g);
    state_.init(erasures);
    rng::Engine gen(seed);

    std::vector<int32_t> finalized(p.L, -1);  // unresolved count at finalize
    const int delay = cfg.delay_decision ? p.dv - 1 : 0;

    for (int w = 0; w + cfg.W <= ncp; ++w) {
        while (state_.degree_one_in_range(w, w + cfg.W - 1) > 0)
            state_.peel_one_in_range(gen, w, w + cfg.W - 1);
        const int target = w - delay;
        if (target >= 0 && target < p.L && finalized[target] < 0)
            finalized[target] = state_.active_vn_at(target);
    }
    for (int u = 0; u < p.L; ++u)
        if (finalized[u] < 0) finalized[u] = state_.active_vn_at(u);

    if (acc == ErrorAccounting::AtEnd)
        for (int u = 0; u < p.L; ++u) finalized[u] = state_.active_vn_at(u);
    return outcome_from_counts(finalized);
}

WindowOutcome window_decode(const TannerGraph& g,
                            const ErasurePattern& erasures,
                            const WindowConfig& cfg, uint64_t seed,
                            ErrorAccounting acc) {
    WindowDecoder dec;
    return dec.decode(g, erasures, cfg, seed, acc);
}

WindowOutcome run_frame(const EnsembleParams& params, double epsilon,
                        const DecoderSpec& decoder, uint64_t seed) {
    const TannerGraph g = sample_graph(params, rng::derive_seed(seed, 1));
    const ErasurePattern e =
        sample_erasures(params.vn_count(), epsilon, rng::derive_seed(seed, 2));
    const uint64_t peel_seed = rng::derive_seed(seed, 3);

    if (std::holds_alternative<WindowConfig>(decoder))
        return window_decode(g, e, std::get<WindowConfig>(decoder), peel_seed);

    PeelDecoder dec;
    dec.decode(g, e, peel_seed);
    std::vector<int32_t> unresolved(params.L, 0);
    for (int u = 0; u < params.L; ++u)
        unresolved[u] = dec.state().active_vn_at(u);
    return outcome_from_counts(unresolved);
}

}  // namespace scldpc

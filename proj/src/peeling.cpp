#include "scldpc/peeling.hpp"

#include <ostream>
#include <stdexcept>

namespace scldpc {

void PeelState::attach(const TannerGraph& g) {
    g_ = &g;
}

void PeelState::init(const ErasurePattern& erasures) {
    const auto& g = *g_;
    if (static_cast<int64_t>(erasures.erased.size()) != g.params.vn_count())
        throw std::invalid_argument("erasure pattern does not cover the graph");
    const auto n_cns = g.params.cn_count();
    cn_degree_.assign(n_cns, 0);
    cn_sum_.assign(n_cns, 0);
    flat_slot_.assign(n_cns, -1);
    pos_slot_.assign(n_cns, -1);
    by_pos_.resize(g.params.cn_position_count());
    for (auto& v : by_pos_) v.clear();
    flat_.clear();
    vn_active_by_pos_.assign(g.params.L, 0);

    active_ = erasures.erased;
    iterations_ = 0;
    active_count_ = 0;
    const int N = g.params.N;
    for (int64_t v = 0; v < g.params.vn_count(); ++v) {
        if (!active_[v]) continue;
        ++active_count_;
        ++vn_active_by_pos_[static_cast<int>(v / N)];
        for (int32_t c : g.vn_edges(v)) {
            ++cn_degree_[c];
            cn_sum_[c] += v;
        }
    }
    cleared_ = 0;
    for (int p = 0; p < g.params.L; ++p)
        if (vn_active_by_pos_[p] == 0) ++cleared_;
    for (int64_t c = 0; c < g.params.cn_count(); ++c)
        if (cn_degree_[c] == 1) d1_insert(static_cast<int32_t>(c));
}

void PeelState::d1_insert(int32_t c) {
    flat_slot_[c] = static_cast<int32_t>(flat_.size());
    flat_.push_back(c);
    auto& lst = by_pos_[g_->cn_position(c)];
    pos_slot_[c] = static_cast<int32_t>(lst.size());
    lst.push_back(c);
}

void PeelState::d1_remove(int32_t c) {
    const int32_t fs = flat_slot_[c];
    flat_[fs] = flat_.back();
    flat_slot_[flat_[fs]] = fs;
    flat_.pop_back();
    flat_slot_[c] = -1;
    auto& lst = by_pos_[g_->cn_position(c)];
    const int32_t ps = pos_slot_[c];
    lst[ps] = lst.back();
    pos_slot_[lst[ps]] = ps;
    lst.pop_back();
    pos_slot_[c] = -1;
}

void PeelState::resolve_vn(int64_t v) {
    active_[v] = 0;
    --active_count_;
    if (--vn_active_by_pos_[static_cast<int>(v / g_->params.N)] == 0)
        ++cleared_;
    for (int32_t c : g_->vn_edges(v)) {
        const int32_t d = --cn_degree_[c];
        cn_sum_[c] -= v;
        if (d == 1)
            d1_insert(c);
        else if (d == 0 && flat_slot_[c] >= 0)
            d1_remove(c);
    }
    ++iterations_;
}

void PeelState::peel_one(rng::Engine& gen) {
    const int32_t c = flat_[rng::uniform_below(gen, flat_.size())];
    resolve_vn(cn_sum_[c]);
}

int64_t PeelState::degree_one_in_range(int pos_a, int pos_b) const {
    int64_t total = 0;
    for (int p = pos_a; p <= pos_b; ++p) total += by_pos_[p].size();
    return total;
}

void PeelState::peel_one_in_range(rng::Engine& gen, int pos_a, int pos_b) {
    const int64_t total = degree_one_in_range(pos_a, pos_b);
    int64_t k = static_cast<int64_t>(rng::uniform_below(gen, total));
    for (int p = pos_a; p <= pos_b; ++p) {
        const auto sz = static_cast<int64_t>(by_pos_[p].size());
        if (k < sz) {
            resolve_vn(cn_sum_[by_pos_[p][k]]);
            return;
        }
        k -= sz;
    }
}

namespace {

void record_sample(const PeelState& st, const PeelOptions& opts,
                   DecodeTrace& t) {
    const int N = st.graph().params.N;
    if (opts.record_r1)
        t.r1.push_back(static_cast<double>(st.degree_one_total()) / N);
    if (opts.record_positions)
        for (size_t p = 0; p < t.r1_per_position.size(); ++p)
            t.r1_per_position[p].push_back(st.degree_one_at(static_cast<int>(p)));
    if (opts.record_vn_counts) {
        for (size_t p = 0; p < t.vn_per_position.size(); ++p)
            t.vn_per_position[p].push_back(st.active_vn_at(static_cast<int>(p)));
        t.cleared.push_back(st.cleared_positions());
    }
}

}  // namespace

DecodeTrace PeelDecoder::decode(const TannerGraph& g,
                                const ErasurePattern& erasures, uint64_t seed,
                                const PeelOptions& opts) {
    state_.attach(g);
    state_.init(erasures);

    DecodeTrace t;
    t.stride = opts.stride > 0 ? opts.stride : 1;
    t.N = g.params.N;
    if (opts.record_positions)
        t.r1_per_position.resize(g.params.cn_position_count());
    if (opts.record_vn_counts) t.vn_per_position.resize(g.params.L);

    rng::Engine gen(seed);
    if (state_.active_vn_count() > 0) {
        record_sample(state_, opts, t);
        while (state_.degree_one_total() > 0) {
            state_.peel_one(gen);
            if (state_.iterations() % t.stride == 0)
                record_sample(state_, opts, t);
        }
        // halt state (always r1 = 0) even when off the stride grid
        if (state_.iterations() % t.stride != 0)
            record_sample(state_, opts, t);
    }

    t.iterations = state_.iterations();
    t.residual_vn_count = state_.active_vn_count();
    if (t.residual_vn_count == 0) {
        t.outcome = PeelOutcome::Success;
    } else {
        t.outcome = PeelOutcome::Failure;
        t.tau0 = static_cast<double>(t.iterations) / t.N;
        for (int p = 0; p < g.params.L; ++p)
            if (state_.active_vn_at(p) > 0) t.residual_blocks.push_back(p);
    }
    return t;
}

DecodeTrace peel(const TannerGraph& g, const ErasurePattern& erasures,
                 uint64_t seed, bool record_positions) {
    PeelDecoder dec;
    PeelOptions opts;
    opts.record_r1 = true;
    opts.record_positions = record_positions;
    return dec.decode(g, erasures, seed, opts);
}

ResidualClass classify_residual(const TannerGraph& g, const PeelState& st) {
    if (st.active_vn_count() == 0) return ResidualClass::Empty;
    const auto& active = st.active_vn();
    const auto& deg = st.cn_degree();
    // Pass 1: every residual CN must have degree exactly 2.
    for (int64_t v = 0; v < g.params.vn_count(); ++v) {
        if (!active[v]) continue;
        for (int32_t c : g.vn_edges(v))
            if (deg[c] != 2) return ResidualClass::LargeResidual;
    }
    // Pass 2: each VN's CNs must all pair it with one identical partner.
    for (int64_t v = 0; v < g.params.vn_count(); ++v) {
        if (!active[v]) continue;
        const auto edges = g.vn_edges(v);
        if (edges.empty()) return ResidualClass::LargeResidual;
        int64_t partner = -1;
        for (int32_t c : edges) {
            // degree-2 CN: the other endpoint is cn_sum - v
            const int64_t w = st.cn_active_sum()[c] - v;
            if (partner < 0) partner = w;
            if (w != partner || w == v) return ResidualClass::LargeResidual;
        }
        if (partner < 0 || partner >= g.params.vn_count() || !active[partner])
            return ResidualClass::LargeResidual;
    }
    return ResidualClass::OnlySize2StoppingSets;
}

void write_trace_csv(std::ostream& os, const DecodeTrace& t) {
    os << "iteration,r1,degree_one_total";
    for (size_t p = 0; p < t.r1_per_position.size(); ++p) os << ",R1_" << p;
    os << '\n';
    for (size_t k = 0; k < t.r1.size(); ++k) {
        const auto iter = static_cast<int64_t>(k) * t.stride;
        const auto total = static_cast<int64_t>(t.r1[k] * t.N + 0.5);
        os << iter << ',' << t.r1[k] << ',' << total;
        for (const auto& series : t.r1_per_position) os << ',' << series[k];
        os << '\n';
    }
}

}  // namespace scldpc

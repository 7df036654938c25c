#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace scldpc {

enum class ChainKind { Terminated, Truncated };

std::string to_string(ChainKind k);
ChainKind chain_kind_from_string(const std::string& s);

// (dv, dc, L, N) semi-structured SC-LDPC ensemble. Each VN at position i
// connects to one uniformly chosen CN in each CN position i..i+dv-1;
// Terminated chains append dv-1 check-only positions, Truncated chains clip
// out-of-range edges instead.
struct EnsembleParams {
    int dv = 0;
    int dc = 0;
    int L = 0;
    int N = 0;
    ChainKind kind = ChainKind::Terminated;

    int cn_per_position() const { return dv * N / dc; }
    int cn_position_count() const {
        return kind == ChainKind::Terminated ? L + dv - 1 : L;
    }
    int64_t vn_count() const { return static_cast<int64_t>(L) * N; }
    int64_t cn_count() const {
        return static_cast<int64_t>(cn_position_count()) * cn_per_position();
    }

    // Throws std::invalid_argument on dv < 2, dc <= dv, non-divisible dv*N,
    // or non-positive sizes.
    void validate() const;
};

struct TannerGraph {
    EnsembleParams params;
    std::vector<int32_t> vn_edge_offset;  // vn_count + 1 entries
    std::vector<int32_t> edge_cn;         // target CN per edge, grouped by VN

    int vn_position(int64_t v) const { return static_cast<int>(v / params.N); }
    int cn_position(int32_t c) const { return c / params.cn_per_position(); }
    int vn_degree(int64_t v) const {
        return vn_edge_offset[v + 1] - vn_edge_offset[v];
    }
    std::span<const int32_t> vn_edges(int64_t v) const {
        return {edge_cn.data() + vn_edge_offset[v],
                static_cast<size_t>(vn_degree(v))};
    }
    int64_t edge_count() const { return static_cast<int64_t>(edge_cn.size()); }
};

struct ErasurePattern {
    std::vector<uint8_t> erased;
    double epsilon = 0.0;

    int64_t erased_count() const;
};

// Deterministic for fixed (params, seed); RNG draws happen in VN order,
// one per in-range CN position.
TannerGraph sample_graph(const EnsembleParams& params, uint64_t seed);
void sample_graph_into(const EnsembleParams& params, uint64_t seed,
                       TannerGraph& out);

// Each VN erased independently with probability epsilon.
ErasurePattern sample_erasures(int64_t n_vns, double epsilon, uint64_t seed);
void sample_erasures_into(int64_t n_vns, double epsilon, uint64_t seed,
                          ErasurePattern& out);

// Plain-text edge list: header "dv dc L N kind", then one "vn cn" pair per
// line, zero-based.
void write_edge_list(std::ostream& os, const TannerGraph& g);
TannerGraph read_edge_list(std::istream& is);

}  // namespace scldpc

#include "scldpc/ensemble.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scldpc/rng.hpp"

namespace scldpc {

std::string to_string(ChainKind k) {
    return k == ChainKind::Terminated ? "Terminated" : "Truncated";
}

ChainKind chain_kind_from_string(const std::string& s) {
    if (s == "Terminated") return ChainKind::Terminated;
    if (s == "Truncated") return ChainKind::Truncated;
    throw std::invalid_argument("unknown chain kind: " + s);
}

void EnsembleParams::validate() const {
    if (dv < 2) throw std::invalid_argument("dv must be >= 2");
    if (dc <= dv) throw std::invalid_argument("dc must exceed dv");
    if (L < 1 || N < 1) throw std::invalid_argument("L and N must be positive");
    if ((static_cast<int64_t>(dv) * N) % dc != 0)
        throw std::invalid_argument("dv*N must be divisible by dc");
}

void sample_graph_into(const EnsembleParams& params, uint64_t seed,
                       TannerGraph& out) {
    params.validate();
    out.params = params;
    const int64_t n_vns = params.vn_count();
    const int M = params.cn_per_position();
    const int n_cn_pos = params.cn_position_count();
    const int last_cn_pos = n_cn_pos - 1;

    // Endpoints arriving at each CN position: N from every feeding VN
    // position in range.
    std::vector<int64_t> endpoints(n_cn_pos, 0);
    for (int j = 0; j < n_cn_pos; ++j) {
        int feeders = 0;
        for (int i = j - params.dv + 1; i <= j; ++i)
            if (i >= 0 && i < params.L) ++feeders;
        endpoints[j] = static_cast<int64_t>(feeders) * params.N;
    }

    // Within a position the endpoints are dealt to CNs in (near-)equal
    // shares through a shuffled slot array, so interior CNs come out exactly
    // dc-regular; a VN still sees one uniformly chosen CN per position.
    rng::Engine gen(seed);
    std::vector<std::vector<int32_t>> slots(n_cn_pos);
    for (int j = 0; j < n_cn_pos; ++j) {
        auto& s = slots[j];
        s.resize(endpoints[j]);
        const int64_t base = static_cast<int64_t>(j) * M;
        for (int64_t e = 0; e < endpoints[j]; ++e)
            s[e] = static_cast<int32_t>(base + e % M);
        for (int64_t e = endpoints[j] - 1; e > 0; --e)
            std::swap(s[e], s[rng::uniform_below(gen, e + 1)]);
    }

    out.vn_edge_offset.assign(n_vns + 1, 0);
    out.edge_cn.clear();
    out.edge_cn.reserve(n_vns * params.dv);
    std::vector<int64_t> cursor(n_cn_pos, 0);
    for (int64_t v = 0; v < n_vns; ++v) {
        const int pos = static_cast<int>(v / params.N);
        for (int t = 0; t < params.dv; ++t) {
            const int j = pos + t;
            if (j > last_cn_pos) break;  // truncation clips the rest
            out.edge_cn.push_back(slots[j][cursor[j]++]);
        }
        out.vn_edge_offset[v + 1] = static_cast<int32_t>(out.edge_cn.size());
    }
}

TannerGraph sample_graph(const EnsembleParams& params, uint64_t seed) {
    TannerGraph g;
    sample_graph_into(params, seed, g);
    return g;
}

int64_t ErasurePattern::erased_count() const {
    return std::accumulate(erased.begin(), erased.end(), int64_t{0});
}

void sample_erasures_into(int64_t n_vns, double epsilon, uint64_t seed,
                          ErasurePattern& out) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    out.epsilon = epsilon;
    out.erased.assign(n_vns, 0);
    if (epsilon == 0.0) return;
    rng::Engine gen(seed);
    if (epsilon == 1.0) {
        std::fill(out.erased.begin(), out.erased.end(), uint8_t{1});
        return;
    }
    for (int64_t v = 0; v < n_vns; ++v)
        out.erased[v] = rng::uniform_unit(gen) < epsilon ? 1 : 0;
}

ErasurePattern sample_erasures(int64_t n_vns, double epsilon, uint64_t seed) {
    ErasurePattern p;
    sample_erasures_into(n_vns, epsilon, seed, p);
    return p;
}

void write_edge_list(std::ostream& os, const TannerGraph& g) {
    os << g.params.dv << ' ' << g.params.dc << ' ' << g.params.L << ' '
       << g.params.N << ' ' << to_string(g.params.kind) << '\n';
    for (int64_t v = 0; v < g.params.vn_count(); ++v)
        for (int32_t c : g.vn_edges(v)) os << v << ' ' << c << '\n';
}

TannerGraph read_edge_list(std::istream& is) {
    TannerGraph g;
    std::string kind;
    if (!(is >> g.params.dv >> g.params.dc >> g.params.L >> g.params.N >> kind))
        throw std::runtime_error("edge list: bad header");
    g.params.kind = chain_kind_from_string(kind);
    g.params.validate();
    const int64_t n_vns = g.params.vn_count();
    g.vn_edge_offset.assign(n_vns + 1, 0);
    int64_t v = 0;
    int64_t cn = 0;
    int64_t prev_v = -1;
    while (is >> v >> cn) {
        if (v < prev_v || v >= n_vns)
            throw std::runtime_error("edge list: VN indices must be grouped");
        if (cn < 0 || cn >= g.params.cn_count())
            throw std::runtime_error("edge list: CN index out of range");
        prev_v = v;
        g.edge_cn.push_back(static_cast<int32_t>(cn));
        g.vn_edge_offset[v + 1] = static_cast<int32_t>(g.edge_cn.size());
    }
    // fill offsets for VNs without edges
    for (int64_t i = 1; i <= n_vns; ++i)
        if (g.vn_edge_offset[i] < g.vn_edge_offset[i - 1])
            g.vn_edge_offset[i] = g.vn_edge_offset[i - 1];
    return g;
}

}  // namespace scldpc

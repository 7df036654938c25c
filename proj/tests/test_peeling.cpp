#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "scldpc/peeling.hpp"
#include "scldpc/rng.hpp"

using namespace scldpc;

namespace {

std::set<int64_t> residual_set(const PeelState& st) {
    std::set<int64_t> out;
    const auto& a = st.active_vn();
    for (size_t v = 0; v < a.size(); ++v)
        if (a[v]) out.insert(static_cast<int64_t>(v));
    return out;
}

// hand-built graph: params fixed, edges given per VN
TannerGraph make_graph(const EnsembleParams& p,
                       const std::vector<std::vector<int32_t>>& edges) {
    TannerGraph g;
    g.params = p;
    g.vn_edge_offset.assign(p.vn_count() + 1, 0);
    for (int64_t v = 0; v < p.vn_count(); ++v) {
        for (int32_t c : edges[v]) g.edge_cn.push_back(c);
        g.vn_edge_offset[v + 1] = static_cast<int32_t>(g.edge_cn.size());
    }
    return g;
}

}  // namespace

TEST_CASE("zero erasures: success with empty trace") {
    EnsembleParams p{3, 6, 4, 6, ChainKind::Terminated};
    const TannerGraph g = sample_graph(p, 1);
    const ErasurePattern e = sample_erasures(p.vn_count(), 0.0, 2);
    const DecodeTrace t = peel(g, e, 3);
    CHECK(t.outcome == PeelOutcome::Success);
    CHECK_FALSE(t.tau0.has_value());
    CHECK(t.r1.empty());
    CHECK(t.iterations == 0);
}

TEST_CASE("fully erased graph far above threshold fails for some seed") {
    EnsembleParams p{3, 6, 10, 100, ChainKind::Terminated};
    bool saw_failure = false;
    for (uint64_t s = 0; s < 4 && !saw_failure; ++s) {
        const TannerGraph g = sample_graph(p, s);
        const ErasurePattern e = sample_erasures(p.vn_count(), 1.0, 0);
        const DecodeTrace t = peel(g, e, s);
        if (t.outcome == PeelOutcome::Failure) {
            saw_failure = true;
            CHECK(t.residual_vn_count > 0);
            CHECK(t.tau0.has_value());
            CHECK(*t.tau0 == doctest::Approx(static_cast<double>(t.iterations) / p.N));
        }
    }
    CHECK(saw_failure);
}

TEST_CASE("iteration accounting and r1 invariants") {
    EnsembleParams p{3, 6, 6, 30, ChainKind::Terminated};
    for (uint64_t s = 0; s < 30; ++s) {
        const TannerGraph g = sample_graph(p, rng::derive_seed(9, s, 1));
        const ErasurePattern e =
            sample_erasures(p.vn_count(), 0.45, rng::derive_seed(9, s, 2));
        const DecodeTrace t = peel(g, e, rng::derive_seed(9, s, 3));
        const int64_t erased = e.erased_count();
        CHECK(t.iterations <= erased);
        for (double r : t.r1) CHECK(r >= 0.0);
        if (t.outcome == PeelOutcome::Success) {
            CHECK(t.iterations == erased);
        } else {
            CHECK(t.r1.back() == 0.0);  // stride 1: halt state recorded
            CHECK(t.residual_vn_count == erased - t.iterations);
            CHECK_FALSE(t.residual_blocks.empty());
        }
    }
}

TEST_CASE("per-position degree-one counts sum to the total") {
    EnsembleParams p{5, 10, 8, 60, ChainKind::Terminated};
    const TannerGraph g = sample_graph(p, 5);
    const ErasurePattern e = sample_erasures(p.vn_count(), 0.45, 6);
    PeelDecoder dec;
    PeelOptions opts;
    opts.record_r1 = true;
    opts.record_positions = true;
    const DecodeTrace t = dec.decode(g, e, 7, opts);
    for (size_t k = 0; k < t.r1.size(); ++k) {
        int64_t sum = 0;
        for (const auto& series : t.r1_per_position) sum += series[k];
        CHECK(sum == std::llround(t.r1[k] * p.N));
    }
}

TEST_CASE("outcome is invariant to the degree-one selection seed") {
    EnsembleParams p{3, 6, 3, 6, ChainKind::Terminated};
    PeelDecoder dec;
    for (uint64_t inst = 0; inst < 200; ++inst) {
        const TannerGraph g = sample_graph(p, rng::derive_seed(4, inst, 1));
        const ErasurePattern e =
            sample_erasures(p.vn_count(), 0.55, rng::derive_seed(4, inst, 2));
        dec.decode(g, e, 1000);
        const auto base = residual_set(dec.state());
        for (uint64_t s = 1001; s < 1004; ++s) {
            dec.decode(g, e, s);
            CHECK(residual_set(dec.state()) == base);
        }
    }
}

TEST_CASE("adding erasures never shrinks the residual") {
    EnsembleParams p{3, 6, 4, 12, ChainKind::Terminated};
    PeelDecoder dec;
    for (uint64_t inst = 0; inst < 100; ++inst) {
        const TannerGraph g = sample_graph(p, rng::derive_seed(5, inst, 1));
        ErasurePattern e1 =
            sample_erasures(p.vn_count(), 0.45, rng::derive_seed(5, inst, 2));
        ErasurePattern e2 = e1;
        rng::Engine gen(rng::derive_seed(5, inst, 3));
        for (auto& f : e2.erased)
            if (!f && rng::uniform_unit(gen) < 0.15) f = 1;
        dec.decode(g, e1, 1);
        const auto r1 = residual_set(dec.state());
        dec.decode(g, e2, 1);
        const auto r2 = residual_set(dec.state());
        CHECK(std::includes(r2.begin(), r2.end(), r1.begin(), r1.end()));
    }
}

TEST_CASE("residual classification") {
    // CN ids: position 0 -> {0,1}, position 1 -> {2,3}, position 2 -> {4,5}
    EnsembleParams p{3, 6, 1, 4, ChainKind::Terminated};

    SUBCASE("empty residual") {
        const TannerGraph g = sample_graph(p, 1);
        const ErasurePattern e = sample_erasures(p.vn_count(), 0.0, 1);
        PeelDecoder dec;
        dec.decode(g, e, 1);
        CHECK(classify_residual(g, dec.state()) == ResidualClass::Empty);
    }

    SUBCASE("pure size-2 stopping set") {
        const TannerGraph g = make_graph(
            p, {{0, 2, 4}, {0, 2, 4}, {1, 3, 5}, {1, 3, 4}});
        ErasurePattern e;
        e.epsilon = 0;
        e.erased = {1, 1, 0, 0};
        PeelDecoder dec;
        const DecodeTrace t = dec.decode(g, e, 1);
        CHECK(t.outcome == PeelOutcome::Failure);
        CHECK(classify_residual(g, dec.state()) ==
              ResidualClass::OnlySize2StoppingSets);
    }

    SUBCASE("component of four VNs is large") {
        const TannerGraph g = make_graph(
            p, {{0, 2, 4}, {0, 2, 5}, {1, 3, 4}, {1, 3, 5}});
        ErasurePattern e;
        e.epsilon = 0;
        e.erased = {1, 1, 1, 1};
        PeelDecoder dec;
        const DecodeTrace t = dec.decode(g, e, 1);
        CHECK(t.outcome == PeelOutcome::Failure);
        CHECK(classify_residual(g, dec.state()) == ResidualClass::LargeResidual);
    }

    SUBCASE("mixed residual counts as large") {
        // one size-2 pair on CNs {0,2,4} plus a degree-3 CN elsewhere
        const TannerGraph g = make_graph(
            p, {{0, 2, 4}, {0, 2, 4}, {1, 3, 5}, {1, 3, 5}});
        ErasurePattern e;
        e.epsilon = 0;
        e.erased = {1, 1, 1, 1};
        PeelDecoder dec;
        dec.decode(g, e, 1);
        // two disjoint size-2 sets: still expurgable
        CHECK(classify_residual(g, dec.state()) ==
              ResidualClass::OnlySize2StoppingSets);
    }
}

TEST_CASE("trace csv dump") {
    EnsembleParams p{3, 6, 4, 12, ChainKind::Terminated};
    const TannerGraph g = sample_graph(p, 2);
    const ErasurePattern e = sample_erasures(p.vn_count(), 0.5, 3);
    const DecodeTrace t = peel(g, e, 4, true);
    std::stringstream ss;
    write_trace_csv(ss, t);
    std::string header;
    std::getline(ss, header);
    CHECK(header.substr(0, 30) == "iteration,r1,degree_one_total,");
    size_t rows = 0;
    std::string line;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == t.r1.size());
}

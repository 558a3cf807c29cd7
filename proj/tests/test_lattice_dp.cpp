#include <gtest/gtest.h>

#include "lppgap/disjoint.hpp"
#include "lppgap/lattice_dp.hpp"
#include "lppgap/passage.hpp"

using namespace lppgap;

namespace {

std::vector<int> chain_positions(const Chain& c) {
    std::vector<int> xs;
    for (const auto& p : c.nodes) xs.push_back(int(p.x));
    return xs;
}

}  // namespace

TEST(Band, Indexing) {
    const lattice::Band b{-3, 5};
    EXPECT_EQ(b.size(), 5);
    EXPECT_TRUE(b.contains(-1));
    EXPECT_FALSE(b.contains(0));
    EXPECT_EQ(b.pos(b.index(3)), 3);
    EXPECT_EQ((lattice::Band{4, 2}).size(), 0);
}

TEST(DiagTables, MatchPassageValues) {
    const auto f = make_lattice_field(4, 24, 24, Law::geometric(0.5));
    const Model m = f;
    const int x0 = 1, t0 = 9, t1 = 30;
    const auto fw = lattice::forward_table(f, x0, t0, t1);
    for (int t = t0; t <= t1; t += 3)
        for (int x = x0 - (t - t0); x <= x0 + (t - t0); x += 2) {
            if (!lattice::is_cell(f, x, t)) continue;
            ASSERT_TRUE(fw.has(x, t));
            EXPECT_EQ(fw.at(x, t), passage_value(m, {{double(x0), double(t0)}, {double(x), double(t)}}));
        }
    const int y1 = -2;
    const auto bw = lattice::backward_table(f, y1, t1, t0);
    for (int t = t0; t <= t1; t += 4)
        for (int x = y1 - (t1 - t); x <= y1 + (t1 - t); x += 2) {
            if (!lattice::is_cell(f, x, t)) continue;
            EXPECT_EQ(bw.at(x, t), passage_value(m, {{double(x), double(t)}, {double(y1), double(t1)}}));
        }
    EXPECT_EQ(fw.at(x0 + 40, t1), lattice::neg_inf);
}

TEST(DiagTables, TracesAreExtremalGeodesics) {
    for (int s = 1; s <= 30; ++s) {
        const auto f = make_lattice_field(s, 12, 12, Law::geometric(0.5));
        const Model m = f;
        const OrderedQuad q{cell_point(0, 0), cell_point(11, 11)};
        const auto fw = lattice::forward_table(f, 0, 0, 22);
        const auto bw = lattice::backward_table(f, 0, 22, 0);
        EXPECT_EQ(lattice::trace_back(f, fw, 0, 22, false), chain_positions(geodesic(m, q, Side::left)));
        EXPECT_EQ(lattice::trace_back(f, fw, 0, 22, true), chain_positions(geodesic(m, q, Side::right)));
        EXPECT_EQ(lattice::trace_forward(f, bw, 0, 0, false), chain_positions(geodesic(m, q, Side::left)));
        EXPECT_EQ(lattice::trace_forward(f, bw, 0, 0, true), chain_positions(geodesic(m, q, Side::right)));
    }
}

TEST(TwoPath, KernelsAgreeAndMatchFlow) {
    for (int s = 1; s <= 20; ++s) {
        const auto f = make_lattice_field(s, 10, 10, Law::geometric(0.5));
        const Model m = f;
        const int t0 = 0, x = 0, t_end = 14;
        std::vector<std::optional<Value>> vi, vd;
        std::vector<std::pair<int, int>> ends;
        auto collect = [&](auto& out) {
            return [&, t_end]<class V>(const lattice::PairTable<V>& tab) {
                if (tab.t != t_end) return;
                for (int a = -t_end; a <= t_end; a += 2)
                    for (int b = a + 2; b <= t_end; b += 2) {
                        out.push_back(tab.at(a, b));
                        if (&out == &vi) ends.push_back({a, b});
                    }
            };
        };
        const lattice::TwoPathSpec spec{t0, x, x, t_end, -t_end, t_end};
        ASSERT_TRUE(lattice::int_kernel_ok(f, t_end));
        lattice::two_path_sweep<std::int32_t>(f, spec, collect(vi));
        lattice::two_path_sweep<double>(f, spec, collect(vd));
        ASSERT_EQ(vi.size(), vd.size());
        for (std::size_t k = 0; k < vi.size(); ++k) {
            EXPECT_EQ(vi[k], vd[k]);
            const auto [a, b] = ends[k];
            if (!lattice::is_cell(f, a, t_end) || !lattice::is_cell(f, b, t_end)) continue;
            const auto flow = disjoint2_value(m, doubled({0, 0}),
                                              EndpointPair{{double(a), double(t_end)}, {double(b), double(t_end)}});
            EXPECT_EQ(vi[k], flow) << "seed " << s << " ends " << a << "," << b;
        }
    }
}

TEST(TwoPath, IntKernelGuard) {
    EXPECT_FALSE(lattice::int_kernel_ok(make_lattice_field(1, 4, 4, Law::exponential()), 6));
    EXPECT_FALSE(lattice::int_kernel_ok(make_explicit_field({{1e8, 1}, {1, 1}}), 2));
    EXPECT_TRUE(lattice::int_kernel_ok(make_explicit_field({{3, 1}, {1, 1}}), 2));
}

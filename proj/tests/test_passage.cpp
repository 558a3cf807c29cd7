#include <gtest/gtest.h>

#include <functional>

#include "lppgap/model.hpp"
#include "lppgap/oracle.hpp"
#include "lppgap/passage.hpp"
#include "lppgap/rng.hpp"

using namespace lppgap;

namespace {

// All monotone lattice paths between two cells, as x-by-time sequences with values.
struct BrutePath {
    std::vector<int> xs;
    double value;
};

std::vector<BrutePath> brute_paths(const LatticeField& f, Cell a, Cell b) {
    std::vector<BrutePath> out;
    std::vector<int> xs;
    std::function<void(int, int, double)> go = [&](int i, int j, double v) {
        xs.push_back(j - i);
        v += f.at(i, j);
        if (i == b.i && j == b.j) out.push_back({xs, v});
        if (i < b.i) go(i + 1, j, v);
        if (j < b.j) go(i, j + 1, v);
        xs.pop_back();
    };
    go(a.i, a.j, 0.0);
    return out;
}

std::vector<int> chain_xs(const Chain& c) {
    std::vector<int> xs;
    for (const auto& p : c.nodes) xs.push_back(int(p.x));
    return xs;
}

}  // namespace

TEST(PassageValue, SmallLattice) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    EXPECT_EQ(passage_value(m, {cell_point(0, 0), cell_point(1, 1)}), 8);
    EXPECT_EQ(passage_value(m, {cell_point(0, 0), cell_point(0, 1)}), 3);
}

TEST(PassageValue, HandCloud) {
    const Model m = make_explicit_cloud({{0, 0.2}, {0.1, 0.5}, {-0.3, 0.8}});
    EXPECT_EQ(passage_value(m, {{0, 0}, {0, 1}}), 2);
}

TEST(PassageValue, OutsideFieldThrows) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    EXPECT_THROW(passage_value(m, {cell_point(0, 0), cell_point(2, 2)}), domain_error);
    EXPECT_THROW(passage_value(m, {{0.5, 0}, cell_point(1, 1)}), domain_error);
}

TEST(PassageValue, MatchesEnumerationOnRandomFourByFour) {
    for (int s = 1; s <= 50; ++s) {
        const auto f = make_lattice_field(s, 4, 4, Law::geometric(0.5));
        const OrderedQuad q{cell_point(0, 0), cell_point(3, 3)};
        const auto r = oracle::enumerate_paths(Model(f), q);
        EXPECT_EQ(r.paths.size(), 20u);
        EXPECT_EQ(passage_value(Model(f), q), r.optimum);
    }
}

TEST(PassageProfile, SingleRowIsCumulative) {
    const auto f = make_explicit_field({{1, 2, 3, 4}});
    for (int j = 0; j < 4; ++j) {
        const auto p = passage_profile(f, cell_point(0, 0), j);
        ASSERT_EQ(p.values.size(), 1u);
        EXPECT_EQ(p.values[0], (j + 1) * (j + 2) / 2);
    }
}

TEST(PassageProfile, MatchesPointwise) {
    const auto f = make_lattice_field(3, 20, 20, Law::geometric(0.5));
    const Model m = f;
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        const int t = 8 + int(rng::uniform(3, rng::test_stream, k) * 20);
        const auto p = passage_profile(f, cell_point(2, 3), t);
        const std::size_t e = std::size_t(rng::uniform(3, rng::test_stream, k, 1) * double(p.xs.size()));
        EXPECT_EQ(p.values[e], passage_value(m, {cell_point(2, 3), {p.xs[e], double(t)}}));
        ++checked;
    }
    EXPECT_EQ(checked, 50);
    const auto c = make_poisson_cloud(3, 2.0, {-4, 4, 0, 6});
    const std::vector<double> ys{-2, -0.5, 0, 1.25, 3};
    const auto cp = passage_profile(c, {0, 0}, 5, ys);
    for (std::size_t k = 0; k < ys.size(); ++k)
        EXPECT_EQ(cp.values[k], passage_value(Model(c), {{0, 0}, {ys[k], 5}}));
}

TEST(PassageProfile, ZeroWeights) {
    const auto f = make_explicit_field(std::vector<std::vector<double>>(5, std::vector<double>(5, 0.0)));
    for (double v : passage_profile(f, cell_point(0, 0), 4).values) EXPECT_EQ(v, 0);
}

TEST(Geodesic, UniqueWithContinuousWeights) {
    const Model m = make_lattice_field(8, 10, 10, Law::exponential());
    const OrderedQuad q{cell_point(0, 0), cell_point(9, 9)};
    EXPECT_EQ(chain_xs(geodesic(m, q, Side::left)), chain_xs(geodesic(m, q, Side::right)));
}

TEST(Geodesic, AllOnesTwoByTwo) {
    const Model m = make_explicit_field({{1, 1}, {1, 1}});
    const OrderedQuad q{cell_point(0, 0), cell_point(1, 1)};
    EXPECT_EQ(chain_xs(geodesic(m, q, Side::left)), (std::vector<int>{0, -1, 0}));
    EXPECT_EQ(chain_xs(geodesic(m, q, Side::right)), (std::vector<int>{0, 1, 0}));
}

TEST(Geodesic, ExtremalAmongOptimalOnEightByEight) {
    for (int s = 1; s <= 200; ++s) {
        const auto f = make_lattice_field(s, 8, 8, Law::geometric(0.5));
        const OrderedQuad q{cell_point(0, 0), cell_point(7, 7)};
        const auto all = brute_paths(f, {0, 0}, {7, 7});
        double best = 0;
        for (const auto& p : all) best = std::max(best, p.value);
        std::vector<int> lo, hi;
        for (const auto& p : all) {
            if (p.value != best) continue;
            if (lo.empty()) lo = hi = p.xs;
            for (std::size_t k = 0; k < p.xs.size(); ++k) {
                lo[k] = std::min(lo[k], p.xs[k]);
                hi[k] = std::max(hi[k], p.xs[k]);
            }
        }
        const auto l = geodesic(Model(f), q, Side::left), r = geodesic(Model(f), q, Side::right);
        EXPECT_EQ(l.value, best);
        EXPECT_EQ(chain_xs(l), lo) << "seed " << s;
        EXPECT_EQ(chain_xs(r), hi) << "seed " << s;
    }
}

TEST(Geodesic, UnreachableThrows) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    EXPECT_THROW(geodesic(m, {cell_point(0, 1), cell_point(1, 0)}, Side::left), domain_error);
}

TEST(Disjoint, SmallLattice) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    const OrderedQuad q{cell_point(0, 0), cell_point(1, 1)};
    EXPECT_EQ(*disjoint2_value(m, q), 15);
    EXPECT_EQ(*gap_value(m, q), 1);
    const Model ones = make_explicit_field({{1, 1}, {1, 1}});
    EXPECT_EQ(*disjoint2_value(ones, q), 6);
    EXPECT_EQ(*gap_value(ones, q), 0);
}

TEST(Disjoint, SingleColumnInfeasible) {
    const Model m = make_explicit_field({{1}, {2}, {3}});
    EXPECT_FALSE(disjoint2_value(m, {cell_point(0, 0), cell_point(2, 0)}).has_value());
    EXPECT_FALSE(gap_value(m, {cell_point(0, 0), cell_point(2, 0)}).has_value());
}

TEST(Disjoint, MatchesEnumerationOnClouds) {
    for (int k = 0; k < 100; ++k) {
        const auto in = oracle::cloud_instance(17, k, 10);
        const auto r = oracle::enumerate_disjoint_pairs(in.model, in.quad);
        const auto d = disjoint2_value(in.model, in.quad);
        ASSERT_EQ(d.has_value(), r.pair_optimum.has_value());
        if (d) {
            EXPECT_EQ(*d, *r.pair_optimum);
        }
    }
}

TEST(Optimizer2, SmallLatticePair) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    const auto p = optimizer2(m, {cell_point(0, 0), cell_point(1, 1)}, Side::left);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->value, 15);
    EXPECT_EQ(chain_xs(p->left), (std::vector<int>{0, -1, 0}));
    EXPECT_EQ(chain_xs(p->right), (std::vector<int>{0, 1, 0}));
}

TEST(Optimizer2, LeftmostBelowRightmostAndValueContract) {
    for (int s = 1; s <= 100; ++s) {
        const Model m = make_lattice_field(s, 6, 6, Law::geometric(0.5));
        const OrderedQuad q{cell_point(0, 0), cell_point(5, 5)};
        const auto l = optimizer2(m, q, Side::left), r = optimizer2(m, q, Side::right);
        ASSERT_TRUE(l && r);
        EXPECT_EQ(l->value, *disjoint2_value(m, q));
        EXPECT_EQ(r->value, l->value);
        EXPECT_EQ(l->left.value + l->right.value, l->value);
        const auto ll = chain_xs(l->left), rl = chain_xs(r->left);
        const auto lr = chain_xs(l->right), rr = chain_xs(r->right);
        for (std::size_t k = 0; k < ll.size(); ++k) {
            EXPECT_LE(ll[k], rl[k]);
            EXPECT_LE(lr[k], rr[k]);
            EXPECT_LE(ll[k], lr[k]);
        }
    }
}

TEST(Greene, HandWordAndPadding) {
    EXPECT_EQ(greene_values(std::vector<double>{3, 1, 2}, 2), (std::vector<Value>{2, 3}));
    EXPECT_EQ(greene_values(std::vector<double>{3, 1, 2}, 5), (std::vector<Value>{2, 3, 3, 3, 3}));
}

TEST(Greene, AgreesWithPassageAndDisjointOnClouds) {
    for (int k = 0; k < 100; ++k) {
        const auto in = oracle::cloud_instance(29, k, 10);
        const auto g = greene_values(in.model, in.quad, 2);
        EXPECT_EQ(g[0], passage_value(in.model, in.quad));
        const auto d = disjoint2_value(in.model, in.quad);
        ASSERT_TRUE(d);
        EXPECT_EQ(g[1], *d);
    }
}

TEST(OnOptimal, Examples) {
    const Model m = make_explicit_field({{1, 2}, {3, 4}});
    const OrderedQuad q{cell_point(0, 0), cell_point(1, 1)};
    EXPECT_TRUE(on_optimal(m, q, q.start));
    EXPECT_TRUE(on_optimal(m, q, cell_point(1, 0)));
    EXPECT_FALSE(on_optimal(m, q, cell_point(0, 1)));
    EXPECT_FALSE(on_optimal(m, q, {5, 0.5}));
}

TEST(OnOptimal, MatchesUnionOfMaximalChains) {
    for (int k = 0; k < 60; ++k) {
        const auto in = oracle::cloud_instance(31, k, 8);
        const auto r = oracle::enumerate_paths(in.model, in.quad);
        const auto sets = oracle::network_sets(in.model, in.quad, r);
        const auto& c = std::get<PoissonCloud>(in.model);
        for (int p = 0; p < int(c.points.size()); ++p)
            EXPECT_EQ(on_optimal(in.model, in.quad, c.points[p]), sets.nodes.count({c.points[p].t, c.points[p].x}) > 0);
    }
}

TEST(Network, Shapes) {
    const Model unique = make_explicit_field({{1, 5}, {1, 1}});
    const OrderedQuad q{cell_point(0, 0), cell_point(1, 1)};
    const auto n1 = network(unique, q);
    EXPECT_EQ(n1.vertices.size(), 2u);
    EXPECT_EQ(n1.edges.size(), 1u);
    const auto n2 = network(Model(make_explicit_field({{1, 1}, {1, 1}})), q);
    EXPECT_EQ(n2.vertices.size(), 2u);
    EXPECT_EQ(n2.edges.size(), 2u);
}

TEST(Network, TerminalSplit) {
    // Common stem down the middle, then two equal branches into the last cell.
    const Model m = make_explicit_field({{1, 0, 0}, {5, 5, 1}, {0, 1, 1}});
    const auto net = network(m, {cell_point(0, 0), cell_point(2, 2)});
    EXPECT_EQ(net.vertices.size(), 3u);
    EXPECT_EQ(net.edges.size(), 3u);
    const auto r = oracle::enumerate_paths(m, {cell_point(0, 0), cell_point(2, 2)});
    EXPECT_EQ(r.optimal.size(), 2u);
}

TEST(Overlap, Examples) {
    const Model m = make_explicit_field({{1, 1}, {1, 1}});
    const OrderedQuad q{cell_point(0, 0), cell_point(1, 1)};
    const auto l = geodesic(m, q, Side::left), r = geodesic(m, q, Side::right);
    const auto same = overlap(l, l);
    ASSERT_EQ(same.size(), 1u);
    EXPECT_EQ(same[0].lo, 0);
    EXPECT_EQ(same[0].hi, 2);
    EXPECT_TRUE(overlap(l, r).empty());

    // Shared prefix, then a split at time 2.
    const Model p = make_explicit_field({{1, 1, 0}, {0, 1, 1}, {0, 1, 1}});
    const OrderedQuad pq{cell_point(0, 0), cell_point(2, 2)};
    const auto a = geodesic(p, pq, Side::left), b = geodesic(p, pq, Side::right);
    const auto ov = overlap(a, b);
    ASSERT_GE(ov.size(), 1u);
    EXPECT_EQ(ov[0].lo, 0);
    EXPECT_EQ(ov[0].hi, 2);
}

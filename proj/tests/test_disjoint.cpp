#include <gtest/gtest.h>

#include "lppgap/disjoint.hpp"
#include "lppgap/oracle.hpp"
#include "lppgap/rng.hpp"

using namespace lppgap;

TEST(Rsk, Shapes) {
    EXPECT_EQ(rsk_shape({3, 1, 2}), (std::vector<int>{2, 1}));
    EXPECT_EQ(rsk_shape({1, 2, 3, 4}), (std::vector<int>{4}));
    EXPECT_EQ(rsk_shape({4, 3, 2, 1}), (std::vector<int>{1, 1, 1, 1}));
    EXPECT_TRUE(rsk_shape({}).empty());
}

TEST(Greene, AllPointsAndBadK) {
    const std::vector<double> w{5, 2, 7, 1, 3, 6, 4};
    EXPECT_EQ(greene_values(w, 7).back(), 7);
    EXPECT_THROW(greene_values(w, 0), parameter_error);
    EXPECT_THROW(greene_values(Model(make_explicit_field({{1}})), {cell_point(0, 0), cell_point(0, 0)}, 1), domain_error);
}

TEST(Greene, SumsMatchDisjointChainsOnWords) {
    // Greene's theorem on small permutations, checked against the pair enumerator
    // by placing the permutation as points in the diamond.
    for (int k = 0; k < 100; ++k) {
        const auto in = oracle::cloud_instance(77, k, 9);
        const auto g = greene_values(in.model, in.quad, 2);
        const auto r = oracle::enumerate_disjoint_pairs(in.model, in.quad);
        ASSERT_TRUE(r.pair_optimum);
        EXPECT_EQ(g[1], *r.pair_optimum);
    }
}

TEST(Disjoint, MatchesEnumerationOnLatticeInstances) {
    for (int k = 0; k < 200; ++k) {
        const auto in = oracle::lattice_instance(5, k, 4);
        const auto r = oracle::enumerate_disjoint_pairs(in.model, in.quad);
        const auto d = disjoint2_value(in.model, in.quad);
        ASSERT_EQ(d.has_value(), r.pair_optimum.has_value()) << k;
        if (d) {
            EXPECT_EQ(*d, *r.pair_optimum) << k;
        }
    }
}

TEST(Disjoint, DistinctEndpointsMatchEnumeration) {
    for (int s = 1; s <= 60; ++s) {
        const Model m = make_lattice_field(s, 4, 4, Law::geometric(0.5));
        const EndpointPair a = doubled(cell_point(0, 0));
        const EndpointPair b{cell_point(3, 2), cell_point(2, 3)};
        const auto r = oracle::enumerate_disjoint_pairs(m, a, b);
        const auto d = disjoint2_value(m, a, b);
        ASSERT_EQ(d.has_value(), r.pair_optimum.has_value());
        if (d) {
            EXPECT_EQ(*d, *r.pair_optimum);
        }
    }
}

TEST(Disjoint, UnreachableEndpointsAreInfeasible) {
    const Model m = make_explicit_field({{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}, {13, 14, 15, 16}});
    // One end cell lies in a row (or column) the start cannot reach.
    EXPECT_FALSE(disjoint2_value(m, doubled(cell_point(1, 1)), EndpointPair{cell_point(2, 1), cell_point(0, 3)}));
    EXPECT_FALSE(disjoint2_value(m, doubled(cell_point(1, 1)), EndpointPair{cell_point(3, 0), cell_point(1, 2)}));
    EXPECT_TRUE(disjoint2_value(m, doubled(cell_point(1, 1)), EndpointPair{cell_point(2, 2), cell_point(1, 3)}));
}

TEST(Gap, NonnegativeAndZeroIffDisjointGeodesics) {
    int zeros = 0;
    for (int k = 0; k < 200; ++k) {
        const auto in = oracle::lattice_instance(6, k, 4);
        const auto g = gap_value(in.model, in.quad);
        const auto r = oracle::enumerate_disjoint_pairs(in.model, in.quad);
        if (!g) {
            EXPECT_FALSE(r.pair_optimum);
            continue;
        }
        EXPECT_GE(*g, 0);
        const Value l = passage_value(in.model, in.quad);
        bool disjoint_geodesics = false;
        for (const auto& p : r.pairs)
            disjoint_geodesics = disjoint_geodesics || (r.paths[p.left].value == l && r.paths2[p.right].value == l);
        EXPECT_EQ(*g == 0, disjoint_geodesics) << k;
        zeros += *g == 0;
    }
    EXPECT_GT(zeros, 0);
}

TEST(Gap, CloudsAgreeWithGreene) {
    for (int k = 0; k < 100; ++k) {
        const auto in = oracle::cloud_instance(8, k, 10);
        const auto g = greene_values(in.model, in.quad, 2);
        const auto gap = gap_value(in.model, in.quad);
        ASSERT_TRUE(gap);
        EXPECT_EQ(*gap, 2 * g[0] - g[1]);
    }
}

TEST(Optimizer2, ExtremalAmongOptimalPairs) {
    for (int k = 0; k < 150; ++k) {
        const auto in = oracle::lattice_instance(9, k, 4);
        const auto r = oracle::enumerate_disjoint_pairs(in.model, in.quad);
        const auto l = optimizer2(in.model, in.quad, Side::left);
        const auto rt = optimizer2(in.model, in.quad, Side::right);
        ASSERT_EQ(l.has_value(), r.pair_optimum.has_value());
        if (!l) continue;
        EXPECT_EQ(l->value, *r.pair_optimum);
        EXPECT_EQ(rt->value, *r.pair_optimum);
        // Every optimal pair lies weakly between the two extremal pairs.
        const auto ll = chain_polyline(l->left), lr = chain_polyline(l->right);
        const auto rl = chain_polyline(rt->left), rr = chain_polyline(rt->right);
        for (int a : r.pair_argmax) {
            const auto pl = oracle::polyline(r.paths[r.pairs[a].left], in.quad.start, in.quad.end, false);
            const auto pr = oracle::polyline(r.paths2[r.pairs[a].right], in.quad.start, in.quad.end, false);
            EXPECT_TRUE(oracle::weakly_left(ll, pl));
            EXPECT_TRUE(oracle::weakly_left(lr, pr));
            EXPECT_TRUE(oracle::weakly_left(pl, rl));
            EXPECT_TRUE(oracle::weakly_left(pr, rr));
        }
    }
}

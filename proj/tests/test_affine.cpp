#include <gtest/gtest.h>

#include "fewsub/affine_consistency.hpp"
#include "fewsub/benchmark.hpp"
#include "fixtures.hpp"

using namespace fewsub;
using fixtures::share;

namespace {

std::shared_ptr<const FiniteAlgebra> z2() { return share(algebras::affine_zp(2)); }

// x+y = c constraints along the given edges, over Z2.
BinaryInstance parity(int n, std::vector<std::tuple<int, int, int>> edges) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('x' + i)));
    BinaryInstance b(z2(), names);
    for (auto [u, v, c] : edges) b.set_relation(u, v, {{0, c}, {1, 1 - c}});
    return b;
}

BinaryInstance pc(BinaryInstance b) {
    auto out = enforce_23_consistency(std::move(b));
    if (!out) throw std::runtime_error("fixture is not (2,3)-consistent");
    return *out;
}

std::vector<TestPair> pairs_of(const BinaryInstance& b) {
    AlgebraWorkspace ws(b.algebra_ptr());
    return enumerate_test_pairs(b, ws);
}

}  // namespace

TEST(RPlus, Examples) {
    auto b = parity(2, {{0, 1, 0}});
    EXPECT_EQ(r_plus(b, 0, 1, ElementSet::of({0})), ElementSet::of({0}));
    auto full = pc(parity(2, {}));
    EXPECT_EQ(r_plus(full, 0, 1, ElementSet::of({1})), ElementSet::of({0, 1}));
    auto sw = parity(2, {{0, 1, 1}});
    EXPECT_EQ(r_plus(sw, 0, 1, ElementSet::of({0, 1})), ElementSet::of({0, 1}));
    EXPECT_THROW(r_plus(parity(2, {}), 0, 1, ElementSet::of({0})), precondition_error);
}

TEST(TestPairs, Examples) {
    auto b = pc(parity(3, {{0, 1, 1}}));
    auto pairs = pairs_of(b);
    ASSERT_EQ(pairs.size(), 3u);
    for (int x = 0; x < 3; ++x) {
        EXPECT_EQ(pairs[x].var, x);
        EXPECT_EQ(pairs[x].universe, ElementSet::full(2));
        EXPECT_TRUE(pairs[x].quotient.theta.is_identity());
    }

    BinaryInstance semi(share(algebras::semilattice2()), {"x", "y"});
    semi.set_full(0, 1);
    EXPECT_TRUE(pairs_of(semi).empty());

    BinaryInstance sq(share(power(algebras::affine_zp(2), 2)), {"x"});
    auto sp = pairs_of(sq);
    ASSERT_EQ(sp.size(), 3u + 6u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(sp[i].universe, ElementSet::full(4));
        EXPECT_EQ(sp[i].quotient.theta.block_count(), 2);
    }
    for (std::size_t i = 3; i < sp.size(); ++i) EXPECT_EQ(sp[i].universe.size(), 2);
}

TEST(TestPairs, OrderPutsEnclosingPairsFirst) {
    std::mt19937_64 rng(41);
    auto alg = share(power(algebras::affine_zp(2), 2));
    for (int trial = 0; trial < 20; ++trial) {
        auto b = fixtures::random_closed_binary(alg, 3, rng);
        auto ok = enforce_23_consistency(b);
        if (!ok) continue;
        auto pairs = pairs_of(*ok);
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) {
                if (pairs[i].var != pairs[j].var) continue;
                for (const auto& blk : pairs[i].quotient.blocks) EXPECT_FALSE(pairs[j].universe.subset_of(blk));
            }
    }
}

TEST(Relevance, Examples) {
    AlgebraWorkspace ws(z2());
    auto id = pc(parity(2, {{0, 1, 0}}));
    auto pair = enumerate_test_pairs(id, ws).front();
    auto rc = relevant_congruence(id, ws, pair, 1, true);
    ASSERT_TRUE(rc);
    EXPECT_EQ(rc->block_of[0], pair.quotient.theta.block(0));
    EXPECT_EQ(rc->block_of[1], pair.quotient.theta.block(1));

    auto full = pc(parity(2, {}));
    EXPECT_FALSE(relevant_congruence(full, ws, enumerate_test_pairs(full, ws).front(), 1));

    auto sw = pc(parity(2, {{0, 1, 1}}));
    auto rs = relevant_congruence(sw, ws, enumerate_test_pairs(sw, ws).front(), 1);
    ASSERT_TRUE(rs);
    EXPECT_EQ(rs->block_of[0], 1);
    EXPECT_EQ(rs->block_of[1], 0);

    EXPECT_THROW(relevant_congruence(parity(2, {}), ws, pair, 1), precondition_error);
}

TEST(TestInstanceBuild, Examples) {
    AlgebraWorkspace ws(z2());
    // The odd triangle is already (2,3)-inconsistent, so build from its raw form.
    auto odd = parity(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    auto ti = build_test_instance(odd, ws, enumerate_test_pairs(odd, ws).front());
    EXPECT_EQ(ti.relevant, (std::vector<int>{0, 1, 2}));
    EXPECT_FALSE(solve_system(ti.system).sat);

    auto chain = pc(parity(3, {{0, 1, 1}, {1, 2, 1}}));
    auto tc = build_test_instance(chain, ws, enumerate_test_pairs(chain, ws).front());
    EXPECT_EQ(tc.relevant.size(), 3u);
    EXPECT_TRUE(block_in_solution(tc.system, 0, 0));
    EXPECT_TRUE(block_in_solution(tc.system, 0, 1));
    auto strand = tc.strand(tc.pair.quotient.theta.block(0));
    EXPECT_EQ(strand.at(1), ElementSet::of({1}));
    EXPECT_EQ(strand.at(2), ElementSet::of({0}));

    auto loose = pc(parity(3, {{0, 1, 1}}));
    auto tl = build_test_instance(loose, ws, enumerate_test_pairs(loose, ws).front());
    EXPECT_EQ(tl.relevant, (std::vector<int>{0, 1}));
    EXPECT_EQ(tl.system.num_vars, 2);
}

TEST(AffinePass, Examples) {
    AlgebraWorkspace ws(z2());
    auto odd = parity(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    for (int x = 0; x < 3; ++x)
        for (int y = x + 1; y < 3; ++y)
            if (!odd.has(x, y)) odd.set_full(x, y);
    EXPECT_FALSE(affine_consistency_pass(odd, ws).instance.has_value());

    auto chain = pc(parity(3, {{0, 1, 1}, {1, 2, 1}}));
    auto res = affine_consistency_pass(chain, ws);
    ASSERT_TRUE(res.instance);
    EXPECT_EQ(*res.instance, chain);
    EXPECT_EQ(res.passive.size(), 6u);  // three variables, two blocks each
    EXPECT_EQ(live_count(res.passive), 6u);
    EXPECT_EQ(res.report.blocks_pruned, 0);

    AlgebraWorkspace wsemi(share(algebras::semilattice2()));
    BinaryInstance semi(wsemi.algebra_ptr(), {"x", "y"});
    semi.set_relation(0, 1, {{0, 0}, {0, 1}, {1, 1}});
    auto rs = affine_consistency_pass(semi, wsemi);
    ASSERT_TRUE(rs.instance);
    EXPECT_EQ(*rs.instance, semi);
    EXPECT_TRUE(rs.passive.empty());
}

TEST(UpdatePassive, Examples) {
    AlgebraWorkspace ws(z2());
    auto chain = pc(parity(3, {{0, 1, 1}, {1, 2, 1}}));
    auto res = affine_consistency_pass(chain, ws);
    auto same = update_passive(res.passive, chain);
    EXPECT_EQ(live_count(same), 6u);

    auto reduced = chain;
    reduced.restrict_domain(0, ElementSet::of({0}));
    auto upd = update_passive(res.passive, *enforce_23_consistency(reduced));
    // Entries based at x=1, y=0 or z=1 die; one per variable survives.
    EXPECT_EQ(live_count(upd), 3u);
    for (const auto& p : upd) {
        if (p.var == 0 && p.block == ElementSet::of({1})) {
            EXPECT_FALSE(p.live);
        }
    }

    EXPECT_TRUE(update_passive({}, chain).empty());
}

TEST(AffineProperty, SolutionsPreservedAndPassIdempotent) {
    std::mt19937_64 rng(43);
    std::vector<std::shared_ptr<const FiniteAlgebra>> algs{
        share(algebras::affine_zp(2)), share(algebras::affine_zp(3)), share(power(algebras::affine_zp(2), 2)),
        share(algebras::majority2()), share(algebras::semilattice2())};
    int nontrivial = 0;
    for (int trial = 0; trial < 750; ++trial) {
        const auto& alg = algs[trial % algs.size()];
        AlgebraWorkspace ws(alg);
        auto raw = fixtures::random_closed_binary(alg, 2 + fixtures::pick(rng, 5), rng);
        if (trial >= 150) raw = fixtures::random_bit_system(6, 12, rng);
        ws = AlgebraWorkspace(raw.algebra_ptr());
        auto b = enforce_23_consistency(raw);
        if (!b) continue;
        auto before = fixtures::solutions(*b);
        AffineOptions opt;
        opt.verify_paths = true;
        auto res = affine_consistency_pass(*b, ws, opt);
        if (!res.instance) {
            EXPECT_TRUE(before.empty()) << trial;
            ++nontrivial;
            continue;
        }
        EXPECT_EQ(fixtures::solutions(*res.instance), before) << trial;
        if (!(*res.instance == *b)) ++nontrivial;
        auto again = affine_consistency_pass(*res.instance, ws, opt);
        ASSERT_TRUE(again.instance);
        EXPECT_EQ(*again.instance, *res.instance);
        EXPECT_EQ(again.report.blocks_pruned, 0);
        for (const auto& p : res.passive) {
            BinaryInstance sub = *res.instance;
            for (int x = 0; x < sub.size(); ++x) sub.restrict_domain(x, p.domains[x]);
            auto arc = enforce_1_consistency(sub);
            ASSERT_TRUE(arc);
            EXPECT_EQ(arc->domains(), p.domains) << trial;
            auto slac = run_slac(sub);
            ASSERT_TRUE(slac);
            EXPECT_EQ(*slac, p.domains) << trial;
            EXPECT_TRUE(p.block.subset_of(p.universe));
            EXPECT_EQ(p.domains[p.var], p.block);
        }
    }
    EXPECT_GT(nontrivial, 0);
}

TEST(AffineProperty, RelevantQuotientsAreIsomorphic) {
    std::mt19937_64 rng(44);
    auto alg = share(power(algebras::affine_zp(2), 2));
    AlgebraWorkspace ws(alg);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto b = enforce_23_consistency(fixtures::random_closed_binary(alg, 3 + fixtures::pick(rng, 2), rng));
        if (!b) continue;
        for (const auto& pair : enumerate_test_pairs(*b, ws)) {
            const auto& sa = ws.sub(pair.universe);
            auto qa = quotient(sa.algebra, pair.quotient.theta);
            for (int y = 0; y < b->size(); ++y) {
                if (y == pair.var) continue;
                auto rc = relevant_congruence(*b, ws, pair, y);
                if (!rc) continue;
                const auto& sy = ws.sub(rc->universe);
                std::vector<int> labels;
                for (auto e : sy.elements) labels.push_back(rc->block_of[e]);
                auto qy = quotient(sy.algebra, Congruence(labels));
                EXPECT_TRUE(find_isomorphism(qa.algebra, qy.algebra).has_value());
                // Length-3 path x -> z -> w -> y never separates differently.
                for (int z = 0; z < b->size(); ++z)
                    for (int w = 0; w < b->size(); ++w) {
                        if (z == pair.var || z == w || w == y || z == y || w == pair.var) continue;
                        std::vector<ElementSet> imgs;
                        for (const auto& blk : pair.quotient.blocks)
                            imgs.push_back(pattern_image(*b, blk, {{pair.var, z}, {z, w}, {w, y}}) & rc->universe);
                        auto alt = detail::congruence_from_images(ws, pair, rc->universe, imgs);
                        if (alt) {
                            EXPECT_EQ(alt->block_of, rc->block_of);
                        }
                    }
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0);
}

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fewsub/affine_module.hpp"
#include "fewsub/algebras.hpp"
#include "fewsub/linear.hpp"

using namespace fewsub;

namespace {

LinearSystem make(int p, int n, std::vector<std::pair<std::vector<int>, int>> rows) {
    LinearSystem s(PrimeField(p), n);
    for (auto& [c, r] : rows) s.add_row(c, r);
    return s;
}

std::vector<std::vector<int>> enumerate_solutions(const LinearSystem& s) {
    std::vector<std::vector<int>> out;
    std::vector<int> x(static_cast<std::size_t>(s.num_vars), 0);
    while (true) {
        if (s.satisfied_by(x)) out.push_back(x);
        int i = s.num_vars - 1;
        for (; i >= 0; --i) {
            if (++x[i] < s.field.p()) break;
            x[i] = 0;
        }
        if (i < 0) return out;
    }
}

// Every vector reachable as particular + span(basis).
std::set<std::vector<int>> expand(const SolutionSpace& sp, const PrimeField& f, int n) {
    std::set<std::vector<int>> out;
    if (!sp.sat) return out;
    std::vector<int> coef(sp.basis.size(), 0);
    while (true) {
        std::vector<int> v = sp.particular;
        for (std::size_t b = 0; b < sp.basis.size(); ++b)
            for (int j = 0; j < n; ++j) v[j] = f.add(v[j], f.mul(coef[b], sp.basis[b][j]));
        out.insert(v);
        std::size_t i = coef.size();
        for (; i-- > 0;) {
            if (++coef[i] < f.p()) break;
            coef[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) return out;
    }
}

}  // namespace

TEST(PrimeField, RejectsComposites) {
    EXPECT_THROW(PrimeField(4), precondition_error);
    EXPECT_THROW(PrimeField(1), precondition_error);
    EXPECT_NO_THROW(PrimeField(7));
    PrimeField f(5);
    for (int a = 1; a < 5; ++a) EXPECT_EQ(f.mul(a, f.inv(a)), 1);
}

TEST(SolveSystem, Examples) {
    auto s1 = make(2, 3, {{{1, 1, 0}, 1}, {{0, 1, 1}, 1}, {{1, 0, 1}, 0}});
    auto r1 = solve_system(s1);
    EXPECT_TRUE(r1.sat);
    EXPECT_EQ(r1.rank, 2);
    EXPECT_EQ(expand(r1, s1.field, 3), (std::set<std::vector<int>>{{0, 1, 0}, {1, 0, 1}}));

    auto s2 = make(2, 3, {{{1, 1, 0}, 1}, {{0, 1, 1}, 1}, {{1, 0, 1}, 1}});
    EXPECT_FALSE(solve_system(s2).sat);

    LinearSystem s3(PrimeField(3), 2);
    auto r3 = solve_system(s3);
    EXPECT_TRUE(r3.sat);
    EXPECT_EQ(r3.rank, 0);
    EXPECT_EQ(r3.solution_count(3, 2), 9u);
}

TEST(SolveSystem, RejectsMalformedRows) {
    LinearSystem s(PrimeField(3), 2);
    EXPECT_THROW(s.add_row({1}, 0), malformed_input);
    s.rows.push_back({{1, 5}, 0});
    EXPECT_THROW(solve_system(s), malformed_input);
}

TEST(SolveSystem, TextDump) {
    auto s = make(3, 2, {{{1, 2}, 1}, {{0, 1}, 0}});
    EXPECT_EQ(s.to_text(), "1 2 | 1\n0 1 | 0\n");
}

TEST(BlockInSolution, Examples) {
    EXPECT_TRUE(block_in_solution(make(2, 2, {{{1, 1}, 1}}), 0, 0));
    auto bad = make(2, 2, {{{1, 1}, 1}, {{1, 1}, 0}});
    for (int v = 0; v < 2; ++v)
        for (int x = 0; x < 2; ++x) EXPECT_FALSE(block_in_solution(bad, v, x));
    EXPECT_TRUE(block_in_solution(make(2, 3, {{{1, 1, 0}, 0}, {{0, 1, 1}, 0}}), 2, 1));
    EXPECT_THROW(block_in_solution(make(2, 2, {}), 2, 0), precondition_error);
}

TEST(SolveSystemProperty, CountsMatchEnumeration) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        int p = std::vector<int>{2, 3, 5}[rng() % 3];
        int n = 1 + static_cast<int>(rng() % 6);
        int m = static_cast<int>(rng() % 8);
        LinearSystem s(PrimeField(p), n);
        for (int r = 0; r < m; ++r) {
            std::vector<int> c(static_cast<std::size_t>(n));
            for (auto& v : c) v = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
            s.add_row(c, static_cast<int>(rng() % static_cast<std::uint64_t>(p)));
        }
        auto sols = enumerate_solutions(s);
        auto sp = solve_system(s);
        ASSERT_EQ(sp.sat, !sols.empty());
        ASSERT_EQ(sp.solution_count(p, n), sols.size());
        if (sp.sat) {
            EXPECT_TRUE(s.satisfied_by(sp.particular));
            auto ex = expand(sp, s.field, n);
            EXPECT_EQ(ex, std::set<std::vector<int>>(sols.begin(), sols.end()));
        }
        EXPECT_EQ(solve_system(s), sp);
        for (int v = 0; v < n; ++v)
            for (int x = 0; x < p; ++x) {
                bool want = std::any_of(sols.begin(), sols.end(), [&](const auto& sol) { return sol[v] == x; });
                EXPECT_EQ(block_in_solution(s, v, x), want);
            }
    }
}

TEST(AffineModule, RecognizesZ2AndZ3) {
    for (int p : {2, 3, 5}) {
        auto rec = recognize_affine_module(algebras::affine_zp(p));
        ASSERT_TRUE(rec) << p;
        EXPECT_EQ(rec.coordinatization->field.p(), p);
        EXPECT_EQ(rec.coordinatization->dim, 1);
    }
}

TEST(AffineModule, RejectsSemilatticeAndMajority) {
    auto sl = recognize_affine_module(algebras::semilattice2());
    EXPECT_FALSE(sl);
    EXPECT_FALSE(sl.bounded);
    auto mj = recognize_affine_module(algebras::majority2());
    EXPECT_FALSE(mj);
    EXPECT_FALSE(mj.bounded);
}

TEST(AffineModule, CoordinatizesSquares) {
    for (int p : {2, 3}) {
        auto alg = power(algebras::affine_zp(p), 2);
        auto rec = recognize_affine_module(alg);
        ASSERT_TRUE(rec);
        const auto& c = *rec.coordinatization;
        EXPECT_EQ(c.dim, 2);
        std::set<std::vector<int>> images;
        for (Element e = 0; e < alg.size(); ++e) {
            images.insert(c.encode[e]);
            EXPECT_EQ(c.element_of(c.encode[e]), e);
        }
        EXPECT_EQ(static_cast<int>(images.size()), alg.size());
        // Centrality: m commutes with every basic operation on all tuples.
        auto m = term_table(alg, c.maltsev);
        for (const auto& f : alg.ops())
            for (std::size_t i = 0; i < f.entries.size(); ++i)
                for (std::size_t j = 0; j < f.entries.size(); j += 7)
                    for (std::size_t k = 0; k < f.entries.size(); k += 5) {
                        auto x = decode_tuple(alg.size(), f.arity, static_cast<Element>(i));
                        auto y = decode_tuple(alg.size(), f.arity, static_cast<Element>(j));
                        auto z = decode_tuple(alg.size(), f.arity, static_cast<Element>(k));
                        Tuple w(x.size());
                        for (std::size_t q = 0; q < x.size(); ++q) w[q] = m({x[q], y[q], z[q]});
                        EXPECT_EQ(f(w), m({f(x), f(y), f(z)}));
                    }
    }
}

TEST(AffineModule, RejectsNonAffineMaltsevAlgebra) {
    // A Maltsev operation on {0,1,2} that is not affine: m(x,y,z) = x - y + z except at (0,1,2) -> 0.
    auto bad = OperationTable::from_function("q", 3, 3, [](std::span<const Element> a) {
        if (a[0] == a[1]) return a[2];
        if (a[1] == a[2]) return a[0];
        if (a[0] == 0 && a[1] == 1 && a[2] == 2) return 0;
        return ((a[0] - a[1] + a[2]) % 3 + 3) % 3;
    });
    auto rec = recognize_affine_module(FiniteAlgebra("bad", 3, {bad}));
    EXPECT_FALSE(rec);
    EXPECT_FALSE(rec.bounded);
}

TEST(CompileConstraint, Examples) {
    auto c = *recognize_affine_module(algebras::affine_zp(2)).coordinatization;
    auto id = compile_binary_constraint({{0, 0}, {1, 1}}, c, c);
    ASSERT_EQ(id.rows.size(), 1u);
    EXPECT_EQ(id.rows[0].coeffs, (std::vector<int>{1, 1}));
    EXPECT_EQ(id.rows[0].rhs, 0);
    auto swap = compile_binary_constraint({{0, 1}, {1, 0}}, c, c);
    ASSERT_EQ(swap.rows.size(), 1u);
    EXPECT_EQ(swap.rows[0].rhs, 1);
    EXPECT_TRUE(compile_binary_constraint({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, c, c).rows.empty());
    EXPECT_THROW(compile_binary_constraint({{0, 0}, {0, 1}, {1, 0}}, c, c), internal_error);
    EXPECT_THROW(compile_binary_constraint({}, c, c), precondition_error);
}

TEST(CompileConstraintProperty, RoundTripOnClosedRelations) {
    std::mt19937_64 rng(22);
    for (int p : {2, 3}) {
        auto base = algebras::affine_zp(p);
        auto sq = power(base, 2);
        auto c = *recognize_affine_module(sq).coordinatization;
        auto prod = power(base, 4);  // pairs of sq elements, coded (a, b) -> a * p^2 + b
        int q = p * p;
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<Element> gens;
            int g = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < g; ++i) gens.push_back(static_cast<Element>(rng() % static_cast<std::uint64_t>(q * q)));
            auto sub = generate_subuniverse(prod, std::span<const Element>(gens));
            PairRelation rel;
            for (auto e : sub.elements) rel.emplace_back(e / q, e % q);
            auto sys = compile_binary_constraint(rel, c, c);
            std::set<std::pair<Element, Element>> decoded;
            for (const auto& sol : enumerate_solutions(sys)) {
                std::vector<int> a(sol.begin(), sol.begin() + 2), b(sol.begin() + 2, sol.end());
                decoded.emplace(c.element_of(a), c.element_of(b));
            }
            std::set<std::pair<Element, Element>> want(rel.begin(), rel.end());
            EXPECT_EQ(decoded, want);
        }
    }
}

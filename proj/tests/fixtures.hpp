#pragma once

// Shared generators for the test suites.

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fewsub/algebras.hpp"
#include "fewsub/consistency.hpp"

namespace fixtures {

using namespace fewsub;

/// {0..d-1} with the first ternary projection: every relation is closed.
inline FiniteAlgebra projection_algebra(int d) {
    auto pr = OperationTable::from_function("p", 3, d, [](std::span<const Element> a) { return a[0]; });
    return FiniteAlgebra("projections", d, {pr});
}

inline std::shared_ptr<const FiniteAlgebra> share(FiniteAlgebra a) {
    return std::make_shared<const FiniteAlgebra>(std::move(a));
}

inline int pick(std::mt19937_64& rng, int k) { return static_cast<int>(rng() % static_cast<std::uint64_t>(k)); }

/// Subuniverse of alg generated by one or two random elements of `within`.
inline ElementSet random_subuniverse(const FiniteAlgebra& alg, ElementSet within, std::mt19937_64& rng) {
    auto v = within.to_vector();
    ElementSet gens = ElementSet::singleton(v[pick(rng, static_cast<int>(v.size()))]);
    if (pick(rng, 2)) gens.insert(v[pick(rng, static_cast<int>(v.size()))]);
    return close_set(alg, gens);
}

/// Binary instance whose domains and constraints are subuniverses (of A and A^2).
inline BinaryInstance random_closed_binary(std::shared_ptr<const FiniteAlgebra> alg, int n, std::mt19937_64& rng,
                                           int edge_percent = 60, int max_gens = 3) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    BinaryInstance b(alg, names);
    int d = alg->size();
    auto sq = power(*alg, 2);
    for (int x = 0; x < n; ++x) {
        ElementSet dom = pick(rng, 3) == 0 ? random_subuniverse(*alg, ElementSet::full(d), rng) : ElementSet::full(d);
        b.restrict_domain(x, dom);
    }
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            if (pick(rng, 100) >= edge_percent) continue;
            auto dx = b.domain(x).to_vector(), dy = b.domain(y).to_vector();
            std::vector<Element> gens;
            int g = 1 + pick(rng, max_gens);
            for (int i = 0; i < g; ++i)
                gens.push_back(dx[pick(rng, static_cast<int>(dx.size()))] * d + dy[pick(rng, static_cast<int>(dy.size()))]);
            auto sub = generate_subuniverse(sq, std::span<const Element>(gens));
            PairRelation rel;
            for (auto e : sub.elements) rel.emplace_back(e / d, e % d);
            b.set_relation(x, y, rel);
        }
    return b;
}

/// Two bits per variable (Z2^2); each constraint is one random linear equation
/// over the four bits of its pair, so constraints stack into dense systems.
inline BinaryInstance random_bit_system(int n, int equations, std::mt19937_64& rng) {
    static const auto alg = std::make_shared<const FiniteAlgebra>(power(algebras::affine_zp(2), 2));
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    BinaryInstance b(alg, names);
    for (int e = 0; e < equations; ++e) {
        int x = pick(rng, n), y = pick(rng, n);
        if (x == y) continue;
        int c[4];
        do {
            for (auto& v : c) v = pick(rng, 2);
        } while (!(c[0] | c[1]) || !(c[2] | c[3]));
        int rhs = pick(rng, 2);
        PairRelation rel;
        for (int a = 0; a < 4; ++a)
            for (int v = 0; v < 4; ++v)
                if (((c[0] & (a >> 1)) ^ (c[1] & a & 1) ^ (c[2] & (v >> 1)) ^ (c[3] & v & 1)) == rhs) rel.emplace_back(a, v);
        b.intersect_relation(x, y, rel);
    }
    return b;
}

inline std::set<Assignment> solutions(const BinaryInstance& b) {
    auto v = solution_set(b);
    return {v.begin(), v.end()};
}

}  // namespace fixtures

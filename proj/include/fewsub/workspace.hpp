#pragma once

// Per-algebra caches shared by the consistency passes: closures, subalgebras
// and the affine quotients of subuniverses. Every domain of a binary instance
// lives inside one ambient algebra, so these are hit constantly.

#include <algorithm>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "fewsub/affine_module.hpp"
#include "fewsub/algebra.hpp"
#include "fewsub/element_set.hpp"

namespace fewsub {

/// A maximal congruence theta of a subuniverse A whose quotient is a simple affine module.
struct AffineQuotient {
    ElementSet universe;
    Congruence theta;                // on the local indices of A
    std::vector<ElementSet> blocks;  // quotient element -> elements of A
    AffineCoordinatization coord;    // of A/theta
};

struct WorkspaceOptions {
    int term_depth = 3;
    int congruence_cap = 16;
};

class AlgebraWorkspace {
public:
    explicit AlgebraWorkspace(std::shared_ptr<const FiniteAlgebra> alg, WorkspaceOptions opt = {})
        : alg_(std::move(alg)), opt_(opt) {
        if (!alg_) throw precondition_error("workspace needs an algebra");
    }

    [[nodiscard]] const FiniteAlgebra& algebra() const { return *alg_; }
    [[nodiscard]] const std::shared_ptr<const FiniteAlgebra>& algebra_ptr() const { return alg_; }
    [[nodiscard]] const WorkspaceOptions& options() const { return opt_; }

    ElementSet closure(ElementSet gens) {
        auto it = closure_.find(gens.bits());
        if (it != closure_.end()) return it->second;
        auto c = close_set(*alg_, gens);
        closure_.emplace(gens.bits(), c);
        return c;
    }

    const Subalgebra& sub(ElementSet a) {
        auto it = sub_.find(a.bits());
        if (it != sub_.end()) return it->second;
        return sub_.emplace(a.bits(), subalgebra(*alg_, a)).first->second;
    }

    /// Maximal congruences of A whose quotient is recognized as an affine module,
    /// in the order maximal_congruences lists them.
    const std::vector<AffineQuotient>& affine_quotients(ElementSet a) {
        auto it = affine_.find(a.bits());
        if (it != affine_.end()) return it->second;
        std::vector<AffineQuotient> out;
        if (a.size() >= 2) {
            const auto& s = sub(a);
            for (const auto& theta : maximal_congruences(s.algebra, opt_.congruence_cap)) {
                auto q = quotient(s.algebra, theta);
                auto rec = recognize_affine_module(q.algebra, opt_.term_depth);
                if (!rec) continue;
                AffineQuotient aq{a, theta, std::vector<ElementSet>(static_cast<std::size_t>(theta.block_count())),
                                  *rec.coordinatization};
                for (std::size_t i = 0; i < s.elements.size(); ++i) aq.blocks[theta.block(static_cast<Element>(i))].insert(s.elements[i]);
                out.push_back(std::move(aq));
            }
        }
        return affine_.emplace(a.bits(), std::move(out)).first->second;
    }

    /// Congruence of the subalgebra on A generated by identifying each group of elements.
    Congruence generated_congruence(ElementSet a, const std::vector<ElementSet>& groups) {
        std::vector<std::uint64_t> key;
        for (const auto& g : groups)
            if (g.size() > 1) key.push_back(g.bits());
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        auto ck = std::make_pair(a.bits(), std::move(key));
        auto it = generated_.find(ck);
        if (it != generated_.end()) return it->second;
        auto c = generate_from(a, groups);
        generated_.emplace(std::move(ck), c);
        return c;
    }

private:
    Congruence generate_from(ElementSet a, const std::vector<ElementSet>& groups) {
        const auto& s = sub(a);
        std::vector<std::pair<Element, Element>> pairs;
        for (const auto& g : groups) {
            if (g.empty()) continue;
            int first = s.local[g.min()];
            for (auto e : g) pairs.emplace_back(first, s.local[e]);
        }
        return generate_congruence(s.algebra, pairs);
    }

    std::shared_ptr<const FiniteAlgebra> alg_;
    WorkspaceOptions opt_;
    std::map<std::uint64_t, ElementSet> closure_;
    std::map<std::uint64_t, Subalgebra> sub_;
    std::map<std::uint64_t, std::vector<AffineQuotient>> affine_;
    std::map<std::pair<std::uint64_t, std::vector<std::uint64_t>>, Congruence> generated_;
};

}  // namespace fewsub

#pragma once

// Absorbing subuniverses with explicit term witnesses, and the absorption
// reduction of a binary instance.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/affine_consistency.hpp"
#include "fewsub/clone.hpp"
#include "fewsub/consistency.hpp"

namespace fewsub {

struct AbsorptionWitness {
    ElementSet subuniverse;
    Term term;
    int arity = 0;
};

/// t(B,...,B,A,B,...,B) inside B for every position of the A slot, with A the
/// given universe (the whole algebra by default).
inline bool check_witness(const FiniteAlgebra& alg, ElementSet b, const Term& t,
                          std::optional<ElementSet> universe = std::nullopt) {
    ElementSet a = universe.value_or(ElementSet::full(alg.size()));
    if (b.empty() || !b.subset_of(a)) throw precondition_error("absorbing set must be a nonempty subset of the universe");
    if (!is_subuniverse(alg, b)) throw precondition_error("set " + b.to_string() + " is not a subuniverse");
    if (!is_subuniverse(alg, a)) throw precondition_error("universe " + a.to_string() + " is not a subuniverse");
    int n = t.arity();
    auto bs = b.to_vector();
    auto as = a.to_vector();
    std::vector<Element> args(static_cast<std::size_t>(n));
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    for (int slot = 0; slot < n; ++slot) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int i = 0; i < n; ++i) args[i] = i == slot ? as[idx[i]] : bs[idx[i]];
            if (!b.contains(evaluate_term(alg, t, args))) return false;
            int p = n - 1;
            for (; p >= 0; --p) {
                if (++idx[p] < (p == slot ? as.size() : bs.size())) break;
                idx[p] = 0;
            }
            if (p < 0) break;
        }
    }
    return true;
}

/// outer(inner(x_1..x_n), inner(x_n+1..x_2n), ...): witnesses every absorption
/// either term witnesses, and chains C <= B <= A into C <= A.
inline Term compose_witnesses(const Term& outer, const Term& inner) {
    int n = inner.arity();
    int m = outer.arity();
    std::vector<Term> blocks;
    for (int j = 0; j < m; ++j) {
        std::vector<Term> shifted;
        for (int i = 0; i < n; ++i) shifted.push_back(Term::variable(n * m, j * n + i));
        blocks.push_back(inner.substitute(shifted));
    }
    return outer.substitute(blocks);
}

/// Subuniverses of the algebra inside `within`, ordered by size and then by
/// their sorted element lists.
inline std::vector<ElementSet> subuniverses_within(const FiniteAlgebra& alg, ElementSet within, std::size_t cap = 4096) {
    std::vector<ElementSet> found;
    std::vector<ElementSet> frontier;
    auto add = [&](ElementSet s) {
        if (std::find(found.begin(), found.end(), s) != found.end()) return;
        found.push_back(s);
        frontier.push_back(s);
        if (found.size() > cap)
            throw resource_limit("more than " + std::to_string(cap) + " subuniverses inside " + within.to_string());
    };
    for (auto e : within) add(close_set(alg, ElementSet::singleton(e)));
    while (!frontier.empty()) {
        auto s = frontier.back();
        frontier.pop_back();
        for (auto e : within - s) add(close_set(alg, s | ElementSet::singleton(e)));
    }
    std::sort(found.begin(), found.end(), [](ElementSet l, ElementSet r) {
        if (l.size() != r.size()) return l.size() < r.size();
        return l.to_vector() < r.to_vector();
    });
    return found;
}

struct AbsorptionSearch {
    std::optional<AbsorptionWitness> witness;
    bool exhaustive = false;  // a negative answer is final, not just "at bound"
};

/// Smallest proper subuniverse of `within` absorbing it by a binary or ternary
/// term of depth at most depth_bound.
inline AbsorptionSearch find_absorbing(const FiniteAlgebra& alg, int depth_bound = 3,
                                       std::optional<ElementSet> within = std::nullopt) {
    ElementSet u = within.value_or(ElementSet::full(alg.size()));
    if (!is_subuniverse(alg, u)) throw precondition_error("search universe is not a subuniverse");
    AbsorptionSearch out;
    if (u.size() < 2) {
        out.exhaustive = true;
        return out;
    }
    auto sub = subalgebra(alg, u);
    CloneLimits limits;
    limits.depth_bound = depth_bound;
    std::vector<CloneFragment> clones{enumerate_clone(sub.algebra, 2, limits), enumerate_clone(sub.algebra, 3, limits)};
    auto candidates = subuniverses_within(alg, u);
    for (auto b : candidates) {
        if (b == u) continue;
        ElementSet local;
        for (auto e : b) local.insert(sub.local[e]);
        auto full = ElementSet::full(sub.algebra.size());
        for (const auto& c : clones)
            for (const auto& t : c.tables) {
                if (t.depth == 0) continue;
                if (check_witness(sub.algebra, local, t.term, full)) {
                    out.witness = AbsorptionWitness{b, t.term, t.term.arity()};
                    return out;
                }
            }
    }
    out.exhaustive = u.size() <= 2 && clones[0].saturated && clones[1].saturated;
    return out;
}

/// Descends through witnessed absorbers until the current one has none; the
/// result absorbs `within` through the composed term.
inline std::optional<AbsorptionWitness> minimal_absorbing(const FiniteAlgebra& alg, int depth_bound = 3,
                                                          std::optional<ElementSet> within = std::nullopt) {
    std::optional<AbsorptionWitness> best;
    ElementSet cur = within.value_or(ElementSet::full(alg.size()));
    while (true) {
        auto step = find_absorbing(alg, depth_bound, cur);
        if (!step.witness) return best;
        if (best) {
            best->term = compose_witnesses(step.witness->term, best->term);
            best->arity = best->term.arity();
            best->subuniverse = step.witness->subuniverse;
        } else {
            best = step.witness;
        }
        cur = best->subuniverse;
    }
}

struct AbsorptionStep {
    std::optional<BinaryInstance> instance;  // nullopt: a domain emptied
    std::vector<PassiveSubinstance> passive;
};

/// S_x := B, S_y := R+_{x,y}(B), then 1-consistency and SLAC again, and the
/// passive list intersected with the result.
inline AbsorptionStep absorption_reduce(const BinaryInstance& b, int x, const AbsorptionWitness& w,
                                        std::vector<PassiveSubinstance> passive, bool verify = false,
                                        Trace* trace = nullptr) {
    ElementSet target = w.subuniverse;
    if (target.empty() || !target.subset_of(b.domain(x)))
        throw precondition_error("absorbing set is empty or outside the domain of " + b.name(x));
    if (!check_witness(b.algebra(), target, w.term, b.domain(x)))
        throw precondition_error("witness term does not show " + target.to_string() + " absorbing the domain of " +
                                 b.name(x));
    if (target == b.domain(x)) return {b, std::move(passive)};
    BinaryInstance out = b;
    if (trace) trace->prune("absorb", b, x, b.domain(x) - target, "outside absorbing " + target.to_string());
    out.restrict_domain(x, target);
    for (int y = 0; y < b.size(); ++y) {
        if (y == x) continue;
        auto img = b.image(x, y, target);
        if (verify && !check_witness(b.algebra(), img, w.term, b.domain(y)))
            throw internal_error("image of an absorbing set does not absorb at " + b.name(y));
        if (trace) trace->prune("absorb", b, y, b.domain(y) - img, "outside image of " + b.name(x));
        out.restrict_domain(y, img);
    }
    auto arc = enforce_1_consistency(std::move(out), trace);
    if (!arc) return {std::nullopt, std::move(passive)};
    auto store = run_slac(*arc, trace);
    if (!store) return {std::nullopt, std::move(passive)};
    for (int y = 0; y < arc->size(); ++y) arc->restrict_domain(y, (*store)[y]);
    std::size_t before = live_count(passive);
    passive = update_passive(std::move(passive), *arc);
    if (before > 0 && live_count(passive) == 0)
        throw internal_error("absorption at " + b.name(x) + " retired every passive subinstance");
    if (verify)
        for (const auto& p : passive) {
            if (!p.live) continue;
            BinaryInstance sub = *arc;
            for (int y = 0; y < sub.size(); ++y) sub.restrict_domain(y, p.domains[y]);
            auto s = run_slac(sub);
            if (!s || *s != p.domains)
                throw internal_error("passive subinstance at " + b.name(p.var) + " lost SLAC under absorption");
        }
    return {std::move(arc), std::move(passive)};
}

}  // namespace fewsub

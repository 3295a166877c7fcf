#pragma once

// Affine consistency: test pairs (A, theta_A), test instances over simple
// affine quotients compiled to linear systems, block pruning, and the
// passive subinstances left behind by a clean sweep.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/consistency.hpp"
#include "fewsub/linear.hpp"
#include "fewsub/workspace.hpp"

namespace fewsub {

struct AffineOptions {
    int generator_cap = 2;            // subuniverses generated by at most this many elements, plus whole domains
    std::size_t subuniverse_cap = 4096;  // per domain
    bool verify_paths = false;
};

struct TestPair {
    int var = 0;
    ElementSet universe;  // A
    AffineQuotient quotient;

    [[nodiscard]] int block_count() const { return static_cast<int>(quotient.blocks.size()); }
};

/// R+_{x,y}(A).
inline ElementSet r_plus(const BinaryInstance& b, int x, int y, ElementSet a) {
    if (x == y || !b.has(x, y)) throw precondition_error("no constraint between " + b.name(x) + " and " + b.name(y));
    if (!a.subset_of(b.domain(x))) throw precondition_error("set is not inside the domain of " + b.name(x));
    return b.image(x, y, a);
}

/// Candidate subuniverses of S_x: the domain itself and the closures of every
/// generator set of size at most the cap.
inline std::vector<ElementSet> candidate_subuniverses(const BinaryInstance& b, int x, AlgebraWorkspace& ws,
                                                      const AffineOptions& opt) {
    std::vector<ElementSet> out{b.domain(x)};
    auto elems = b.domain(x).to_vector();
    std::vector<std::size_t> pick;
    auto add = [&] {
        ElementSet gens;
        for (auto i : pick) gens.insert(elems[i]);
        auto c = ws.closure(gens);
        if (!c.subset_of(b.domain(x))) throw internal_error("domain of " + b.name(x) + " is not a subuniverse");
        if (std::find(out.begin(), out.end(), c) == out.end()) {
            out.push_back(c);
            if (out.size() > opt.subuniverse_cap)
                throw resource_limit("subuniverse enumeration at " + b.name(x) + " (domain " + b.domain(x).to_string() +
                                     ") exceeds the cap of " + std::to_string(opt.subuniverse_cap));
        }
    };
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!pick.empty()) add();
        if (static_cast<int>(pick.size()) == opt.generator_cap) return;
        for (std::size_t i = from; i < elems.size(); ++i) {
            pick.push_back(i);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return out;
}

/// The list of test pairs, larger subuniverses first, so a pair whose A lies
/// in a block of an earlier pair always comes later.
inline std::vector<TestPair> enumerate_test_pairs(const BinaryInstance& b, AlgebraWorkspace& ws,
                                                  const AffineOptions& opt = {}) {
    std::vector<TestPair> out;
    for (int x = 0; x < b.size(); ++x) {
        if (b.domain(x).empty()) throw precondition_error("empty domain at " + b.name(x));
        for (auto a : candidate_subuniverses(b, x, ws, opt))
            for (const auto& q : ws.affine_quotients(a)) out.push_back({x, a, q});
    }
    std::stable_sort(out.begin(), out.end(), [](const TestPair& l, const TestPair& r) {
        if (l.universe.size() != r.universe.size()) return l.universe.size() > r.universe.size();
        if (l.var != r.var) return l.var < r.var;
        return l.universe.bits() < r.universe.bits();
    });
    return out;
}

/// alpha_y on R+_{x,y}(A), as the block index (numbered like theta_A) of each element.
struct RelevantCongruence {
    ElementSet universe;
    std::vector<int> block_of;  // ambient element -> theta_A block, -1 outside the universe
    std::vector<ElementSet> blocks;
};

namespace detail {

inline std::optional<RelevantCongruence> congruence_from_images(AlgebraWorkspace& ws, const TestPair& pair,
                                                                ElementSet ay, const std::vector<ElementSet>& images) {
    const auto& alg = ws.algebra();
    for (const auto& im : images)
        if (im.empty()) return std::nullopt;
    auto alpha = ws.generated_congruence(ay, images);
    if (alpha.block_count() != pair.block_count()) return std::nullopt;
    const auto& s = ws.sub(ay);
    RelevantCongruence rc{ay, std::vector<int>(static_cast<std::size_t>(alg.size()), -1), {}};
    rc.blocks.resize(images.size());
    std::vector<int> theta_of_alpha(static_cast<std::size_t>(alpha.block_count()), -1);
    for (std::size_t i = 0; i < images.size(); ++i) {
        int blk = alpha.block(s.local[images[i].min()]);
        if (theta_of_alpha[blk] >= 0) return std::nullopt;
        theta_of_alpha[blk] = static_cast<int>(i);
    }
    for (auto e : ay) {
        int i = theta_of_alpha[alpha.block(s.local[e])];
        rc.block_of[e] = i;
        rc.blocks[i].insert(e);
    }
    // The block bijection must be an isomorphism A/theta_A -> R+(A)/alpha_y.
    for (std::size_t k = 0; k < alg.ops().size(); ++k) {
        const auto& f = alg.op(k);
        int m = pair.block_count();
        std::vector<int> idx(static_cast<std::size_t>(f.arity), 0);
        std::vector<Element> xa(idx.size()), xy(idx.size());
        while (true) {
            for (int j = 0; j < f.arity; ++j) {
                xa[j] = pair.quotient.blocks[idx[j]].min();
                xy[j] = rc.blocks[idx[j]].min();
            }
            Element ra = f(xa), ry = f(xy);
            int ba = -1;
            for (int i = 0; i < m; ++i)
                if (pair.quotient.blocks[i].contains(ra)) ba = i;
            if (ba < 0 || rc.block_of[ry] != ba) return std::nullopt;
            int p = f.arity - 1;
            for (; p >= 0; --p) {
                if (++idx[p] < m) break;
                idx[p] = 0;
            }
            if (p < 0) break;
        }
    }
    return rc;
}

}  // namespace detail

/// The congruence on R+_{x,y}(A) generated by the images of the theta_A-blocks
/// along the direct constraint; absent when y is not relevant.
inline std::optional<RelevantCongruence> relevant_congruence(const BinaryInstance& b, AlgebraWorkspace& ws,
                                                             const TestPair& pair, int y, bool verify_paths = false) {
    int x = pair.var;
    if (y == x) throw precondition_error("relevance is defined for variables other than the base");
    if (!b.has(x, y)) throw precondition_error("instance is not (2,3)-consistent: missing constraint");
    auto ay = r_plus(b, x, y, pair.universe);
    std::vector<ElementSet> images;
    for (const auto& blk : pair.quotient.blocks) images.push_back(b.image(x, y, blk));
    auto rc = detail::congruence_from_images(ws, pair, ay, images);
    if (verify_paths) {
        for (int z = 0; z < b.size(); ++z) {
            if (z == x || z == y) continue;
            std::vector<ElementSet> via;
            for (const auto& blk : pair.quotient.blocks) via.push_back(b.image(z, y, b.image(x, z, blk)) & ay);
            // Images along a path only grow, so a separating path must agree with the direct one.
            auto alt = detail::congruence_from_images(ws, pair, ay, via);
            if (alt && (!rc || rc->block_of != alt->block_of))
                throw internal_error("relevance of " + b.name(y) + " depends on the path through " + b.name(z));
        }
    }
    return rc;
}

struct TestInstance {
    TestPair pair;
    std::vector<int> relevant;                 // base variable first, then ascending
    std::vector<RelevantCongruence> alphas;    // parallel to relevant
    LinearSystem system;

    /// Blocks linked to theta_A-block i, one per relevant variable.
    [[nodiscard]] std::map<int, ElementSet> strand(int i) const {
        std::map<int, ElementSet> out;
        for (std::size_t k = 0; k < relevant.size(); ++k) out.emplace(relevant[k], alphas[k].blocks.at(i));
        return out;
    }
};

inline TestInstance build_test_instance(const BinaryInstance& b, AlgebraWorkspace& ws, const TestPair& pair,
                                        bool verify_paths = false) {
    int x = pair.var;
    if (!pair.universe.subset_of(b.domain(x))) throw precondition_error("test pair lies outside its domain");
    TestInstance ti{pair, {x}, {}, LinearSystem(pair.quotient.coord.field, 0)};
    RelevantCongruence self{pair.universe, std::vector<int>(static_cast<std::size_t>(b.universe_size()), -1),
                            pair.quotient.blocks};
    for (int i = 0; i < pair.block_count(); ++i)
        for (auto e : pair.quotient.blocks[i]) self.block_of[e] = i;
    ti.alphas.push_back(std::move(self));
    for (int y = 0; y < b.size(); ++y) {
        if (y == x) continue;
        if (auto rc = relevant_congruence(b, ws, pair, y, verify_paths)) {
            ti.relevant.push_back(y);
            ti.alphas.push_back(std::move(*rc));
        }
    }
    const auto& coord = pair.quotient.coord;
    int dim = coord.dim;
    int m = pair.block_count();
    int r = static_cast<int>(ti.relevant.size());
    ti.system = LinearSystem(coord.field, r * dim);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            int y = ti.relevant[i], z = ti.relevant[j];
            const auto& ay = ti.alphas[i];
            const auto& az = ti.alphas[j];
            std::vector<char> seen(static_cast<std::size_t>(m) * m, 0);
            PairRelation rel;
            std::vector<char> proj_y(static_cast<std::size_t>(m), 0), proj_z(static_cast<std::size_t>(m), 0);
            for (auto a : ay.universe)
                for (auto c : b.row(y, z, a) & az.universe) {
                    int u = ay.block_of[a], v = az.block_of[c];
                    proj_y[u] = proj_z[v] = 1;
                    if (!seen[u * m + v]) {
                        seen[u * m + v] = 1;
                        rel.emplace_back(u, v);
                    }
                }
            if (std::count(proj_y.begin(), proj_y.end(), 1) != m || std::count(proj_z.begin(), proj_z.end(), 1) != m)
                throw internal_error("test instance is not 1-consistent at " + b.name(y) + ", " + b.name(z));
            if (static_cast<int>(rel.size()) == m * m) continue;
            auto local = compile_binary_constraint(rel, coord, coord);
            for (const auto& row : local.rows) {
                std::vector<int> coeffs(static_cast<std::size_t>(r * dim), 0);
                for (int t = 0; t < dim; ++t) {
                    coeffs[i * dim + t] = row.coeffs[t];
                    coeffs[j * dim + t] = row.coeffs[dim + t];
                }
                ti.system.add_row(std::move(coeffs), row.rhs);
            }
        }
    return ti;
}

/// A block-based subinstance certified by the affine pass.
struct PassiveSubinstance {
    int var = 0;
    ElementSet universe;  // A of the originating pair
    Congruence theta;
    ElementSet block;
    std::vector<ElementSet> domains;
    bool live = true;
};

struct AffineReport {
    std::vector<std::string> lines;
    int test_instances = 0;
    int blocks_pruned = 0;
    int sweeps = 0;
};

struct AffineResult {
    std::optional<BinaryInstance> instance;  // nullopt: no solution
    std::vector<PassiveSubinstance> passive;
    AffineReport report;
};

/// The block subinstance: B at x, R+_{x,y}(B) elsewhere, (2,3)-consistency enforced.
/// `consistent` promises that b itself is (2,3)-consistent.
inline std::optional<BinaryInstance> block_subinstance(const BinaryInstance& b, int x, ElementSet block,
                                                       bool consistent = false) {
    BinaryInstance sub = b;
    sub.restrict_domain(x, block);
    for (int y = 0; y < b.size(); ++y)
        if (y != x) sub.restrict_domain(y, b.image(x, y, block));
    if (!consistent) return enforce_23_consistency(std::move(sub));
    auto dirty = changed_domains(b, sub);
    return enforce_23_consistency(std::move(sub), nullptr, &dirty);
}

/// Sweeps the test pairs in order, pruning blocks that appear in no solution of
/// their test instance or whose block subinstance is not (2,3)-consistent,
/// re-enforcing (2,3)-consistency after each pruning, until a sweep prunes
/// nothing. The passive list comes from that last sweep.
inline AffineResult affine_consistency_pass(BinaryInstance b, AlgebraWorkspace& ws, const AffineOptions& opt = {},
                                            Trace* trace = nullptr) {
    AffineResult res;
    auto& rep = res.report;
    if (b.any_empty()) return res;
    for (int x = 0; x < b.size(); ++x)
        for (int y = x + 1; y < b.size(); ++y)
            if (!b.has(x, y)) throw precondition_error("affine consistency needs a (2,3)-consistent instance");
    bool consistent = is_23_consistent(b);
    while (true) {
        ++rep.sweeps;
        bool pruned = false;
        std::vector<PassiveSubinstance> passive;
        std::map<std::pair<int, std::uint64_t>, std::optional<std::vector<ElementSet>>> memo;
        auto pairs = enumerate_test_pairs(b, ws, opt);
        for (const auto& pair : pairs) {
            int x = pair.var;
            if (!pair.universe.subset_of(b.domain(x))) continue;
            auto ti = build_test_instance(b, ws, pair, opt.verify_paths);
            ++rep.test_instances;
            auto space = solve_system(ti.system);
            const auto& coord = pair.quotient.coord;
            ElementSet removed;
            std::vector<std::pair<ElementSet, std::vector<ElementSet>>> kept;
            for (int i = 0; i < pair.block_count(); ++i) {
                const auto& blk = pair.quotient.blocks[i];
                if (!reachable_in_projection(space, coord.field, 0, coord.encode[i])) {
                    removed |= blk;
                    if (trace) trace->prune("affine", b, x, blk, "block outside every test solution");
                    continue;
                }
                auto key = std::make_pair(x, blk.bits());
                auto it = memo.find(key);
                if (it == memo.end()) {
                    auto sub = block_subinstance(b, x, blk, consistent);
                    std::optional<std::vector<ElementSet>> doms;
                    if (sub) doms = sub->domains();
                    it = memo.emplace(key, std::move(doms)).first;
                }
                if (!it->second) {
                    removed |= blk;
                    if (trace) trace->prune("affine", b, x, blk, "block subinstance not (2,3)-consistent");
                    continue;
                }
                kept.emplace_back(blk, *it->second);
            }
            std::string line = "pair " + b.name(x) + " A=" + pair.universe.to_string() + " theta=" +
                               pair.quotient.theta.to_string() + " relevant=" + std::to_string(ti.relevant.size()) +
                               " system=" + std::to_string(ti.system.rows.size()) + "x" +
                               std::to_string(ti.system.num_vars) + (space.sat ? " SAT" : " UNSAT") +
                               " pruned=" + removed.to_string();
            rep.lines.push_back(line);
            if (!removed.empty()) {
                pruned = true;
                rep.blocks_pruned += removed.size() / std::max(1, pair.quotient.blocks.front().size());
                std::string where = b.name(x);
                b.restrict_domain(x, b.domain(x) - removed);
                std::vector<char> dirty(static_cast<std::size_t>(b.size()), 0);
                dirty[x] = 1;
                auto again = enforce_23_consistency(std::move(b), trace, consistent ? &dirty : nullptr);
                if (!again) {
                    rep.lines.push_back("unsat after pruning at " + where);
                    return res;
                }
                b = std::move(*again);
                consistent = true;
                memo.clear();
                continue;
            }
            for (auto& [blk, doms] : kept)
                passive.push_back({x, pair.universe, pair.quotient.theta, blk, std::move(doms), true});
        }
        if (!pruned) {
            res.passive = std::move(passive);
            break;
        }
    }
    res.instance = std::move(b);
    return res;
}

/// Intersects every live passive subinstance with the reduced domains and
/// retires the ones that stop intersecting it.
inline std::vector<PassiveSubinstance> update_passive(std::vector<PassiveSubinstance> passive,
                                                      const BinaryInstance& reduced) {
    for (auto& p : passive) {
        if (!p.live) continue;
        if (static_cast<int>(p.domains.size()) != reduced.size())
            throw precondition_error("passive subinstance and instance differ in variables");
        for (int x = 0; x < reduced.size(); ++x) {
            p.domains[x] = p.domains[x] & reduced.domain(x);
            if (p.domains[x].empty()) p.live = false;
        }
        if (p.live) p.block = p.block & reduced.domain(p.var);
    }
    return passive;
}

inline std::size_t live_count(const std::vector<PassiveSubinstance>& passive) {
    return static_cast<std::size_t>(std::count_if(passive.begin(), passive.end(), [](const auto& p) { return p.live; }));
}

}  // namespace fewsub

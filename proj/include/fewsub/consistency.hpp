#pragma once

// Binarization, (2,3)-consistency, 1-consistency, path patterns, LAC and SLAC.

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/binary_instance.hpp"
#include "fewsub/csp.hpp"
#include "fewsub/oracle.hpp"

namespace fewsub {

/// One line per domain pruning event, when enabled.
struct Trace {
    bool enabled = false;
    std::vector<std::string> lines;

    void prune(const std::string& stage, const BinaryInstance& b, int x, ElementSet removed, const std::string& why) {
        if (!enabled) return;
        for (auto v : removed) lines.push_back(stage + " " + b.name(x) + " -" + std::to_string(v) + " " + why);
    }

    void note(std::string line) {
        if (enabled) lines.push_back(std::move(line));
    }
};

// ---------------------------------------------------------------------------
// Binarization
// ---------------------------------------------------------------------------

struct Binarization {
    BinaryInstance instance;
    std::vector<std::vector<int>> groups;  // new variable -> original variables, ascending
    int group_size = 1;
    int original_size = 0;

    /// Reads an assignment of the original variables off a solution of the binary instance.
    [[nodiscard]] Assignment decode(const Assignment& group_values, int base) const {
        Assignment out(static_cast<std::size_t>(original_size), kUnassigned);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            auto t = decode_tuple(base, static_cast<int>(groups[g].size()), group_values[g]);
            for (std::size_t i = 0; i < groups[g].size(); ++i) out[groups[g][i]] = t[i];
        }
        return out;
    }
};

/// Grouping size ceil(K/2) with K = max(max constraint arity, k - 1).
inline int binarization_group_size(const RelationalTemplate& t, const CspInstance& inst, int k) {
    int p = 1;
    for (const auto& c : inst.constraints) p = std::max(p, t.relation(c.relation).arity());
    int K = std::max(p, k - 1);
    return (K + 1) / 2;
}

/// New variables are the g-element sets of original variables (g capped by the
/// variable count); each has the local solutions over its set as domain, and
/// two sets are constrained to agree and to satisfy every constraint inside
/// their union.
inline Binarization binarize(const RelationalTemplate& t, const CspInstance& inst,
                             std::shared_ptr<const FiniteAlgebra> alg, int k,
                             std::shared_ptr<const FiniteAlgebra> ambient = nullptr) {
    inst.validate(t);
    if (alg->size() != t.domain_size()) throw precondition_error("algebra and template domains differ");
    int n = inst.size();
    int d = t.domain_size();
    Binarization out;
    out.original_size = n;
    out.group_size = std::min(binarization_group_size(t, inst, k), std::max(n, 1));
    int g = out.group_size;

    if (ambient && static_cast<std::uint64_t>(ambient->size()) != detail::checked_power(d, g, detail::kMaxTableEntries))
        throw precondition_error("supplied ambient algebra does not match the group size");
    if (!ambient) ambient = g == 1 ? alg : std::make_shared<const FiniteAlgebra>(power(*alg, g));
    if (n > 0) {
        std::vector<int> comb(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i) comb[i] = i;
        while (true) {
            out.groups.push_back(comb);
            int i = g - 1;
            while (i >= 0 && comb[i] == n - g + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < g; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    std::vector<std::string> names;
    for (const auto& grp : out.groups) {
        std::string s;
        for (std::size_t i = 0; i < grp.size(); ++i) s += (i ? "+" : "") + inst.variables[grp[i]];
        names.push_back(s);
    }
    out.instance = BinaryInstance(ambient, names);
    auto& b = out.instance;
    int m = static_cast<int>(out.groups.size());

    // Constraints whose scope lies within a set of original variables.
    auto inside = [&](const std::vector<char>& mark) {
        std::vector<const Constraint*> cs;
        for (const auto& c : inst.constraints) {
            bool ok = true;
            for (auto v : c.scope) ok = ok && mark[v];
            if (ok) cs.push_back(&c);
        }
        return cs;
    };
    std::vector<Element> value(static_cast<std::size_t>(n), 0);
    Tuple buf;
    auto satisfied = [&](const std::vector<const Constraint*>& cs) {
        for (const auto* c : cs) {
            buf.clear();
            for (auto v : c->scope) buf.push_back(value[v]);
            if (!t.relation(c->relation).contains(buf)) return false;
        }
        return true;
    };
    int local = b.universe_size();
    std::vector<std::vector<const Constraint*>> own(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) {
        std::vector<char> mark(static_cast<std::size_t>(n), 0);
        for (auto v : out.groups[x]) mark[v] = 1;
        own[x] = inside(mark);
        ElementSet dom;
        for (Element code = 0; code < local; ++code) {
            auto tup = decode_tuple(d, g, code);
            for (int i = 0; i < g; ++i) value[out.groups[x][i]] = tup[i];
            if (satisfied(own[x])) dom.insert(code);
        }
        b.restrict_domain(x, dom);
    }
    for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y) {
            std::vector<char> mark(static_cast<std::size_t>(n), 0), in_x(mark);
            for (auto v : out.groups[x]) mark[v] = in_x[v] = 1;
            bool overlap = false;
            for (auto v : out.groups[y]) {
                overlap = overlap || mark[v];
                mark[v] = 1;
            }
            auto cs = inside(mark);
            std::vector<const Constraint*> spanning;
            for (const auto* c : cs) {
                bool in_one_x = true, in_one_y = true;
                for (auto v : c->scope) {
                    in_one_x = in_one_x && in_x[v];
                    in_one_y = in_one_y && std::find(out.groups[y].begin(), out.groups[y].end(), v) != out.groups[y].end();
                }
                if (!in_one_x && !in_one_y) spanning.push_back(c);
            }
            if (!overlap && spanning.empty()) continue;
            PairRelation rel;
            for (auto a : b.domain(x)) {
                auto ta = decode_tuple(d, g, a);
                for (auto bv : b.domain(y)) {
                    auto tb = decode_tuple(d, g, bv);
                    bool agree = true;
                    for (int i = 0; i < g && agree; ++i) value[out.groups[x][i]] = ta[i];
                    for (int i = 0; i < g && agree; ++i) {
                        int v = out.groups[y][i];
                        if (in_x[v] && value[v] != tb[i]) agree = false;
                        value[v] = tb[i];
                    }
                    if (agree && satisfied(spanning)) rel.emplace_back(a, bv);
                }
            }
            b.set_relation(x, y, rel);
        }
    return out;
}

// ---------------------------------------------------------------------------
// 1-consistency and (2,3)-consistency
// ---------------------------------------------------------------------------

/// Prunes domains until every constraint is subdirect. nullopt means UNSAT.
inline std::optional<BinaryInstance> enforce_1_consistency(BinaryInstance b, Trace* trace = nullptr) {
    int n = b.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < n; ++x) {
            if (b.domain(x).empty()) return std::nullopt;
            for (int y = 0; y < n; ++y) {
                if (x == y || !b.has(x, y)) continue;
                ElementSet support;
                for (auto a : b.domain(x))
                    if (!b.row(x, y, a).empty()) support.insert(a);
                if (support != b.domain(x)) {
                    if (trace) trace->prune("arc", b, x, b.domain(x) - support, "no support at " + b.name(y));
                    b.restrict_domain(x, support);
                    changed = true;
                    if (support.empty()) return std::nullopt;
                }
            }
        }
    }
    return b;
}

namespace detail {

/// R_{x,z} := R_{x,z} cap (R_{x,y} o R_{y,z}). Returns true when something was removed.
inline bool revise_pair(BinaryInstance& b, int x, int z, int y) {
    bool changed = false;
    const ElementSet* xz = b.rows(x, z);
    const ElementSet* xy = b.rows(x, y);
    const ElementSet* yz = b.rows(y, z);
    for (auto a : b.domain(x)) {
        ElementSet cur = xz[a];
        if (cur.empty()) continue;
        ElementSet reach;
        for (auto c : xy[a]) {
            reach |= yz[c];
            if (cur.subset_of(reach)) break;
        }
        if (!cur.subset_of(reach)) {
            b.shrink_row(x, z, a, reach);
            changed = true;
        }
    }
    return changed;
}

}  // namespace detail

/// Greatest (2,3)-consistent sub-instance: missing constraints start as full
/// products, pairs without a witness at some third variable are removed, and
/// domains are kept equal to the projections of the constraints.
/// With `dirty`, b must be (2,3)-consistent except for domain restrictions at
/// the marked variables, and only pairs touching them are queued at first.
inline std::optional<BinaryInstance> enforce_23_consistency(BinaryInstance b, Trace* trace = nullptr,
                                                            const std::vector<char>* dirty = nullptr) {
    int n = b.size();
    for (int x = 0; x < n; ++x) {
        if (b.domain(x).empty()) return std::nullopt;
        for (int y = x + 1; y < n; ++y)
            if (!b.has(x, y)) b.set_full(x, y);
    }
    std::deque<std::pair<int, int>> queue;
    std::vector<char> queued(static_cast<std::size_t>(n) * n, 0);
    auto push = [&](int x, int y) {
        if (x > y) std::swap(x, y);
        if (!queued[x * n + y]) {
            queued[x * n + y] = 1;
            queue.emplace_back(x, y);
        }
    };
    // Keeps S_x equal to the projection of every constraint at x.
    auto tighten = [&](int x) {
        ElementSet support = b.domain(x);
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            ElementSet s;
            const ElementSet* r = b.rows(x, y);
            for (auto a : support)
                if (!r[a].empty()) s.insert(a);
            support = s;
        }
        if (support == b.domain(x)) return true;
        if (trace) trace->prune("pc23", b, x, b.domain(x) - support, "no extension");
        b.restrict_domain(x, support);
        for (int y = 0; y < n; ++y)
            if (y != x) push(x, y);
        return !support.empty();
    };
    for (int x = 0; x < n; ++x)
        if (!tighten(x)) return std::nullopt;
    if (dirty && static_cast<int>(dirty->size()) != n) throw precondition_error("dirty marks and instance differ in size");
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (!dirty || (*dirty)[x] || (*dirty)[y]) push(x, y);
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        queued[x * n + y] = 0;
        for (int z = 0; z < n; ++z) {
            if (z == x || z == y) continue;
            if (detail::revise_pair(b, x, z, y)) {
                push(x, z);
                if (!tighten(x) || !tighten(z)) return std::nullopt;
            }
            if (detail::revise_pair(b, y, z, x)) {
                push(y, z);
                if (!tighten(y) || !tighten(z)) return std::nullopt;
            }
        }
    }
    return b;
}

/// Variables whose domain differs between two instances on the same variables.
inline std::vector<char> changed_domains(const BinaryInstance& before, const BinaryInstance& after) {
    if (before.size() != after.size()) throw precondition_error("instances differ in variables");
    std::vector<char> out(static_cast<std::size_t>(before.size()), 0);
    for (int x = 0; x < before.size(); ++x) out[x] = before.domain(x) != after.domain(x);
    return out;
}

/// Direct re-check of (2,3)-consistency including domain projections.
inline bool is_23_consistent(const BinaryInstance& b) {
    int n = b.size();
    for (int x = 0; x < n; ++x) {
        if (b.domain(x).empty()) return false;
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            for (auto a : b.domain(x)) {
                if (b.row(x, y, a).empty()) return false;
                for (auto c : b.row(x, y, a))
                    for (int z = 0; z < n; ++z) {
                        if (z == x || z == y) continue;
                        if (!b.row(x, z, a).intersects(b.row(y, z, c))) return false;
                    }
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Path patterns
// ---------------------------------------------------------------------------

using PathPattern = std::vector<std::pair<int, int>>;

inline PathPattern inverse_pattern(const PathPattern& p) {
    PathPattern out;
    for (auto it = p.rbegin(); it != p.rend(); ++it) out.emplace_back(it->second, it->first);
    return out;
}

/// A + p: end elements of realizations of p starting in A.
inline ElementSet pattern_image(const BinaryInstance& b, ElementSet a_set, const PathPattern& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto [x, y] = p[i];
        if (x < 0 || y < 0 || x >= b.size() || y >= b.size() || x == y)
            throw malformed_input("path pattern step is not a pair of distinct variables");
        if (!b.has(x, y)) throw precondition_error("path pattern step has no constraint");
        if (i + 1 < p.size() && p[i + 1].first != y) throw malformed_input("path pattern steps do not chain");
    }
    if (!p.empty() && !a_set.subset_of(b.domain(p.front().first)))
        throw precondition_error("start set lies outside the start domain");
    for (auto [x, y] : p) a_set = b.image(x, y, a_set);
    return a_set;
}

// ---------------------------------------------------------------------------
// LAC and SLAC
// ---------------------------------------------------------------------------

using UnaryFactStore = std::vector<ElementSet>;

namespace detail {

struct LacState {
    int var;
    ElementSet set;
    auto operator<=>(const LacState&) const = default;
};

/// Breadth-first closure of (x,B) -> (y, R+_{x,y}(B) cap store[y]) from every
/// start fact. Returns false as soon as an empty set is derived.
inline bool lac_explore(const BinaryInstance& b, const UnaryFactStore& store) {
    std::deque<LacState> frontier;
    std::set<LacState> seen;
    for (int x = 0; x < b.size(); ++x) {
        LacState s{x, store[x] & b.domain(x)};
        if (s.set.empty()) return false;
        if (seen.insert(s).second) frontier.push_back(s);
    }
    while (!frontier.empty()) {
        auto [x, s] = frontier.front();
        frontier.pop_front();
        for (int y = 0; y < b.size(); ++y) {
            if (y == x || !b.has(x, y)) continue;
            LacState next{y, b.image(x, y, s) & store[y]};
            if (next.set.empty()) return false;
            if (seen.insert(next).second) frontier.push_back(next);
        }
    }
    return true;
}

}  // namespace detail

/// LAC on the restriction of b to the fact store: true when no empty set is derivable.
inline bool run_lac(const BinaryInstance& b, const UnaryFactStore& start) {
    if (static_cast<int>(start.size()) != b.size()) throw precondition_error("fact store size mismatch");
    return detail::lac_explore(b, start);
}

/// Algorithm 1: drop each value whose singleton restriction leads LAC to a
/// contradiction, until nothing changes. nullopt when some set empties.
inline std::optional<UnaryFactStore> run_slac(const BinaryInstance& b, Trace* trace = nullptr) {
    int n = b.size();
    UnaryFactStore store(b.domains());
    for (const auto& s : store)
        if (s.empty()) return std::nullopt;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < n; ++x) {
            for (auto a : store[x]) {
                auto probe = store;
                probe[x] = ElementSet::singleton(a);
                if (!detail::lac_explore(b, probe)) {
                    store[x].erase(a);
                    changed = true;
                    if (trace) trace->prune("slac", b, x, ElementSet::singleton(a), "singleton refuted");
                }
            }
            if (store[x].empty()) return std::nullopt;
        }
    }
    return store;
}

// ---------------------------------------------------------------------------
// Brute-force solutions of binary instances (test oracle)
// ---------------------------------------------------------------------------

inline detail::Network network_of(const BinaryInstance& b) {
    detail::Network net;
    net.domains = b.domains();
    for (int x = 0; x < b.size(); ++x)
        for (int y = x + 1; y < b.size(); ++y) {
            if (!b.has(x, y)) continue;
            const BinaryInstance* bp = &b;
            net.constraints.push_back(
                {{x, y}, [bp, x, y](std::span<const Element> v) { return bp->related(x, y, v[0], v[1]); }});
        }
    return net;
}

inline std::vector<Assignment> solution_set(const BinaryInstance& b, std::size_t cap = 1 << 20,
                                            const OracleOptions& opt = {}) {
    std::vector<Assignment> out;
    detail::search_network(network_of(b), opt, [&](const Assignment& a) {
        if (out.size() == cap) throw resource_limit("solution set exceeds the cap of " + std::to_string(cap));
        out.push_back(a);
        return true;
    });
    return out;
}

inline std::optional<Assignment> oracle_solve(const BinaryInstance& b, const OracleOptions& opt = {}) {
    std::optional<Assignment> found;
    detail::search_network(network_of(b), opt, [&](const Assignment& a) {
        found = a;
        return false;
    });
    return found;
}

}  // namespace fewsub

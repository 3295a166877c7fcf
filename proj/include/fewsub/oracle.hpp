#pragma once

// Ground-truth solver: exhaustive enumeration for small instances, otherwise
// backtracking with forward checking. Variables are taken in index order and
// values in ascending order, so solutions appear in lexicographic order.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fewsub/csp.hpp"
#include "fewsub/element_set.hpp"

namespace fewsub {

struct OracleOptions {
    int exhaustive_cap = 12;                    // max variables for plain enumeration
    std::uint64_t exhaustive_budget = 1 << 20;  // max assignments for plain enumeration
    int variable_cap = 4096;
    std::uint64_t node_cap = 200'000'000;
};

namespace detail {

/// A constraint network over per-variable domains; allowed() receives the
/// values of the scope in order.
struct Network {
    struct Con {
        std::vector<int> scope;
        std::function<bool(std::span<const Element>)> allowed;
    };
    std::vector<ElementSet> domains;
    std::vector<Con> constraints;
};

/// Calls on_solution for each solution in lexicographic order until it returns false.
inline void search_network(const Network& net, const OracleOptions& opt,
                           const std::function<bool(const Assignment&)>& on_solution) {
    int n = static_cast<int>(net.domains.size());
    if (n > opt.variable_cap)
        throw resource_limit("oracle: " + std::to_string(n) + " variables exceed the cap of " +
                             std::to_string(opt.variable_cap));
    Assignment a(static_cast<std::size_t>(n), kUnassigned);
    for (const auto& d : net.domains)
        if (d.empty()) return;
    if (n == 0) {
        for (const auto& c : net.constraints)
            if (!c.allowed({})) return;
        on_solution(a);
        return;
    }

    std::uint64_t space = 1;
    for (const auto& d : net.domains) {
        space *= static_cast<std::uint64_t>(d.size());
        if (space > opt.exhaustive_budget) break;
    }
    std::vector<Element> buf;
    auto holds = [&](const Network::Con& c) {
        buf.clear();
        for (auto v : c.scope) buf.push_back(a[v]);
        return c.allowed(buf);
    };

    if (n <= opt.exhaustive_cap && space <= opt.exhaustive_budget) {
        std::vector<std::vector<Element>> vals;
        for (const auto& d : net.domains) vals.push_back(d.to_vector());
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            for (int i = 0; i < n; ++i) a[i] = vals[i][idx[i]];
            bool ok = true;
            for (const auto& c : net.constraints)
                if (!holds(c)) {
                    ok = false;
                    break;
                }
            if (ok && !on_solution(a)) return;
            int p = n - 1;
            for (; p >= 0; --p) {
                if (++idx[p] < vals[p].size()) break;
                idx[p] = 0;
            }
            if (p < 0) return;
        }
    }

    std::vector<std::vector<int>> watch(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < net.constraints.size(); ++c) {
        auto scope = net.constraints[c].scope;
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
        for (auto v : scope) watch[v].push_back(static_cast<int>(c));
    }
    std::vector<ElementSet> dom = net.domains;
    std::vector<std::pair<int, ElementSet>> trail;

    // Forward check: prune the single unassigned variable of c, or test c when fully assigned.
    auto propagate = [&](const Network::Con& c) {
        int free = -1;
        for (auto v : c.scope) {
            if (a[v] != kUnassigned) continue;
            if (free >= 0 && free != v) return true;
            free = v;
        }
        if (free < 0) return holds(c);
        ElementSet keep;
        for (auto val : dom[free]) {
            a[free] = val;
            if (holds(c)) keep.insert(val);
        }
        a[free] = kUnassigned;
        if (keep != dom[free]) {
            trail.emplace_back(free, dom[free]);
            dom[free] = keep;
        }
        return !keep.empty();
    };

    for (const auto& c : net.constraints)
        if (!propagate(c)) return;

    std::uint64_t nodes = 0;
    bool stop = false;
    auto dfs = [&](auto&& self, int var) -> void {
        if (var == n) {
            if (!on_solution(a)) stop = true;
            return;
        }
        for (auto val : dom[var]) {
            if (++nodes > opt.node_cap) throw resource_limit("oracle: search node cap exceeded");
            std::size_t mark = trail.size();
            a[var] = val;
            bool ok = true;
            for (auto ci : watch[var])
                if (!propagate(net.constraints[ci])) {
                    ok = false;
                    break;
                }
            if (ok) self(self, var + 1);
            a[var] = kUnassigned;
            while (trail.size() > mark) {
                dom[trail.back().first] = trail.back().second;
                trail.pop_back();
            }
            if (stop) return;
        }
    };
    dfs(dfs, 0);
}

inline Network network_of(const RelationalTemplate& t, const CspInstance& inst) {
    inst.validate(t);
    Network net;
    net.domains.assign(static_cast<std::size_t>(inst.size()), ElementSet::full(t.domain_size()));
    for (const auto& c : inst.constraints) {
        const Relation* rel = &t.relation(c.relation);
        net.constraints.push_back({c.scope, [rel](std::span<const Element> v) { return rel->contains(v); }});
    }
    return net;
}

}  // namespace detail

inline std::optional<Assignment> oracle_solve(const RelationalTemplate& t, const CspInstance& inst,
                                              const OracleOptions& opt = {}) {
    std::optional<Assignment> found;
    detail::search_network(detail::network_of(t, inst), opt, [&](const Assignment& a) {
        found = a;
        return false;
    });
    return found;
}

/// Every solution, in lexicographic order. Throws resource_limit past cap.
inline std::vector<Assignment> solution_set(const RelationalTemplate& t, const CspInstance& inst,
                                            std::size_t cap = 1 << 20, const OracleOptions& opt = {}) {
    std::vector<Assignment> out;
    detail::search_network(detail::network_of(t, inst), opt, [&](const Assignment& a) {
        if (out.size() == cap) throw resource_limit("solution set exceeds the cap of " + std::to_string(cap));
        out.push_back(a);
        return true;
    });
    return out;
}

}  // namespace fewsub

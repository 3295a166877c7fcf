#pragma once

// Breadth-first enumeration of the n-ary term operations of an algebra,
// deduplicated by table. Shared by affine-module recognition and the
// absorption search.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fewsub/algebra.hpp"

namespace fewsub {

struct TermTable {
    Term term;
    std::vector<Element> table;  // row-major over size^arity arguments
    int depth = 0;
};

struct CloneFragment {
    int arity = 0;
    std::vector<TermTable> tables;  // BFS order: by depth, then discovery
    bool saturated = false;         // true when every n-ary term operation is listed
};

struct CloneLimits {
    int depth_bound = 3;
    bool run_to_saturation = false;  // ignore depth_bound and continue until no new tables appear
    std::size_t table_cap = 4096;
    std::uint64_t work_cap = 50'000'000;  // table entries computed
};

namespace detail {

struct TableHash {
    std::size_t operator()(const std::vector<Element>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto e : v) {
            h ^= static_cast<std::uint64_t>(e) + 0x9e3779b97f4a7c15ULL;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace detail

inline CloneFragment enumerate_clone(const FiniteAlgebra& alg, int arity, const CloneLimits& limits = {}) {
    CloneFragment out;
    out.arity = arity;
    auto entries = static_cast<std::size_t>(detail::checked_power(static_cast<std::uint64_t>(alg.size()), arity,
                                                                  detail::kMaxTableEntries));
    std::unordered_map<std::vector<Element>, std::size_t, detail::TableHash> seen;

    for (int v = 0; v < arity; ++v) {
        TermTable t{Term::variable(arity, v), std::vector<Element>(entries), 0};
        std::vector<Element> args(static_cast<std::size_t>(arity), 0);
        for (std::size_t i = 0; i < entries; ++i) {
            t.table[i] = args[v];
            for (int p = arity - 1; p >= 0; --p) {
                if (++args[p] < alg.size()) break;
                args[p] = 0;
            }
        }
        if (seen.emplace(t.table, out.tables.size()).second) out.tables.push_back(std::move(t));
    }

    std::uint64_t work = 0;
    std::size_t level_start = 0;
    for (int depth = 1;; ++depth) {
        if (!limits.run_to_saturation && depth > limits.depth_bound) return out;
        std::size_t level_end = out.tables.size();
        std::vector<TermTable> fresh;
        for (std::size_t k = 0; k < alg.ops().size(); ++k) {
            const auto& op = alg.op(k);
            std::vector<std::size_t> idx(static_cast<std::size_t>(op.arity), 0);
            std::vector<Element> args(idx.size());
            while (true) {
                bool new_input = false;
                for (auto i : idx) new_input = new_input || i >= level_start;
                if (new_input) {
                    work += entries;
                    if (work > limits.work_cap) return out;
                    std::vector<Element> table(entries);
                    for (std::size_t e = 0; e < entries; ++e) {
                        for (std::size_t i = 0; i < idx.size(); ++i) args[i] = out.tables[idx[i]].table[e];
                        table[e] = op(args);
                    }
                    if (!seen.count(table)) {
                        std::vector<Term> kids;
                        for (auto i : idx) kids.push_back(out.tables[i].term);
                        seen.emplace(table, level_end + fresh.size());
                        fresh.push_back(TermTable{Term::apply(static_cast<int>(k), std::move(kids)), std::move(table), depth});
                        if (level_end + fresh.size() > limits.table_cap) {
                            for (auto& f : fresh) out.tables.push_back(std::move(f));
                            return out;
                        }
                    }
                }
                int p = op.arity - 1;
                for (; p >= 0; --p) {
                    if (++idx[p] < level_end) break;
                    idx[p] = 0;
                }
                if (p < 0) break;
            }
        }
        if (fresh.empty()) {
            out.saturated = true;
            return out;
        }
        level_start = level_end;
        for (auto& f : fresh) out.tables.push_back(std::move(f));
    }
}

}  // namespace fewsub

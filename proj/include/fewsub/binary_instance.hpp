#pragma once

// Syntactically simple instances: one domain per variable inside a shared
// ambient algebra, and at most one binary constraint per pair of variables,
// stored as row bitsets in both directions.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/algebra.hpp"
#include "fewsub/element_set.hpp"

namespace fewsub {

class BinaryInstance {
public:
    BinaryInstance() = default;

    BinaryInstance(std::shared_ptr<const FiniteAlgebra> alg, std::vector<std::string> names)
        : alg_(std::move(alg)), names_(std::move(names)) {
        if (!alg_) throw precondition_error("binary instance needs an algebra");
        d_ = alg_->size();
        if (d_ > kMaxDomain)
            throw resource_limit("ambient algebra of size " + std::to_string(d_) + " exceeds the domain cap of " +
                                 std::to_string(kMaxDomain));
        n_ = static_cast<int>(names_.size());
        domains_.assign(static_cast<std::size_t>(n_), ElementSet::full(d_));
        has_.assign(static_cast<std::size_t>(n_) * n_, 0);
        rows_.assign(static_cast<std::size_t>(n_) * n_ * d_, ElementSet{});
    }

    [[nodiscard]] const FiniteAlgebra& algebra() const { return *alg_; }
    [[nodiscard]] const std::shared_ptr<const FiniteAlgebra>& algebra_ptr() const { return alg_; }
    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] int universe_size() const { return d_; }
    [[nodiscard]] const std::string& name(int x) const { return names_.at(x); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

    [[nodiscard]] ElementSet domain(int x) const { return domains_[x]; }
    [[nodiscard]] const std::vector<ElementSet>& domains() const { return domains_; }

    [[nodiscard]] bool has(int x, int y) const { return has_[idx(x, y)] != 0; }

    /// {b : (a,b) in R_{x,y}}; for an absent constraint, S_y when a in S_x.
    [[nodiscard]] ElementSet row(int x, int y, Element a) const {
        if (has(x, y)) return rows_[idx(x, y) * d_ + a];
        return domains_[x].contains(a) ? domains_[y] : ElementSet{};
    }

    /// Rows of a present constraint R_{x,y}, indexed by the element of S_x.
    [[nodiscard]] const ElementSet* rows(int x, int y) const { return &rows_[idx(x, y) * d_]; }

    [[nodiscard]] bool related(int x, int y, Element a, Element b) const { return row(x, y, a).contains(b); }

    /// Relational image R+_{x,y}(A).
    [[nodiscard]] ElementSet image(int x, int y, ElementSet a_set) const {
        ElementSet out;
        for (auto a : a_set & domains_[x]) out = out | row(x, y, a);
        return out;
    }

    [[nodiscard]] PairRelation relation(int x, int y) const {
        PairRelation out;
        for (auto a : domains_[x])
            for (auto b : row(x, y, a)) out.emplace_back(a, b);
        return out;
    }

    [[nodiscard]] std::size_t pair_count(int x, int y) const {
        std::size_t c = 0;
        for (auto a : domains_[x]) c += static_cast<std::size_t>(row(x, y, a).size());
        return c;
    }

    /// Replaces R_{x,y} (and its converse) by the given pairs, clipped to the domains.
    void set_relation(int x, int y, const PairRelation& pairs) {
        if (x == y) throw precondition_error("binary constraints need two distinct variables");
        clear_rows(x, y);
        has_[idx(x, y)] = has_[idx(y, x)] = 1;
        for (auto [a, b] : pairs)
            if (domains_[x].contains(a) && domains_[y].contains(b)) {
                rows_[idx(x, y) * d_ + a].insert(b);
                rows_[idx(y, x) * d_ + b].insert(a);
            }
    }

    /// Intersects R_{x,y} with the given pairs (adds the constraint if absent).
    void intersect_relation(int x, int y, const PairRelation& pairs) {
        if (!has(x, y)) {
            set_relation(x, y, pairs);
            return;
        }
        PairRelation kept;
        for (auto [a, b] : pairs)
            if (related(x, y, a, b)) kept.emplace_back(a, b);
        set_relation(x, y, kept);
    }

    void set_full(int x, int y) {
        has_[idx(x, y)] = has_[idx(y, x)] = 1;
        clear_rows(x, y);
        for (auto a : domains_[x]) rows_[idx(x, y) * d_ + a] = domains_[y];
        for (auto b : domains_[y]) rows_[idx(y, x) * d_ + b] = domains_[x];
    }

    /// Sets row a of R_{x,y} (a subset of the current row) and updates the converse.
    void shrink_row(int x, int y, Element a, ElementSet keep) {
        auto& r = rows_[idx(x, y) * d_ + a];
        for (auto b : r - keep) rows_[idx(y, x) * d_ + b].erase(a);
        r = r & keep;
    }

    /// Restricts S_x to s (intersected with the current domain) and clips every constraint at x.
    void restrict_domain(int x, ElementSet s) {
        ElementSet removed = domains_[x] - s;
        if (removed.empty()) return;
        domains_[x] = domains_[x] - removed;
        for (int y = 0; y < n_; ++y) {
            if (y == x || !has(x, y)) continue;
            for (auto a : removed) rows_[idx(x, y) * d_ + a] = ElementSet{};
            for (auto b : domains_[y]) {
                auto& r = rows_[idx(y, x) * d_ + b];
                r = r - removed;
            }
        }
    }

    bool operator==(const BinaryInstance& o) const {
        if (n_ != o.n_ || d_ != o.d_ || domains_ != o.domains_) return false;
        for (int x = 0; x < n_; ++x)
            for (int y = 0; y < n_; ++y) {
                if (x == y) continue;
                for (auto a : domains_[x])
                    if (row(x, y, a) != o.row(x, y, a)) return false;
            }
        return true;
    }

    [[nodiscard]] bool any_empty() const {
        for (const auto& d : domains_)
            if (d.empty()) return true;
        return false;
    }

    [[nodiscard]] std::size_t total_domain_size() const {
        std::size_t s = 0;
        for (const auto& d : domains_) s += static_cast<std::size_t>(d.size());
        return s;
    }

private:
    [[nodiscard]] std::size_t idx(int x, int y) const { return static_cast<std::size_t>(x) * n_ + y; }

    void clear_rows(int x, int y) {
        for (int a = 0; a < d_; ++a) {
            rows_[idx(x, y) * d_ + a] = ElementSet{};
            rows_[idx(y, x) * d_ + a] = ElementSet{};
        }
    }

    std::shared_ptr<const FiniteAlgebra> alg_;
    std::vector<std::string> names_;
    int n_ = 0;
    int d_ = 0;
    std::vector<ElementSet> domains_;
    std::vector<char> has_;
    std::vector<ElementSet> rows_;
};

}  // namespace fewsub

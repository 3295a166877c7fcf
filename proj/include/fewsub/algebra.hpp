#pragma once

// Finite idempotent algebras given by full operation tables, and the
// structure theory the solver needs: terms, subuniverses, congruences,
// quotients, powers, isomorphisms and linkedness congruences.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/element_set.hpp"
#include "fewsub/error.hpp"

namespace fewsub {

namespace detail {

inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

inline std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (int i = 0; i < exponent; ++i) {
        r *= base;
        if (r > cap)
            throw resource_limit("table with " + std::to_string(base) + "^" + std::to_string(exponent) +
                                 " entries is too large");
    }
    return r;
}

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    /// Returns true when a and b were in different classes.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

    std::vector<int> labels() {
        std::vector<int> out(parent_.size());
        for (std::size_t i = 0; i < parent_.size(); ++i) out[i] = find(static_cast<int>(i));
        return out;
    }

private:
    std::vector<int> parent_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Operation tables and algebras
// ---------------------------------------------------------------------------

/// A total operation on {0, ..., size-1}, stored dense in row-major order:
/// the first argument is the most significant digit of the index.
struct OperationTable {
    std::string name;
    int arity = 0;
    int size = 0;
    std::vector<Element> entries;

    [[nodiscard]] std::size_t index_of(std::span<const Element> args) const {
        std::size_t idx = 0;
        for (auto a : args) idx = idx * static_cast<std::size_t>(size) + static_cast<std::size_t>(a);
        return idx;
    }

    [[nodiscard]] Element operator()(std::span<const Element> args) const { return entries[index_of(args)]; }

    [[nodiscard]] Element operator()(std::initializer_list<Element> args) const {
        return (*this)(std::span<const Element>(args.begin(), args.size()));
    }

    /// Builds a table by evaluating fn on every argument tuple.
    template <typename Fn>
    static OperationTable from_function(std::string name, int arity, int size, Fn&& fn) {
        OperationTable t{std::move(name), arity, size, {}};
        auto total = detail::checked_power(static_cast<std::uint64_t>(size), arity, detail::kMaxTableEntries);
        t.entries.resize(total);
        std::vector<Element> args(static_cast<std::size_t>(arity), 0);
        for (std::uint64_t i = 0; i < total; ++i) {
            t.entries[i] = fn(std::span<const Element>(args));
            for (int p = arity - 1; p >= 0; --p) {
                if (++args[p] < size) break;
                args[p] = 0;
            }
        }
        return t;
    }
};

class FiniteAlgebra {
public:
    FiniteAlgebra() = default;

    FiniteAlgebra(std::string name, int size, std::vector<OperationTable> ops)
        : name_(std::move(name)), size_(size), ops_(std::move(ops)) {
        validate();
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] int size() const { return size_; }
    [[nodiscard]] const std::vector<OperationTable>& ops() const { return ops_; }
    [[nodiscard]] const OperationTable& op(std::size_t i) const { return ops_.at(i); }

    /// Same number of operations with the same arities, in order.
    [[nodiscard]] bool same_signature(const FiniteAlgebra& other) const {
        if (ops_.size() != other.ops_.size()) return false;
        for (std::size_t i = 0; i < ops_.size(); ++i)
            if (ops_[i].arity != other.ops_[i].arity) return false;
        return true;
    }

private:
    void validate() const {
        if (size_ < 1) throw malformed_input("algebra '" + name_ + "' must have a nonempty universe");
        for (const auto& op : ops_) {
            if (op.arity < 1) throw malformed_input("operation '" + op.name + "' must have arity >= 1");
            if (op.size != size_)
                throw malformed_input("operation '" + op.name + "' is defined on a universe of the wrong size");
            auto expected =
                detail::checked_power(static_cast<std::uint64_t>(size_), op.arity, detail::kMaxTableEntries);
            if (op.entries.size() != expected)
                throw malformed_input("operation '" + op.name + "' needs " + std::to_string(expected) +
                                      " table entries, got " + std::to_string(op.entries.size()));
            for (auto v : op.entries)
                if (v < 0 || v >= size_)
                    throw malformed_input("operation '" + op.name + "' has an entry outside the universe");
            std::vector<Element> diag(static_cast<std::size_t>(op.arity));
            for (Element a = 0; a < size_; ++a) {
                std::fill(diag.begin(), diag.end(), a);
                if (op(diag) != a)
                    throw malformed_input("operation '" + op.name + "' is not idempotent at " + std::to_string(a));
            }
        }
    }

    std::string name_;
    int size_ = 0;
    std::vector<OperationTable> ops_;
};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A term over the signature of some algebra: leaves are variable indices,
/// internal nodes name a basic operation by index.
class Term {
public:
    Term() = default;

    static Term variable(int arity, int index) {
        Term t;
        t.arity_ = arity;
        t.var_ = index;
        return t;
    }

    /// op(children...). All children must share the same arity.
    static Term apply(int op, std::vector<Term> children) {
        Term t;
        t.op_ = op;
        t.arity_ = children.empty() ? 0 : children.front().arity_;
        for (const auto& c : children)
            if (c.arity_ != t.arity_) throw malformed_input("malformed term: children of differing arity");
        t.children_ = std::move(children);
        return t;
    }

    /// The basic operation op applied to the variables x0, ..., x(n-1) in order.
    static Term basic(int op, int arity) {
        std::vector<Term> vars;
        for (int i = 0; i < arity; ++i) vars.push_back(variable(arity, i));
        return apply(op, std::move(vars));
    }

    [[nodiscard]] int arity() const { return arity_; }
    [[nodiscard]] bool is_variable() const { return var_ >= 0; }
    [[nodiscard]] int variable_index() const { return var_; }
    [[nodiscard]] int op() const { return op_; }
    [[nodiscard]] const std::vector<Term>& children() const { return children_; }

    [[nodiscard]] int depth() const {
        int d = 0;
        for (const auto& c : children_) d = std::max(d, c.depth());
        return is_variable() ? 0 : d + 1;
    }

    /// Substitutes the given terms for the variables; all replacements share one arity.
    [[nodiscard]] Term substitute(const std::vector<Term>& replacement) const {
        if (is_variable()) return replacement.at(static_cast<std::size_t>(var_));
        std::vector<Term> kids;
        kids.reserve(children_.size());
        for (const auto& c : children_) kids.push_back(c.substitute(replacement));
        return apply(op_, std::move(kids));
    }

    [[nodiscard]] std::string to_string(const FiniteAlgebra* alg = nullptr) const {
        if (is_variable()) return "x" + std::to_string(var_);
        std::string s = alg && op_ >= 0 && static_cast<std::size_t>(op_) < alg->ops().size()
                            ? alg->op(static_cast<std::size_t>(op_)).name
                            : "f" + std::to_string(op_);
        s += "(";
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (i) s += ",";
            s += children_[i].to_string(alg);
        }
        return s + ")";
    }

    bool operator==(const Term&) const = default;

private:
    int arity_ = 0;
    int var_ = -1;
    int op_ = -1;
    std::vector<Term> children_;
};

namespace detail {

inline void check_term(const FiniteAlgebra& alg, const Term& t, int arity) {
    if (t.is_variable()) {
        if (t.variable_index() >= arity) throw malformed_input("malformed term: variable index out of range");
        return;
    }
    if (t.op() < 0 || static_cast<std::size_t>(t.op()) >= alg.ops().size())
        throw malformed_input("malformed term: unknown operation");
    if (static_cast<int>(t.children().size()) != alg.op(static_cast<std::size_t>(t.op())).arity)
        throw malformed_input("malformed term: operation applied to the wrong number of arguments");
    for (const auto& c : t.children()) check_term(alg, c, arity);
}

inline Element eval_unchecked(const FiniteAlgebra& alg, const Term& t, std::span<const Element> args) {
    if (t.is_variable()) return args[static_cast<std::size_t>(t.variable_index())];
    const auto& op = alg.op(static_cast<std::size_t>(t.op()));
    Element buf[16];
    std::vector<Element> heap;
    Element* vals = buf;
    if (t.children().size() > 16) {
        heap.resize(t.children().size());
        vals = heap.data();
    }
    for (std::size_t i = 0; i < t.children().size(); ++i) vals[i] = eval_unchecked(alg, t.children()[i], args);
    return op(std::span<const Element>(vals, t.children().size()));
}

}  // namespace detail

/// Value of the term operation t^A at args.
inline Element evaluate_term(const FiniteAlgebra& alg, const Term& t, std::span<const Element> args) {
    if (static_cast<int>(args.size()) != t.arity())
        throw malformed_input("malformed term: expected " + std::to_string(t.arity()) + " arguments, got " +
                              std::to_string(args.size()));
    detail::check_term(alg, t, t.arity());
    for (auto a : args)
        if (a < 0 || a >= alg.size()) throw malformed_input("argument outside the universe");
    return detail::eval_unchecked(alg, t, args);
}

inline Element evaluate_term(const FiniteAlgebra& alg, const Term& t, std::initializer_list<Element> args) {
    return evaluate_term(alg, t, std::span<const Element>(args.begin(), args.size()));
}

/// The full table of the term operation t^A.
inline OperationTable term_table(const FiniteAlgebra& alg, const Term& t, std::string name = "t") {
    detail::check_term(alg, t, t.arity());
    return OperationTable::from_function(std::move(name), t.arity(), alg.size(),
                                         [&](std::span<const Element> a) { return detail::eval_unchecked(alg, t, a); });
}

using Tuple = std::vector<Element>;

/// f^(k): applies a basic operation coordinatewise to k-tuples.
inline Tuple coordinatewise_apply(const FiniteAlgebra& alg, std::size_t op_index, const std::vector<Tuple>& tuples) {
    const auto& op = alg.ops().at(op_index);
    if (static_cast<int>(tuples.size()) != op.arity)
        throw malformed_input("coordinatewise application needs " + std::to_string(op.arity) + " tuples");
    std::size_t k = tuples.empty() ? 0 : tuples.front().size();
    for (const auto& t : tuples)
        if (t.size() != k) throw malformed_input("coordinatewise application on tuples of different lengths");
    Tuple out(k);
    std::vector<Element> args(tuples.size());
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < tuples.size(); ++i) args[i] = tuples[i][c];
        out[c] = op(args);
    }
    return out;
}

/// t^(k): applies a term coordinatewise to k-tuples.
inline Tuple coordinatewise_apply(const FiniteAlgebra& alg, const Term& term, const std::vector<Tuple>& tuples) {
    if (static_cast<int>(tuples.size()) != term.arity())
        throw malformed_input("coordinatewise application needs " + std::to_string(term.arity()) + " tuples");
    std::size_t k = tuples.empty() ? 0 : tuples.front().size();
    for (const auto& t : tuples)
        if (t.size() != k) throw malformed_input("coordinatewise application on tuples of different lengths");
    detail::check_term(alg, term, term.arity());
    Tuple out(k);
    std::vector<Element> args(tuples.size());
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < tuples.size(); ++i) args[i] = tuples[i][c];
        out[c] = detail::eval_unchecked(alg, term, args);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Powers and subalgebras
// ---------------------------------------------------------------------------

/// Mixed-radix code of a tuple over {0..base-1}; first coordinate most significant.
inline Element encode_tuple(int base, std::span<const Element> tuple) {
    Element code = 0;
    for (auto v : tuple) code = code * base + v;
    return code;
}

inline Tuple decode_tuple(int base, int length, Element code) {
    Tuple t(static_cast<std::size_t>(length));
    for (int i = length - 1; i >= 0; --i) {
        t[i] = code % base;
        code /= base;
    }
    return t;
}

/// A^k with coordinatewise operations; elements are tuple codes.
inline FiniteAlgebra power(const FiniteAlgebra& alg, int k) {
    if (k < 1) throw precondition_error("power exponent must be positive");
    auto n = detail::checked_power(static_cast<std::uint64_t>(alg.size()), k, detail::kMaxTableEntries);
    int size = static_cast<int>(n);
    std::vector<Tuple> decoded(n);
    for (int e = 0; e < size; ++e) decoded[e] = decode_tuple(alg.size(), k, e);
    std::vector<OperationTable> ops;
    for (const auto& op : alg.ops()) {
        std::vector<Element> coord(static_cast<std::size_t>(op.arity));
        Tuple out(static_cast<std::size_t>(k));
        ops.push_back(OperationTable::from_function(op.name, op.arity, size, [&](std::span<const Element> args) {
            for (int c = 0; c < k; ++c) {
                for (int i = 0; i < op.arity; ++i) coord[i] = decoded[args[i]][c];
                out[c] = op(coord);
            }
            return encode_tuple(alg.size(), out);
        }));
    }
    return FiniteAlgebra(alg.name() + "^" + std::to_string(k), size, std::move(ops));
}

/// A subalgebra re-indexed to 0..n-1, with the maps back to the parent.
struct Subalgebra {
    FiniteAlgebra algebra;
    std::vector<Element> elements;  // local index -> parent element, ascending
    std::vector<int> local;         // parent element -> local index, or -1
};

inline Subalgebra subalgebra(const FiniteAlgebra& parent, std::span<const Element> elements) {
    Subalgebra s;
    s.elements.assign(elements.begin(), elements.end());
    std::sort(s.elements.begin(), s.elements.end());
    s.elements.erase(std::unique(s.elements.begin(), s.elements.end()), s.elements.end());
    if (s.elements.empty()) throw precondition_error("a subalgebra needs a nonempty universe");
    s.local.assign(static_cast<std::size_t>(parent.size()), -1);
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        if (s.elements[i] < 0 || s.elements[i] >= parent.size())
            throw malformed_input("subalgebra element outside the universe");
        s.local[s.elements[i]] = static_cast<int>(i);
    }
    int n = static_cast<int>(s.elements.size());
    std::vector<OperationTable> ops;
    for (const auto& op : parent.ops()) {
        std::vector<Element> up(static_cast<std::size_t>(op.arity));
        ops.push_back(OperationTable::from_function(op.name, op.arity, n, [&](std::span<const Element> args) {
            for (int i = 0; i < op.arity; ++i) up[i] = s.elements[args[i]];
            int r = s.local[op(up)];
            if (r < 0) throw precondition_error("subset is not closed under '" + op.name + "'");
            return r;
        }));
    }
    s.algebra = FiniteAlgebra(parent.name() + "|sub", n, std::move(ops));
    return s;
}

inline Subalgebra subalgebra(const FiniteAlgebra& parent, ElementSet elements) {
    auto v = elements.to_vector();
    return subalgebra(parent, std::span<const Element>(v));
}

// ---------------------------------------------------------------------------
// Subuniverses
// ---------------------------------------------------------------------------

struct Subuniverse {
    std::vector<Element> elements;  // ascending

    [[nodiscard]] bool contains(Element e) const { return std::binary_search(elements.begin(), elements.end(), e); }
    bool operator==(const Subuniverse&) const = default;
};

/// Least subuniverse containing the generators.
inline Subuniverse generate_subuniverse(const FiniteAlgebra& alg, std::span<const Element> generators) {
    if (generators.empty()) throw precondition_error("subuniverse generation needs at least one generator");
    std::vector<char> member(static_cast<std::size_t>(alg.size()), 0);
    std::vector<Element> list;
    for (auto g : generators) {
        if (g < 0 || g >= alg.size()) throw malformed_input("generator outside the universe");
        if (!member[g]) {
            member[g] = 1;
            list.push_back(g);
        }
    }
    // Semi-naive closure: each round only evaluates tuples touching the previous round's additions.
    std::size_t fresh_from = 0;
    while (fresh_from < list.size()) {
        std::size_t end = list.size();
        for (const auto& op : alg.ops()) {
            std::vector<std::size_t> idx(static_cast<std::size_t>(op.arity), 0);
            std::vector<Element> args(static_cast<std::size_t>(op.arity));
            while (true) {
                bool touches_fresh = false;
                for (int i = 0; i < op.arity; ++i) {
                    args[i] = list[idx[i]];
                    touches_fresh = touches_fresh || idx[i] >= fresh_from;
                }
                if (touches_fresh) {
                    Element r = op(args);
                    if (!member[r]) {
                        member[r] = 1;
                        list.push_back(r);
                    }
                }
                int p = op.arity - 1;
                for (; p >= 0; --p) {
                    if (++idx[p] < end) break;
                    idx[p] = 0;
                }
                if (p < 0) break;
            }
        }
        fresh_from = end;
    }
    std::sort(list.begin(), list.end());
    return Subuniverse{std::move(list)};
}

inline Subuniverse generate_subuniverse(const FiniteAlgebra& alg, std::initializer_list<Element> generators) {
    return generate_subuniverse(alg, std::span<const Element>(generators.begin(), generators.size()));
}

/// Bitset form of generate_subuniverse for universes of at most 64 elements.
inline ElementSet close_set(const FiniteAlgebra& alg, ElementSet generators) {
    if (generators.empty()) return generators;
    auto v = generators.to_vector();
    return ElementSet::of(generate_subuniverse(alg, std::span<const Element>(v)).elements);
}

inline bool is_subuniverse(const FiniteAlgebra& alg, ElementSet set) {
    return !set.empty() && close_set(alg, set) == set;
}

// ---------------------------------------------------------------------------
// Congruences
// ---------------------------------------------------------------------------

/// A partition of the universe, stored as element -> block id with blocks
/// numbered in order of their least element.
class Congruence {
public:
    Congruence() = default;

    explicit Congruence(std::vector<int> labels) : block_of_(std::move(labels)) { canonicalize(); }

    static Congruence identity(int n) {
        std::vector<int> v(static_cast<std::size_t>(n));
        std::iota(v.begin(), v.end(), 0);
        return Congruence(std::move(v));
    }

    static Congruence full(int n) { return Congruence(std::vector<int>(static_cast<std::size_t>(n), 0)); }

    [[nodiscard]] int size() const { return static_cast<int>(block_of_.size()); }
    [[nodiscard]] int block_count() const { return block_count_; }
    [[nodiscard]] int block(Element e) const { return block_of_[e]; }
    [[nodiscard]] bool related(Element a, Element b) const { return block_of_[a] == block_of_[b]; }
    [[nodiscard]] const std::vector<int>& block_map() const { return block_of_; }
    [[nodiscard]] bool is_identity() const { return block_count_ == size(); }
    [[nodiscard]] bool is_full() const { return block_count_ <= 1; }

    [[nodiscard]] std::vector<std::vector<Element>> blocks() const {
        std::vector<std::vector<Element>> out(static_cast<std::size_t>(block_count_));
        for (int e = 0; e < size(); ++e) out[block_of_[e]].push_back(e);
        return out;
    }

    /// this <= other in the congruence lattice.
    [[nodiscard]] bool refines(const Congruence& other) const {
        std::vector<int> image(static_cast<std::size_t>(block_count_), -1);
        for (int e = 0; e < size(); ++e) {
            int& slot = image[block_of_[e]];
            if (slot < 0) slot = other.block_of_[e];
            else if (slot != other.block_of_[e]) return false;
        }
        return true;
    }

    [[nodiscard]] Congruence join(const Congruence& other) const {
        detail::UnionFind uf(size());
        std::vector<int> rep_a(static_cast<std::size_t>(block_count_), -1);
        std::vector<int> rep_b(static_cast<std::size_t>(other.block_count_), -1);
        for (int e = 0; e < size(); ++e) {
            int& ra = rep_a[block_of_[e]];
            if (ra < 0) ra = e; else uf.unite(ra, e);
            int& rb = rep_b[other.block_of_[e]];
            if (rb < 0) rb = e; else uf.unite(rb, e);
        }
        return Congruence(uf.labels());
    }

    bool operator==(const Congruence& o) const { return block_of_ == o.block_of_; }
    auto operator<=>(const Congruence& o) const { return block_of_ <=> o.block_of_; }

    [[nodiscard]] std::string to_string() const {
        std::string s;
        for (const auto& b : blocks()) {
            s += "{";
            for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
            s += "}";
        }
        return s;
    }

private:
    void canonicalize() {
        std::map<int, int> rename;
        for (auto& b : block_of_) {
            auto [it, inserted] = rename.emplace(b, static_cast<int>(rename.size()));
            b = it->second;
        }
        block_count_ = static_cast<int>(rename.size());
    }

    std::vector<int> block_of_;
    int block_count_ = 0;
};

/// Independent compatibility check: every basic operation maps related
/// argument tuples (differing in one coordinate) to related results.
inline bool is_compatible(const FiniteAlgebra& alg, const Congruence& theta) {
    if (theta.size() != alg.size()) return false;
    int n = alg.size();
    for (const auto& op : alg.ops()) {
        std::vector<Element> args(static_cast<std::size_t>(op.arity));
        for (int pos = 0; pos < op.arity; ++pos) {
            for (Element u = 0; u < n; ++u) {
                for (Element v = u + 1; v < n; ++v) {
                    if (!theta.related(u, v)) continue;
                    // Enumerate the remaining coordinates.
                    std::vector<Element> rest(static_cast<std::size_t>(op.arity - 1), 0);
                    while (true) {
                        for (int i = 0, j = 0; i < op.arity; ++i)
                            if (i != pos) args[i] = rest[j++];
                        args[pos] = u;
                        Element fu = op(args);
                        args[pos] = v;
                        if (!theta.related(fu, op(args))) return false;
                        int p = op.arity - 2;
                        for (; p >= 0; --p) {
                            if (++rest[p] < n) break;
                            rest[p] = 0;
                        }
                        if (p < 0) break;
                    }
                }
            }
        }
    }
    return true;
}

/// Least congruence containing the given pairs: merge, then push every merge
/// through all basic translations until nothing new is identified.
inline Congruence generate_congruence(const FiniteAlgebra& alg, const std::vector<std::pair<Element, Element>>& pairs) {
    int n = alg.size();
    detail::UnionFind uf(n);
    std::vector<std::pair<Element, Element>> queue;
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw malformed_input("congruence generator outside the universe");
        if (uf.unite(a, b)) queue.emplace_back(a, b);
    }
    std::vector<Element> args;
    while (!queue.empty()) {
        auto [u, v] = queue.back();
        queue.pop_back();
        for (const auto& op : alg.ops()) {
            args.assign(static_cast<std::size_t>(op.arity), 0);
            std::vector<Element> rest(static_cast<std::size_t>(op.arity - 1), 0);
            for (int pos = 0; pos < op.arity; ++pos) {
                std::fill(rest.begin(), rest.end(), 0);
                while (true) {
                    for (int i = 0, j = 0; i < op.arity; ++i)
                        if (i != pos) args[i] = rest[j++];
                    args[pos] = u;
                    Element fu = op(args);
                    args[pos] = v;
                    Element fv = op(args);
                    if (uf.unite(fu, fv)) queue.emplace_back(fu, fv);
                    int p = op.arity - 2;
                    for (; p >= 0; --p) {
                        if (++rest[p] < n) break;
                        rest[p] = 0;
                    }
                    if (p < 0) break;
                }
            }
        }
    }
    return Congruence(uf.labels());
}

inline constexpr int kDefaultCongruenceCap = 12;
inline constexpr std::size_t kCongruenceLatticeCap = 20000;

inline void check_congruence_cap(const FiniteAlgebra& alg, int cap) {
    if (alg.size() > cap)
        throw resource_limit("congruence enumeration on '" + alg.name() + "' of size " + std::to_string(alg.size()) +
                             " exceeds the cap of " + std::to_string(cap));
}

/// Every congruence, as joins of principal congruences. Sorted by block map.
inline std::vector<Congruence> all_congruences(const FiniteAlgebra& alg, int cap = kDefaultCongruenceCap) {
    check_congruence_cap(alg, cap);
    int n = alg.size();
    std::set<Congruence> principals;
    for (Element a = 0; a < n; ++a)
        for (Element b = a + 1; b < n; ++b) principals.insert(generate_congruence(alg, {{a, b}}));
    std::set<Congruence> lattice{Congruence::identity(n)};
    for (const auto& p : principals) {
        std::vector<Congruence> add;
        for (const auto& c : lattice) add.push_back(c.join(p));
        lattice.insert(add.begin(), add.end());
        if (lattice.size() > kCongruenceLatticeCap)
            throw resource_limit("congruence lattice of '" + alg.name() + "' exceeds " +
                                 std::to_string(kCongruenceLatticeCap) + " members");
    }
    return {lattice.begin(), lattice.end()};
}

/// Coatoms of the congruence lattice; empty for a one-element algebra.
inline std::vector<Congruence> maximal_congruences(const FiniteAlgebra& alg, int cap = kDefaultCongruenceCap) {
    auto all = all_congruences(alg, cap);
    std::vector<Congruence> out;
    for (const auto& c : all) {
        if (c.is_full()) continue;
        bool maximal = true;
        for (const auto& d : all) {
            if (d == c || d.is_full()) continue;
            if (c.refines(d)) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(c);
    }
    return out;
}

inline bool is_simple(const FiniteAlgebra& alg, int cap = kDefaultCongruenceCap) {
    if (alg.size() < 2) throw degenerate_algebra("simplicity is undefined for the one-element algebra");
    check_congruence_cap(alg, cap);
    for (Element a = 0; a < alg.size(); ++a)
        for (Element b = a + 1; b < alg.size(); ++b)
            if (!generate_congruence(alg, {{a, b}}).is_full()) return false;
    return true;
}

struct Quotient {
    FiniteAlgebra algebra;
    std::vector<int> block_of;  // element -> quotient element
};

inline Quotient quotient(const FiniteAlgebra& alg, const Congruence& theta) {
    if (theta.size() != alg.size()) throw precondition_error("partition size does not match the algebra");
    if (!is_compatible(alg, theta)) throw precondition_error("partition is not compatible with the operations");
    auto blocks = theta.blocks();
    std::vector<OperationTable> ops;
    for (const auto& op : alg.ops()) {
        std::vector<Element> rep(static_cast<std::size_t>(op.arity));
        ops.push_back(OperationTable::from_function(op.name, op.arity, theta.block_count(),
                                                    [&](std::span<const Element> args) {
                                                        for (int i = 0; i < op.arity; ++i)
                                                            rep[i] = blocks[args[i]].front();
                                                        return theta.block(op(rep));
                                                    }));
    }
    return Quotient{FiniteAlgebra(alg.name() + "/theta", theta.block_count(), std::move(ops)), theta.block_map()};
}

// ---------------------------------------------------------------------------
// Isomorphisms and linkedness
// ---------------------------------------------------------------------------

/// A bijection a1 -> a2 commuting with all paired operations, if one exists.
inline std::optional<std::vector<Element>> find_isomorphism(const FiniteAlgebra& a1, const FiniteAlgebra& a2) {
    if (!a1.same_signature(a2)) throw precondition_error("isomorphism search needs matching signatures");
    if (a1.size() != a2.size()) return std::nullopt;
    int n = a1.size();
    std::vector<Element> map(static_cast<std::size_t>(n), -1);
    std::vector<char> used(static_cast<std::size_t>(n), 0);

    // Checks every tuple whose arguments and result are already mapped.
    auto consistent = [&](Element upto) {
        for (std::size_t k = 0; k < a1.ops().size(); ++k) {
            const auto& f = a1.op(k);
            const auto& g = a2.op(k);
            std::vector<Element> args(static_cast<std::size_t>(f.arity), 0), img(args.size());
            while (true) {
                bool has_new = false;
                for (int i = 0; i < f.arity; ++i) has_new = has_new || args[i] == upto;
                if (has_new) {
                    Element r = f(args);
                    if (map[r] >= 0) {
                        for (int i = 0; i < f.arity; ++i) img[i] = map[args[i]];
                        if (g(img) != map[r]) return false;
                    }
                }
                int p = f.arity - 1;
                for (; p >= 0; --p) {
                    if (++args[p] <= upto) break;
                    args[p] = 0;
                }
                if (p < 0) break;
            }
        }
        return true;
    };
    auto full_check = [&] {
        for (std::size_t k = 0; k < a1.ops().size(); ++k) {
            const auto& f = a1.op(k);
            const auto& g = a2.op(k);
            std::vector<Element> args(static_cast<std::size_t>(f.arity), 0), img(args.size());
            for (std::size_t idx = 0; idx < f.entries.size(); ++idx) {
                for (int i = 0; i < f.arity; ++i) img[i] = map[args[i]];
                if (g(img) != map[f.entries[idx]]) return false;
                for (int p = f.arity - 1; p >= 0; --p) {
                    if (++args[p] < n) break;
                    args[p] = 0;
                }
            }
        }
        return true;
    };

    auto search = [&](auto&& self, Element e) -> bool {
        if (e == n) return full_check();
        for (Element c = 0; c < n; ++c) {
            if (used[c]) continue;
            map[e] = c;
            used[c] = 1;
            if (consistent(e) && self(self, e + 1)) return true;
            used[c] = 0;
            map[e] = -1;
        }
        return false;
    };
    if (search(search, 0)) return map;
    return std::nullopt;
}

using PairRelation = std::vector<std::pair<Element, Element>>;

/// Linkedness congruences of a subdirect product R <= A x B: a ~ a' when
/// both relate to a common b, transitively closed; dually on B.
inline std::pair<Congruence, Congruence> linkedness_congruences(const PairRelation& rel, const FiniteAlgebra& alg_a,
                                                                const FiniteAlgebra& alg_b) {
    if (rel.empty()) throw precondition_error("linkedness needs a nonempty relation");
    if (!alg_a.same_signature(alg_b)) throw precondition_error("linkedness needs algebras of one signature");
    std::vector<char> proj_a(static_cast<std::size_t>(alg_a.size()), 0), proj_b(static_cast<std::size_t>(alg_b.size()), 0);
    std::set<std::pair<Element, Element>> members;
    for (auto [a, b] : rel) {
        if (a < 0 || a >= alg_a.size() || b < 0 || b >= alg_b.size())
            throw malformed_input("relation pair outside the universes");
        proj_a[a] = proj_b[b] = 1;
        members.emplace(a, b);
    }
    if (std::find(proj_a.begin(), proj_a.end(), 0) != proj_a.end() ||
        std::find(proj_b.begin(), proj_b.end(), 0) != proj_b.end())
        throw precondition_error("relation is not subdirect");
    std::vector<std::pair<Element, Element>> list(members.begin(), members.end());
    for (std::size_t k = 0; k < alg_a.ops().size(); ++k) {
        const auto& f = alg_a.op(k);
        const auto& g = alg_b.op(k);
        std::vector<std::size_t> idx(static_cast<std::size_t>(f.arity), 0);
        std::vector<Element> xa(idx.size()), xb(idx.size());
        while (true) {
            for (int i = 0; i < f.arity; ++i) {
                xa[i] = list[idx[i]].first;
                xb[i] = list[idx[i]].second;
            }
            if (!members.count({f(xa), g(xb)})) throw precondition_error("relation is not closed under the operations");
            int p = f.arity - 1;
            for (; p >= 0; --p) {
                if (++idx[p] < list.size()) break;
                idx[p] = 0;
            }
            if (p < 0) break;
        }
    }
    detail::UnionFind ua(alg_a.size()), ub(alg_b.size());
    std::vector<int> first_a_for_b(static_cast<std::size_t>(alg_b.size()), -1);
    std::vector<int> first_b_for_a(static_cast<std::size_t>(alg_a.size()), -1);
    for (auto [a, b] : list) {
        if (first_a_for_b[b] < 0) first_a_for_b[b] = a; else ua.unite(first_a_for_b[b], a);
        if (first_b_for_a[a] < 0) first_b_for_a[a] = b; else ub.unite(first_b_for_a[a], b);
    }
    Congruence alpha(ua.labels()), beta(ub.labels());
    if (!is_compatible(alg_a, alpha) || !is_compatible(alg_b, beta))
        throw internal_error("linkedness relation is not a congruence");
    return {alpha, beta};
}

}  // namespace fewsub

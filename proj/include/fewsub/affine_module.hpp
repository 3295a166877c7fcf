#pragma once

// Recognition of simple affine modules: find a Maltsev term, check that it
// makes the universe an elementary abelian p-group with every basic operation
// affine, and coordinatize the universe as GF(p)^dim.

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/algebra.hpp"
#include "fewsub/clone.hpp"
#include "fewsub/linear.hpp"

namespace fewsub {

struct AffineCoordinatization {
    PrimeField field;
    int dim = 0;
    Element zero = 0;
    std::vector<std::vector<int>> encode;  // element -> coordinates
    std::vector<Element> decode;           // coordinate code -> element
    Term maltsev;

    [[nodiscard]] int code_of(const std::vector<int>& coords) const {
        int c = 0;
        for (auto v : coords) c = c * field.p() + v;
        return c;
    }

    [[nodiscard]] Element element_of(const std::vector<int>& coords) const { return decode[code_of(coords)]; }
};

struct AffineRecognition {
    std::optional<AffineCoordinatization> coordinatization;
    bool bounded = false;  // negative answer came from a truncated term search

    explicit operator bool() const { return coordinatization.has_value(); }
};

namespace detail {

inline int prime_power_base(int n) {
    if (n < 2) return 0;
    int p = 2;
    while (n % p) ++p;
    while (n % p == 0) n /= p;
    return n == 1 ? p : 0;
}

inline bool is_maltsev_table(const std::vector<Element>& t, int n) {
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (t[(x * n + y) * n + y] != x) return false;
            if (t[(y * n + y) * n + x] != x) return false;
        }
    return true;
}

/// Checks the group and affineness conditions for Maltsev table m and builds coordinates.
inline std::optional<AffineCoordinatization> coordinatize(const FiniteAlgebra& alg, const std::vector<Element>& m,
                                                          int p, const Term& term) {
    int n = alg.size();
    auto M = [&](int x, int y, int z) { return m[(x * n + y) * n + z]; };
    const Element zero = 0;
    auto add = [&](int x, int y) { return M(x, zero, y); };
    auto neg = [&](int x) { return M(zero, x, zero); };
    for (int x = 0; x < n; ++x) {
        if (add(x, zero) != x) return std::nullopt;
        if (add(x, neg(x)) != zero) return std::nullopt;
        int acc = zero;
        for (int i = 0; i < p; ++i) acc = add(acc, x);
        if (acc != zero) return std::nullopt;
        for (int y = 0; y < n; ++y) {
            if (add(x, y) != add(y, x)) return std::nullopt;
            for (int z = 0; z < n; ++z) {
                if (add(add(x, y), z) != add(x, add(y, z))) return std::nullopt;
                if (M(x, y, z) != add(add(x, neg(y)), z)) return std::nullopt;
            }
        }
    }
    // f(u + v) = f(u) + f(v) - f(0) over all pairs of argument tuples.
    for (const auto& op : alg.ops()) {
        std::uint64_t tuples = op.entries.size();
        if (tuples * tuples > (std::uint64_t{1} << 28))
            throw resource_limit("affineness check on '" + op.name + "' is too large");
        Element f0 = op.entries[0];
        std::vector<Element> u(static_cast<std::size_t>(op.arity)), v(u.size()), w(u.size());
        for (std::uint64_t i = 0; i < tuples; ++i) {
            auto ui = decode_tuple(n, op.arity, static_cast<Element>(i));
            for (std::uint64_t j = 0; j < tuples; ++j) {
                auto vj = decode_tuple(n, op.arity, static_cast<Element>(j));
                for (int k = 0; k < op.arity; ++k) w[k] = add(ui[k], vj[k]);
                if (op(w) != M(add(op.entries[i], op.entries[j]), f0, zero)) return std::nullopt;
            }
        }
    }

    AffineCoordinatization c{PrimeField(p), 0, zero, {}, {}, term};
    c.encode.assign(static_cast<std::size_t>(n), {});
    std::vector<char> in_span(static_cast<std::size_t>(n), 0);
    std::vector<Element> span{zero};
    in_span[zero] = 1;
    for (Element e = 0; e < n; ++e) {
        if (in_span[e]) continue;
        for (auto s : span) c.encode[s].push_back(0);
        std::vector<Element> grown = span;
        Element multiple = zero;
        for (int k = 1; k < p; ++k) {
            multiple = add(multiple, e);
            for (auto s : span) {
                Element t = add(s, multiple);
                if (in_span[t]) return std::nullopt;
                in_span[t] = 1;
                c.encode[t] = c.encode[s];
                c.encode[t].back() = k;
                grown.push_back(t);
            }
        }
        span = std::move(grown);
        ++c.dim;
    }
    c.decode.assign(static_cast<std::size_t>(n), -1);
    for (Element e = 0; e < n; ++e) c.decode[c.code_of(c.encode[e])] = e;
    return c;
}

}  // namespace detail

/// Looks for a Maltsev term among ternary term operations (breadth-first,
/// up to term_depth_bound; to saturation for |A| <= 4) and certifies that
/// the algebra is an affine module over GF(p). Algebras that are not simple
/// are accepted here; callers filter by simplicity.
inline AffineRecognition recognize_affine_module(const FiniteAlgebra& alg, int term_depth_bound = 3) {
    AffineRecognition out;
    int p = detail::prime_power_base(alg.size());
    if (p == 0) return out;
    CloneLimits limits;
    limits.depth_bound = term_depth_bound;
    limits.run_to_saturation = alg.size() <= 4;
    auto clone = enumerate_clone(alg, 3, limits);
    for (const auto& t : clone.tables) {
        if (!detail::is_maltsev_table(t.table, alg.size())) continue;
        // A Maltsev term in an affine algebra is unique, so one failure is conclusive.
        out.coordinatization = detail::coordinatize(alg, t.table, p, t.term);
        return out;
    }
    out.bounded = !clone.saturated;
    return out;
}

/// Equations over dim(cx)+dim(cy) unknowns whose solutions decode to exactly rel.
inline LinearSystem compile_binary_constraint(const PairRelation& rel, const AffineCoordinatization& cx,
                                              const AffineCoordinatization& cy) {
    if (rel.empty()) throw precondition_error("cannot compile an empty relation");
    if (cx.field != cy.field) throw precondition_error("coordinatizations over different fields");
    const auto& F = cx.field;
    int n = cx.dim + cy.dim;
    std::set<std::vector<int>> points;
    for (auto [a, b] : rel) {
        std::vector<int> v = cx.encode.at(a);
        const auto& w = cy.encode.at(b);
        v.insert(v.end(), w.begin(), w.end());
        points.insert(std::move(v));
    }
    const auto& base = *points.begin();
    // Direction space: differences to the base point, reduced to a basis.
    LinearSystem dirs(F, n);
    for (const auto& v : points) {
        std::vector<int> d(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) d[j] = F.sub(v[j], base[j]);
        dirs.add_row(std::move(d), 0);
    }
    auto ann = solve_system(dirs);
    std::uint64_t expected = 1;
    for (int i = 0; i < ann.rank; ++i) expected *= static_cast<std::uint64_t>(F.p());
    if (points.size() != expected) throw internal_error("relation is not an affine subspace of the coordinates");
    LinearSystem out(F, n);
    for (const auto& w : ann.basis) {
        long long c = 0;
        for (int j = 0; j < n; ++j) c += 1LL * w[j] * base[j];
        out.add_row(w, F.norm(c));
    }
    return out;
}

}  // namespace fewsub

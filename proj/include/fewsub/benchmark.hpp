#pragma once

// Fixture templates and seeded benchmark instances. Random choices use raw
// mt19937_64 output reduced modulo the range, so streams are identical on
// every platform.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fewsub/csp.hpp"
#include "fewsub/linear.hpp"

namespace fewsub {

namespace templates {

/// Name of the relation sum(coeffs[i] * x_i) = rhs over GF(p).
inline std::string linear_relation_name(const std::vector<int>& coeffs, int rhs) {
    std::string s = "lin";
    for (auto c : coeffs) s += "_" + std::to_string(c);
    return s + "__" + std::to_string(rhs);
}

/// Every linear equation over GF(p) in 2..max_arity variables with nonzero
/// coefficients, normalized to leading coefficient 1.
inline RelationalTemplate linear(int p, int max_arity = 3) {
    PrimeField f(p);
    std::vector<Relation> rels;
    for (int r = 2; r <= max_arity; ++r) {
        std::vector<int> coeffs(static_cast<std::size_t>(r), 1);
        while (true) {
            for (int rhs = 0; rhs < p; ++rhs) {
                std::vector<Tuple> tuples;
                Tuple x(static_cast<std::size_t>(r), 0);
                while (true) {
                    long long s = 0;
                    for (int i = 0; i < r; ++i) s += 1LL * coeffs[i] * x[i];
                    if (f.norm(s) == rhs) tuples.push_back(x);
                    int i = r - 1;
                    for (; i >= 0; --i) {
                        if (++x[i] < p) break;
                        x[i] = 0;
                    }
                    if (i < 0) break;
                }
                rels.emplace_back(linear_relation_name(coeffs, rhs), r, p, std::move(tuples));
            }
            int i = r - 1;
            for (; i >= 1; --i) {
                if (++coeffs[i] < p) break;
                coeffs[i] = 1;
            }
            if (i < 1) break;
        }
    }
    return RelationalTemplate(p, std::move(rels));
}

/// x + y + z = 0 and x + y + z = 1 over {0,1}.
inline RelationalTemplate z2_parity() {
    std::vector<Tuple> even, odd;
    for (int c = 0; c < 8; ++c) {
        Tuple t{c >> 2 & 1, c >> 1 & 1, c & 1};
        ((t[0] ^ t[1] ^ t[2]) ? odd : even).push_back(t);
    }
    return RelationalTemplate(2, {Relation("even3", 3, 2, even), Relation("odd3", 3, 2, odd),
                                  Relation("eq", 2, 2, {{0, 0}, {1, 1}}), Relation("neq", 2, 2, {{0, 1}, {1, 0}})});
}

/// Clauses x or y, x implies y, not x or not y, plus constants.
inline RelationalTemplate twosat() {
    return RelationalTemplate(2, {Relation("or", 2, 2, {{0, 1}, {1, 0}, {1, 1}}),
                                  Relation("imp", 2, 2, {{0, 0}, {0, 1}, {1, 1}}),
                                  Relation("nand", 2, 2, {{0, 0}, {0, 1}, {1, 0}})});
}

/// Horn clauses x and y implies z, not x or not y, plus constants.
inline RelationalTemplate horn3() {
    std::vector<Tuple> horn;
    for (int c = 0; c < 8; ++c)
        if (c != 6) horn.push_back({c >> 2 & 1, c >> 1 & 1, c & 1});
    return RelationalTemplate(2, {Relation("horn", 3, 2, horn), Relation("nand", 2, 2, {{0, 0}, {0, 1}, {1, 0}})});
}

inline RelationalTemplate one_in_three() {
    return RelationalTemplate(2, {Relation("one_in_three", 3, 2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})});
}

/// Disequality on {0..d-1}.
inline RelationalTemplate not_equal(int d) {
    std::vector<Tuple> t;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            if (a != b) t.push_back({a, b});
    return RelationalTemplate(d, {Relation("neq", 2, d, t)});
}

}  // namespace templates

enum class BenchmarkKind { linear_mod_p, twosat, horn3, random_template };

inline BenchmarkKind parse_benchmark_kind(const std::string& s) {
    if (s == "linear_mod_p") return BenchmarkKind::linear_mod_p;
    if (s == "twosat") return BenchmarkKind::twosat;
    if (s == "horn3") return BenchmarkKind::horn3;
    if (s == "random_template") return BenchmarkKind::random_template;
    throw malformed_input("unknown benchmark kind '" + s + "'");
}

struct BenchmarkParams {
    int p = 2;             // linear_mod_p: field size
    int vars = 5;
    int constraints = 6;   // equations or clauses
    int min_arity = 2;     // linear_mod_p: equation arity range
    int max_arity = 3;
    int domain = 3;        // random_template
    int relations = 2;     // random_template
    int density = 50;      // random_template: percent of tuples kept
};

struct Benchmark {
    RelationalTemplate templ;
    CspInstance instance;
    std::optional<bool> label;           // ground truth when known by construction
    std::optional<LinearSystem> system;  // linear_mod_p only
};

inline Benchmark generate_benchmark(BenchmarkKind kind, const BenchmarkParams& params, std::uint64_t seed) {
    if (params.vars < 1 || params.constraints < 0) throw malformed_input("benchmark needs vars >= 1, constraints >= 0");
    std::mt19937_64 rng(seed);
    auto pick = [&](int k) { return static_cast<int>(rng() % static_cast<std::uint64_t>(k)); };
    auto distinct_vars = [&](int r) {
        std::vector<int> out;
        while (static_cast<int>(out.size()) < r) {
            int v = pick(params.vars);
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
        return out;
    };
    Benchmark b;
    for (int v = 0; v < params.vars; ++v) b.instance.variables.push_back("v" + std::to_string(v));

    switch (kind) {
        case BenchmarkKind::linear_mod_p: {
            PrimeField f(params.p);
            int hi = std::min(params.max_arity, params.vars);
            int lo = std::min(params.min_arity, hi);
            if (lo < 1 || hi > 3) throw malformed_input("linear_mod_p equation arity must lie in 1..3");
            b.templ = templates::linear(params.p, 3);
            LinearSystem sys(f, params.vars);
            for (int e = 0; e < params.constraints; ++e) {
                int r = lo + pick(hi - lo + 1);
                auto scope = distinct_vars(r);
                std::vector<int> coeffs(static_cast<std::size_t>(r));
                for (auto& c : coeffs) c = 1 + pick(params.p - 1);
                int rhs = pick(params.p);
                int scale = f.inv(coeffs[0]);
                for (auto& c : coeffs) c = f.mul(c, scale);
                rhs = f.mul(rhs, scale);
                std::vector<int> row(static_cast<std::size_t>(params.vars), 0);
                for (int i = 0; i < r; ++i) row[scope[i]] = f.add(row[scope[i]], coeffs[i]);
                sys.add_row(row, rhs);
                if (r == 1)
                    b.instance.add_constraint(constant_relation_name(rhs), scope);
                else
                    b.instance.add_constraint(templates::linear_relation_name(coeffs, rhs), scope);
            }
            b.label = solve_system(sys).sat;
            b.system = std::move(sys);
            break;
        }
        case BenchmarkKind::twosat: {
            if (params.vars < 2) throw malformed_input("twosat needs at least two variables");
            b.templ = templates::twosat();
            static const char* kinds[] = {"or", "imp", "nand"};
            for (int c = 0; c < params.constraints; ++c) {
                auto scope = distinct_vars(2);
                b.instance.add_constraint(kinds[pick(3)], scope);
            }
            break;
        }
        case BenchmarkKind::horn3: {
            if (params.vars < 3) throw malformed_input("horn3 needs at least three variables");
            b.templ = templates::horn3();
            for (int c = 0; c < params.constraints; ++c) {
                int k = pick(4);
                if (k == 0) b.instance.add_constraint(constant_relation_name(pick(2)), distinct_vars(1));
                else if (k == 1) b.instance.add_constraint("nand", distinct_vars(2));
                else b.instance.add_constraint("horn", distinct_vars(3));
            }
            break;
        }
        case BenchmarkKind::random_template: {
            int d = params.domain;
            if (d < 1 || d > 8) throw malformed_input("random_template domain must lie in 1..8");
            std::vector<Relation> rels;
            std::vector<int> arities;
            for (int r = 0; r < params.relations; ++r) {
                int arity = 1 + pick(std::min(params.max_arity, params.vars));
                std::vector<Tuple> tuples;
                Tuple t(static_cast<std::size_t>(arity), 0);
                while (true) {
                    if (pick(100) < params.density) tuples.push_back(t);
                    int i = arity - 1;
                    for (; i >= 0; --i) {
                        if (++t[i] < d) break;
                        t[i] = 0;
                    }
                    if (i < 0) break;
                }
                rels.emplace_back("r" + std::to_string(r), arity, d, std::move(tuples));
                arities.push_back(arity);
            }
            b.templ = RelationalTemplate(d, std::move(rels));
            for (int c = 0; c < params.constraints && !arities.empty(); ++c) {
                int r = pick(static_cast<int>(arities.size()));
                b.instance.add_constraint("r" + std::to_string(r), distinct_vars(arities[r]));
            }
            break;
        }
    }
    return b;
}

}  // namespace fewsub

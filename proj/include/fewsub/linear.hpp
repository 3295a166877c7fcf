#pragma once

// Linear systems over prime fields GF(p), solved by Gauss-Jordan elimination.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/error.hpp"

namespace fewsub {

class PrimeField {
public:
    explicit PrimeField(int p = 2) : p_(p) {
        if (p < 2) throw precondition_error("field modulus must be a prime, got " + std::to_string(p));
        for (int d = 2; d * d <= p; ++d)
            if (p % d == 0) throw precondition_error("field modulus must be a prime, got " + std::to_string(p));
    }

    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] int norm(long long v) const { return static_cast<int>(((v % p_) + p_) % p_); }
    [[nodiscard]] int add(int a, int b) const { return (a + b) % p_; }
    [[nodiscard]] int sub(int a, int b) const { return (a - b + p_) % p_; }
    [[nodiscard]] int mul(int a, int b) const { return static_cast<int>((1LL * a * b) % p_); }
    [[nodiscard]] int neg(int a) const { return a == 0 ? 0 : p_ - a; }

    [[nodiscard]] int inv(int a) const {
        if (a % p_ == 0) throw precondition_error("zero has no inverse");
        int r = 1, base = a % p_, e = p_ - 2;
        while (e > 0) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    bool operator==(const PrimeField&) const = default;

private:
    int p_;
};

struct LinearRow {
    std::vector<int> coeffs;
    int rhs = 0;
};

struct LinearSystem {
    PrimeField field;
    int num_vars = 0;
    std::vector<LinearRow> rows;

    LinearSystem() = default;
    LinearSystem(PrimeField f, int n) : field(f), num_vars(n) {}

    void add_row(std::vector<int> coeffs, int rhs) {
        if (static_cast<int>(coeffs.size()) != num_vars)
            throw malformed_input("row has " + std::to_string(coeffs.size()) + " coefficients, system has " +
                                  std::to_string(num_vars) + " unknowns");
        for (auto& c : coeffs) c = field.norm(c);
        rows.push_back({std::move(coeffs), field.norm(rhs)});
    }

    void validate() const {
        for (const auto& r : rows) {
            if (static_cast<int>(r.coeffs.size()) != num_vars) throw malformed_input("row width mismatch");
            for (auto c : r.coeffs)
                if (c < 0 || c >= field.p()) throw malformed_input("coefficient outside GF(p)");
            if (r.rhs < 0 || r.rhs >= field.p()) throw malformed_input("constant outside GF(p)");
        }
    }

    [[nodiscard]] bool satisfied_by(const std::vector<int>& x) const {
        for (const auto& r : rows) {
            long long s = 0;
            for (int j = 0; j < num_vars; ++j) s += 1LL * r.coeffs[j] * x[j];
            if (field.norm(s) != r.rhs) return false;
        }
        return true;
    }

    /// One row per line: coefficients, then "| c".
    [[nodiscard]] std::string to_text() const {
        std::ostringstream os;
        for (const auto& r : rows) {
            for (int j = 0; j < num_vars; ++j) os << r.coeffs[j] << ' ';
            os << "| " << r.rhs << '\n';
        }
        return os.str();
    }
};

struct SolutionSpace {
    bool sat = false;
    std::vector<int> particular;
    std::vector<std::vector<int>> basis;  // kernel basis, one vector per free unknown
    int rank = 0;

    /// p^(n - rank) when consistent, else 0. Throws when the count does not fit in 64 bits.
    [[nodiscard]] std::uint64_t solution_count(int p, int num_vars) const {
        if (!sat) return 0;
        std::uint64_t c = 1;
        for (int i = 0; i < num_vars - rank; ++i) {
            if (c > UINT64_MAX / static_cast<std::uint64_t>(p)) throw resource_limit("solution count overflows");
            c *= static_cast<std::uint64_t>(p);
        }
        return c;
    }

    bool operator==(const SolutionSpace&) const = default;
};

/// Gauss-Jordan elimination. Pivot rule: first column with a nonzero entry
/// among the unreduced rows, taking the smallest such row index.
inline SolutionSpace solve_system(const LinearSystem& sys) {
    sys.validate();
    const auto& F = sys.field;
    int n = sys.num_vars;
    std::vector<LinearRow> m = sys.rows;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n && rank < static_cast<int>(m.size()); ++col) {
        int piv = -1;
        for (int r = rank; r < static_cast<int>(m.size()); ++r)
            if (m[r].coeffs[col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        int scale = F.inv(m[rank].coeffs[col]);
        for (auto& c : m[rank].coeffs) c = F.mul(c, scale);
        m[rank].rhs = F.mul(m[rank].rhs, scale);
        for (int r = 0; r < static_cast<int>(m.size()); ++r) {
            if (r == rank || m[r].coeffs[col] == 0) continue;
            int f = m[r].coeffs[col];
            for (int j = 0; j < n; ++j) m[r].coeffs[j] = F.sub(m[r].coeffs[j], F.mul(f, m[rank].coeffs[j]));
            m[r].rhs = F.sub(m[r].rhs, F.mul(f, m[rank].rhs));
        }
        pivot_col.push_back(col);
        ++rank;
    }
    SolutionSpace out;
    out.rank = rank;
    for (int r = rank; r < static_cast<int>(m.size()); ++r)
        if (m[r].rhs != 0) return out;
    out.sat = true;
    out.particular.assign(static_cast<std::size_t>(n), 0);
    std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
    for (int r = 0; r < rank; ++r) {
        out.particular[pivot_col[r]] = m[r].rhs;
        is_pivot[pivot_col[r]] = 1;
    }
    for (int f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<int> v(static_cast<std::size_t>(n), 0);
        v[f] = 1;
        for (int r = 0; r < rank; ++r) v[pivot_col[r]] = F.neg(m[r].coeffs[f]);
        out.basis.push_back(std::move(v));
    }
    return out;
}

/// True iff the system stays consistent after fixing each (unknown, value) pair.
inline bool values_in_solution(const LinearSystem& sys, const std::vector<std::pair<int, int>>& fixes) {
    LinearSystem aug = sys;
    for (auto [var, value] : fixes) {
        if (var < 0 || var >= sys.num_vars) throw precondition_error("unknown index out of range");
        std::vector<int> row(static_cast<std::size_t>(sys.num_vars), 0);
        row[var] = 1;
        aug.add_row(std::move(row), value);
    }
    return solve_system(aug).sat;
}

/// True iff some solution assigns value to unknown var_index.
inline bool block_in_solution(const LinearSystem& sys, int var_index, int value) {
    return values_in_solution(sys, {{var_index, value}});
}

/// Set of values the unknowns [offset, offset+dim) take over all solutions:
/// returns whether `target` is reachable, using a solved SolutionSpace.
inline bool reachable_in_projection(const SolutionSpace& space, const PrimeField& F, int offset,
                                    const std::vector<int>& target) {
    if (!space.sat) return false;
    int dim = static_cast<int>(target.size());
    // Solve sum_j c_j * basis_j[offset..] = target - particular[offset..].
    LinearSystem proj(F, static_cast<int>(space.basis.size()));
    for (int i = 0; i < dim; ++i) {
        std::vector<int> row;
        row.reserve(space.basis.size());
        for (const auto& b : space.basis) row.push_back(b[offset + i]);
        proj.add_row(std::move(row), F.sub(F.norm(target[i]), space.particular[offset + i]));
    }
    return solve_system(proj).sat;
}

}  // namespace fewsub

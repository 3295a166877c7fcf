#pragma once

// Search for polymorphisms satisfying Maltsev, near-unanimity or k-edge
// identities, either by raw table enumeration or by solving the indicator
// instance with the oracle.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/csp.hpp"
#include "fewsub/oracle.hpp"

namespace fewsub {

/// A two-variable identity: op(pattern with 0 -> x, 1 -> y) = (result ? y : x).
struct Identity {
    std::vector<int> pattern;
    int result = 0;
};

enum class PolymorphismKind { maltsev, majority, near_unanimity, k_edge };

struct PolymorphismSpec {
    PolymorphismKind kind = PolymorphismKind::maltsev;
    int param = 0;  // l for near_unanimity, k for k_edge

    static PolymorphismSpec maltsev() { return {PolymorphismKind::maltsev, 0}; }
    static PolymorphismSpec majority() { return {PolymorphismKind::majority, 0}; }
    static PolymorphismSpec nu(int l) { return {PolymorphismKind::near_unanimity, l}; }
    static PolymorphismSpec edge(int k) { return {PolymorphismKind::k_edge, k}; }

    /// Accepts "maltsev", "majority", "nu:L", "edge:K".
    static PolymorphismSpec parse(const std::string& s) {
        if (s == "maltsev") return maltsev();
        if (s == "majority") return majority();
        auto colon = s.find(':');
        if (colon != std::string::npos) {
            auto head = s.substr(0, colon);
            int v = 0;
            try {
                v = std::stoi(s.substr(colon + 1));
            } catch (const std::exception&) {
                throw malformed_input("bad polymorphism kind '" + s + "'");
            }
            if (head == "nu" && v >= 3) return nu(v);
            if ((head == "edge" || head == "k_edge") && v >= 2) return edge(v);
        }
        throw malformed_input("bad polymorphism kind '" + s + "'");
    }

    [[nodiscard]] int arity() const {
        switch (kind) {
            case PolymorphismKind::maltsev:
            case PolymorphismKind::majority: return 3;
            case PolymorphismKind::near_unanimity: return param;
            case PolymorphismKind::k_edge: return param + 1;
        }
        return 0;
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case PolymorphismKind::maltsev: return "maltsev";
            case PolymorphismKind::majority: return "majority";
            case PolymorphismKind::near_unanimity: return "nu:" + std::to_string(param);
            case PolymorphismKind::k_edge: return "edge:" + std::to_string(param);
        }
        return "";
    }

    [[nodiscard]] std::vector<Identity> identities() const {
        std::vector<Identity> ids;
        int n = arity();
        switch (kind) {
            case PolymorphismKind::maltsev:
                ids.push_back({{0, 1, 1}, 0});
                ids.push_back({{1, 1, 0}, 0});
                break;
            case PolymorphismKind::majority:
            case PolymorphismKind::near_unanimity:
                for (int i = 0; i < n; ++i) {
                    std::vector<int> pat(static_cast<std::size_t>(n), 1);
                    pat[i] = 0;
                    ids.push_back({std::move(pat), 1});
                }
                break;
            case PolymorphismKind::k_edge: {
                std::vector<int> first(static_cast<std::size_t>(n), 1), second(static_cast<std::size_t>(n), 1);
                first[0] = first[1] = 0;
                second[0] = second[2] = 0;
                ids.push_back({first, 1});
                ids.push_back({second, 1});
                for (int i = 3; i < n; ++i) {
                    std::vector<int> pat(static_cast<std::size_t>(n), 1);
                    pat[i] = 0;
                    ids.push_back({std::move(pat), 1});
                }
                break;
            }
        }
        return ids;
    }
};

/// Direct check of the identities on a table, independent of the search.
inline bool satisfies_identities(const OperationTable& f, const PolymorphismSpec& spec) {
    if (f.arity != spec.arity()) return false;
    std::vector<Element> args(static_cast<std::size_t>(f.arity));
    for (const auto& id : spec.identities())
        for (Element x = 0; x < f.size; ++x)
            for (Element y = 0; y < f.size; ++y) {
                for (int i = 0; i < f.arity; ++i) args[i] = id.pattern[i] ? y : x;
                if (f(args) != (id.result ? y : x)) return false;
            }
    return true;
}

struct PolymorphismSearch {
    std::optional<OperationTable> op;
    bool exhaustive = true;  // false when a cap cut the search short
    std::string strategy;    // "table-enumeration" or "indicator"
};

inline constexpr std::uint64_t kRawEnumerationLimit = 1'000'000;

inline PolymorphismSearch find_special_polymorphism(const RelationalTemplate& t, const PolymorphismSpec& spec,
                                                    const OracleOptions& opt = {}) {
    int d = t.domain_size();
    int n = spec.arity();
    auto cells = detail::checked_power(static_cast<std::uint64_t>(d), n, detail::kMaxTableEntries);
    PolymorphismSearch out;

    // Entries forced by the identities; conflicting demands mean no such operation.
    std::vector<Element> fixed(cells, kUnassigned);
    std::vector<Element> args(static_cast<std::size_t>(n));
    for (const auto& id : spec.identities())
        for (Element x = 0; x < d; ++x)
            for (Element y = 0; y < d; ++y) {
                for (int i = 0; i < n; ++i) args[i] = id.pattern[i] ? y : x;
                Element want = id.result ? y : x;
                auto idx = encode_tuple(d, args);
                if (fixed[idx] != kUnassigned && fixed[idx] != want) {
                    out.strategy = "identities";
                    return out;
                }
                fixed[idx] = want;
            }

    std::uint64_t candidates = 1;
    bool small = true;
    for (std::uint64_t i = 0; i < cells && small; ++i) {
        candidates *= static_cast<std::uint64_t>(d);
        small = candidates <= kRawEnumerationLimit;
    }

    OperationTable f{spec.name(), n, d, std::vector<Element>(cells, 0)};
    if (small) {
        out.strategy = "table-enumeration";
        for (std::uint64_t code = 0; code < candidates; ++code) {
            std::uint64_t c = code;
            bool ok = true;
            for (std::uint64_t i = cells; i-- > 0;) {
                f.entries[i] = static_cast<Element>(c % static_cast<std::uint64_t>(d));
                c /= static_cast<std::uint64_t>(d);
                if (fixed[i] != kUnassigned && fixed[i] != f.entries[i]) ok = false;
            }
            if (ok && is_polymorphism(t, f)) {
                out.op = f;
                return out;
            }
        }
        return out;
    }

    // Indicator instance: one variable per argument tuple, preservation constraints per relation.
    out.strategy = "indicator";
    detail::Network net;
    net.domains.assign(cells, ElementSet::full(d));
    for (std::uint64_t i = 0; i < cells; ++i)
        if (fixed[i] != kUnassigned) net.domains[i] = ElementSet::singleton(fixed[i]);
    std::vector<Element> col(static_cast<std::size_t>(n));
    for (const auto& rel : t.relations()) {
        const auto& tuples = rel.tuples();
        if (tuples.empty()) continue;
        std::set<std::vector<int>> scopes;
        std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<int> scope(static_cast<std::size_t>(rel.arity()));
            for (int c = 0; c < rel.arity(); ++c) {
                for (int i = 0; i < n; ++i) col[i] = tuples[pick[i]][c];
                scope[c] = encode_tuple(d, col);
            }
            scopes.insert(std::move(scope));
            int p = n - 1;
            for (; p >= 0; --p) {
                if (++pick[p] < tuples.size()) break;
                pick[p] = 0;
            }
            if (p < 0) break;
        }
        const Relation* r = &rel;
        for (const auto& s : scopes)
            net.constraints.push_back({s, [r](std::span<const Element> v) { return r->contains(v); }});
    }
    try {
        detail::search_network(net, opt, [&](const Assignment& a) {
            f.entries.assign(a.begin(), a.end());
            out.op = f;
            return false;
        });
    } catch (const resource_limit&) {
        out.exhaustive = false;
    }
    return out;
}

}  // namespace fewsub

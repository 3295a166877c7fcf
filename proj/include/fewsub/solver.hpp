#pragma once

// The decision procedure: binarize, establish (2,3)-consistency, SLAC and
// affine consistency, then shrink domains by absorption or by block-based
// replacement until neither applies.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/absorption.hpp"
#include "fewsub/affine_consistency.hpp"
#include "fewsub/consistency.hpp"
#include "fewsub/csp.hpp"
#include "fewsub/polymorphism.hpp"
#include "fewsub/workspace.hpp"

namespace fewsub {

struct SolverConfig {
    std::optional<int> k_edge_arity;  // searched as 2 then 3 when unset
    int max_edge_search = 3;
    int term_depth = 3;
    int generator_cap = 2;
    bool verify_paths = false;
    bool verify_invariants = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool trace = false;
    bool witness = true;
    int congruence_cap = 16;
    std::size_t subuniverse_cap = 4096;
    int iteration_cap = 100000;

    void validate() const {
        if (k_edge_arity && *k_edge_arity < 2) throw precondition_error("k-edge arity must be at least 2");
        if (max_edge_search < 2) throw precondition_error("edge search bound must be at least 2");
        if (term_depth < 1 || generator_cap < 1 || jobs < 1 || congruence_cap < 1 || subuniverse_cap < 1 ||
            iteration_cap < 1)
            throw precondition_error("solver bounds must be positive");
    }
};

enum class Decision { sat, unsat };

inline std::string to_string(Decision d) { return d == Decision::sat ? "SAT" : "UNSAT"; }

struct SolverStatistics {
    int edge_arity = 0;
    std::string edge_strategy;
    int group_size = 0;
    int binary_variables = 0;
    int iterations = 0;
    int test_instances = 0;
    int blocks_pruned = 0;
    int affine_sweeps = 0;
    int absorption_steps = 0;
    int replacements = 0;
    int solver_calls = 0;
};

struct SolverReport {
    Decision decision = Decision::unsat;
    std::optional<Assignment> witness;
    std::vector<std::string> trace;
    SolverStatistics statistics;
    SolverConfig config;
};

/// Holds the template's algebra and the per-group-size caches, so repeated
/// calls (witness extraction) reuse them.
class Solver {
public:
    Solver(RelationalTemplate t, SolverConfig cfg) : t_(std::move(t)), cfg_(std::move(cfg)) {
        cfg_.validate();
        std::vector<int> ks;
        if (cfg_.k_edge_arity)
            ks.push_back(*cfg_.k_edge_arity);
        else
            for (int k = 2; k <= cfg_.max_edge_search; ++k) ks.push_back(k);
        for (int k : ks) {
            auto found = find_special_polymorphism(t_, PolymorphismSpec::edge(k));
            if (!found.op) continue;
            k_ = k;
            strategy_ = found.strategy;
            std::vector<OperationTable> ops = t_.polymorphisms();
            auto edge = *found.op;
            edge.name = "edge" + std::to_string(k);
            ops.push_back(std::move(edge));
            alg_ = std::make_shared<const FiniteAlgebra>("Pol", t_.domain_size(), std::move(ops));
            return;
        }
        std::string tried;
        for (int k : ks) tried += (tried.empty() ? "" : ",") + std::to_string(k);
        throw not_applicable("template has no k-edge polymorphism for k in {" + tried + "}");
    }

    [[nodiscard]] const RelationalTemplate& templ() const { return t_; }
    [[nodiscard]] const SolverConfig& config() const { return cfg_; }
    [[nodiscard]] int edge_arity() const { return k_; }
    [[nodiscard]] const FiniteAlgebra& algebra() const { return *alg_; }

    /// The grouped binary instance over the cached ambient algebra.
    Binarization binarize_instance(const CspInstance& inst) {
        inst.validate(t_);
        int g = std::min(binarization_group_size(t_, inst, k_), std::max(inst.size(), 1));
        return binarize(t_, inst, alg_, k_, context(g).ws.algebra_ptr());
    }

    AlgebraWorkspace& workspace_for(int group_size) { return context(group_size).ws; }

    /// Decision only, with statistics and trace; no witness.
    SolverReport decide(const CspInstance& inst) {
        SolverReport rep;
        rep.config = cfg_;
        auto& st = rep.statistics;
        st.edge_arity = k_;
        st.edge_strategy = strategy_;
        st.solver_calls = 1;
        Trace tr{cfg_.trace, {}};
        auto& log = tr.lines;
        auto finish = [&](Decision d, const std::string& why) {
            log.push_back(to_string(d) + " " + why);
            rep.decision = d;
            rep.trace = std::move(log);
            return rep;
        };

        inst.validate(t_);
        if (inst.size() == 0) return finish(Decision::sat, "no variables");
        int g = std::min(binarization_group_size(t_, inst, k_), inst.size());
        auto& ctx = context(g);
        auto bin = binarize(t_, inst, alg_, k_, ctx.ws.algebra_ptr());
        st.group_size = bin.group_size;
        st.binary_variables = bin.instance.size();
        log.push_back("binarize k=" + std::to_string(k_) + " group=" + std::to_string(g) +
                      " variables=" + std::to_string(bin.instance.size()));

        AffineOptions aopt;
        aopt.generator_cap = cfg_.generator_cap;
        aopt.subuniverse_cap = cfg_.subuniverse_cap;
        aopt.verify_paths = cfg_.verify_paths;

        std::vector<PassiveSubinstance> passive;
        // (2,3)-consistency, 1-consistency and SLAC to a common fixpoint, then
        // the affine pass, repeated until the pass changes nothing.
        // `parent`, when given, is a (2,3)-consistent instance b was cut down from.
        auto stabilize = [&](BinaryInstance b, const BinaryInstance* parent) -> std::optional<BinaryInstance> {
            std::optional<std::vector<char>> dirty;
            if (parent) dirty = changed_domains(*parent, b);
            while (true) {
                while (true) {
                    auto pc = enforce_23_consistency(std::move(b), &tr, dirty ? &*dirty : nullptr);
                    if (!pc) return std::nullopt;
                    auto arc = enforce_1_consistency(*pc, &tr);
                    if (!arc) return std::nullopt;
                    auto store = run_slac(*arc, &tr);
                    if (!store) return std::nullopt;
                    for (int y = 0; y < arc->size(); ++y) arc->restrict_domain(y, (*store)[y]);
                    dirty = changed_domains(*pc, *arc);
                    b = std::move(*arc);
                    if (std::find(dirty->begin(), dirty->end(), 1) == dirty->end()) break;
                }
                auto before = b;
                auto res = affine_consistency_pass(std::move(b), ctx.ws, aopt, &tr);
                st.test_instances += res.report.test_instances;
                st.blocks_pruned += res.report.blocks_pruned;
                st.affine_sweeps += res.report.sweeps;
                if (cfg_.trace)
                    for (auto& l : res.report.lines) log.push_back("affine " + l);
                if (!res.instance) return std::nullopt;
                if (*res.instance == before) {
                    passive = std::move(res.passive);
                    return res.instance;
                }
                b = std::move(*res.instance);
                dirty.emplace(static_cast<std::size_t>(b.size()), 0);
            }
        };

        auto cur = stabilize(std::move(bin.instance), nullptr);
        if (!cur) return finish(Decision::unsat, "during consistency");
        log.push_back("consistent domains=" + std::to_string(cur->total_domain_size()) +
                      " passive=" + std::to_string(live_count(passive)));

        while (true) {
            if (++st.iterations > cfg_.iteration_cap)
                throw resource_limit("reduction loop exceeded " + std::to_string(cfg_.iteration_cap) + " iterations");
            std::size_t size_before = cur->total_domain_size();
            std::optional<BinaryInstance> next;

            for (int x = 0; x < cur->size() && !next; ++x) {
                auto dom = cur->domain(x);
                if (dom.size() < 2) continue;
                const auto& w = absorber(ctx, dom);
                if (!w) continue;
                log.push_back("absorb " + cur->name(x) + " " + dom.to_string() + " -> " + w->subuniverse.to_string() +
                              " by " + w->term.to_string(&ctx.ws.algebra()));
                auto step = absorption_reduce(*cur, x, *w, passive, cfg_.verify_invariants, &tr);
                ++st.absorption_steps;
                if (!step.instance) return finish(Decision::unsat, "after absorption at " + cur->name(x));
                next = std::move(step.instance);
            }

            if (!next)
                for (const auto& p : passive) {
                    if (!p.live) continue;
                    auto dom = cur->domain(p.var);
                    if (p.universe != dom || p.block == dom) continue;
                    log.push_back("replace " + cur->name(p.var) + " " + dom.to_string() + " by block " +
                                  p.block.to_string());
                    BinaryInstance r = *cur;
                    for (int y = 0; y < r.size(); ++y) r.restrict_domain(y, p.domains[y]);
                    ++st.replacements;
                    if (r.any_empty()) throw internal_error("certified block subinstance has an empty domain");
                    next = std::move(r);
                    break;
                }

            if (!next) {
                for (int x = 0; x < cur->size(); ++x)
                    if (cur->domain(x).empty()) return finish(Decision::unsat, "empty domain");
                return finish(Decision::sat, "no absorbing or affine reduction applies");
            }

            cur = stabilize(std::move(*next), &*cur);
            if (!cur) return finish(Decision::unsat, "after reduction");
            std::size_t size_after = cur->total_domain_size();
            if (size_after >= size_before)
                throw internal_error("reduction did not shrink the domains (" + std::to_string(size_before) + " -> " +
                                     std::to_string(size_after) + ")");
            log.push_back("consistent domains=" + std::to_string(size_after) +
                          " passive=" + std::to_string(live_count(passive)));
        }
    }

    /// Fixes variables in order to the least value that keeps the instance
    /// satisfiable.
    std::optional<Assignment> extract_witness(const CspInstance& inst, int* calls = nullptr) {
        auto first = decide(inst);
        int used = 1;
        if (first.decision != Decision::sat) throw precondition_error("instance is unsatisfiable; no witness to extract");
        CspInstance cur = inst;
        Assignment out(static_cast<std::size_t>(inst.size()), kUnassigned);
        for (int v = 0; v < inst.size(); ++v) {
            bool fixed = false;
            for (Element a = 0; a < t_.domain_size() && !fixed; ++a) {
                auto name = constant_relation_name(a);
                if (!t_.find(name))
                    throw precondition_error("template lacks the constant relation " + name + " needed for witnesses");
                CspInstance probe = cur;
                probe.add_constraint(name, {v});
                ++used;
                if (decide(probe).decision == Decision::sat) {
                    cur = std::move(probe);
                    out[v] = a;
                    fixed = true;
                }
            }
            if (!fixed) throw internal_error("no value of " + inst.variables[v] + " keeps the instance satisfiable");
        }
        if (!verify_solution(t_, inst, out)) throw internal_error("extracted assignment violates a constraint");
        if (calls) *calls = used;
        return out;
    }

    SolverReport solve(const CspInstance& inst) {
        auto rep = decide(inst);
        if (rep.decision == Decision::sat && cfg_.witness) {
            int calls = 0;
            rep.witness = extract_witness(inst, &calls);
            rep.statistics.solver_calls += calls;
        }
        return rep;
    }

private:
    struct Context {
        AlgebraWorkspace ws;
        std::map<std::uint64_t, std::optional<AbsorptionWitness>> absorbers;
    };

    Context& context(int g) {
        auto it = contexts_.find(g);
        if (it != contexts_.end()) return *it->second;
        auto amb = g == 1 ? alg_ : std::make_shared<const FiniteAlgebra>(power(*alg_, g));
        WorkspaceOptions wopt;
        wopt.term_depth = cfg_.term_depth;
        wopt.congruence_cap = cfg_.congruence_cap;
        auto ctx = std::make_unique<Context>(Context{AlgebraWorkspace(amb, wopt), {}});
        return *contexts_.emplace(g, std::move(ctx)).first->second;
    }

    const std::optional<AbsorptionWitness>& absorber(Context& ctx, ElementSet dom) {
        auto it = ctx.absorbers.find(dom.bits());
        if (it != ctx.absorbers.end()) return it->second;
        if (!is_subuniverse(ctx.ws.algebra(), dom))
            throw internal_error("domain " + dom.to_string() + " is not a subuniverse of the ambient algebra");
        return ctx.absorbers.emplace(dom.bits(), minimal_absorbing(ctx.ws.algebra(), cfg_.term_depth, dom))
            .first->second;
    }

    RelationalTemplate t_;
    SolverConfig cfg_;
    int k_ = 0;
    std::string strategy_;
    std::shared_ptr<const FiniteAlgebra> alg_;
    std::map<int, std::unique_ptr<Context>> contexts_;
};

inline SolverReport solve(const RelationalTemplate& t, const CspInstance& inst, const SolverConfig& cfg = {}) {
    return Solver(t, cfg).solve(inst);
}

inline std::optional<Assignment> extract_witness(const RelationalTemplate& t, const CspInstance& inst,
                                                 const SolverConfig& cfg = {}) {
    return Solver(t, cfg).extract_witness(inst);
}

}  // namespace fewsub

#pragma once

// JSON text for algebras, templates, instances and solver reports.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fewsub/algebra.hpp"
#include "fewsub/csp.hpp"
#include "fewsub/solver.hpp"

namespace fewsub::io {

using json = nlohmann::ordered_json;

namespace detail {

template <typename T>
T get(const json& j, const char* key, const std::string& what) {
    if (!j.is_object() || !j.contains(key)) throw malformed_input(what + " is missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw malformed_input(what + " has a bad \"" + key + "\"");
    }
}

}  // namespace detail

inline json parse_text(const std::string& text, const std::string& origin = "input") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw malformed_input(origin + ": " + e.what());
    }
}

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw malformed_input("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

inline void save_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw malformed_input("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline json to_json(const OperationTable& op) {
    return json{{"name", op.name}, {"arity", op.arity}, {"table", op.entries}};
}

inline OperationTable operation_from_json(const json& j, int size) {
    OperationTable op;
    op.name = detail::get<std::string>(j, "name", "operation");
    op.arity = detail::get<int>(j, "arity", "operation '" + op.name + "'");
    op.size = size;
    op.entries = detail::get<std::vector<Element>>(j, "table", "operation '" + op.name + "'");
    if (op.arity < 1) throw malformed_input("operation '" + op.name + "' must have arity >= 1");
    auto cells = fewsub::detail::checked_power(static_cast<std::uint64_t>(size), op.arity, fewsub::detail::kMaxTableEntries);
    if (op.entries.size() != cells)
        throw malformed_input("operation '" + op.name + "' needs " + std::to_string(cells) + " table entries");
    for (auto v : op.entries)
        if (v < 0 || v >= size) throw malformed_input("operation '" + op.name + "' has a value outside the universe");
    return op;
}

inline json to_json(const FiniteAlgebra& alg) {
    json ops = json::array();
    for (const auto& op : alg.ops()) ops.push_back(to_json(op));
    return json{{"name", alg.name()}, {"size", alg.size()}, {"operations", ops}};
}

inline FiniteAlgebra algebra_from_json(const json& j) {
    auto name = detail::get<std::string>(j, "name", "algebra");
    auto size = detail::get<int>(j, "size", "algebra '" + name + "'");
    if (size < 1 || size > kMaxDomain) throw malformed_input("algebra size must be in 1.." + std::to_string(kMaxDomain));
    std::vector<OperationTable> ops;
    for (const auto& o : detail::get<json>(j, "operations", "algebra '" + name + "'")) ops.push_back(operation_from_json(o, size));
    return FiniteAlgebra(name, size, std::move(ops));
}

inline json to_json(const RelationalTemplate& t) {
    json rels = json::array();
    for (const auto& r : t.relations())
        rels.push_back(json{{"name", r.name()}, {"arity", r.arity()}, {"tuples", r.tuples()}});
    json out{{"domain_size", t.domain_size()}, {"relations", rels}};
    if (!t.polymorphisms().empty()) {
        json pols = json::array();
        for (const auto& f : t.polymorphisms()) pols.push_back(to_json(f));
        out["polymorphisms"] = pols;
    }
    return out;
}

inline RelationalTemplate template_from_json(const json& j) {
    auto d = detail::get<int>(j, "domain_size", "template");
    if (d < 1 || d > kMaxDomain) throw malformed_input("template domain size must be in 1.." + std::to_string(kMaxDomain));
    std::vector<Relation> rels;
    for (const auto& r : detail::get<json>(j, "relations", "template")) {
        auto name = detail::get<std::string>(r, "name", "relation");
        rels.emplace_back(name, detail::get<int>(r, "arity", "relation '" + name + "'"), d,
                          detail::get<std::vector<Tuple>>(r, "tuples", "relation '" + name + "'"));
    }
    std::vector<OperationTable> pols;
    if (j.contains("polymorphisms"))
        for (const auto& o : j.at("polymorphisms")) pols.push_back(operation_from_json(o, d));
    return RelationalTemplate(d, std::move(rels), std::move(pols));
}

inline json to_json(const CspInstance& inst) {
    json cons = json::array();
    for (const auto& c : inst.constraints) {
        json scope = json::array();
        for (auto v : c.scope) scope.push_back(inst.variables[v]);
        cons.push_back(json{{"relation", c.relation}, {"scope", scope}});
    }
    return json{{"variables", inst.variables}, {"constraints", cons}};
}

inline CspInstance instance_from_json(const json& j) {
    CspInstance inst;
    inst.variables = detail::get<std::vector<std::string>>(j, "variables", "instance");
    for (const auto& c : detail::get<json>(j, "constraints", "instance")) {
        Constraint con;
        con.relation = detail::get<std::string>(c, "relation", "constraint");
        for (const auto& v : detail::get<std::vector<std::string>>(c, "scope", "constraint '" + con.relation + "'"))
            con.scope.push_back(inst.index_of(v));
        inst.constraints.push_back(std::move(con));
    }
    for (std::size_t i = 0; i < inst.variables.size(); ++i)
        for (std::size_t k = i + 1; k < inst.variables.size(); ++k)
            if (inst.variables[i] == inst.variables[k]) throw malformed_input("duplicate variable '" + inst.variables[i] + "'");
    return inst;
}

inline json to_json(const SolverConfig& c) {
    json k = c.k_edge_arity ? json(*c.k_edge_arity) : json(nullptr);
    return json{{"k_edge", k},
                {"max_edge_search", c.max_edge_search},
                {"term_depth", c.term_depth},
                {"gen_cap", c.generator_cap},
                {"verify_paths", c.verify_paths},
                {"verify_invariants", c.verify_invariants},
                {"seed", c.seed},
                {"jobs", c.jobs},
                {"trace", c.trace},
                {"witness", c.witness},
                {"congruence_cap", c.congruence_cap},
                {"subuniverse_cap", c.subuniverse_cap},
                {"iteration_cap", c.iteration_cap}};
}

inline SolverConfig config_from_json(const json& j) {
    SolverConfig c;
    const std::string what = "config";
    if (j.contains("k_edge") && !j.at("k_edge").is_null()) c.k_edge_arity = detail::get<int>(j, "k_edge", what);
    c.max_edge_search = detail::get<int>(j, "max_edge_search", what);
    c.term_depth = detail::get<int>(j, "term_depth", what);
    c.generator_cap = detail::get<int>(j, "gen_cap", what);
    c.verify_paths = detail::get<bool>(j, "verify_paths", what);
    c.verify_invariants = detail::get<bool>(j, "verify_invariants", what);
    c.seed = detail::get<std::uint64_t>(j, "seed", what);
    c.jobs = detail::get<int>(j, "jobs", what);
    c.trace = detail::get<bool>(j, "trace", what);
    c.witness = detail::get<bool>(j, "witness", what);
    c.congruence_cap = detail::get<int>(j, "congruence_cap", what);
    c.subuniverse_cap = detail::get<std::size_t>(j, "subuniverse_cap", what);
    c.iteration_cap = detail::get<int>(j, "iteration_cap", what);
    c.validate();
    return c;
}

inline json to_json(const SolverStatistics& s) {
    return json{{"edge_arity", s.edge_arity},         {"edge_strategy", s.edge_strategy},
                {"group_size", s.group_size},         {"binary_variables", s.binary_variables},
                {"iterations", s.iterations},         {"test_instances", s.test_instances},
                {"blocks_pruned", s.blocks_pruned},   {"affine_sweeps", s.affine_sweeps},
                {"absorption_steps", s.absorption_steps}, {"replacements", s.replacements},
                {"solver_calls", s.solver_calls}};
}

inline SolverStatistics statistics_from_json(const json& j) {
    SolverStatistics s;
    const std::string what = "statistics";
    s.edge_arity = detail::get<int>(j, "edge_arity", what);
    s.edge_strategy = detail::get<std::string>(j, "edge_strategy", what);
    s.group_size = detail::get<int>(j, "group_size", what);
    s.binary_variables = detail::get<int>(j, "binary_variables", what);
    s.iterations = detail::get<int>(j, "iterations", what);
    s.test_instances = detail::get<int>(j, "test_instances", what);
    s.blocks_pruned = detail::get<int>(j, "blocks_pruned", what);
    s.affine_sweeps = detail::get<int>(j, "affine_sweeps", what);
    s.absorption_steps = detail::get<int>(j, "absorption_steps", what);
    s.replacements = detail::get<int>(j, "replacements", what);
    s.solver_calls = detail::get<int>(j, "solver_calls", what);
    return s;
}

/// The witness is written as variable -> value in instance order.
inline json to_json(const SolverReport& r, const CspInstance& inst) {
    json w = nullptr;
    if (r.witness) {
        if (r.witness->size() != inst.variables.size()) throw precondition_error("witness and instance differ in size");
        w = json::object();
        for (std::size_t i = 0; i < r.witness->size(); ++i) w[inst.variables[i]] = (*r.witness)[i];
    }
    return json{{"decision", to_string(r.decision)},
                {"witness", w},
                {"trace", r.trace},
                {"statistics", to_json(r.statistics)},
                {"config", to_json(r.config)}};
}

inline SolverReport report_from_json(const json& j, const CspInstance& inst) {
    SolverReport r;
    auto d = detail::get<std::string>(j, "decision", "report");
    if (d == "SAT")
        r.decision = Decision::sat;
    else if (d == "UNSAT")
        r.decision = Decision::unsat;
    else
        throw malformed_input("report decision must be SAT or UNSAT");
    const auto& w = detail::get<json>(j, "witness", "report");
    if (!w.is_null()) {
        if (!w.is_object()) throw malformed_input("report witness must be an object");
        Assignment a(inst.variables.size(), kUnassigned);
        for (const auto& [name, value] : w.items()) {
            if (!value.is_number_integer()) throw malformed_input("witness value for '" + name + "' is not an integer");
            a[inst.index_of(name)] = value.get<Element>();
        }
        r.witness = std::move(a);
    }
    r.trace = detail::get<std::vector<std::string>>(j, "trace", "report");
    r.statistics = statistics_from_json(detail::get<json>(j, "statistics", "report"));
    r.config = config_from_json(detail::get<json>(j, "config", "report"));
    return r;
}

}  // namespace fewsub::io

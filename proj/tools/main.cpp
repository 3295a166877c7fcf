#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fewsub/fewsub.hpp"

using namespace fewsub;
using io::json;

namespace {

enum Exit { kOk = 0, kNo = 1, kUsage = 2, kResource = 3, kInternal = 4 };

struct Options {
    std::string templ, instance, algebra, report, out, within, kind = "linear_mod_p", poly = "maltsev";
    int k_edge = 0;
    int term_depth = 3;
    int gen_cap = 2;
    bool verify_paths = false;
    bool verify_invariants = false;
    bool no_witness = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    int iteration_cap = 100000;
    bool as_json = false;
    bool trace = false;
    BenchmarkParams gen;
};

SolverConfig config_of(const Options& o) {
    SolverConfig c;
    if (o.k_edge) c.k_edge_arity = o.k_edge;
    c.term_depth = o.term_depth;
    c.generator_cap = o.gen_cap;
    c.verify_paths = o.verify_paths;
    c.verify_invariants = o.verify_invariants;
    c.seed = o.seed;
    c.jobs = o.jobs;
    c.iteration_cap = o.iteration_cap;
    c.trace = o.trace;
    c.witness = !o.no_witness;
    c.validate();
    return c;
}

RelationalTemplate need_template(const Options& o) {
    if (o.templ.empty()) throw malformed_input("--template is required");
    return io::template_from_json(io::load_file(o.templ));
}

CspInstance need_instance(const Options& o, const RelationalTemplate& t) {
    if (o.instance.empty()) throw malformed_input("--instance is required");
    auto inst = io::instance_from_json(io::load_file(o.instance));
    inst.validate(t);
    return inst;
}

ElementSet parse_set(const std::string& s, int size) {
    ElementSet out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        try {
            v = std::stoi(item);
        } catch (const std::exception&) {
            throw malformed_input("bad element '" + item + "' in --within");
        }
        if (v < 0 || v >= size) throw malformed_input("element " + item + " outside the universe");
        out.insert(v);
    }
    return out;
}

json domains_json(const BinaryInstance& b, const std::vector<ElementSet>& doms) {
    json out = json::object();
    for (int x = 0; x < b.size(); ++x) out[b.name(x)] = doms[x].to_vector();
    return out;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw malformed_input("cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void print_report(std::ostream& os, const SolverReport& r, const CspInstance& inst, bool trace) {
    os << "decision " << to_string(r.decision) << '\n';
    if (r.witness) {
        os << "witness";
        for (std::size_t i = 0; i < r.witness->size(); ++i) os << ' ' << inst.variables[i] << '=' << (*r.witness)[i];
        os << '\n';
    }
    const auto& s = r.statistics;
    os << "edge k=" << s.edge_arity << " (" << s.edge_strategy << ")\n"
       << "binary variables " << s.binary_variables << " of group size " << s.group_size << '\n'
       << "iterations " << s.iterations << ", test instances " << s.test_instances << ", blocks pruned "
       << s.blocks_pruned << ", absorption steps " << s.absorption_steps << ", replacements " << s.replacements
       << '\n';
    if (trace)
        for (const auto& l : r.trace) os << "  " << l << '\n';
}

int cmd_solve(const Options& o) {
    auto t = need_template(o);
    auto inst = need_instance(o, t);
    auto r = solve(t, inst, config_of(o));
    Output out(o.out);
    if (o.as_json)
        out.os() << io::to_json(r, inst).dump(2) << '\n';
    else
        print_report(out.os(), r, inst, o.trace);
    return r.decision == Decision::sat ? kOk : kNo;
}

int cmd_oracle(const Options& o) {
    auto t = need_template(o);
    auto inst = need_instance(o, t);
    auto a = oracle_solve(t, inst);
    Output out(o.out);
    if (o.as_json) {
        json w = nullptr;
        if (a) {
            w = json::object();
            for (std::size_t i = 0; i < a->size(); ++i) w[inst.variables[i]] = (*a)[i];
        }
        out.os() << json{{"decision", a ? "SAT" : "UNSAT"}, {"witness", w}}.dump(2) << '\n';
    } else {
        out.os() << "decision " << (a ? "SAT" : "UNSAT") << '\n';
        if (a) {
            out.os() << "witness";
            for (std::size_t i = 0; i < a->size(); ++i) out.os() << ' ' << inst.variables[i] << '=' << (*a)[i];
            out.os() << '\n';
        }
    }
    return a ? kOk : kNo;
}

// lac, slac, pc23 and affine on the grouped binary instance.
int cmd_stage(const std::string& stage, const Options& o) {
    auto t = need_template(o);
    auto inst = need_instance(o, t);
    auto cfg = config_of(o);
    Solver solver(t, cfg);
    auto bin = solver.binarize_instance(inst);
    auto& b = bin.instance;
    Trace tr{o.trace, {}};
    bool ok = false;
    std::vector<ElementSet> doms;
    std::vector<std::string> lines;
    int passive = 0;
    if (stage == "lac") {
        ok = run_lac(b, b.domains());
        doms = b.domains();
    } else if (stage == "slac") {
        auto s = run_slac(b, &tr);
        ok = s.has_value();
        if (s) doms = *s;
    } else if (stage == "pc23") {
        auto r = enforce_23_consistency(b, &tr);
        ok = r.has_value();
        if (r) doms = r->domains();
    } else {
        auto pc = enforce_23_consistency(b, &tr);
        if (pc) {
            AffineOptions aopt;
            aopt.generator_cap = cfg.generator_cap;
            aopt.verify_paths = cfg.verify_paths;
            auto res = affine_consistency_pass(*pc, solver.workspace_for(bin.group_size), aopt, &tr);
            lines = res.report.lines;
            ok = res.instance.has_value();
            if (res.instance) doms = res.instance->domains();
            passive = static_cast<int>(live_count(res.passive));
        }
    }
    Output out(o.out);
    const char* verdict = ok ? "consistent" : "contradiction";
    if (o.as_json) {
        json j{{"stage", stage}, {"result", verdict}, {"domains", ok ? domains_json(b, doms) : json(nullptr)}};
        if (stage == "affine") {
            j["report"] = lines;
            j["passive"] = passive;
        }
        j["trace"] = tr.lines;
        out.os() << j.dump(2) << '\n';
    } else {
        out.os() << stage << ' ' << verdict << '\n';
        if (ok)
            for (int x = 0; x < b.size(); ++x) out.os() << "  " << b.name(x) << ' ' << doms[x].to_string() << '\n';
        for (const auto& l : lines) out.os() << "  " << l << '\n';
        for (const auto& l : tr.lines) out.os() << "  " << l << '\n';
    }
    return ok ? kOk : kNo;
}

int cmd_absorb(const Options& o) {
    std::shared_ptr<const FiniteAlgebra> alg;
    if (!o.algebra.empty()) {
        alg = std::make_shared<const FiniteAlgebra>(io::algebra_from_json(io::load_file(o.algebra)));
    } else {
        Solver solver(need_template(o), config_of(o));
        alg = std::make_shared<const FiniteAlgebra>(solver.algebra());
    }
    ElementSet within = o.within.empty() ? ElementSet::full(alg->size()) : parse_set(o.within, alg->size());
    auto w = minimal_absorbing(*alg, o.term_depth, within);
    Output out(o.out);
    if (o.as_json) {
        json j{{"algebra", alg->name()}, {"within", within.to_vector()}, {"found", w.has_value()}};
        if (w) {
            j["subuniverse"] = w->subuniverse.to_vector();
            j["term"] = w->term.to_string(alg.get());
            j["arity"] = w->arity;
        }
        out.os() << j.dump(2) << '\n';
    } else if (w) {
        out.os() << "absorbing " << w->subuniverse.to_string() << " in " << within.to_string() << " by "
                 << w->term.to_string(alg.get()) << '\n';
    } else {
        out.os() << "no absorbing subuniverse in " << within.to_string() << " up to depth " << o.term_depth << '\n';
    }
    return w ? kOk : kNo;
}

int cmd_polysearch(const Options& o) {
    auto t = need_template(o);
    auto spec = PolymorphismSpec::parse(o.poly);
    auto r = find_special_polymorphism(t, spec);
    Output out(o.out);
    if (o.as_json) {
        json j{{"kind", spec.name()}, {"found", r.op.has_value()}, {"strategy", r.strategy}, {"exhaustive", r.exhaustive}};
        if (r.op) j["operation"] = io::to_json(*r.op);
        out.os() << j.dump(2) << '\n';
    } else if (r.op) {
        out.os() << spec.name() << " found (" << r.strategy << ")\n";
        out.os() << "table";
        for (auto v : r.op->entries) out.os() << ' ' << v;
        out.os() << '\n';
    } else {
        out.os() << spec.name() << " absent (" << r.strategy << (r.exhaustive ? "" : ", search capped") << ")\n";
    }
    if (!r.op && !r.exhaustive) return kResource;
    return r.op ? kOk : kNo;
}

int cmd_gen(const Options& o) {
    auto bm = generate_benchmark(parse_benchmark_kind(o.kind), o.gen, o.seed);
    json label = bm.label ? json(*bm.label ? "SAT" : "UNSAT") : json(nullptr);
    if (o.out.empty()) {
        std::cout << json{{"template", io::to_json(bm.templ)}, {"instance", io::to_json(bm.instance)}, {"label", label}}
                         .dump(2)
                  << '\n';
        return kOk;
    }
    std::filesystem::create_directories(o.out);
    auto dir = std::filesystem::path(o.out);
    io::save_file((dir / "template.json").string(), io::to_json(bm.templ));
    io::save_file((dir / "instance.json").string(), io::to_json(bm.instance));
    if (bm.system) {
        std::ofstream sys(dir / "system.txt");
        sys << bm.system->to_text();
    }
    std::cout << "wrote " << (dir / "template.json").string() << ' ' << (dir / "instance.json").string();
    if (bm.label) std::cout << " label " << (*bm.label ? "SAT" : "UNSAT");
    std::cout << '\n';
    return kOk;
}

int cmd_verify(const Options& o) {
    auto t = need_template(o);
    auto inst = need_instance(o, t);
    if (o.report.empty()) throw malformed_input("--report is required");
    auto recorded_json = io::load_file(o.report);
    auto recorded = io::report_from_json(recorded_json, inst);
    auto fresh = solve(t, inst, recorded.config);
    auto fresh_json = io::to_json(fresh, inst);
    std::vector<std::string> diffs;
    if (recorded.decision != fresh.decision)
        diffs.push_back("decision " + to_string(recorded.decision) + " != " + to_string(fresh.decision));
    if (recorded_json.at("witness") != fresh_json.at("witness")) diffs.push_back("witness differs");
    std::size_t n = std::max(recorded.trace.size(), fresh.trace.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto a = i < recorded.trace.size() ? recorded.trace[i] : "<missing>";
        auto b = i < fresh.trace.size() ? fresh.trace[i] : "<missing>";
        if (a != b) {
            diffs.push_back("trace line " + std::to_string(i + 1) + ": '" + a + "' != '" + b + "'");
            break;
        }
    }
    if (recorded_json.at("statistics") != fresh_json.at("statistics")) diffs.push_back("statistics differ");
    if (fresh.witness && !verify_solution(t, inst, *fresh.witness)) diffs.push_back("witness violates a constraint");
    Output out(o.out);
    if (o.as_json) {
        out.os() << json{{"match", diffs.empty()}, {"differences", diffs}}.dump(2) << '\n';
    } else {
        out.os() << (diffs.empty() ? "report reproduced" : "report differs") << '\n';
        for (const auto& d : diffs) out.os() << "  " << d << '\n';
    }
    return diffs.empty() ? kOk : kNo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fewsub: CSP solver for templates with few subpowers"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--template", o.templ, "template JSON");
        s->add_option("--instance", o.instance, "instance JSON");
        s->add_option("--k-edge", o.k_edge, "edge term arity k (default: search 2, 3)")->check(CLI::Range(2, 8));
        s->add_option("--term-depth", o.term_depth, "term depth bound")->check(CLI::PositiveNumber);
        s->add_option("--gen-cap", o.gen_cap, "generators per candidate subuniverse")->check(CLI::PositiveNumber);
        s->add_flag("--verify-paths", o.verify_paths, "check path independence of relevant congruences");
        s->add_flag("--verify-invariants", o.verify_invariants, "re-check reduction invariants");
        s->add_flag("--no-witness", o.no_witness, "decide only");
        s->add_option("--seed", o.seed, "random seed");
        s->add_option("--jobs", o.jobs, "worker count")->check(CLI::PositiveNumber);
        s->add_option("--iteration-cap", o.iteration_cap, "reduction loop cap")->check(CLI::PositiveNumber);
        s->add_flag("--json", o.as_json, "machine-readable output");
        s->add_flag("--trace", o.trace, "include pruning events");
        s->add_option("-o,--out", o.out, "output path (gen: directory)");
    };
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (auto [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"solve", "decide an instance and extract a witness"},
             {"oracle", "decide by backtracking search"},
             {"lac", "linear arc consistency on the binary instance"},
             {"slac", "singleton linear arc consistency on the binary instance"},
             {"pc23", "(2,3)-consistency on the binary instance"},
             {"affine", "affine consistency pass on the binary instance"},
             {"absorb", "minimal absorbing subuniverse with a witness term"},
             {"polysearch", "search for a polymorphism with given identities"},
             {"gen", "generate a benchmark instance"},
             {"verify", "replay a recorded report and diff"}}) {
        auto* s = app.add_subcommand(name, help);
        common(s);
        subs.emplace_back(name, s);
    }
    auto* absorb = subs[6].second;
    absorb->add_option("--algebra", o.algebra, "algebra JSON (default: the template's algebra)");
    absorb->add_option("--within", o.within, "universe as comma-separated elements");
    subs[7].second->add_option("--kind", o.poly, "maltsev, majority, nu:L or edge:K");
    auto* gen = subs[8].second;
    gen->add_option("--kind", o.kind, "linear_mod_p, twosat, horn3 or random_template");
    gen->add_option("--p", o.gen.p, "field size");
    gen->add_option("--vars", o.gen.vars, "variables");
    gen->add_option("--eqs,--constraints", o.gen.constraints, "equations or clauses");
    gen->add_option("--min-arity", o.gen.min_arity, "least equation arity");
    gen->add_option("--max-arity", o.gen.max_arity, "largest equation arity");
    gen->add_option("--domain", o.gen.domain, "random template domain size");
    gen->add_option("--relations", o.gen.relations, "random template relation count");
    gen->add_option("--density", o.gen.density, "random template tuple density in percent");
    subs[9].second->add_option("--report", o.report, "recorded report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        for (auto& [name, s] : subs) {
            if (!s->parsed()) continue;
            if (name == "solve") return cmd_solve(o);
            if (name == "oracle") return cmd_oracle(o);
            if (name == "absorb") return cmd_absorb(o);
            if (name == "polysearch") return cmd_polysearch(o);
            if (name == "gen") return cmd_gen(o);
            if (name == "verify") return cmd_verify(o);
            return cmd_stage(name, o);
        }
    } catch (const resource_limit& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return kResource;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

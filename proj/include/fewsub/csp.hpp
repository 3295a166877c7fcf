#pragma once

// Relational templates, CSP instances, assignments and polymorphism checks.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fewsub/algebra.hpp"

namespace fewsub {

class Relation {
public:
    Relation() = default;

    Relation(std::string name, int arity, int domain_size, std::vector<Tuple> tuples)
        : name_(std::move(name)), arity_(arity), domain_(domain_size), tuples_(std::move(tuples)) {
        if (arity_ < 1) throw malformed_input("relation '" + name_ + "' must have arity >= 1");
        for (const auto& t : tuples_) {
            if (static_cast<int>(t.size()) != arity_)
                throw malformed_input("relation '" + name_ + "' has a tuple of the wrong arity");
            for (auto v : t)
                if (v < 0 || v >= domain_) throw malformed_input("relation '" + name_ + "' has a value outside the domain");
        }
        std::sort(tuples_.begin(), tuples_.end());
        tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
        auto cells = detail::checked_power(static_cast<std::uint64_t>(domain_), arity_, detail::kMaxTableEntries);
        member_.assign(cells, 0);
        for (const auto& t : tuples_) member_[encode_tuple(domain_, t)] = 1;
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] int arity() const { return arity_; }
    [[nodiscard]] int domain_size() const { return domain_; }
    [[nodiscard]] const std::vector<Tuple>& tuples() const { return tuples_; }
    [[nodiscard]] std::size_t size() const { return tuples_.size(); }

    [[nodiscard]] bool contains(std::span<const Element> t) const { return member_[encode_tuple(domain_, t)] != 0; }
    [[nodiscard]] bool contains_code(std::size_t code) const { return member_[code] != 0; }

private:
    std::string name_;
    int arity_ = 0;
    int domain_ = 0;
    std::vector<Tuple> tuples_;
    std::vector<char> member_;
};

/// Name of the singleton unary relation {a}.
inline std::string constant_relation_name(Element a) { return "const_" + std::to_string(a); }

class RelationalTemplate;
bool is_polymorphism(const RelationalTemplate& t, const OperationTable& f);

class RelationalTemplate {
public:
    RelationalTemplate() = default;

    RelationalTemplate(int domain_size, std::vector<Relation> relations, std::vector<OperationTable> polymorphisms = {},
                       bool add_singletons = true)
        : domain_(domain_size), relations_(std::move(relations)), polymorphisms_(std::move(polymorphisms)) {
        if (domain_ < 1 || domain_ > kMaxDomain)
            throw malformed_input("template domain size must be in 1.." + std::to_string(kMaxDomain));
        for (const auto& r : relations_)
            if (r.domain_size() != domain_) throw malformed_input("relation '" + r.name() + "' has the wrong domain");
        if (add_singletons)
            for (Element a = 0; a < domain_; ++a) {
                auto name = constant_relation_name(a);
                if (std::none_of(relations_.begin(), relations_.end(), [&](const Relation& r) { return r.name() == name; }))
                    relations_.emplace_back(name, 1, domain_, std::vector<Tuple>{{a}});
            }
        for (std::size_t i = 0; i < relations_.size(); ++i)
            if (!index_.emplace(relations_[i].name(), i).second)
                throw malformed_input("duplicate relation name '" + relations_[i].name() + "'");
        for (const auto& f : polymorphisms_) {
            if (f.size != domain_) throw malformed_input("declared polymorphism '" + f.name + "' has the wrong domain");
            if (!is_polymorphism(*this, f))
                throw malformed_input("declared polymorphism '" + f.name + "' does not preserve the relations");
        }
    }

    [[nodiscard]] int domain_size() const { return domain_; }
    [[nodiscard]] const std::vector<Relation>& relations() const { return relations_; }
    [[nodiscard]] const std::vector<OperationTable>& polymorphisms() const { return polymorphisms_; }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] const Relation& relation(const std::string& name) const {
        auto i = find(name);
        if (!i) throw malformed_input("unknown relation '" + name + "'");
        return relations_[*i];
    }

private:
    int domain_ = 0;
    std::vector<Relation> relations_;
    std::vector<OperationTable> polymorphisms_;
    std::map<std::string, std::size_t> index_;
};

inline bool is_polymorphism(const RelationalTemplate& t, const OperationTable& f) {
    if (f.size != t.domain_size())
        throw precondition_error("operation '" + f.name + "' acts on a domain of size " + std::to_string(f.size) +
                                 ", template has " + std::to_string(t.domain_size()));
    std::vector<Element> args(static_cast<std::size_t>(f.arity));
    for (const auto& rel : t.relations()) {
        const auto& tuples = rel.tuples();
        if (tuples.empty()) continue;
        std::vector<std::size_t> pick(static_cast<std::size_t>(f.arity), 0);
        Tuple image(static_cast<std::size_t>(rel.arity()));
        while (true) {
            for (int c = 0; c < rel.arity(); ++c) {
                for (int i = 0; i < f.arity; ++i) args[i] = tuples[pick[i]][c];
                image[c] = f(args);
            }
            if (!rel.contains(image)) return false;
            int p = f.arity - 1;
            for (; p >= 0; --p) {
                if (++pick[p] < tuples.size()) break;
                pick[p] = 0;
            }
            if (p < 0) break;
        }
    }
    return true;
}

struct Constraint {
    std::string relation;
    std::vector<int> scope;  // variable indices
};

struct CspInstance {
    std::vector<std::string> variables;
    std::vector<Constraint> constraints;

    [[nodiscard]] int size() const { return static_cast<int>(variables.size()); }

    [[nodiscard]] int index_of(const std::string& name) const {
        auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) throw malformed_input("undeclared variable '" + name + "'");
        return static_cast<int>(it - variables.begin());
    }

    int add_variable(std::string name) {
        variables.push_back(std::move(name));
        return size() - 1;
    }

    void add_constraint(std::string relation, std::vector<int> scope) {
        constraints.push_back({std::move(relation), std::move(scope)});
    }

    void validate(const RelationalTemplate& t) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            for (std::size_t j = i + 1; j < variables.size(); ++j)
                if (variables[i] == variables[j]) throw malformed_input("duplicate variable '" + variables[i] + "'");
        for (const auto& c : constraints) {
            const auto& r = t.relation(c.relation);
            if (static_cast<int>(c.scope.size()) != r.arity())
                throw malformed_input("constraint on '" + c.relation + "' has scope of length " +
                                      std::to_string(c.scope.size()) + ", relation arity is " +
                                      std::to_string(r.arity()));
            for (auto v : c.scope)
                if (v < 0 || v >= size()) throw malformed_input("constraint scope names an undeclared variable");
        }
    }
};

/// Values indexed like the instance's variables; kUnassigned marks a missing value.
using Assignment = std::vector<Element>;
inline constexpr Element kUnassigned = -1;

inline bool verify_solution(const RelationalTemplate& t, const CspInstance& inst, const Assignment& a) {
    if (static_cast<int>(a.size()) != inst.size())
        throw precondition_error("assignment covers " + std::to_string(a.size()) + " of " +
                                 std::to_string(inst.size()) + " variables");
    for (auto v : a) {
        if (v == kUnassigned) throw precondition_error("assignment is partial");
        if (v < 0 || v >= t.domain_size()) throw malformed_input("assignment value outside the domain");
    }
    Tuple image;
    for (const auto& c : inst.constraints) {
        image.clear();
        for (auto v : c.scope) image.push_back(a[v]);
        if (!t.relation(c.relation).contains(image)) return false;
    }
    return true;
}

}  // namespace fewsub

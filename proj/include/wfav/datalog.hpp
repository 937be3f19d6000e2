#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

// Stratified Datalog with negation, evaluated bottom-up by semi-naive
// iteration. Constants are interned symbols and integers; the only
// built-ins are the integer comparisons lt/le/eq (usable negated).

namespace wfav::datalog {

struct Term {
    enum class Kind { Variable, Symbol, Int } kind = Kind::Symbol;
    std::string name;       // variable or symbol spelling
    std::int64_t ival = 0;  // for Kind::Int

    static Term var(std::string n) { return {Kind::Variable, std::move(n), 0}; }
    static Term sym(std::string n) { return {Kind::Symbol, std::move(n), 0}; }
    static Term num(std::int64_t v) { return {Kind::Int, {}, v}; }

    auto operator<=>(const Term&) const = default;
};

struct Atom {
    std::string predicate;
    std::vector<Term> terms;

    auto operator<=>(const Atom&) const = default;
};

struct Literal {
    Atom atom;
    bool negated = false;
};

struct Rule {
    Atom head;
    std::vector<Literal> body;  // joined left to right as written
};

struct Program {
    std::vector<Rule> rules;
    std::vector<Atom> edb;  // ground facts
};

struct ProgramError {
    std::string message;
};

// Ground constant value as stored in relations.
using Value = std::variant<std::string, std::int64_t>;

struct Fact {
    std::string predicate;
    std::vector<Value> values;

    auto operator<=>(const Fact&) const = default;
};

std::string to_string(const Value& v);
std::string to_string(const Fact& f);
std::string to_string(const Atom& a);

// Static checks: ground EDB, fixed arities, range restriction, negated and
// built-in variables bound by positive literals.
std::optional<ProgramError> check_program(const Program& p);

struct Stratum {
    std::vector<std::string> predicates;  // defined in this stratum
    std::vector<const Rule*> rules;
};

struct Stratification {
    std::vector<Stratum> strata;
    std::optional<ProgramError> error;  // set when negation crosses a cycle
};

Stratification stratify(const Program& p);

class EvalResult {
public:
    const std::set<Fact>& facts() const { return facts_; }
    bool known_predicate(const std::string& pred) const { return arities_.count(pred) > 0; }

    std::set<Fact> facts_;
    std::map<std::string, size_t> arities_;  // every predicate mentioned by the program
};

struct EvalError {
    std::string message;
};

// Semi-naive bottom-up evaluation of the unique perfect model.
// Pre: check_program passed and the program stratifies.
EvalResult evaluate(const Program& p);

// A substitution maps the pattern's variable names to values.
using Binding = std::map<std::string, Value>;

struct QueryResult {
    std::vector<Binding> bindings;
    std::optional<EvalError> error;  // UnknownPredicate
};

QueryResult query(const EvalResult& model, const Atom& pattern);

// Text form: `head :- lit, not lit, ... .` rules and `pred(a,1).` facts,
// `%` comments. Uppercase-initial identifiers are variables; quoted or
// lowercase identifiers are symbols.
struct ParsedProgram {
    Program program;
    std::optional<ProgramError> error;
};

ParsedProgram parse_program(const std::string& text);

// Sorted `pred(c1,c2).` lines for external cross-checking.
std::string dump_facts(const std::set<Fact>& facts);

}  // namespace wfav::datalog

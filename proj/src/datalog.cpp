#include "wfav/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace wfav::datalog {

namespace {

bool is_builtin(const std::string& pred) { return pred == "lt" || pred == "le" || pred == "eq"; }

std::set<std::string> positive_vars(const Rule& r) {
    std::set<std::string> vars;
    for (const auto& lit : r.body) {
        if (lit.negated || is_builtin(lit.atom.predicate)) continue;
        for (const auto& t : lit.atom.terms)
            if (t.kind == Term::Kind::Variable) vars.insert(t.name);
    }
    return vars;
}

}  // namespace

std::string to_string(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    const std::string& s = std::get<std::string>(v);
    bool plain = !s.empty() && (std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_');
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
    return plain ? s : "\"" + s + "\"";
}

std::string to_string(const Fact& f) {
    std::string out = f.predicate + "(";
    for (size_t i = 0; i < f.values.size(); ++i) {
        if (i) out += ",";
        out += to_string(f.values[i]);
    }
    return out + ")";
}

std::string to_string(const Atom& a) {
    std::string out = a.predicate + "(";
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (i) out += ",";
        const Term& t = a.terms[i];
        out += t.kind == Term::Kind::Int ? std::to_string(t.ival) : t.name;
    }
    return out + ")";
}

std::optional<ProgramError> check_program(const Program& p) {
    std::map<std::string, size_t> arity;
    auto note_arity = [&](const std::string& pred, size_t n) -> std::optional<ProgramError> {
        auto [it, fresh] = arity.emplace(pred, n);
        if (!fresh && it->second != n)
            return ProgramError{"predicate " + pred + " used with arities " +
                                std::to_string(it->second) + " and " + std::to_string(n)};
        return std::nullopt;
    };

    for (const auto& f : p.edb) {
        for (const auto& t : f.terms)
            if (t.kind == Term::Kind::Variable)
                return ProgramError{"EDB fact " + to_string(f) + " is not ground"};
        if (is_builtin(f.predicate))
            return ProgramError{"built-in " + f.predicate + " cannot be a fact"};
        if (auto e = note_arity(f.predicate, f.terms.size())) return e;
    }
    for (const auto& r : p.rules) {
        if (is_builtin(r.head.predicate))
            return ProgramError{"built-in " + r.head.predicate + " cannot be a rule head"};
        if (auto e = note_arity(r.head.predicate, r.head.terms.size())) return e;
        for (const auto& lit : r.body) {
            if (is_builtin(lit.atom.predicate)) {
                if (lit.atom.terms.size() != 2)
                    return ProgramError{"built-in " + lit.atom.predicate + " needs two arguments"};
                continue;
            }
            if (auto e = note_arity(lit.atom.predicate, lit.atom.terms.size())) return e;
        }
        auto bound = positive_vars(r);
        for (const auto& t : r.head.terms)
            if (t.kind == Term::Kind::Variable && !bound.count(t.name))
                return ProgramError{"head variable " + t.name + " of " + to_string(r.head) +
                                    " not bound by a positive body literal"};
        for (const auto& lit : r.body) {
            if (!lit.negated && !is_builtin(lit.atom.predicate)) continue;
            for (const auto& t : lit.atom.terms)
                if (t.kind == Term::Kind::Variable && !bound.count(t.name))
                    return ProgramError{"variable " + t.name + " in " +
                                        (lit.negated ? "negated " : "built-in ") +
                                        to_string(lit.atom) +
                                        " not bound by a positive body literal"};
        }
    }
    return std::nullopt;
}

Stratification stratify(const Program& p) {
    Stratification out;

    std::set<std::string> preds;
    for (const auto& f : p.edb) preds.insert(f.predicate);
    for (const auto& r : p.rules) {
        preds.insert(r.head.predicate);
        for (const auto& lit : r.body)
            if (!is_builtin(lit.atom.predicate)) preds.insert(lit.atom.predicate);
    }

    // head -> body dependencies, annotated with the literal's polarity.
    std::map<std::string, std::vector<std::pair<std::string, bool>>> deps;  // (target, negated)
    for (const auto& r : p.rules)
        for (const auto& lit : r.body)
            if (!is_builtin(lit.atom.predicate))
                deps[r.head.predicate].push_back({lit.atom.predicate, lit.negated});

    // Iterative level assignment; a level past the predicate count means a
    // negative cycle.
    std::map<std::string, size_t> level;
    for (const auto& q : preds) level[q] = 0;
    const size_t limit = preds.size() + 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [head, ds] : deps) {
            size_t want = level[head];
            for (const auto& [target, neg] : ds)
                want = std::max(want, level[target] + (neg ? 1 : 0));
            if (want > level[head]) {
                level[head] = want;
                changed = true;
                if (want >= limit) {
                    // Recover the offending predicates for the message.
                    std::set<std::string> cyc;
                    for (const auto& [h, ds2] : deps)
                        for (const auto& [t, neg] : ds2)
                            if (neg && level[t] >= limit - 1) {
                                cyc.insert(h);
                                cyc.insert(t);
                            }
                    if (cyc.empty()) cyc.insert(head);
                    std::string names;
                    for (const auto& n : cyc) names += (names.empty() ? "" : ",") + n;
                    out.error = ProgramError{"not stratifiable: negation cycle through {" + names +
                                             "}"};
                    return out;
                }
            }
        }
    }

    std::map<size_t, Stratum> by_level;
    for (const auto& r : p.rules) by_level[level[r.head.predicate]].rules.push_back(&r);
    std::set<std::string> heads;
    for (const auto& r : p.rules) heads.insert(r.head.predicate);
    for (const auto& h : heads) by_level[level[h]].predicates.push_back(h);
    for (auto& [lv, st] : by_level) {
        if (st.rules.empty() && st.predicates.empty()) continue;
        std::sort(st.predicates.begin(), st.predicates.end());
        out.strata.push_back(std::move(st));
    }
    return out;
}

namespace {

Value term_value(const Term& t) {
    if (t.kind == Term::Kind::Int) return Value{t.ival};
    return Value{t.name};
}

using Tuple = std::vector<Value>;
using Relation = std::set<Tuple>;

struct EvalState {
    std::map<std::string, Relation> full;
    std::map<std::string, size_t>* arities;
};

// Resolves a term under a binding; nullopt when the variable is free.
std::optional<Value> resolve(const Term& t, const std::map<std::string, Value>& binding) {
    if (t.kind != Term::Kind::Variable) return term_value(t);
    auto it = binding.find(t.name);
    if (it == binding.end()) return std::nullopt;
    return it->second;
}

bool eval_builtin(const std::string& pred, const Value& a, const Value& b, bool& type_error) {
    if (pred == "eq") return a == b;
    if (!std::holds_alternative<std::int64_t>(a) || !std::holds_alternative<std::int64_t>(b)) {
        type_error = true;
        return false;
    }
    std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
    return pred == "lt" ? x < y : x <= y;
}

// Left-to-right join over the rule body. `delta_pos` (if >= 0) restricts
// that body literal to the given delta relation.
void eval_rule(const Rule& r, EvalState& st, int delta_pos, const Relation* delta,
               std::set<Fact>& out, std::optional<EvalError>& err) {
    std::map<std::string, Value> binding;

    std::function<void(size_t)> step = [&](size_t idx) {
        if (err) return;
        if (idx == r.body.size()) {
            Fact f;
            f.predicate = r.head.predicate;
            for (const auto& t : r.head.terms) f.values.push_back(*resolve(t, binding));
            out.insert(std::move(f));
            return;
        }
        const Literal& lit = r.body[idx];
        const std::string& pred = lit.atom.predicate;
        if (is_builtin(pred)) {
            auto a = resolve(lit.atom.terms[0], binding);
            auto b = resolve(lit.atom.terms[1], binding);
            bool type_error = false;
            bool val = eval_builtin(pred, *a, *b, type_error);
            if (type_error) {
                err = EvalError{"built-in " + pred + " applied to non-integer arguments"};
                return;
            }
            if (val != lit.negated) step(idx + 1);
            return;
        }
        if (lit.negated) {
            Tuple t;
            for (const auto& term : lit.atom.terms) t.push_back(*resolve(term, binding));
            bool present = st.full.count(pred) && st.full[pred].count(t);
            if (!present) step(idx + 1);
            return;
        }
        const Relation* rel =
            (static_cast<int>(idx) == delta_pos) ? delta : &st.full[pred];
        for (const Tuple& tuple : *rel) {
            if (tuple.size() != lit.atom.terms.size()) continue;
            std::vector<std::pair<std::string, Value>> added;
            bool match = true;
            for (size_t k = 0; k < tuple.size(); ++k) {
                const Term& term = lit.atom.terms[k];
                if (term.kind != Term::Kind::Variable) {
                    if (term_value(term) != tuple[k]) {
                        match = false;
                        break;
                    }
                    continue;
                }
                auto it = binding.find(term.name);
                if (it != binding.end()) {
                    if (it->second != tuple[k]) {
                        match = false;
                        break;
                    }
                } else {
                    binding.emplace(term.name, tuple[k]);
                    added.push_back({term.name, tuple[k]});
                }
            }
            if (match) step(idx + 1);
            for (const auto& [name, v] : added) binding.erase(name);
        }
    };
    step(0);
}

}  // namespace

EvalResult evaluate(const Program& p) {
    EvalResult res;
    for (const auto& f : p.edb) res.arities_.emplace(f.predicate, f.terms.size());
    for (const auto& r : p.rules) {
        res.arities_.emplace(r.head.predicate, r.head.terms.size());
        for (const auto& lit : r.body)
            if (!is_builtin(lit.atom.predicate))
                res.arities_.emplace(lit.atom.predicate, lit.atom.terms.size());
    }

    EvalState st;
    st.arities = &res.arities_;
    for (const auto& f : p.edb) {
        Tuple t;
        for (const auto& term : f.terms) t.push_back(term_value(term));
        st.full[f.predicate].insert(std::move(t));
    }

    Stratification strat = stratify(p);
    std::optional<EvalError> err;

    for (const auto& stratum : strat.strata) {
        std::set<std::string> idb(stratum.predicates.begin(), stratum.predicates.end());

        // Round zero: every rule against the full relations.
        std::map<std::string, Relation> delta;
        for (const Rule* r : stratum.rules) {
            std::set<Fact> derived;
            eval_rule(*r, st, -1, nullptr, derived, err);
            for (const auto& f : derived) {
                Tuple t(f.values);
                if (st.full[f.predicate].insert(t).second) delta[f.predicate].insert(t);
            }
        }

        // Semi-naive rounds: recursive literals range over the last delta.
        while (!delta.empty() && !err) {
            std::map<std::string, Relation> next;
            for (const Rule* r : stratum.rules) {
                for (size_t i = 0; i < r->body.size(); ++i) {
                    const Literal& lit = r->body[i];
                    if (lit.negated || is_builtin(lit.atom.predicate)) continue;
                    if (!idb.count(lit.atom.predicate)) continue;
                    auto dit = delta.find(lit.atom.predicate);
                    if (dit == delta.end()) continue;
                    std::set<Fact> derived;
                    eval_rule(*r, st, static_cast<int>(i), &dit->second, derived, err);
                    for (const auto& f : derived) {
                        Tuple t(f.values);
                        if (st.full[f.predicate].insert(t).second) next[f.predicate].insert(t);
                    }
                }
            }
            delta = std::move(next);
        }
        if (err) break;
    }

    if (err) {
        // Surface evaluation errors as a poisoned result; callers check
        // program validity first, so this only covers built-in type misuse.
        res.facts_.clear();
        res.facts_.insert(Fact{"__error__", {Value{err->message}}});
        return res;
    }

    for (const auto& [pred, rel] : st.full)
        for (const auto& t : rel) res.facts_.insert(Fact{pred, t});
    return res;
}

QueryResult query(const EvalResult& model, const Atom& pattern) {
    QueryResult out;
    if (!model.known_predicate(pattern.predicate)) {
        out.error = EvalError{"unknown predicate " + pattern.predicate};
        return out;
    }
    for (const auto& f : model.facts()) {
        if (f.predicate != pattern.predicate) continue;
        if (f.values.size() != pattern.terms.size()) continue;
        Binding b;
        bool match = true;
        for (size_t i = 0; i < f.values.size() && match; ++i) {
            const Term& t = pattern.terms[i];
            if (t.kind != Term::Kind::Variable) {
                match = term_value(t) == f.values[i];
                continue;
            }
            auto it = b.find(t.name);
            if (it != b.end())
                match = it->second == f.values[i];
            else
                b.emplace(t.name, f.values[i]);
        }
        if (match) out.bindings.push_back(std::move(b));
    }
    std::sort(out.bindings.begin(), out.bindings.end());
    return out;
}

std::string dump_facts(const std::set<Fact>& facts) {
    std::ostringstream out;
    for (const auto& f : facts) out << to_string(f) << ".\n";
    return out.str();
}

// ---- text form ----

namespace {

struct PTok {
    enum class K { Ident, Int, String, Punct, End } kind = K::End;
    std::string text;
    std::int64_t ival = 0;
};

class PLex {
public:
    explicit PLex(const std::string& s) : s_(s) { next(); }
    const PTok& peek() const { return cur_; }
    PTok take() {
        PTok t = cur_;
        next();
        return t;
    }

private:
    void next() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '%') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
        cur_ = {};
        if (pos_ >= s_.size()) return;
        char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            cur_ = {PTok::K::Ident, s_.substr(start, pos_ - start), 0};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            bool negative = c == '-';
            if (negative) ++pos_;
            std::int64_t v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                v = v * 10 + (s_[pos_] - '0');
                ++pos_;
            }
            cur_ = {PTok::K::Int, {}, negative ? -v : v};
            return;
        }
        if (c == '"') {
            ++pos_;
            std::string body;
            while (pos_ < s_.size() && s_[pos_] != '"') body += s_[pos_++];
            if (pos_ < s_.size()) ++pos_;
            cur_ = {PTok::K::String, body, 0};
            return;
        }
        if (c == ':' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '-') {
            cur_ = {PTok::K::Punct, ":-", 0};
            pos_ += 2;
            return;
        }
        cur_ = {PTok::K::Punct, std::string(1, c), 0};
        ++pos_;
    }

    const std::string& s_;
    size_t pos_ = 0;
    PTok cur_;
};

}  // namespace

ParsedProgram parse_program(const std::string& text) {
    ParsedProgram out;
    PLex lex(text);

    auto fail = [&](const std::string& msg) {
        out.error = ProgramError{msg};
        return out;
    };

    auto parse_atom = [&](Atom& atom) -> bool {
        if (lex.peek().kind != PTok::K::Ident) return false;
        atom.predicate = lex.take().text;
        if (!(lex.peek().kind == PTok::K::Punct && lex.peek().text == "(")) return true;
        lex.take();
        while (true) {
            PTok t = lex.take();
            if (t.kind == PTok::K::Ident) {
                bool variable = std::isupper(static_cast<unsigned char>(t.text[0]));
                atom.terms.push_back(variable ? Term::var(t.text) : Term::sym(t.text));
            } else if (t.kind == PTok::K::Int) {
                atom.terms.push_back(Term::num(t.ival));
            } else if (t.kind == PTok::K::String) {
                atom.terms.push_back(Term::sym(t.text));
            } else {
                return false;
            }
            PTok sep = lex.take();
            if (sep.kind == PTok::K::Punct && sep.text == ",") continue;
            if (sep.kind == PTok::K::Punct && sep.text == ")") break;
            return false;
        }
        return true;
    };

    while (lex.peek().kind != PTok::K::End) {
        Atom head;
        if (!parse_atom(head)) return fail("expected a rule head");
        PTok t = lex.take();
        if (t.kind == PTok::K::Punct && t.text == ".") {
            bool ground = true;
            for (const auto& term : head.terms)
                if (term.kind == Term::Kind::Variable) ground = false;
            if (!ground) return fail("fact " + to_string(head) + " is not ground");
            out.program.edb.push_back(std::move(head));
            continue;
        }
        if (!(t.kind == PTok::K::Punct && t.text == ":-"))
            return fail("expected '.' or ':-' after " + to_string(head));
        Rule rule;
        rule.head = std::move(head);
        while (true) {
            Literal lit;
            if (lex.peek().kind == PTok::K::Ident && lex.peek().text == "not") {
                lex.take();
                lit.negated = true;
            }
            if (!parse_atom(lit.atom)) return fail("expected a body literal");
            rule.body.push_back(std::move(lit));
            PTok sep = lex.take();
            if (sep.kind == PTok::K::Punct && sep.text == ",") continue;
            if (sep.kind == PTok::K::Punct && sep.text == ".") break;
            return fail("expected ',' or '.' in rule body");
        }
        out.program.rules.push_back(std::move(rule));
    }
    return out;
}

}  // namespace wfav::datalog

#include <algorithm>
#include <map>

#include "line_lexer.hpp"
#include "wfav/parse.hpp"

namespace wfav {

namespace detail {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    lines.push_back(cur);
    return lines;
}

}  // namespace detail

namespace {

using detail::LineLexer;
using detail::TokKind;

bool valid_id(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

struct AttrValue {
    enum class Kind { Flag, Ident, Int, String, List, SendList } kind = Kind::Flag;
    std::string text;
    std::uint64_t ival = 0;
    std::vector<std::string> list;
    std::vector<std::pair<std::string, std::string>> send_list;  // info -> destination
    SourceSpan span;
};

using AttrMap = std::map<std::string, AttrValue>;

// Parses the trailing `key=value`/bare-flag section of a statement.
AttrMap parse_attrs(LineLexer& lex) {
    AttrMap attrs;
    while (!lex.at_end() && lex.ok()) {
        SourceSpan at = lex.span_here();
        std::string key = lex.expect_ident("attribute name");
        if (key.empty()) break;
        AttrValue v;
        v.span = at;
        if (!lex.at_punct('=')) {
            v.kind = AttrValue::Kind::Flag;
            attrs[key] = v;
            continue;
        }
        lex.take();  // '='
        if (lex.at_punct('{')) {
            lex.take();
            bool arrows = false;
            while (!lex.at_punct('}') && !lex.at_end() && lex.ok()) {
                std::string item = lex.expect_ident("set element");
                if (item.empty()) break;
                if (lex.at_punct('-')) { /* never happens: lexer folds '->' */
                }
                if (lex.peek().kind == TokKind::Punct && lex.peek().text == "->") {
                    lex.take();
                    std::string dest = lex.expect_ident("destination actor");
                    v.send_list.push_back({item, dest});
                    arrows = true;
                } else {
                    v.list.push_back(item);
                }
                if (lex.at_punct(',')) lex.take();
            }
            if (!lex.at_end()) lex.expect_punct('}');
            v.kind = arrows ? AttrValue::Kind::SendList : AttrValue::Kind::List;
        } else if (lex.peek().kind == TokKind::Int) {
            v.kind = AttrValue::Kind::Int;
            v.ival = lex.take().ival;
        } else if (lex.peek().kind == TokKind::String) {
            v.kind = AttrValue::Kind::String;
            v.text = lex.take().text;
        } else {
            v.kind = AttrValue::Kind::Ident;
            v.text = lex.expect_ident("attribute value");
        }
        attrs[key] = v;
    }
    return attrs;
}

class GqmParser {
public:
    GqmParser(const std::string& text, const std::string& file) : text_(text), file_(file) {}

    GqmParseResult run() {
        auto lines = detail::split_lines(text_);
        for (size_t n = 0; n < lines.size(); ++n) parse_line(lines[n], static_cast<int>(n) + 1);
        GqmParseResult res;
        res.diagnostics = std::move(diags_);
        if (!has_errors(res.diagnostics)) res.model = std::move(model_);
        return res;
    }

private:
    void err(const SourceSpan& s, const std::string& msg) {
        diags_.push_back({s, Severity::Error, msg});
    }

    // Declares an id in the global namespace; reports duplicates.
    void declare(const std::string& id, const char* what, const SourceSpan& s) {
        if (!valid_id(id)) {
            err(s, std::string("invalid ") + what + " identifier '" + id + "'");
            return;
        }
        auto [it, fresh] = defined_.emplace(id, what);
        if (!fresh)
            err(s, std::string("duplicate id '") + id + "' (already declared as " + it->second +
                       ")");
    }

    bool check_ref(const std::string& id, const char* what, const SourceSpan& s) {
        auto it = defined_.find(id);
        if (it == defined_.end()) {
            err(s, std::string("reference to undefined ") + what + " '" + id + "'");
            return false;
        }
        if (it->second != std::string(what)) {
            err(s, "'" + id + "' is a " + it->second + ", expected a " + what);
            return false;
        }
        return true;
    }

    const AttrValue* need(const AttrMap& attrs, const char* key, const SourceSpan& s) {
        auto it = attrs.find(key);
        if (it == attrs.end()) {
            err(s, std::string("missing attribute '") + key + "'");
            return nullptr;
        }
        return &it->second;
    }

    bool parse_check_flag(const AttrValue& v, bool& out) {
        if (v.kind == AttrValue::Kind::Ident && (v.text == "B" || v.text == "NB")) {
            out = v.text == "B";
            return true;
        }
        err(v.span, "check must be B or NB");
        return false;
    }

    void parse_line(const std::string& line, int lineno) {
        LineLexer lex(line, file_, lineno, &diags_);
        if (lex.at_end()) return;
        SourceSpan stmt_span = lex.span_here();
        std::string kw = lex.expect_ident("statement keyword");
        if (kw.empty()) return;

        if (kw == "actor") {
            std::string id = lex.expect_ident("actor id");
            AttrMap attrs = parse_attrs(lex);
            declare(id, "actor", stmt_span);
            Actor a;
            a.id = id;
            if (const AttrValue* k = need(attrs, "kind", stmt_span)) {
                if (k->text == "agent")
                    a.kind = ActorKind::Agent;
                else if (k->text == "role")
                    a.kind = ActorKind::Role;
                else
                    err(k->span, "actor kind must be agent or role");
            }
            if (auto it = attrs.find("plays"); it != attrs.end()) {
                for (const auto& r : it->second.list)
                    if (check_ref(r, "actor", it->second.span)) a.plays.push_back(r);
            }
            model_.actors.push_back(std::move(a));
        } else if (kw == "goal") {
            std::string id = lex.expect_ident("goal id");
            std::string label;
            if (lex.peek().kind == TokKind::String) label = lex.take().text;
            AttrMap attrs = parse_attrs(lex);
            declare(id, "goal", stmt_span);
            Goal g;
            g.id = id;
            g.label = label;
            if (const AttrValue* a = need(attrs, "actor", stmt_span))
                if (check_ref(a->text, "actor", a->span)) g.actor = a->text;
            g.atomic_no_info = attrs.count("atomic-no-info") > 0;
            g.exclude_from_mapping = attrs.count("nomap") > 0;
            model_.goals.push_back(std::move(g));
        } else if (kw == "decompose") {
            std::string parent = lex.expect_ident("goal id");
            std::string kind = lex.expect_ident("decomposition kind (and/or)");
            Decomposition d;
            if (check_ref(parent, "goal", stmt_span)) d.parent = parent;
            if (kind == "and")
                d.kind = DecompKind::And;
            else if (kind == "or")
                d.kind = DecompKind::Or;
            else
                err(stmt_span, "decomposition kind must be and or or");
            if (lex.expect_punct('{')) {
                while (!lex.at_punct('}') && !lex.at_end() && lex.ok()) {
                    SourceSpan cs = lex.span_here();
                    std::string c = lex.expect_ident("child goal id");
                    if (c.empty()) break;
                    if (check_ref(c, "goal", cs)) d.children.push_back(c);
                    if (lex.at_punct(',')) lex.take();
                }
                if (!lex.at_end()) lex.expect_punct('}');
            }
            if (!d.parent.empty()) model_.decompositions.push_back(std::move(d));
        } else if (kw == "info") {
            std::string id = lex.expect_ident("information id");
            AttrMap attrs = parse_attrs(lex);
            declare(id, "info", stmt_span);
            Information i;
            i.id = id;
            if (const AttrValue* v = need(attrs, "volatility", stmt_span)) {
                if (v->kind != AttrValue::Kind::Int)
                    err(v->span, "volatility must be a non-negative integer");
                else
                    i.volatility = v->ival;
            }
            if (const AttrValue* o = need(attrs, "owner", stmt_span))
                if (check_ref(o->text, "actor", o->span)) i.owner = o->text;
            if (auto it = attrs.find("parts"); it != attrs.end())
                for (const auto& p : it->second.list)
                    if (check_ref(p, "info", it->second.span)) i.parts.push_back(p);
            model_.information.push_back(std::move(i));
        } else if (kw == "partof") {
            SourceSpan s1 = lex.span_here();
            std::string part = lex.expect_ident("part info id");
            SourceSpan s2 = lex.span_here();
            std::string whole = lex.expect_ident("whole info id");
            bool ok = check_ref(part, "info", s1) && check_ref(whole, "info", s2);
            if (ok)
                for (auto& i : model_.information)
                    if (i.id == whole) i.parts.push_back(part);
        } else if (kw == "produce") {
            SourceSpan sg = lex.span_here();
            std::string g = lex.expect_ident("goal id");
            SourceSpan si = lex.span_here();
            std::string i = lex.expect_ident("information id");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(g, "goal", sg) || !check_ref(i, "info", si)) return;
            ProduceRel r;
            r.goal = g;
            r.info = i;
            if (const AttrValue* c = need(attrs, "check", stmt_span))
                parse_check_flag(*c, r.believability_check);
            if (const AttrValue* t = need(attrs, "at", stmt_span)) r.produced_at = t->ival;
            model_.produces.push_back(std::move(r));
        } else if (kw == "read") {
            SourceSpan sg = lex.span_here();
            std::string g = lex.expect_ident("goal id");
            SourceSpan si = lex.span_here();
            std::string i = lex.expect_ident("information id");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(g, "goal", sg) || !check_ref(i, "info", si)) return;
            ReadRel r;
            r.goal = g;
            r.info = i;
            if (const AttrValue* t = need(attrs, "type", stmt_span)) {
                if (t->text == "R")
                    r.type = ReadType::Required;
                else if (t->text == "O")
                    r.type = ReadType::Optional;
                else
                    err(t->span, "read type must be R or O");
            }
            if (const AttrValue* c = need(attrs, "check", stmt_span))
                parse_check_flag(*c, r.believability_check);
            if (const AttrValue* p = need(attrs, "purpose", stmt_span)) {
                std::string raw = p->text;
                size_t a = raw.find_first_not_of(" \t");
                size_t b = raw.find_last_not_of(" \t");
                r.purpose = a == std::string::npos ? "" : raw.substr(a, b - a + 1);
            }
            if (const AttrValue* t = need(attrs, "at", stmt_span)) r.read_at = t->ival;
            if (auto it = attrs.find("parts"); it != attrs.end())
                for (const auto& p : it->second.list)
                    if (check_ref(p, "info", it->second.span)) r.required_parts.push_back(p);
            model_.reads.push_back(std::move(r));
        } else if (kw == "modify") {
            SourceSpan sg = lex.span_here();
            std::string g = lex.expect_ident("goal id");
            SourceSpan si = lex.span_here();
            std::string i = lex.expect_ident("information id");
            if (!check_ref(g, "goal", sg) || !check_ref(i, "info", si)) return;
            model_.modifies.push_back({g, i});
        } else if (kw == "send") {
            SourceSpan sg = lex.span_here();
            std::string g = lex.expect_ident("goal id");
            SourceSpan si = lex.span_here();
            std::string i = lex.expect_ident("information id");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(g, "goal", sg) || !check_ref(i, "info", si)) return;
            SendRel r;
            r.goal = g;
            r.info = i;
            if (const AttrValue* d = need(attrs, "dest", stmt_span))
                if (check_ref(d->text, "actor", d->span)) r.destination = d->text;
            if (const AttrValue* w = need(attrs, "within", stmt_span)) {
                if (w->kind != AttrValue::Kind::Int || w->ival == 0)
                    err(w->span, "within must be a positive integer");
                else
                    r.timeliness = w->ival;
            }
            if (const AttrValue* t = need(attrs, "at", stmt_span)) r.sent_at = t->ival;
            model_.sends.push_back(std::move(r));
        } else if (kw == "provide") {
            SourceSpan s1 = lex.span_here();
            std::string src = lex.expect_ident("source actor");
            SourceSpan s2 = lex.span_here();
            std::string tgt = lex.expect_ident("target actor");
            SourceSpan s3 = lex.span_here();
            std::string i = lex.expect_ident("information id");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(src, "actor", s1) || !check_ref(tgt, "actor", s2) ||
                !check_ref(i, "info", s3))
                return;
            Provision p;
            p.source = src;
            p.target = tgt;
            p.info = i;
            if (const AttrValue* k = need(attrs, "kind", stmt_span)) {
                if (k->text == "P")
                    p.kind = ProvisionKind::Plain;
                else if (k->text == "IP")
                    p.kind = ProvisionKind::IntegrityPreserving;
                else
                    err(k->span, "provision kind must be P or IP");
            }
            if (const AttrValue* t = need(attrs, "time", stmt_span)) {
                if (t->kind != AttrValue::Kind::Int || t->ival == 0)
                    err(t->span, "time must be a positive integer");
                else
                    p.transmission_time = t->ival;
            }
            model_.provisions.push_back(std::move(p));
        } else if (kw == "delegate") {
            SourceSpan s1 = lex.span_here();
            std::string from = lex.expect_ident("delegator actor");
            SourceSpan s2 = lex.span_here();
            std::string to = lex.expect_ident("delegatee actor");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(from, "actor", s1) || !check_ref(to, "actor", s2)) return;
            Delegation d;
            d.delegator = from;
            d.delegatee = to;
            auto gi = attrs.find("goal");
            auto pi = attrs.find("permission");
            if (gi != attrs.end() && check_ref(gi->second.text, "goal", gi->second.span)) {
                d.subject_kind = DelegationSubjectKind::Goal;
                d.subject = gi->second.text;
            } else if (pi != attrs.end() &&
                       check_ref(pi->second.text, "permission", pi->second.span)) {
                d.subject_kind = DelegationSubjectKind::Permission;
                d.subject = pi->second.text;
            } else if (gi == attrs.end() && pi == attrs.end()) {
                err(stmt_span, "delegate needs goal=... or permission=...");
                return;
            } else {
                return;  // reference error already reported
            }
            model_.delegations.push_back(std::move(d));
        } else if (kw == "permit") {
            std::string id = lex.expect_ident("permission id");
            AttrMap attrs = parse_attrs(lex);
            declare(id, "permission", stmt_span);
            PermissionGrant g;
            g.id = id;
            if (const AttrValue* a = need(attrs, "grantor", stmt_span))
                if (check_ref(a->text, "actor", a->span)) g.grantor = a->text;
            if (const AttrValue* a = need(attrs, "grantee", stmt_span))
                if (check_ref(a->text, "actor", a->span)) g.grantee = a->text;
            if (const AttrValue* a = need(attrs, "info", stmt_span))
                if (check_ref(a->text, "info", a->span)) g.info = a->text;
            if (const AttrValue* o = need(attrs, "ops", stmt_span)) {
                for (const auto& op : o->list) {
                    if (op == "produce")
                        g.ops.insert(InfoOp::Produce);
                    else if (op == "read")
                        g.ops.insert(InfoOp::Read);
                    else if (op == "modify")
                        g.ops.insert(InfoOp::Modify);
                    else if (op == "send")
                        g.ops.insert(InfoOp::Send);
                    else
                        err(o->span, "unknown operation '" + op + "' in ops");
                }
            }
            model_.grants.push_back(std::move(g));
        } else if (kw == "trust" || kw == "distrust") {
            SourceSpan s1 = lex.span_here();
            std::string a = lex.expect_ident("trustor actor");
            SourceSpan s2 = lex.span_here();
            std::string b = lex.expect_ident("trustee actor");
            AttrMap attrs = parse_attrs(lex);
            if (!check_ref(a, "actor", s1) || !check_ref(b, "actor", s2)) return;
            TrustRel t;
            t.trustor = a;
            t.trustee = b;
            t.polarity = kw == "trust" ? TrustPolarity::Trust : TrustPolarity::Distrust;
            auto prod = attrs.find("produced");
            auto goal = attrs.find("goal");
            auto perm = attrs.find("permission");
            if (prod != attrs.end() && check_ref(prod->second.text, "info", prod->second.span)) {
                t.scope_kind = TrustScopeKind::ProducedInfo;
                t.scope = prod->second.text;
            } else if (goal != attrs.end() &&
                       check_ref(goal->second.text, "goal", goal->second.span)) {
                t.scope_kind = TrustScopeKind::DelegatedGoal;
                t.scope = goal->second.text;
            } else if (perm != attrs.end() &&
                       check_ref(perm->second.text, "permission", perm->second.span)) {
                t.scope_kind = TrustScopeKind::DelegatedPermission;
                t.scope = perm->second.text;
            } else if (prod == attrs.end() && goal == attrs.end() && perm == attrs.end()) {
                err(stmt_span, kw + " needs produced=..., goal=... or permission=...");
                return;
            } else {
                return;
            }
            model_.trusts.push_back(std::move(t));
        } else {
            err(stmt_span, "unknown statement keyword '" + kw + "'");
        }
    }

    const std::string& text_;
    std::string file_;
    std::vector<Diagnostic> diags_;
    GoalModel model_;
    std::map<std::string, std::string> defined_;  // id -> kind
};

}  // namespace

std::string format_diagnostic(const Diagnostic& d) {
    return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": " + (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

GqmParseResult parse_goal_model(const std::string& text, const std::string& filename) {
    return GqmParser(text, filename).run();
}

}  // namespace wfav

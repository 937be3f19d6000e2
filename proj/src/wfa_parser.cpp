#include <map>
#include <set>

#include "line_lexer.hpp"
#include "wfav/parse.hpp"

namespace wfav {

namespace {

using detail::LineLexer;
using detail::TokKind;

class WfaParser {
public:
    WfaParser(const std::string& text, const std::string& file) : text_(text), file_(file) {}

    WfaParseResult run() {
        auto lines = detail::split_lines(text_);
        for (size_t n = 0; n < lines.size(); ++n) parse_line(lines[n], static_cast<int>(n) + 1);
        WfaParseResult res;
        if (!has_errors(diags_)) {
            // Structural shape problems are warnings: the net is still handed
            // to the caller so the property checks can report them as C1/C2.
            for (const auto& issue : check_net_structure(net_))
                diags_.push_back({{file_, 1, 1}, Severity::Warning, issue.message});
            res.net = std::move(net_);
        }
        res.diagnostics = std::move(diags_);
        return res;
    }

private:
    void err(const SourceSpan& s, const std::string& msg) {
        diags_.push_back({s, Severity::Error, msg});
    }

    void parse_line(const std::string& line, int lineno) {
        LineLexer lex(line, file_, lineno, &diags_);
        if (lex.at_end()) return;
        SourceSpan stmt = lex.span_here();
        std::string kw = lex.expect_ident("statement keyword");
        if (kw.empty()) return;

        if (kw == "place") {
            std::string id = lex.expect_ident("place id");
            if (!nodes_.emplace(id, "place").second)
                err(stmt, "duplicate node id '" + id + "'");
            else
                net_.places.push_back(id);
        } else if (kw == "trans") {
            std::string id = lex.expect_ident("transition id");
            if (!nodes_.emplace(id, "transition").second) {
                err(stmt, "duplicate node id '" + id + "'");
                return;
            }
            WfaTransition t;
            t.id = id;
            while (!lex.at_end() && lex.ok()) {
                SourceSpan at = lex.span_here();
                std::string key = lex.expect_ident("annotation");
                if (key.empty()) break;
                if (!lex.expect_punct('=')) break;
                if (key == "res") {
                    t.res = lex.expect_ident("actor id");
                    continue;
                }
                if (!lex.expect_punct('{')) break;
                while (!lex.at_punct('}') && !lex.at_end() && lex.ok()) {
                    std::string info = lex.expect_ident("information id");
                    if (info.empty()) break;
                    if (key == "sd") {
                        if (lex.peek().kind == TokKind::Punct && lex.peek().text == "->") {
                            lex.take();
                            std::string dest = lex.expect_ident("destination actor");
                            t.sd.push_back({info, dest});
                        } else {
                            err(at, "sd entries need a destination: info->actor");
                        }
                    } else if (key == "pd") {
                        t.pd.push_back(info);
                    } else if (key == "rd") {
                        t.rd.push_back(info);
                    } else if (key == "md") {
                        t.md.push_back(info);
                    } else {
                        err(at, "unknown annotation '" + key + "'");
                        break;
                    }
                    if (lex.at_punct(',')) lex.take();
                }
                if (!lex.at_end()) lex.expect_punct('}');
            }
            if (t.res.empty()) err(stmt, "transition " + id + " is missing res=");
            net_.transitions.push_back(std::move(t));
        } else if (kw == "arc") {
            SourceSpan s1 = lex.span_here();
            std::string a = lex.expect_ident("arc source");
            SourceSpan s2 = lex.span_here();
            std::string b = lex.expect_ident("arc target");
            if (!nodes_.count(a)) err(s1, "arc references undefined node '" + a + "'");
            if (!nodes_.count(b)) err(s2, "arc references undefined node '" + b + "'");
            if (!arc_set_.insert({a, b}).second)
                err(stmt, "duplicate arc " + a + " -> " + b);
            else
                net_.arcs.push_back({a, b});
        } else if (kw == "initial") {
            SourceSpan s = lex.span_here();
            std::string p = lex.expect_ident("place id");
            if (!nodes_.count(p) || nodes_[p] != "place")
                err(s, "initial must name a place");
            else
                net_.initial_place = p;
        } else if (kw == "final") {
            SourceSpan s = lex.span_here();
            std::string p = lex.expect_ident("place id");
            if (!nodes_.count(p) || nodes_[p] != "place")
                err(s, "final must name a place");
            else
                net_.final_place = p;
        } else {
            err(stmt, "unknown statement keyword '" + kw + "'");
        }
    }

    const std::string& text_;
    std::string file_;
    std::vector<Diagnostic> diags_;
    WfaNet net_;
    std::map<std::string, std::string> nodes_;
    std::set<std::pair<std::string, std::string>> arc_set_;
};

}  // namespace

WfaParseResult parse_wfa_net(const std::string& text, const std::string& filename) {
    return WfaParser(text, filename).run();
}

}  // namespace wfav

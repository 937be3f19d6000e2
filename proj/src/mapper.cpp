#include "wfav/mapper.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "line_lexer.hpp"
#include "wfav/digest.hpp"
#include "wfav/parse.hpp"

namespace wfav::mapper {

std::vector<Id> block_leaves(const Block& b) {
    std::vector<Id> out;
    std::function<void(const Block&)> walk = [&](const Block& blk) {
        if (blk.children.empty()) {
            out.push_back(blk.root);
            return;
        }
        for (const auto& c : blk.children) walk(c);
    };
    walk(b);
    return out;
}

std::optional<Id> MappingTrace::transition_of(const Id& goal) const {
    for (const auto& [g, t] : pairs)
        if (g == goal) return t;
    return std::nullopt;
}

std::optional<Id> MappingTrace::goal_of(const Id& transition) const {
    for (const auto& [g, t] : pairs)
        if (t == transition) return g;
    return std::nullopt;
}

BlockResult identify_blocks(const GoalModel& m) {
    BlockResult out;
    ModelIndex ix(m);

    std::map<Id, bool> excluded;
    for (const auto& g : m.goals) excluded[g.id] = g.exclude_from_mapping;

    std::set<Id> children;
    for (const auto& d : m.decompositions)
        for (const auto& c : d.children) children.insert(c);

    std::function<std::optional<Block>(const Id&)> build =
        [&](const Id& goal) -> std::optional<Block> {
        if (out.error) return std::nullopt;
        const Decomposition* d = ix.decomposition_of(goal);
        Block b;
        b.root = goal;
        if (!d) {
            b.kind = Block::Kind::Atomic;
            return b;
        }
        b.kind = d->kind == DecompKind::And ? Block::Kind::AndBlock : Block::Kind::OrBlock;
        for (const auto& c : d->children) {
            if (excluded[c]) {
                // A block is mapped whole or not at all.
                out.error = BlockError{"partial-block",
                                       "goal " + c + " under " + goal +
                                           " is excluded from mapping, leaving a partial block",
                                       {goal, c}};
                return std::nullopt;
            }
            auto sub = build(c);
            if (!sub) return std::nullopt;
            b.children.push_back(std::move(*sub));
        }
        return b;
    };

    for (const auto& g : m.goals) {
        if (children.count(g.id)) continue;  // not a root
        if (excluded[g.id]) continue;        // whole tree opted out
        auto b = build(g.id);
        if (!b) break;
        out.forest.push_back(std::move(*b));
    }
    if (out.error) out.forest.clear();
    return out;
}

namespace {

struct GoalRelations {
    std::vector<Id> pd, rd, md;
    std::vector<SendAnnotation> sd;
    std::set<Id> consumed;  // rd + md + sd infos
    std::set<Id> produced;
};

std::map<Id, GoalRelations> collect_relations(const GoalModel& m) {
    std::map<Id, GoalRelations> rel;
    for (const auto& r : m.produces) {
        rel[r.goal].pd.push_back(r.info);
        rel[r.goal].produced.insert(r.info);
    }
    for (const auto& r : m.reads) {
        rel[r.goal].rd.push_back(r.info);
        rel[r.goal].consumed.insert(r.info);
    }
    for (const auto& r : m.modifies) {
        rel[r.goal].md.push_back(r.info);
        rel[r.goal].consumed.insert(r.info);
    }
    for (const auto& r : m.sends) {
        rel[r.goal].sd.push_back({r.info, r.destination});
        rel[r.goal].consumed.insert(r.info);
    }
    for (auto& [g, gr] : rel) {
        auto dedup = [](std::vector<Id>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        dedup(gr.pd);
        dedup(gr.rd);
        dedup(gr.md);
        std::sort(gr.sd.begin(), gr.sd.end());
        gr.sd.erase(std::unique(gr.sd.begin(), gr.sd.end()), gr.sd.end());
    }
    return rel;
}

// Stable topological sort of sibling blocks by data dependency: a block
// consuming information produced by a sibling is placed after it. Returns
// nullopt on a dependency cycle.
std::optional<std::vector<const Block*>> order_members(
    const std::vector<Block>& members, const std::map<Id, GoalRelations>& rel,
    std::vector<Id>* cycle) {
    size_t n = members.size();
    std::vector<std::set<Id>> produced(n), consumed(n);
    for (size_t i = 0; i < n; ++i)
        for (const auto& leaf : block_leaves(members[i])) {
            auto it = rel.find(leaf);
            if (it == rel.end()) continue;
            produced[i].insert(it->second.produced.begin(), it->second.produced.end());
            consumed[i].insert(it->second.consumed.begin(), it->second.consumed.end());
        }

    std::vector<std::vector<size_t>> succ(n);
    std::vector<size_t> indeg(n, 0);
    for (size_t producer = 0; producer < n; ++producer)
        for (size_t consumer = 0; consumer < n; ++consumer) {
            if (producer == consumer) continue;
            bool dep = false;
            for (const auto& i : consumed[consumer])
                if (produced[producer].count(i)) dep = true;
            if (dep) {
                succ[producer].push_back(consumer);
                indeg[consumer]++;
            }
        }

    std::vector<const Block*> out;
    std::set<size_t> ready;
    for (size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert(i);
    while (!ready.empty()) {
        size_t next = *ready.begin();  // smallest original index: stable
        ready.erase(ready.begin());
        out.push_back(&members[next]);
        for (size_t s : succ[next])
            if (--indeg[s] == 0) ready.insert(s);
    }
    if (out.size() != n) {
        if (cycle)
            for (size_t i = 0; i < n; ++i)
                if (indeg[i] > 0) cycle->push_back(members[i].root);
        return std::nullopt;
    }
    return out;
}

}  // namespace

MappingResult map_to_net(const GoalModel& m, const BlockResult& blocks) {
    MappingResult res;
    if (blocks.error) {
        res.error = MappingError{MappingErrorKind::PartialBlock, blocks.error->message,
                                 blocks.error->elements};
        return res;
    }
    if (blocks.forest.empty()) {
        res.error = MappingError{MappingErrorKind::EmptyModel, "no goals to map", {}};
        return res;
    }

    auto rel = collect_relations(m);

    // Consistency constraint: information may appear only with its producer.
    std::set<Id> mapped_produced;
    std::set<Id> mapped_goals;
    for (const auto& b : blocks.forest)
        for (const auto& leaf : block_leaves(b)) {
            mapped_goals.insert(leaf);
            auto it = rel.find(leaf);
            if (it != rel.end())
                mapped_produced.insert(it->second.produced.begin(), it->second.produced.end());
        }
    for (const auto& g : mapped_goals) {
        auto it = rel.find(g);
        if (it == rel.end()) continue;
        for (const auto& i : it->second.consumed)
            if (!mapped_produced.count(i)) {
                res.error = MappingError{
                    MappingErrorKind::UnproducedInfo,
                    "goal " + g + " uses information " + i + " that no mapped goal produces",
                    {g, i}};
                return res;
            }
    }

    WfaNet net;
    MappingTrace trace;
    trace.forest = blocks.forest;
    int place_counter = 0;
    auto fresh_place = [&]() {
        Id p = "p" + std::to_string(++place_counter);
        net.places.push_back(p);
        return p;
    };
    net.places.push_back("start");
    net.places.push_back("end");
    net.initial_place = "start";
    net.final_place = "end";

    std::optional<MappingError> emit_error;

    // Emits the fragment for a block between two existing places.
    std::function<void(const Block&, const Id&, const Id&)> emit = [&](const Block& b,
                                                                       const Id& entry,
                                                                       const Id& exit) {
        if (emit_error) return;
        switch (b.kind) {
            case Block::Kind::Atomic: {
                WfaTransition t;
                t.id = "t_" + b.root;
                t.res = resolve_responsibility(m, b.root).actor;
                auto it = rel.find(b.root);
                if (it != rel.end()) {
                    t.pd = it->second.pd;
                    t.rd = it->second.rd;
                    t.md = it->second.md;
                    t.sd = it->second.sd;
                }
                net.arcs.push_back({entry, t.id});
                net.arcs.push_back({t.id, exit});
                trace.pairs.push_back({b.root, t.id});
                net.transitions.push_back(std::move(t));
                return;
            }
            case Block::Kind::AndBlock: {
                std::vector<Id> cycle;
                auto ordered = order_members(b.children, rel, &cycle);
                if (!ordered) {
                    emit_error = MappingError{MappingErrorKind::CyclicDataDependency,
                                              "cyclic data dependency among sub-goals of " +
                                                  b.root,
                                              cycle};
                    return;
                }
                Id cur = entry;
                for (size_t k = 0; k < ordered->size(); ++k) {
                    Id next = k + 1 == ordered->size() ? exit : fresh_place();
                    emit(*(*ordered)[k], cur, next);
                    cur = next;
                }
                return;
            }
            case Block::Kind::OrBlock: {
                // Alternative branches between the shared split and join.
                for (const auto& c : b.children) emit(c, entry, exit);
                return;
            }
        }
    };

    // The root blocks compose as an implicit sequence, reordered by data
    // dependencies like any and-block.
    std::vector<Id> cycle;
    auto ordered_roots = order_members(blocks.forest, rel, &cycle);
    if (!ordered_roots) {
        res.error = MappingError{MappingErrorKind::CyclicDataDependency,
                                 "cyclic data dependency among root goals", cycle};
        return res;
    }
    Id cur = net.initial_place;
    for (size_t k = 0; k < ordered_roots->size(); ++k) {
        Id next = k + 1 == ordered_roots->size() ? net.final_place : fresh_place();
        emit(*(*ordered_roots)[k], cur, next);
        cur = next;
    }
    if (emit_error) {
        res.error = std::move(emit_error);
        return res;
    }

    trace.model_digest = digest_hex(print_goal_model(m));
    std::sort(trace.pairs.begin(), trace.pairs.end());
    res.net = std::move(net);
    res.trace = std::move(trace);
    return res;
}

// ---- trace serialization ----

namespace {

void print_block(std::ostringstream& out, const Block& b, int& counter,
                 std::vector<std::pair<int, const Block*>>& order) {
    int my = counter++;
    order.push_back({my, &b});
    for (const auto& c : b.children) print_block(out, c, counter, order);
}

const char* kind_name(Block::Kind k) {
    switch (k) {
        case Block::Kind::Atomic: return "atomic";
        case Block::Kind::AndBlock: return "and";
        case Block::Kind::OrBlock: return "or";
    }
    return "?";
}

}  // namespace

std::string print_trace(const MappingTrace& trace) {
    std::ostringstream out;
    out << "# trace\n";
    out << "digest " << trace.model_digest << "\n";
    for (const auto& [g, t] : trace.pairs) out << "map " << g << " " << t << "\n";

    // Number blocks in preorder across the forest.
    int counter = 0;
    std::vector<std::pair<int, const Block*>> order;
    std::map<const Block*, int> ids;
    for (const auto& b : trace.forest) {
        std::ostringstream unused;
        print_block(unused, b, counter, order);
    }
    for (const auto& [n, b] : order) ids[b] = n;

    out << "forest {";
    for (size_t i = 0; i < trace.forest.size(); ++i) {
        if (i) out << ", ";
        out << "b" << ids[&trace.forest[i]];
    }
    out << "}\n";
    for (const auto& [n, b] : order) {
        out << "block b" << n << " kind=" << kind_name(b->kind) << " root=" << b->root;
        if (!b->children.empty()) {
            out << " children={";
            for (size_t i = 0; i < b->children.size(); ++i) {
                if (i) out << ", ";
                out << "b" << ids[&b->children[i]];
            }
            out << "}";
        }
        out << "\n";
    }
    return out.str();
}

TraceParseResult parse_trace(const std::string& text, const std::string& filename) {
    using detail::LineLexer;
    TraceParseResult res;
    MappingTrace trace;

    struct RawBlock {
        std::string kind;
        Id root;
        std::vector<std::string> children;
    };
    std::map<std::string, RawBlock> raw_blocks;
    std::vector<std::string> forest_ids;

    auto lines = detail::split_lines(text);
    for (size_t n = 0; n < lines.size(); ++n) {
        LineLexer lex(lines[n], filename, static_cast<int>(n) + 1, &res.diagnostics);
        if (lex.at_end()) continue;
        std::string kw = lex.expect_ident("statement keyword");
        if (kw == "digest") {
            trace.model_digest = lex.expect_ident("digest value");
        } else if (kw == "map") {
            Id g = lex.expect_ident("goal id");
            Id t = lex.expect_ident("transition id");
            trace.pairs.push_back({g, t});
        } else if (kw == "forest") {
            if (lex.expect_punct('{')) {
                while (!lex.at_punct('}') && !lex.at_end() && lex.ok()) {
                    forest_ids.push_back(lex.expect_ident("block id"));
                    if (lex.at_punct(',')) lex.take();
                }
                if (!lex.at_end()) lex.expect_punct('}');
            }
        } else if (kw == "block") {
            std::string bid = lex.expect_ident("block id");
            RawBlock rb;
            while (!lex.at_end() && lex.ok()) {
                std::string key = lex.expect_ident("attribute");
                if (key.empty() || !lex.expect_punct('=')) break;
                if (key == "kind") {
                    rb.kind = lex.expect_ident("block kind");
                } else if (key == "root") {
                    rb.root = lex.expect_ident("goal id");
                } else if (key == "children") {
                    if (!lex.expect_punct('{')) break;
                    while (!lex.at_punct('}') && !lex.at_end() && lex.ok()) {
                        rb.children.push_back(lex.expect_ident("block id"));
                        if (lex.at_punct(',')) lex.take();
                    }
                    if (!lex.at_end()) lex.expect_punct('}');
                } else {
                    lex.error("unknown attribute '" + key + "'");
                }
            }
            raw_blocks[bid] = std::move(rb);
        } else {
            res.diagnostics.push_back({{filename, static_cast<int>(n) + 1, 1}, Severity::Error,
                                       "unknown statement keyword '" + kw + "'"});
        }
    }

    std::function<std::optional<Block>(const std::string&, std::set<std::string>&)> build =
        [&](const std::string& bid, std::set<std::string>& onpath) -> std::optional<Block> {
        auto it = raw_blocks.find(bid);
        if (it == raw_blocks.end() || !onpath.insert(bid).second) {
            res.diagnostics.push_back(
                {{filename, 1, 1}, Severity::Error, "bad block reference " + bid});
            return std::nullopt;
        }
        Block b;
        b.root = it->second.root;
        b.kind = it->second.kind == "and"  ? Block::Kind::AndBlock
                 : it->second.kind == "or" ? Block::Kind::OrBlock
                                           : Block::Kind::Atomic;
        for (const auto& c : it->second.children) {
            auto sub = build(c, onpath);
            if (!sub) return std::nullopt;
            b.children.push_back(std::move(*sub));
        }
        onpath.erase(bid);
        return b;
    };
    for (const auto& bid : forest_ids) {
        std::set<std::string> onpath;
        auto b = build(bid, onpath);
        if (b) trace.forest.push_back(std::move(*b));
    }

    if (!has_errors(res.diagnostics)) res.trace = std::move(trace);
    return res;
}

}  // namespace wfav::mapper

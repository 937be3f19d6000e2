#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "wfav/digest.hpp"
#include "wfav/mapper.hpp"
#include "wfav/parse.hpp"

// Independent checker for the mapping rules and constraints. Works on the
// artifacts as given; shares nothing with the builder beyond the public
// model queries.

namespace wfav::mapper {

namespace {

std::set<Id> reachable_from(const std::map<Id, std::vector<Id>>& adj, const Id& start) {
    std::set<Id> seen{start};
    std::deque<Id> q{start};
    while (!q.empty()) {
        Id cur = q.front();
        q.pop_front();
        auto it = adj.find(cur);
        if (it == adj.end()) continue;
        for (const auto& n : it->second)
            if (seen.insert(n).second) q.push_back(n);
    }
    return seen;
}

}  // namespace

std::vector<NetIssue> verify_mapping(const GoalModel& m, const WfaNet& net,
                                     const MappingTrace& trace) {
    std::vector<NetIssue> issues;
    auto add = [&](std::string code, std::string msg, std::vector<Id> elems) {
        issues.push_back({std::move(code), std::move(msg), std::move(elems)});
    };

    if (!trace.model_digest.empty() &&
        trace.model_digest != digest_hex(print_goal_model(m)))
        add("digest-mismatch", "trace was produced from a different model", {});

    ModelIndex ix(m);
    NetIndex nix(net);
    auto leaves = leaf_goals(m);

    // Goals expected in the mapping: subtrees of non-excluded roots.
    std::set<Id> decomposition_children;
    for (const auto& d : m.decompositions)
        for (const auto& c : d.children) decomposition_children.insert(c);
    std::set<Id> included;
    std::function<void(const Id&)> include = [&](const Id& g) {
        if (!included.insert(g).second) return;
        if (const Decomposition* d = ix.decomposition_of(g))
            for (const auto& c : d->children) include(c);
    };
    for (const auto& g : m.goals)
        if (!decomposition_children.count(g.id) && !g.exclude_from_mapping) include(g.id);

    std::map<Id, Id> goal_to_trans, trans_to_goal;
    for (const auto& [g, t] : trace.pairs) {
        if (!goal_to_trans.emplace(g, t).second)
            add("leaf-mapping", "goal " + g + " mapped more than once", {g});
        if (!trans_to_goal.emplace(t, g).second)
            add("leaf-mapping", "transition " + t + " mapped from more than one goal", {t});
    }

    // Rule 1 + consistency 2: included leaves map one-to-one onto the
    // transitions; nothing else is mapped.
    for (const auto& g : included) {
        if (!leaves.count(g)) continue;
        auto it = goal_to_trans.find(g);
        if (it == goal_to_trans.end()) {
            add("leaf-mapping", "leaf goal " + g + " is not mapped", {g});
            continue;
        }
        if (!nix.is_transition(it->second))
            add("leaf-mapping", "goal " + g + " maps to missing transition " + it->second,
                {g, it->second});
    }
    for (const auto& [g, t] : trace.pairs)
        if (!leaves.count(g))
            add("nonleaf-mapped", "non-leaf goal " + g + " is mapped directly", {g, t});
    for (const auto& t : net.transitions)
        if (!trans_to_goal.count(t.id))
            add("leaf-mapping", "transition " + t.id + " does not correspond to any goal",
                {t.id});

    // Responsibility and annotation fidelity of mapped transitions.
    std::map<Id, std::set<Id>> want_pd, want_rd, want_md;
    std::map<Id, std::set<std::pair<Id, Id>>> want_sd;
    for (const auto& r : m.produces) want_pd[r.goal].insert(r.info);
    for (const auto& r : m.reads) want_rd[r.goal].insert(r.info);
    for (const auto& r : m.modifies) want_md[r.goal].insert(r.info);
    for (const auto& r : m.sends) want_sd[r.goal].insert({r.info, r.destination});
    for (const auto& t : net.transitions) {
        auto git = trans_to_goal.find(t.id);
        if (git == trans_to_goal.end()) continue;
        const Id& g = git->second;
        if (!ix.goal(g)) {
            add("leaf-mapping", "transition " + t.id + " maps unknown goal " + g, {t.id, g});
            continue;
        }
        Id want_res = resolve_responsibility(m, g).actor;
        if (t.res != want_res)
            add("res-mismatch",
                "transition " + t.id + " responsible actor " + t.res + " differs from " +
                    want_res,
                {t.id, g});
        auto set_eq = [](const std::vector<Id>& a, const std::set<Id>& b) {
            return std::set<Id>(a.begin(), a.end()) == b;
        };
        std::set<std::pair<Id, Id>> sd;
        for (const auto& s : t.sd) sd.insert({s.info, s.destination});
        if (!set_eq(t.pd, want_pd[g]) || !set_eq(t.rd, want_rd[g]) || !set_eq(t.md, want_md[g]) ||
            sd != want_sd[g])
            add("annotation-mismatch",
                "transition " + t.id + " information sets differ from goal " + g, {t.id, g});
    }

    // Consistency 1: no partial blocks. Every decomposition whose parent is
    // included must have all children included, and all its leaves mapped.
    for (const auto& d : m.decompositions) {
        if (!included.count(d.parent)) continue;
        for (const auto& c : d.children) {
            const Goal* cg = ix.goal(c);
            if (cg && cg->exclude_from_mapping)
                add("partial-block", "decomposition of " + d.parent + " excludes child " + c,
                    {d.parent, c});
        }
    }

    // Consistency 3: information appears only with its producer present.
    std::set<Id> produced_in_net;
    for (const auto& t : net.transitions)
        for (const auto& i : t.pd) produced_in_net.insert(i);
    for (const auto& t : net.transitions) {
        auto need = [&](const Id& i) {
            if (!produced_in_net.count(i))
                add("info-admission",
                    "transition " + t.id + " uses information " + i +
                        " produced by no transition in the net",
                    {t.id, i});
        };
        for (const auto& i : t.rd) need(i);
        for (const auto& i : t.md) need(i);
        for (const auto& s : t.sd) need(s.info);
    }

    // Sequencing over the net graph, per block tree from the trace.
    std::map<Id, std::vector<Id>> fwd;
    for (const auto& [a, b] : net.arcs) fwd[a].push_back(b);
    auto transitions_under = [&](const Block& b) {
        std::set<Id> out;
        for (const auto& leaf : block_leaves(b)) {
            auto it = goal_to_trans.find(leaf);
            if (it != goal_to_trans.end()) out.insert(it->second);
        }
        return out;
    };

    std::map<Id, std::set<Id>> want_prod_by, want_cons_by;
    for (const auto& r : m.produces) want_prod_by[r.goal].insert(r.info);
    for (const auto& r : m.reads) want_cons_by[r.goal].insert(r.info);
    for (const auto& r : m.modifies) want_cons_by[r.goal].insert(r.info);
    for (const auto& r : m.sends) want_cons_by[r.goal].insert(r.info);

    std::function<void(const Block&)> check_block = [&](const Block& b) {
        for (const auto& c : b.children) check_block(c);
        if (b.kind == Block::Kind::AndBlock) {
            // Sequencing constraint 1: members appear in their block order.
            for (size_t i = 0; i + 1 < b.children.size(); ++i) {
                auto earlier = transitions_under(b.children[i]);
                auto later = transitions_under(b.children[i + 1]);
                for (const auto& t_late : later) {
                    auto reach = reachable_from(fwd, t_late);
                    for (const auto& t_early : earlier)
                        if (reach.count(t_early))
                            add("and-order",
                                "activity " + t_early + " of " + b.children[i].root +
                                    " does not precede " + t_late + " in the net",
                                {t_early, t_late});
                }
            }
            // Sequencing constraint 2: order respects data dependencies.
            size_t n = b.children.size();
            for (size_t consumer = 0; consumer < n; ++consumer)
                for (size_t producer = consumer + 1; producer < n; ++producer) {
                    std::set<Id> prod, cons;
                    for (const auto& leaf : block_leaves(b.children[producer]))
                        for (const auto& i : want_prod_by[leaf]) prod.insert(i);
                    for (const auto& leaf : block_leaves(b.children[consumer]))
                        for (const auto& i : want_cons_by[leaf]) cons.insert(i);
                    for (const auto& i : cons)
                        if (prod.count(i))
                            add("data-dependency-order",
                                "member " + b.children[consumer].root + " uses " + i +
                                    " produced by the later member " +
                                    b.children[producer].root,
                                {b.children[consumer].root, b.children[producer].root, i});
                }
        }
        if (b.kind == Block::Kind::OrBlock) {
            // Branches share the split and join place and exclude each other.
            std::set<Id> entries, exits;
            for (const auto& c : b.children) {
                auto ts = transitions_under(c);
                for (const auto& t : ts) {
                    bool is_head = true, is_tail = true;
                    for (const auto& other : ts) {
                        if (other == t) continue;
                        auto r = reachable_from(fwd, other);
                        if (r.count(t)) is_head = false;
                        auto r2 = reachable_from(fwd, t);
                        if (r2.count(other)) is_tail = false;
                    }
                    if (is_head)
                        for (const auto& p : nix.preset(t)) entries.insert(p);
                    if (is_tail)
                        for (const auto& p : nix.postset(t)) exits.insert(p);
                }
            }
            if (entries.size() > 1)
                add("or-split", "branches of " + b.root + " do not share one split place",
                    {b.root});
            if (exits.size() > 1)
                add("or-join", "branches of " + b.root + " do not share one join place",
                    {b.root});
            for (size_t i = 0; i < b.children.size(); ++i)
                for (size_t j = 0; j < b.children.size(); ++j) {
                    if (i == j) continue;
                    auto a = transitions_under(b.children[i]);
                    auto bb = transitions_under(b.children[j]);
                    for (const auto& t : a) {
                        auto r = reachable_from(fwd, t);
                        for (const auto& u : bb)
                            if (r.count(u))
                                add("or-exclusive",
                                    "alternative branches of " + b.root + " are connected (" +
                                        t + " reaches " + u + ")",
                                    {t, u});
                    }
                }
        }
    };
    for (const auto& b : trace.forest) check_block(b);

    // Refinement constraints and WF-net structure.
    for (const auto& issue : check_net_structure(net)) issues.push_back(issue);

    std::sort(issues.begin(), issues.end(), [](const NetIssue& a, const NetIssue& b) {
        return std::tie(a.code, a.message) < std::tie(b.code, b.message);
    });
    issues.erase(std::unique(issues.begin(), issues.end(),
                             [](const NetIssue& a, const NetIssue& b) {
                                 return a.code == b.code && a.message == b.message;
                             }),
                 issues.end());
    return issues;
}

}  // namespace wfav::mapper

#include "wfav/properties.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "wfav/digest.hpp"
#include "wfav/parse.hpp"

namespace wfav::props {

const char* to_string(PropertyId p) {
    switch (p) {
        case PropertyId::M1: return "M1";
        case PropertyId::M2: return "M2";
        case PropertyId::M3: return "M3";
        case PropertyId::M4: return "M4";
        case PropertyId::M5: return "M5";
        case PropertyId::C1: return "C1";
        case PropertyId::C2: return "C2";
        case PropertyId::C3: return "C3";
        case PropertyId::C4: return "C4";
        case PropertyId::C5: return "C5";
        case PropertyId::I1: return "I1";
        case PropertyId::I2: return "I2";
        case PropertyId::I3: return "I3";
        case PropertyId::I4: return "I4";
        case PropertyId::Q1: return "Q1";
        case PropertyId::Q2: return "Q2";
        case PropertyId::Q3: return "Q3";
        case PropertyId::Q4: return "Q4";
        case PropertyId::Q5: return "Q5";
        case PropertyId::Q6: return "Q6";
        case PropertyId::Q7: return "Q7";
    }
    return "?";
}

const char* to_string(Category c) {
    switch (c) {
        case Category::Mapping: return "mapping";
        case Category::ControlFlow: return "control-flow";
        case Category::InformationFlow: return "information-flow";
        case Category::IQ: return "iq";
    }
    return "?";
}

Category category_of(PropertyId p) {
    switch (p) {
        case PropertyId::M1:
        case PropertyId::M2:
        case PropertyId::M3:
        case PropertyId::M4:
        case PropertyId::M5: return Category::Mapping;
        case PropertyId::C1:
        case PropertyId::C2:
        case PropertyId::C3:
        case PropertyId::C4:
        case PropertyId::C5: return Category::ControlFlow;
        case PropertyId::I1:
        case PropertyId::I2:
        case PropertyId::I3:
        case PropertyId::I4: return Category::InformationFlow;
        default: return Category::IQ;
    }
}

const char* description_of(PropertyId p) {
    switch (p) {
        case PropertyId::M1: return "every leaf goal maps to exactly one activity";
        case PropertyId::M2: return "only leaf goals are mapped";
        case PropertyId::M3: return "mapped blocks are complete";
        case PropertyId::M4: return "information appears only with its producer present";
        case PropertyId::M5: return "activity actors match delegated responsibility";
        case PropertyId::C1: return "the net is a structurally valid workflow net";
        case PropertyId::C2: return "places and activities alternate";
        case PropertyId::C3: return "completion is reachable from every configuration";
        case PropertyId::C4: return "completion leaves no other tokens behind";
        case PropertyId::C5: return "no activity is dead";
        case PropertyId::I1: return "no path uses information before its production";
        case PropertyId::I2: return "every send destination has a provision channel";
        case PropertyId::I3: return "modification requires the modify permission";
        case PropertyId::I4: return "sequence order respects data dependencies";
        case PropertyId::Q1: return "accessibility holds for every information usage";
        case PropertyId::Q2: return "required reads apply a believability check";
        case PropertyId::Q3: return "information sources are trusted";
        case PropertyId::Q4: return "provenance operations are authorized";
        case PropertyId::Q5: return "information is value- and purpose-complete";
        case PropertyId::Q6: return "reads and sends are timely";
        case PropertyId::Q7: return "interdependent readers agree on read time";
    }
    return "";
}

std::string format_violation(const Violation& v) {
    std::string out = std::string(to_string(v.property)) + " " + to_string(v.category) + " ";
    for (size_t i = 0; i < v.elements.size(); ++i) {
        if (i) out += ",";
        out += v.elements[i];
    }
    out += ": " + v.message;
    return out;
}

namespace {

struct Collector {
    std::vector<Violation> violations;
    void add(PropertyId p, std::vector<Id> elems, std::string msg,
             std::optional<std::vector<Id>> witness = std::nullopt) {
        violations.push_back(
            {p, category_of(p), std::move(elems), std::move(msg), std::move(witness)});
    }
};

// Marking-plus-produced-set exploration of the raw control flow (no
// information or IQ gating): flags any firing that uses information not yet
// produced on that path. Information with no producer in the net at all is
// M4's concern and skipped here.
void check_paths_use_after_produce(const WfaNet& net, std::uint32_t bound, Collector& out) {
    std::map<Id, size_t> place_index;
    for (const auto& p : net.places) place_index.emplace(p, place_index.size());
    struct Trans {
        const WfaTransition* t;
        std::vector<size_t> pre, post;
    };
    std::vector<Trans> trans;
    for (const auto& t : net.transitions) trans.push_back({&t, {}, {}});
    std::map<Id, size_t> trans_index;
    for (size_t i = 0; i < trans.size(); ++i) trans_index.emplace(trans[i].t->id, i);
    for (const auto& [a, b] : net.arcs) {
        if (place_index.count(a) && trans_index.count(b))
            trans[trans_index[b]].pre.push_back(place_index[a]);
        if (trans_index.count(a) && place_index.count(b))
            trans[trans_index[a]].post.push_back(place_index[b]);
    }

    std::set<Id> producible;
    for (const auto& t : net.transitions)
        for (const auto& i : t.pd) producible.insert(i);

    struct State {
        std::vector<std::uint32_t> marking;
        std::set<Id> produced;
        auto operator<=>(const State&) const = default;
    };
    State init;
    init.marking.assign(net.places.size(), 0);
    if (auto it = place_index.find(net.initial_place); it != place_index.end())
        init.marking[it->second] = 1;

    std::set<State> seen{init};
    std::deque<State> queue{init};
    std::set<std::pair<Id, Id>> flagged;

    size_t guard = 0;
    while (!queue.empty() && guard++ < 200000) {
        State cur = queue.front();
        queue.pop_front();
        for (const auto& td : trans) {
            if (td.pre.empty()) continue;
            bool enabled = true;
            for (size_t p : td.pre)
                if (cur.marking[p] == 0) enabled = false;
            if (!enabled) continue;

            auto used = [&](const Id& i) {
                if (!producible.count(i)) return;
                if (!cur.produced.count(i) && flagged.insert({td.t->id, i}).second)
                    out.add(PropertyId::I1, {td.t->id, i},
                            "activity " + td.t->id + " can use " + i +
                                " before any production on some path");
            };
            for (const auto& i : td.t->rd) used(i);
            for (const auto& i : td.t->md) used(i);
            for (const auto& s : td.t->sd) used(s.info);

            State next = cur;
            bool over = false;
            for (size_t p : td.pre) next.marking[p] -= 1;
            for (size_t p : td.post) {
                next.marking[p] += 1;
                if (next.marking[p] > bound) over = true;
            }
            if (over) continue;  // do not explore past the bound
            for (const auto& i : td.t->pd) next.produced.insert(i);
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
}

}  // namespace

CheckReport check_all(const CheckInput& in, const CheckOptions& opts) {
    const GoalModel& m = *in.model;
    const WfaNet& net = *in.net;
    const mapper::MappingTrace& trace = *in.trace;
    const iq::Analysis& analysis = *in.analysis;

    if (!trace.model_digest.empty() &&
        trace.model_digest != digest_hex(print_goal_model(m)))
        throw InputMismatchError("trace digest does not match the goal model");

    CheckReport report;
    Collector c;
    ModelIndex ix(m);
    NetIndex nix(net);
    auto leaves = leaf_goals(m);

    // ---- mapping ----
    std::set<Id> decomposition_children;
    for (const auto& d : m.decompositions)
        for (const auto& ch : d.children) decomposition_children.insert(ch);
    std::set<Id> included;
    std::function<void(const Id&)> include = [&](const Id& g) {
        if (!included.insert(g).second) return;
        if (const Decomposition* d = ix.decomposition_of(g))
            for (const auto& ch : d->children) include(ch);
    };
    for (const auto& g : m.goals)
        if (!decomposition_children.count(g.id) && !g.exclude_from_mapping) include(g.id);

    std::map<Id, Id> goal_to_trans, trans_to_goal;
    for (const auto& [g, t] : trace.pairs) {
        if (!goal_to_trans.emplace(g, t).second)
            c.add(PropertyId::M1, {g}, "goal " + g + " mapped more than once");
        if (!trans_to_goal.emplace(t, g).second)
            c.add(PropertyId::M1, {t}, "transition " + t + " mapped from more than one goal");
    }
    for (const auto& g : included)
        if (leaves.count(g) && !goal_to_trans.count(g))
            c.add(PropertyId::M1, {g}, "leaf goal " + g + " has no activity");
    {
        std::set<Id> net_trans, trace_trans;
        for (const auto& t : net.transitions) net_trans.insert(t.id);
        for (const auto& [g, t] : trace.pairs) trace_trans.insert(t);
        for (const auto& t : trace_trans)
            if (!net_trans.count(t))
                c.add(PropertyId::M1, {t}, "mapped transition " + t + " is missing from the net");
        for (const auto& t : net_trans)
            if (!trace_trans.count(t))
                c.add(PropertyId::M1, {t},
                      "transition " + t + " does not correspond to any goal");
    }
    for (const auto& [g, t] : trace.pairs)
        if (ix.goal(g) && !leaves.count(g))
            c.add(PropertyId::M2, {g, t}, "non-leaf goal " + g + " is mapped directly");

    for (const auto& d : m.decompositions) {
        if (!included.count(d.parent)) continue;
        for (const auto& ch : d.children) {
            const Goal* cg = ix.goal(ch);
            if (cg && cg->exclude_from_mapping)
                c.add(PropertyId::M3, {d.parent, ch},
                      "block of " + d.parent + " is partial: child " + ch + " is excluded");
        }
    }

    std::set<Id> produced_in_net;
    for (const auto& t : net.transitions)
        for (const auto& i : t.pd) produced_in_net.insert(i);
    for (const auto& t : net.transitions) {
        auto need = [&](const Id& i) {
            if (!produced_in_net.count(i))
                c.add(PropertyId::M4, {t.id, i},
                      "information " + i + " used by " + t.id +
                          " has no producing activity in the net");
        };
        for (const auto& i : t.rd) need(i);
        for (const auto& i : t.md) need(i);
        for (const auto& s : t.sd) need(s.info);
    }

    for (const auto& t : net.transitions) {
        auto git = trans_to_goal.find(t.id);
        if (git == trans_to_goal.end() || !ix.goal(git->second)) continue;
        Id want = resolve_responsibility(m, git->second).actor;
        if (t.res != want)
            c.add(PropertyId::M5, {t.id, git->second},
                  "activity " + t.id + " is assigned to " + t.res +
                      " but responsibility resolves to " + want);
    }

    // ---- control flow ----
    bool structure_ok = true;
    for (const auto& issue : check_net_structure(net)) {
        bool alternation =
            issue.code == "consecutive-places" || issue.code == "consecutive-activities";
        structure_ok = false;
        c.add(alternation ? PropertyId::C2 : PropertyId::C1, issue.elements, issue.message);
    }
    report.structure_ok = structure_ok;

    if (structure_ok && in.soundness) {
        if (in.soundness->report) {
            const auto& rep = *in.soundness->report;
            if (!rep.option_to_complete)
                c.add(PropertyId::C3, {},
                      "a reachable configuration cannot reach completion", rep.stuck_witness);
            if (!rep.proper_completion)
                c.add(PropertyId::C4, {},
                      "completion is reachable with tokens left behind", rep.improper_witness);
            for (const auto& t : rep.dead_transitions)
                c.add(PropertyId::C5, {t}, "activity " + t + " never fires");
        }
    }

    // ---- information flow ----
    if (structure_ok) check_paths_use_after_produce(net, opts.bound, c);

    std::set<std::tuple<Id, Id, Id>> provision_edges;
    for (const auto& p : m.provisions) provision_edges.insert({p.source, p.target, p.info});
    for (const auto& t : net.transitions)
        for (const auto& s : t.sd)
            if (!provision_edges.count({t.res, s.destination, s.info}))
                c.add(PropertyId::I2, {t.id, s.info, s.destination},
                      "send of " + s.info + " to " + s.destination +
                          " has no provision channel from " + t.res);

    {
        PermissionClosure perms(m);
        for (const auto& t : net.transitions)
            for (const auto& i : t.md)
                if (!perms.holds(t.res, i, InfoOp::Modify))
                    c.add(PropertyId::I3, {t.id, i},
                          "actor " + t.res + " modifies " + i + " without the modify permission");
    }

    {
        std::map<Id, std::set<Id>> prod_by, cons_by;
        for (const auto& r : m.produces) prod_by[r.goal].insert(r.info);
        for (const auto& r : m.reads) cons_by[r.goal].insert(r.info);
        for (const auto& r : m.modifies) cons_by[r.goal].insert(r.info);
        for (const auto& r : m.sends) cons_by[r.goal].insert(r.info);
        std::function<void(const mapper::Block&)> walk = [&](const mapper::Block& b) {
            for (const auto& ch : b.children) walk(ch);
            if (b.kind != mapper::Block::Kind::AndBlock) return;
            size_t n = b.children.size();
            for (size_t consumer = 0; consumer < n; ++consumer)
                for (size_t producer = consumer + 1; producer < n; ++producer) {
                    std::set<Id> prod, cons;
                    for (const auto& leaf : mapper::block_leaves(b.children[producer]))
                        for (const auto& i : prod_by[leaf]) prod.insert(i);
                    for (const auto& leaf : mapper::block_leaves(b.children[consumer]))
                        for (const auto& i : cons_by[leaf]) cons.insert(i);
                    for (const auto& i : cons)
                        if (prod.count(i))
                            c.add(PropertyId::I4,
                                  {b.children[consumer].root, b.children[producer].root, i},
                                  "member " + b.children[consumer].root + " uses " + i +
                                      " produced by the later member " +
                                      b.children[producer].root);
                }
        };
        for (const auto& b : trace.forest) walk(b);
    }

    // ---- information quality ----
    std::set<std::pair<Id, Id>> read_pairs, send_pairs;
    for (const auto& r : m.reads) read_pairs.insert({r.goal, r.info});
    for (const auto& r : m.sends) send_pairs.insert({r.goal, r.info});

    for (const auto& d : analysis.details) {
        bool reads_it = read_pairs.count({d.goal, d.info}) > 0;
        if ((d.available && !*d.available) || (d.permitted && !*d.permitted))
            c.add(PropertyId::Q1, {d.goal, d.info},
                  "information " + d.info + " is not accessible to goal " + d.goal);
        if (reads_it && d.source_trustworthy && !*d.source_trustworthy)
            c.add(PropertyId::Q3, {d.goal, d.info},
                  "source of " + d.info + " is not trusted by the reader " + d.goal);
        if (reads_it && d.provision_trustworthy && !*d.provision_trustworthy)
            c.add(PropertyId::Q4, {d.goal, d.info},
                  "provenance of " + d.info + " read by " + d.goal +
                      " contains unauthorized operations");
        bool incomplete = (d.value_complete && !*d.value_complete) ||
                          (d.purpose_complete && !*d.purpose_complete);
        if (incomplete) {
            std::string kind;
            if (d.value_complete && !*d.value_complete) kind = "value";
            if (d.purpose_complete && !*d.purpose_complete)
                kind += kind.empty() ? "purpose" : "+purpose";
            c.add(PropertyId::Q5, {d.goal, d.info},
                  kind + " completeness fails for " + d.info + " read by " + d.goal);
        }
        if ((d.read_timely && !*d.read_timely) || (d.send_timely && !*d.send_timely))
            c.add(PropertyId::Q6, {d.goal, d.info},
                  "information " + d.info + " is not timely for goal " + d.goal);
        if (d.consistent && !*d.consistent)
            c.add(PropertyId::Q7, {d.goal, d.info},
                  "interdependent readers of " + d.info + " disagree on read time");
    }
    for (const auto& r : m.reads) {
        if (r.believability_check) continue;
        if (r.type == ReadType::Required) {
            c.add(PropertyId::Q2, {r.goal, r.info},
                  "required read of " + r.info + " by " + r.goal +
                      " applies no believability check");
        } else if (opts.strict_optional_reads) {
            c.add(PropertyId::Q2, {r.goal, r.info},
                  "optional read of " + r.info + " by " + r.goal +
                      " applies no believability check");
        } else {
            report.warnings.push_back({PropertyId::Q2, Category::IQ,
                                       {r.goal, r.info},
                                       "optional read of " + r.info + " by " + r.goal +
                                           " applies no believability check",
                                       std::nullopt});
        }
    }

    auto key = [](const Violation& v) {
        return std::make_tuple(static_cast<int>(v.property), v.elements, v.message);
    };
    std::sort(c.violations.begin(), c.violations.end(),
              [&](const Violation& a, const Violation& b) { return key(a) < key(b); });
    c.violations.erase(std::unique(c.violations.begin(), c.violations.end(),
                                   [&](const Violation& a, const Violation& b) {
                                       return key(a) == key(b);
                                   }),
                       c.violations.end());
    report.violations = std::move(c.violations);
    return report;
}

}  // namespace wfav::props

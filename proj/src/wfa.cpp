#include "wfav/wfa.hpp"

#include <algorithm>
#include <deque>

namespace wfav {

NetIndex::NetIndex(const WfaNet& net) : net_(&net) {
    for (const auto& p : net.places) places_.insert(p);
    for (const auto& t : net.transitions) trans_.emplace(t.id, &t);
    for (const auto& [a, b] : net.arcs) {
        post_[a].push_back(b);
        pre_[b].push_back(a);
    }
    for (auto* m : {&pre_, &post_})
        for (auto& [k, v] : *m) std::sort(v.begin(), v.end());
}

const WfaTransition* NetIndex::transition(const Id& id) const {
    auto it = trans_.find(id);
    return it == trans_.end() ? nullptr : it->second;
}

const std::vector<Id>& NetIndex::preset(const Id& node) const {
    auto it = pre_.find(node);
    return it == pre_.end() ? empty_ : it->second;
}

const std::vector<Id>& NetIndex::postset(const Id& node) const {
    auto it = post_.find(node);
    return it == post_.end() ? empty_ : it->second;
}

namespace {

std::set<Id> reach(const std::map<Id, std::vector<Id>>& adj, const Id& start) {
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

std::vector<NetIssue> check_net_structure(const WfaNet& net) {
    std::vector<NetIssue> issues;
    NetIndex ix(net);

    std::map<Id, std::vector<Id>> fwd, bwd;
    for (const auto& [a, b] : net.arcs) {
        fwd[a].push_back(b);
        bwd[b].push_back(a);
    }

    for (const auto& [a, b] : net.arcs) {
        bool a_place = ix.is_place(a), b_place = ix.is_place(b);
        if (!a_place && !ix.is_transition(a))
            issues.push_back({"unknown-node", "arc from unknown node " + a, {a}});
        if (!b_place && !ix.is_transition(b))
            issues.push_back({"unknown-node", "arc to unknown node " + b, {b}});
        if (a_place && b_place)
            issues.push_back({"consecutive-places",
                              "consecutive places " + a + " -> " + b +
                                  " without an activity separating them",
                              {a, b}});
        if (!a_place && !b_place && ix.is_transition(a) && ix.is_transition(b))
            issues.push_back({"consecutive-activities",
                              "consecutive activities " + a + " -> " + b +
                                  " without a place separating them",
                              {a, b}});
    }

    if (net.initial_place.empty() || !ix.is_place(net.initial_place))
        issues.push_back({"no-source", "initial place missing or not a place", {}});
    if (net.final_place.empty() || !ix.is_place(net.final_place))
        issues.push_back({"no-sink", "final place missing or not a place", {}});

    for (const auto& p : net.places) {
        if (ix.preset(p).empty() && p != net.initial_place)
            issues.push_back({"stray-source", "place " + p + " has no incoming arcs", {p}});
        if (ix.postset(p).empty() && p != net.final_place)
            issues.push_back({"stray-sink", "place " + p + " has no outgoing arcs", {p}});
    }
    if (ix.is_place(net.initial_place) && !ix.preset(net.initial_place).empty())
        issues.push_back(
            {"source-has-input", "initial place " + net.initial_place + " has incoming arcs", {net.initial_place}});
    if (ix.is_place(net.final_place) && !ix.postset(net.final_place).empty())
        issues.push_back(
            {"sink-has-output", "final place " + net.final_place + " has outgoing arcs", {net.final_place}});

    for (const auto& t : net.transitions) {
        if (ix.preset(t.id).empty())
            issues.push_back({"transition-no-input", "transition " + t.id + " has no input place", {t.id}});
        if (ix.postset(t.id).empty())
            issues.push_back({"transition-no-output", "transition " + t.id + " has no output place", {t.id}});
    }

    // Every node must lie between source and sink.
    if (ix.is_place(net.initial_place) && ix.is_place(net.final_place)) {
        auto from_src = reach(fwd, net.initial_place);
        auto to_sink = reach(bwd, net.final_place);
        auto check = [&](const Id& node) {
            if (!from_src.count(node))
                issues.push_back(
                    {"unreachable", "node " + node + " not reachable from the source", {node}});
            if (!to_sink.count(node))
                issues.push_back(
                    {"cannot-complete", "node " + node + " cannot reach the sink", {node}});
        };
        for (const auto& p : net.places) check(p);
        for (const auto& t : net.transitions) check(t.id);
    }

    std::sort(issues.begin(), issues.end(), [](const NetIssue& a, const NetIssue& b) {
        return std::tie(a.code, a.message) < std::tie(b.code, b.message);
    });
    return issues;
}

}  // namespace wfav

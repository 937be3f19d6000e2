#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wfav/model.hpp"

// Workflow nets with actors: places, transitions annotated with a
// responsible actor and the information sets it produces/reads/modifies/
// sends. Arcs are kept as generic node pairs so that malformed nets read
// from text can still be inspected by the structural property checks.

namespace wfav {

struct SendAnnotation {
    Id info;
    Id destination;
    auto operator<=>(const SendAnnotation&) const = default;
};

struct WfaTransition {
    Id id;
    Id res;  // responsible actor
    std::vector<Id> pd, rd, md;
    std::vector<SendAnnotation> sd;
};

struct WfaNet {
    std::vector<Id> places;
    std::vector<WfaTransition> transitions;
    std::vector<std::pair<Id, Id>> arcs;
    Id initial_place;
    Id final_place;
};

struct NetIssue {
    std::string code;  // "consecutive-places", "no-source", ...
    std::string message;
    std::vector<Id> elements;
};

// Structural well-formedness: bipartite arcs, unique source equal to the
// initial place, unique sink equal to the final place, every node forward-
// reachable from the source and backward-reachable from the sink.
std::vector<NetIssue> check_net_structure(const WfaNet& net);

class NetIndex {
public:
    explicit NetIndex(const WfaNet& net);

    bool is_place(const Id& id) const { return places_.count(id) > 0; }
    bool is_transition(const Id& id) const { return trans_.count(id) > 0; }
    const WfaTransition* transition(const Id& id) const;

    const std::vector<Id>& preset(const Id& node) const;   // arc sources into node
    const std::vector<Id>& postset(const Id& node) const;  // arc targets out of node

    const WfaNet& net() const { return *net_; }

private:
    const WfaNet* net_;
    std::set<Id> places_;
    std::map<Id, const WfaTransition*> trans_;
    std::map<Id, std::vector<Id>> pre_, post_;
    std::vector<Id> empty_;
};

}  // namespace wfav

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfav/wfa.hpp"

// Execution semantics of WFA-nets: configurations (marking plus information
// state), enabledness gated by activity flow, information flow and the
// static IQ verdicts, firing, explicit-state reachability and soundness.
//
// Two explorers build the same graph: a level-synchronous one whose frontier
// expansion can run under OpenMP, and a plain queue-based serial reference
// kept for testing and benchmarking against it.

namespace wfav::engine {

struct NotEnabledError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfoToken {
    Id info;
    Id holder;
    Tick tick = 0;  // execution tick ordering the entry, not a model tick
    auto operator<=>(const InfoToken&) const = default;
};

struct Configuration {
    std::vector<std::uint32_t> marking;  // indexed like ExecContext places
    std::vector<InfoToken> info_state;   // sorted and unique
    auto operator<=>(const Configuration&) const = default;
};

class ExecContext {
public:
    // iq_gate: per-transition verdict of the static IQ analysis; missing
    // entries default to satisfied. Nets explored without a goal model pass
    // no gate at all.
    explicit ExecContext(const WfaNet& net, std::map<Id, bool> iq_gate = {});

    const WfaNet& net() const { return *net_; }
    size_t place_count() const { return place_ids_.size(); }
    size_t transition_count() const { return trans_.size(); }
    const Id& place_id(size_t i) const { return place_ids_[i]; }
    const Id& transition_id(size_t i) const { return trans_[i].t->id; }
    std::optional<size_t> place_index(const Id& id) const;
    std::optional<size_t> transition_index(const Id& id) const;

    Configuration initial() const;  // one token on the initial place

    struct Enabled {
        bool enabled = false;
        std::string reason;  // "marking" / "information-flow:..." / "iq:..."
    };
    Enabled enabled(const Configuration& c, size_t transition) const;
    Configuration fire(const Configuration& c, size_t transition) const;  // pre: enabled

private:
    struct TransData {
        const WfaTransition* t;
        std::vector<size_t> pre, post;  // place indices
        bool iq_ok = true;
    };
    const WfaNet* net_;
    std::vector<Id> place_ids_;
    std::map<Id, size_t> place_index_;
    std::vector<TransData> trans_;
    std::map<Id, size_t> trans_index_;
};

struct Edge {
    size_t from;
    size_t transition;
    size_t to;
    auto operator<=>(const Edge&) const = default;
};

struct ReachabilityGraph {
    std::vector<Configuration> nodes;  // node 0 is the initial configuration
    std::vector<Edge> edges;
    // Discovery parent of each node, for witness reconstruction; the root
    // has parent == npos.
    std::vector<size_t> parent_node;
    std::vector<size_t> parent_transition;

    static constexpr size_t npos = static_cast<size_t>(-1);
    std::vector<Id> firing_sequence(const ExecContext& ctx, size_t node) const;
};

struct BoundExceeded {
    Id place;
    std::vector<Id> witness;  // firing sequence whose last step breaks the bound
};

struct ExploreResult {
    std::optional<ReachabilityGraph> graph;
    std::optional<BoundExceeded> bound_exceeded;
};

// Level-synchronous exploration; `parallel` expands each frontier with
// OpenMP. Both settings produce identical graphs, including node numbering.
ExploreResult explore(const ExecContext& ctx, const Configuration& initial,
                      std::uint32_t bound, bool parallel = false);

// Plain queue-based breadth-first reference.
ExploreResult explore_reference(const ExecContext& ctx, const Configuration& initial,
                                std::uint32_t bound);

struct SoundnessReport {
    bool option_to_complete = false;
    bool proper_completion = false;
    bool no_dead_transitions = false;
    bool sound() const { return option_to_complete && proper_completion && no_dead_transitions; }
    std::vector<Id> dead_transitions;
    std::optional<std::vector<Id>> stuck_witness;     // cannot reach completion from here
    std::optional<std::vector<Id>> improper_witness;  // final place marked alongside other tokens
    size_t configuration_count = 0;
    size_t edge_count = 0;
};

struct SoundnessOutcome {
    std::optional<SoundnessReport> report;
    std::optional<BoundExceeded> bound_exceeded;
};

SoundnessOutcome check_soundness(const ExecContext& ctx, const Configuration& initial,
                                 std::uint32_t bound, bool parallel = false);

// Canonical (order-independent) rendering of a graph for equality checks.
std::string canonical_graph(const ExecContext& ctx, const ReachabilityGraph& g);

}  // namespace wfav::engine

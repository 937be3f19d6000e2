#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfav/diagnostics.hpp"
#include "wfav/model.hpp"
#include "wfav/wfa.hpp"

// Maps a validated goal model onto a WFA-net: atomic leaves become
// transitions, and-decompositions become sequences (reordered where data
// dependencies demand it), or-decompositions become alternative branches
// between a shared split and join place. The trace records the goal-to-
// transition pairs and the block tree so later checks can audit the result
// without trusting the builder.

namespace wfav::mapper {

struct Block {
    enum class Kind { Atomic, AndBlock, OrBlock };
    Kind kind = Kind::Atomic;
    Id root;
    std::vector<Block> children;  // empty for Atomic

    std::vector<Id> member_roots() const {
        if (children.empty()) return {root};
        std::vector<Id> out;
        for (const auto& c : children) out.push_back(c.root);
        return out;
    }
};

// Goals of the leaves under a block, in member order.
std::vector<Id> block_leaves(const Block& b);

struct BlockError {
    std::string code;
    std::string message;
    std::vector<Id> elements;
};

struct BlockResult {
    std::vector<Block> forest;  // root blocks in declaration order
    std::optional<BlockError> error;
};

// Rules: a goal without decomposition is an atomic block; a decomposed goal
// is a block made of all its sub-goals. Excluded (nomap) roots drop their
// whole subtree; an excluded goal below a decomposition is a partial block.
BlockResult identify_blocks(const GoalModel& model);

struct MappingTrace {
    std::string model_digest;
    std::vector<std::pair<Id, Id>> pairs;  // goal -> transition, leaf order
    std::vector<Block> forest;

    std::optional<Id> transition_of(const Id& goal) const;
    std::optional<Id> goal_of(const Id& transition) const;
};

enum class MappingErrorKind { EmptyModel, PartialBlock, UnproducedInfo, CyclicDataDependency };

struct MappingError {
    MappingErrorKind kind = MappingErrorKind::EmptyModel;
    std::string message;
    std::vector<Id> elements;
};

struct MappingResult {
    std::optional<WfaNet> net;
    std::optional<MappingTrace> trace;
    std::optional<MappingError> error;
};

MappingResult map_to_net(const GoalModel& model, const BlockResult& blocks);

// Re-checks all mapping rules and constraints on the produced artifacts,
// independent of how they were built.
std::vector<NetIssue> verify_mapping(const GoalModel& model, const WfaNet& net,
                                     const MappingTrace& trace);

std::string print_trace(const MappingTrace& trace);

struct TraceParseResult {
    std::optional<MappingTrace> trace;
    std::vector<Diagnostic> diagnostics;
};

TraceParseResult parse_trace(const std::string& text, const std::string& filename = "<trace>");

}  // namespace wfav::mapper

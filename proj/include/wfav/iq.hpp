#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfav/datalog.hpp"
#include "wfav/model.hpp"

// The seven information-quality dimensions evaluated over a validated,
// role-flattened goal model. Two independent routes compute the same
// verdicts: a direct procedural evaluation (with witnesses, used by the
// pipeline for reporting) and the bundled Datalog axiom program (the formal
// semantics, cross-checked against the direct route on every run).

namespace wfav::iq {

enum class Dimension {
    Accessibility,
    Accuracy,
    Believability,
    Trustworthiness,
    Completeness,
    Timeliness,
    Consistency,
};

const char* to_string(Dimension d);

struct Verdict {
    Id goal;
    Id info;
    Dimension dimension;
    bool satisfied = false;
    std::vector<Id> witness;  // model elements explaining the verdict
};

// Sub-check outcomes per (goal, info); unset fields do not apply.
struct Detail {
    Id goal;
    Id info;
    std::optional<bool> available;
    std::optional<bool> permitted;
    std::optional<bool> believable_produce;
    std::optional<bool> believable_read;
    std::optional<bool> source_trustworthy;
    std::optional<bool> provision_trustworthy;
    std::optional<bool> value_complete;
    std::optional<bool> purpose_complete;
    std::optional<bool> read_timely;
    std::optional<bool> send_timely;
    std::optional<bool> consistent;
    std::vector<Id> witness;
};

struct AnalysisIssue {
    std::string code;  // "inconsistent-timestamps", "chain-tie"
    std::string message;
    std::vector<Id> elements;
};

struct Analysis {
    std::vector<Verdict> verdicts;  // ordered by (goal, info, dimension)
    std::vector<Detail> details;    // ordered by (goal, info)
    std::vector<AnalysisIssue> issues;
};

enum class ChainOp { Produce, Modify, Send, Provide };

struct ChainEvent {
    Id actor;
    ChainOp op;
    Tick tick = 0;
    InfoOp required_permission = InfoOp::Produce;
};

struct ProvenanceChain {
    Id info;
    std::vector<ChainEvent> events;  // ordered by (tick, op, actor)
};

// Static provenance reconstruction: produce/modify/send/provision events on
// each produced information item, ordered by tick with declared ties noted.
std::vector<ProvenanceChain> provenance_chains(const GoalModel& model,
                                               std::vector<AnalysisIssue>* issues);

// Direct procedural evaluation of all seven dimensions.
Analysis analyze_all(const GoalModel& model);

// Same verdicts derived by evaluating the bundled Datalog axioms.
Analysis analyze_all_rules(const GoalModel& model);

// Single-dimension view of analyze_all.
std::vector<Verdict> check_dimension(const GoalModel& model, Dimension d);

// Ground facts describing the model, one per element or relation.
std::vector<datalog::Atom> extract_facts(const GoalModel& model);

// The bundled axiom rule text.
const std::string& iq_axioms();

// Axioms plus the model's facts, ready for evaluation.
datalog::Program build_iq_program(const GoalModel& model);

}  // namespace wfav::iq

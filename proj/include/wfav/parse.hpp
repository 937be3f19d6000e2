#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfav/diagnostics.hpp"
#include "wfav/model.hpp"
#include "wfav/wfa.hpp"

// Line-oriented concrete syntax for goal models (.gqm) and WFA-nets (.wfa).
// One statement per line, `#` comments, key=value attributes, `{a, b}` sets.
// Definitions must precede uses so every dangling reference gets a span.

namespace wfav {

struct GqmParseResult {
    std::optional<GoalModel> model;     // present iff no Error diagnostics
    std::vector<Diagnostic> diagnostics;
};

struct WfaParseResult {
    std::optional<WfaNet> net;          // present iff no Error diagnostics
    std::vector<Diagnostic> diagnostics;  // includes structural warnings
};

GqmParseResult parse_goal_model(const std::string& text, const std::string& filename = "<input>");
WfaParseResult parse_wfa_net(const std::string& text, const std::string& filename = "<input>");

// Canonical, deterministic pretty-printers; parse(print(x)) is structurally
// equal to x and printing the same value twice is byte-identical.
std::string print_goal_model(const GoalModel& model);
std::string print_wfa_net(const WfaNet& net);

}  // namespace wfav

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfav/engine.hpp"
#include "wfav/iq.hpp"
#include "wfav/mapper.hpp"
#include "wfav/model.hpp"
#include "wfav/wfa.hpp"

// The 21 design properties, grouped into mapping (M1-M5), control flow
// (C1-C5), information flow (I1-I4) and information quality (Q1-Q7).
// Verified on the artifacts as given; nothing here trusts the mapper.

namespace wfav::props {

enum class PropertyId {
    M1, M2, M3, M4, M5,      // mapping
    C1, C2, C3, C4, C5,      // control flow
    I1, I2, I3, I4,          // information flow
    Q1, Q2, Q3, Q4, Q5, Q6, Q7,  // information quality
};

enum class Category { Mapping, ControlFlow, InformationFlow, IQ };

const char* to_string(PropertyId p);
const char* to_string(Category c);
Category category_of(PropertyId p);
const char* description_of(PropertyId p);

struct Violation {
    PropertyId property = PropertyId::M1;
    Category category = Category::Mapping;
    std::vector<Id> elements;
    std::string message;
    std::optional<std::vector<Id>> witness;  // firing sequence where applicable
};

// Renders as "M4 mapping t_x,quotes: message".
std::string format_violation(const Violation& v);

struct InputMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckOptions {
    bool strict_optional_reads = false;  // escalate Q2 warnings to violations
    std::uint32_t bound = 1;             // token bound for the I1 path check
};

struct CheckInput {
    const GoalModel* model = nullptr;
    const WfaNet* net = nullptr;
    const mapper::MappingTrace* trace = nullptr;
    const iq::Analysis* analysis = nullptr;
    // Soundness of the gated semantics; null when unavailable (for example
    // when the net is structurally broken).
    const engine::SoundnessOutcome* soundness = nullptr;
};

struct CheckReport {
    std::vector<Violation> violations;  // stable (property, elements) order
    std::vector<Violation> warnings;    // non-escalated optional-read findings
    bool structure_ok = true;           // C1/C2 clean; semantic checks ran
};

// Evaluates all 21 properties. Throws InputMismatchError when the trace
// digest does not match the model.
CheckReport check_all(const CheckInput& in, const CheckOptions& opts = {});

}  // namespace wfav::props

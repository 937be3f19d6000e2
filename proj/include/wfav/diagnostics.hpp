#pragma once

#include <string>
#include <vector>

namespace wfav {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
};

enum class Severity { Error, Warning };

struct Diagnostic {
    SourceSpan span;
    Severity severity = Severity::Error;
    std::string message;
};

// Renders as "file:line:col: severity: message", stable for CI grepping.
std::string format_diagnostic(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace wfav

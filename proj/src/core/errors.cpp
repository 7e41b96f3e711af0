#include "taskchain/core/errors.hpp"

#include <sstream>

namespace taskchain {

namespace {

std::string describe(const std::vector<ScriptIssue>& issues) {
    std::ostringstream out;
    out << "action script rejected (" << issues.size() << " line"
        << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& issue : issues) {
        out << "; line " << issue.line_no << ": " << issue.reason;
    }
    return out.str();
}

}  // namespace

ParseError::ParseError(std::vector<ScriptIssue> issues)
    : Error(describe(issues)), issues_(std::move(issues)) {}

}  // namespace taskchain

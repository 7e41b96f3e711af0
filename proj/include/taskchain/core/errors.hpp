#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace taskchain {

// Root of every error raised by the library. Subclasses name the failure;
// callers that only need a message can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define TASKCHAIN_DEFINE_ERROR(Name)        \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

// core
TASKCHAIN_DEFINE_ERROR(OutOfRange);
TASKCHAIN_DEFINE_ERROR(IneligibleSubtask);
TASKCHAIN_DEFINE_ERROR(PreconditionViolation);
TASKCHAIN_DEFINE_ERROR(DecodeError);

// llm
TASKCHAIN_DEFINE_ERROR(TransportError);
TASKCHAIN_DEFINE_ERROR(ProviderRefusal);
TASKCHAIN_DEFINE_ERROR(BudgetExceeded);
TASKCHAIN_DEFINE_ERROR(UnknownModel);
TASKCHAIN_DEFINE_ERROR(NoJsonFound);
TASKCHAIN_DEFINE_ERROR(MalformedJson);

// env
TASKCHAIN_DEFINE_ERROR(UnsupportedAction);
TASKCHAIN_DEFINE_ERROR(EnvDisconnected);
TASKCHAIN_DEFINE_ERROR(UpscaleRequested);
TASKCHAIN_DEFINE_ERROR(SpecInvalid);

// roles
TASKCHAIN_DEFINE_ERROR(SchemaMismatch);
TASKCHAIN_DEFINE_ERROR(SafetyRejected);

// orchestrator / datastore / eval
TASKCHAIN_DEFINE_ERROR(Aborted);
TASKCHAIN_DEFINE_ERROR(IoError);
TASKCHAIN_DEFINE_ERROR(InsufficientTasks);
TASKCHAIN_DEFINE_ERROR(JoinMismatch);
TASKCHAIN_DEFINE_ERROR(NoApplicableMutation);

#undef TASKCHAIN_DEFINE_ERROR

struct ScriptIssue {
    int line_no = 0;  // 1-based
    std::string reason;
};

// Raised by the action-script parser; carries every offending line, not
// just the first.
class ParseError : public Error {
public:
    explicit ParseError(std::vector<ScriptIssue> issues);

    const std::vector<ScriptIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ScriptIssue> issues_;
};

}  // namespace taskchain

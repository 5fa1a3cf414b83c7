#pragma once

#include <stdexcept>
#include <string>

namespace treembed {

// Caller broke an operation's precondition on argument shape.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Input text could not be decoded; `where` names a line or byte offset.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::string where_)
        : std::runtime_error(what + " (" + where_ + ")"), where(std::move(where_)) {}
    std::string where;
};

// A property that the construction guarantees did not hold.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A numeric hypothesis of an embedding procedure failed; `inequality`
// names the violated condition in readable form.
struct PreconditionError : std::runtime_error {
    PreconditionError(const std::string& inequality_)
        : std::runtime_error("hypothesis not met: " + inequality_), inequality(inequality_) {}
    std::string inequality;
};

}  // namespace treembed

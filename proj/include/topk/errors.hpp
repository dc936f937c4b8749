#ifndef TOPK_ERRORS_HPP
#define TOPK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topk {

// Caller broke a documented precondition (bad k, a == b, n < 0, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The booster or an estimator touched relevance information outside the
// revealed top-k.
class InformationBarrierViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Exhaustive oracles refuse inputs beyond their hard scale limits.
class ScaleGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Empirical edge requested for a learner whose weight norm is zero.
class UndefinedEdgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace topk

#endif  // TOPK_ERRORS_HPP

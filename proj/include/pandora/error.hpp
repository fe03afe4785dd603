#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pandora {

enum class ErrorCode {
    NegativePrize,
    ProbSumInvalid,
    EmptySupport,
    OutOfRange,
    InvalidArgument,
    BudgetExceeded,
    NeverStops,
    NotDoublyMonotone,
    NeverSampled,
    ZOutOfRange,
    Infeasible,
    KTooLarge,
    Validation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every domain failure; `code()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pandora

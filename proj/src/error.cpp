#include "pandora/error.hpp"

namespace pandora {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativePrize: return "NegativePrize";
    case ErrorCode::ProbSumInvalid: return "ProbSumInvalid";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NeverStops: return "NeverStops";
    case ErrorCode::NotDoublyMonotone: return "NotDoublyMonotone";
    case ErrorCode::NeverSampled: return "NeverSampled";
    case ErrorCode::ZOutOfRange: return "ZOutOfRange";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::Validation: return "Validation";
    }
    return "Unknown";
}

} // namespace pandora

#include "leakstudy/error.hpp"

#include <fmt/format.h>

namespace leakstudy {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::CalendarGap: return "CALENDAR_GAP";
    case ErrorCode::Ordering: return "ORDERING";
    case ErrorCode::Ingest: return "INGEST";
    case ErrorCode::FxGap: return "FX_GAP";
    case ErrorCode::InsufficientHistory: return "INSUFFICIENT_HISTORY";
    case ErrorCode::Data: return "DATA";
    case ErrorCode::SingularDesign: return "SINGULAR_DESIGN";
    case ErrorCode::ThinHistory: return "THIN_HISTORY";
    case ErrorCode::FactorGap: return "FACTOR_GAP";
    case ErrorCode::InferenceUnavailable: return "INFERENCE_UNAVAILABLE";
    case ErrorCode::UndefinedTurnover: return "UNDEFINED_TURNOVER";
    case ErrorCode::InsufficientBaseline: return "INSUFFICIENT_BASELINE";
    case ErrorCode::EmptySample: return "EMPTY_SAMPLE";
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

IngestError::IngestError(std::string file, std::size_t row, std::string column,
                         const std::string& what)
    : Error(ErrorCode::Ingest,
            fmt::format("{}: row {}{}: {}", file, row,
                        column.empty() ? std::string{} : fmt::format(", column '{}'", column), what)),
      file_(std::move(file)),
      row_(row),
      column_(std::move(column)) {}

}  // namespace leakstudy

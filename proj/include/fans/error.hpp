#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fans {

enum class ErrorCode {
  kEmptyClass,
  kInvalidData,
  kShape,
  kDegenerateLabels,
  kStratification,
  kConvergence,
  kConfig,
  kUsage,
  kParse,
  kLabelDomain,
  kIo,
  kVersion,
  kSchema,
  kChecksum,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyClass: return "empty_class";
    case ErrorCode::kInvalidData: return "invalid_data";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kDegenerateLabels: return "degenerate_labels";
    case ErrorCode::kStratification: return "stratification";
    case ErrorCode::kConvergence: return "convergence";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kLabelDomain: return "label_domain";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kChecksum: return "checksum";
  }
  return "unknown";
}

// Process exit status for the CLI: 2 usage, 3 data, 4 numeric, 5 I/O.
inline int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
    case ErrorCode::kConfig:
      return 2;
    case ErrorCode::kEmptyClass:
    case ErrorCode::kInvalidData:
    case ErrorCode::kShape:
    case ErrorCode::kDegenerateLabels:
    case ErrorCode::kStratification:
    case ErrorCode::kParse:
    case ErrorCode::kLabelDomain:
      return 3;
    case ErrorCode::kConvergence:
      return 4;
    case ErrorCode::kIo:
    case ErrorCode::kVersion:
    case ErrorCode::kSchema:
    case ErrorCode::kChecksum:
      return 5;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fans

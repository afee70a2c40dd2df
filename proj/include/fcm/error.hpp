#ifndef FCM_ERROR_HPP
#define FCM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fcm {

/// Error taxonomy. Codes are grouped into three exit categories used by the
/// CLI: configuration (2), data (3), and runtime (4).
enum class ErrorCode {
    invalid_argument,
    empty_input,
    length_mismatch,
    dimension_mismatch,
    order_mismatch,
    malformed_header,
    malformed_row,
    duplicate_frame_id,
    unlabeled_frame_reference,
    unknown_concept,
    insufficient_frames,
    not_expressible,
    empty_definition,
    untrained_model,
    io_failure,
    internal,
};

constexpr const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::empty_input: return "empty_input";
        case ErrorCode::length_mismatch: return "length_mismatch";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::order_mismatch: return "order_mismatch";
        case ErrorCode::malformed_header: return "malformed_header";
        case ErrorCode::malformed_row: return "malformed_row";
        case ErrorCode::duplicate_frame_id: return "duplicate_frame_id";
        case ErrorCode::unlabeled_frame_reference: return "unlabeled_frame_reference";
        case ErrorCode::unknown_concept: return "unknown_concept";
        case ErrorCode::insufficient_frames: return "insufficient_frames";
        case ErrorCode::not_expressible: return "not_expressible";
        case ErrorCode::empty_definition: return "empty_definition";
        case ErrorCode::untrained_model: return "untrained_model";
        case ErrorCode::io_failure: return "io_failure";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

/// CLI exit code for an error: 2 = config, 3 = data, 4 = runtime.
constexpr int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument:
            return 2;
        case ErrorCode::empty_input:
        case ErrorCode::length_mismatch:
        case ErrorCode::dimension_mismatch:
        case ErrorCode::order_mismatch:
        case ErrorCode::malformed_header:
        case ErrorCode::malformed_row:
        case ErrorCode::duplicate_frame_id:
        case ErrorCode::unlabeled_frame_reference:
        case ErrorCode::unknown_concept:
        case ErrorCode::insufficient_frames:
        case ErrorCode::not_expressible:
        case ErrorCode::empty_definition:
        case ErrorCode::untrained_model:
            return 3;
        case ErrorCode::io_failure:
        case ErrorCode::internal:
            return 4;
    }
    return 4;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) raise(code, message);
}

}  // namespace fcm

#endif  // FCM_ERROR_HPP

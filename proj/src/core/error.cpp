// SPDX-License-Identifier: Apache-2.0

#include "icd/core/error.hpp"

namespace icd {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::empty_support: return "empty_support";
    case ErrorKind::vocab_violation: return "vocab_violation";
    case ErrorKind::vocab_mismatch: return "vocab_mismatch";
    case ErrorKind::provider_unreachable: return "provider_unreachable";
    case ErrorKind::protocol_error: return "protocol_error";
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::parse_error: return "parse_error";
    case ErrorKind::unperturbable_record: return "unperturbable_record";
    case ErrorKind::client_error: return "client_error";
    case ErrorKind::unscorable: return "unscorable";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

} // namespace icd

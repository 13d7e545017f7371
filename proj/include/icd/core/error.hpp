// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icd {

/// Machine-readable error categories. The string form is what the CLI
/// reports in its JSON error payload.
enum class ErrorKind {
    invalid_argument,
    empty_support,
    vocab_violation,
    vocab_mismatch,
    provider_unreachable,
    protocol_error,
    io_error,
    parse_error,
    unperturbable_record,
    client_error,
    unscorable,
    internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Transport or protocol failure talking to a remote endpoint.
class RemoteError : public Error {
public:
    RemoteError(ErrorKind kind, const std::string& message, std::string endpoint, unsigned attempts)
        : Error(kind, message + " (endpoint " + endpoint + ", attempts " + std::to_string(attempts) + ")"),
          endpoint_(std::move(endpoint)),
          attempts_(attempts) {}

    const std::string& endpoint() const noexcept { return endpoint_; }
    unsigned attempts() const noexcept { return attempts_; }

private:
    std::string endpoint_;
    unsigned attempts_;
};

} // namespace icd

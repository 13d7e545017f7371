// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "icd/providers/provider.hpp"

namespace httplib {
class Server;
}

namespace icd {

/// Minimal in-process server for the logits protocol, backed by local
/// providers. Used as the recorded-fixture stub in tests and for local
/// experiments; production backends live elsewhere.
class LogitServer {
public:
    struct Reply {
        int status = 200;
        std::string body;
    };

    /// All slots must share a vocabulary size.
    explicit LogitServer(std::map<std::string, ProviderPtr> slots);
    ~LogitServer();

    LogitServer(const LogitServer&) = delete;
    LogitServer& operator=(const LogitServer&) = delete;

    Reply handle_logits(std::string_view body) const;
    Reply handle_health() const;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Binds and serves on the calling thread until stop().
    void serve(const std::string& host, int port);
    void stop();

    std::size_t vocab_size() const noexcept { return vocab_size_; }

private:
    void install_routes();

    std::map<std::string, ProviderPtr> slots_;
    std::size_t vocab_size_ = 0;
    std::unique_ptr<httplib::Server> http_;
    std::thread listener_;
};

} // namespace icd

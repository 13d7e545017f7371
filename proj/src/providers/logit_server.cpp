// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/logit_server.hpp"

#include <fmt/format.h>

#include "httplib.h"
#include "icd/core/error.hpp"
#include "icd/providers/wire.hpp"

namespace icd {

LogitServer::LogitServer(std::map<std::string, ProviderPtr> slots) : slots_(std::move(slots)) {
    if (slots_.empty()) throw Error(ErrorKind::invalid_argument, "logit server needs at least one model slot");
    vocab_size_ = slots_.begin()->second->vocab().size();
    for (const auto& [name, provider] : slots_) {
        if (provider->vocab().size() != vocab_size_) {
            throw Error(ErrorKind::vocab_mismatch, fmt::format("slot '{}' has vocab_size {} but '{}' has {}", name,
                                                               provider->vocab().size(), slots_.begin()->first, vocab_size_));
        }
    }
    install_routes();
}

LogitServer::~LogitServer() { stop(); }

LogitServer::Reply LogitServer::handle_logits(std::string_view body) const {
    wire::LogitsRequest req;
    try {
        req = wire::decode_request(body);
    } catch (const Error& e) {
        return {400, wire::encode_error(to_string(e.kind()), e.what())};
    }
    auto it = slots_.find(req.model);
    if (it == slots_.end()) {
        return {404, wire::encode_error("unknown_model", fmt::format("no slot named '{}'", req.model))};
    }
    try {
        const auto logits = it->second->next_logits(req.context);
        return {200, wire::encode_response(logits.values(), req.model)};
    } catch (const Error& e) {
        const int status = e.kind() == ErrorKind::vocab_violation ? 400 : 500;
        return {status, wire::encode_error(to_string(e.kind()), e.what())};
    }
}

LogitServer::Reply LogitServer::handle_health() const {
    return {200, wire::encode_health(vocab_size_)};
}

void LogitServer::install_routes() {
    http_ = std::make_unique<httplib::Server>();
    auto reply = [](httplib::Response& res, const Reply& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    http_->Post("/v1/logits", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_logits(req.body));
    });
    auto health = [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, handle_health()); };
    http_->Post("/v1/health", health);
    http_->Get("/v1/health", health);
}

int LogitServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorKind::io_error, fmt::format("cannot bind {}:{}", host, port));
    listener_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return bound;
}

void LogitServer::serve(const std::string& host, int port) {
    if (!http_->listen(host, port)) throw Error(ErrorKind::io_error, fmt::format("cannot listen on {}:{}", host, port));
}

void LogitServer::stop() {
    if (http_) http_->stop();
    if (listener_.joinable()) listener_.join();
}

} // namespace icd

// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/uri.hpp"

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"
#include "icd/providers/decorators.hpp"
#include "icd/providers/ngram_lm.hpp"
#include "icd/providers/remote_lm.hpp"
#include "icd/providers/table_lm.hpp"

namespace icd {

namespace {

bool starts_with(const std::string& s, std::string_view prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

ProviderPtr maybe_cached(ProviderPtr p, const ProviderFactoryOptions& options) {
    if (!options.cache) return p;
    return std::make_shared<CachedProvider>(std::move(p));
}

} // namespace

ProviderPtr make_provider(const std::string& uri, const ProviderFactoryOptions& options, ProviderPtr base) {
    if (uri == "same-as-base") {
        if (!base) throw Error(ErrorKind::invalid_argument, "'same-as-base' needs a base provider");
        return base;
    }
    if (starts_with(uri, "table:")) {
        auto table = std::make_shared<TableLM>(TableLM::load(uri.substr(6)));
        if (options.vocab && options.vocab->size() != table->vocab().size()) {
            throw Error(ErrorKind::vocab_mismatch, fmt::format("{} has vocab_size {} but the vocabulary file has {}", uri,
                                                               table->vocab().size(), options.vocab->size()));
        }
        return maybe_cached(std::move(table), options);
    }
    if (starts_with(uri, "ngram:")) {
        return maybe_cached(std::make_shared<NGramLM>(NGramLM::load(uri.substr(6))), options);
    }
    if (starts_with(uri, "http://") || starts_with(uri, "https://")) {
        RemoteOptions ro;
        const auto hash = uri.rfind('#');
        ro.endpoint = uri.substr(0, hash);
        if (hash != std::string::npos) ro.model = uri.substr(hash + 1);
        ro.timeout = options.timeout;
        ro.retries = options.retries;
        ro.max_in_flight = options.max_in_flight;
        return maybe_cached(RemoteLM::connect(std::move(ro), options.vocab), options);
    }
    if (starts_with(uri, "prompted:")) {
        const auto marker = uri.rfind("?prefix=");
        if (marker == std::string::npos) {
            throw Error(ErrorKind::invalid_argument, fmt::format("'{}' lacks ?prefix=<tokens-file>", uri));
        }
        auto inner = make_provider(uri.substr(9, marker - 9), options, base);
        const auto prefix_json = io::read_json(uri.substr(marker + 8));
        TokenSeq prefix;
        try {
            prefix = prefix_json.is_object() ? prefix_json.at("tokens").get<TokenSeq>() : prefix_json.get<TokenSeq>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse_error, fmt::format("prefix tokens file: {}", e.what()));
        }
        return wrap_with_prompt(std::move(inner), std::move(prefix));
    }
    throw Error(ErrorKind::invalid_argument, fmt::format("unrecognized provider URI '{}'", uri));
}

} // namespace icd

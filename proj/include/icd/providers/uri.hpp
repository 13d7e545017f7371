// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "icd/providers/provider.hpp"

namespace icd {

struct ProviderFactoryOptions {
    std::shared_ptr<const Vocabulary> vocab;   ///< optional override for remote and table providers
    std::chrono::milliseconds timeout{30000};
    unsigned retries = 2;
    std::ptrdiff_t max_in_flight = 8;
    bool cache = true;                          ///< wrap leaf providers in a CachedProvider
};

/**
 * Builds a provider from a compact URI:
 *
 *   table:<path>                      TableLM JSON file
 *   ngram:<path>                      NGramLM config file
 *   http://host:port[/prefix]#<model> RemoteLM (model defaults to "base")
 *   prompted:<uri>?prefix=<path>      PromptedProvider; <path> is a JSON array of token ids
 *   same-as-base                      the `base` argument itself
 */
ProviderPtr make_provider(const std::string& uri, const ProviderFactoryOptions& options = {},
                          ProviderPtr base = nullptr);

} // namespace icd

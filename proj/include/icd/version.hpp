// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace icd {

inline constexpr std::string_view kEngineVersion = "0.1.0";

} // namespace icd

#pragma once

#include <string>
#include <string_view>

#include "gridbench/instance.hpp"

namespace gridbench {

inline constexpr std::string_view kPromptVersion = "grid-prompt/1";

/// System prompt for one instance. Built only from public data.
std::string system_prompt(const Instance& instance);

/// Hash of the template version and the domain text, stable across
/// instances of a domain.
std::string prompt_hash(std::string_view domain);

}  // namespace gridbench

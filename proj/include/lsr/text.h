#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lsr {

// Splits on every occurrence of `sep`; keeps empty fields.
std::vector<std::string_view> split_view(std::string_view s, char sep);

std::string_view trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace lsr

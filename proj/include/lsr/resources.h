#pragma once

#include <string_view>

// Data files compiled into the library (see data/).
namespace lsr::resources {

std::string_view supersense_inventory();
std::string_view lexcat_constraints();

}  // namespace lsr::resources

#pragma once

#include "rfcast/error.hpp"

#include <string>
#include <string_view>

namespace rfcast {

enum class Country { US, UK };

[[nodiscard]] inline Country parse_country(std::string_view s) {
    if (s == "US") {
        return Country::US;
    }
    if (s == "UK") {
        return Country::UK;
    }
    throw ConfigError("unknown country '" + std::string(s) + "' (expected US or UK)");
}

} // namespace rfcast

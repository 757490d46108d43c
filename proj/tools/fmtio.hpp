// Deterministic text formatting for CSV/JSON emission: shortest
// round-trippable doubles via to_chars, so identical runs produce
// byte-identical files.

#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace ootune::cli {

inline std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer),
                                         value);
    (void)ec;
    return std::string(buffer, ptr);
}

inline std::string format_int(std::int64_t value) {
    char buffer[24];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer),
                                         value);
    (void)ec;
    return std::string(buffer, ptr);
}

}  // namespace ootune::cli

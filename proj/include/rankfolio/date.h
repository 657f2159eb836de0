#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace rankfolio {

// Proleptic Gregorian calendar date, ISO-8601 text form (YYYY-MM-DD).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    // Days since 1970-01-01.
    std::int64_t to_days() const;
    static Date from_days(std::int64_t days);

    // Throws std::invalid_argument on malformed text or impossible dates.
    static Date parse(std::string_view text);
    std::string to_string() const;
};

}  // namespace rankfolio

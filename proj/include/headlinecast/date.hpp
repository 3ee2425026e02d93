#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hcast {

/// A calendar day, stored as days since 1970-01-01. Comparison and
/// arithmetic are in whole days; there is no time-of-day component.
class Date {
public:
    Date() = default;

    static Date from_serial(std::int32_t days_since_epoch);
    static Date from_ymd(int year, int month, int day);

    /// Parses "YYYY-MM-DD". Throws DataError on malformed or invalid dates.
    static Date parse(std::string_view iso);
    static std::optional<Date> try_parse(std::string_view iso);

    std::int32_t serial() const { return serial_; }
    std::string to_string() const;

    /// 0 = Monday .. 6 = Sunday.
    int weekday() const;
    bool is_weekday() const { return weekday() < 5; }

    Date plus_days(int n) const { return from_serial(serial_ + n); }

    auto operator<=>(const Date&) const = default;

private:
    std::int32_t serial_ = 0;
};

} // namespace hcast

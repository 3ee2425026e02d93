#include "headlinecast/date.hpp"

#include <chrono>
#include <cstdio>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"

namespace hcast {

namespace chr = std::chrono;

Date Date::from_serial(std::int32_t days_since_epoch) {
    Date d;
    d.serial_ = days_since_epoch;
    return d;
}

Date Date::from_ymd(int year, int month, int day) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                  chr::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        throw DataError(fmt::format("invalid calendar date {:04d}-{:02d}-{:02d}", year, month, day));
    }
    return from_serial(static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count()));
}

std::optional<Date> Date::try_parse(std::string_view iso) {
    int y = 0, m = 0, d = 0;
    char extra = 0;
    const std::string s(iso);
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &extra) != 3 || s.size() != 10) {
        return std::nullopt;
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                  chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return from_serial(static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
    auto d = try_parse(iso);
    if (!d) throw DataError(fmt::format("cannot parse '{}' as an ISO-8601 day (YYYY-MM-DD)", iso));
    return *d;
}

std::string Date::to_string() const {
    const chr::sys_days sd{chr::days{serial_}};
    const chr::year_month_day ymd{sd};
    return fmt::format("{:04d}-{:02d}-{:02d}", int(ymd.year()), unsigned(ymd.month()),
                       unsigned(ymd.day()));
}

int Date::weekday() const {
    const chr::sys_days sd{chr::days{serial_}};
    const chr::weekday wd{sd};
    return static_cast<int>(wd.iso_encoding()) - 1;
}

} // namespace hcast

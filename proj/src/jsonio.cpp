#include "headlinecast/jsonio.hpp"

#include <fstream>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"

namespace hcast::jsonio {

nlohmann::json load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw DataError(fmt::format("{} is not valid JSON", path.string()));
    return j;
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    out << canonical_dump(j);
    if (!out) throw DataError(fmt::format("short write to {}", path.string()));
}

} // namespace hcast::jsonio

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace hcast::jsonio {

/// Parses a whole file; throws DataError when unreadable or malformed.
nlohmann::json load_file(const std::filesystem::path& path);

/// Canonical text form: keys sorted, two-space indent, shortest
/// round-trip numbers, trailing newline. Identical values always produce
/// identical bytes.
std::string canonical_dump(const nlohmann::json& j);

void write_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace hcast::jsonio

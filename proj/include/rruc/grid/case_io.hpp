#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rruc/grid/power_system.hpp"

namespace rruc::grid {

/// Current version of the case document schema.
inline constexpr int kCaseSchemaVersion = 1;

/// Parses a case document (JSON text). Schema violations raise InputError
/// naming the offending field, e.g. `generators[2].pmax_mw: expected number`.
PowerSystem load_case(std::string_view document);
PowerSystem load_case_file(const std::filesystem::path& path);

/// Inverse of load_case: load_case(serialize_case(s)) == s.
std::string serialize_case(const PowerSystem& system);

}  // namespace rruc::grid

#pragma once

#include <filesystem>
#include <string>

#include "lobmm/solver.hpp"

namespace lobmm {

// Policy files are JSON documents carrying the grid metadata and the action
// table flattened slice-major, then inventory node, then spread state.
std::string policy_to_json(const PolicyTable& policy);
PolicyTable policy_from_json(const std::string& text);

PolicyTable load_policy(const std::filesystem::path& path);
void save_policy(const PolicyTable& policy, const std::filesystem::path& path);

// Value slices as CSV with columns t,y,i,value (full round-trip precision).
std::string value_surface_to_csv(const ValueSurface& surface);

}  // namespace lobmm

#pragma once

#include <filesystem>
#include <string>

#include "lobmm/model.hpp"

namespace lobmm {

// Strict schema: unknown fields are rejected, all required fields must be
// present, and the assembled model must pass MarketModel::validate().
// Fee fields describing proportional (percentage-of-notional) variants are
// part of the schema but rejected with a clear error when nonzero.
MarketModel market_model_from_json(const std::string& text);
std::string market_model_to_json(const MarketModel& model);

MarketModel load_market_model(const std::filesystem::path& path);
void save_market_model(const MarketModel& model, const std::filesystem::path& path);

}  // namespace lobmm

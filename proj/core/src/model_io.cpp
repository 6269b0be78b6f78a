#include "lobmm/model_io.hpp"

#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lobmm/io_util.hpp"

namespace lobmm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("model: " + msg); }

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(ctx + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(ctx + ": unknown field '" + item.key() + "'");
  }
}

const json& field(const json& obj, const std::string& ctx, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ctx + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx + " must be an integer");
  return v.get<int>();
}

std::vector<double> number_array(const json& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(number(e, ctx + " entries"));
  return out;
}

std::vector<std::vector<double>> exec_table(const json& obj, const std::string& ctx,
                                            const char* touch_key, const char* improve_key,
                                            std::size_t m) {
  check_keys(obj, ctx, {touch_key, improve_key});
  std::vector<std::vector<double>> table(2);
  table[0] = number_array(field(obj, ctx, touch_key), ctx + "." + touch_key);
  table[1] = number_array(field(obj, ctx, improve_key), ctx + "." + improve_key);
  for (const auto& row : table) {
    if (row.size() != m) fail(ctx + " rows must have one entry per spread state");
  }
  return table;
}

void reject_proportional(const json& fees, const char* key) {
  auto it = fees.find(key);
  if (it != fees.end() && number(*it, std::string("fees.") + key) != 0) {
    fail(std::string("fees.") + key +
         ": proportional fee variants are not supported; only per-share amounts are");
  }
}

}  // namespace

MarketModel market_model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "model",
             {"delta", "m", "rho", "tick_clock", "exec_bid", "exec_ask", "fees", "price"});

  MarketModel model;
  model.grid.delta = number(field(j, "model", "delta"), "delta");
  model.grid.m = integer(field(j, "model", "m"), "m");
  if (model.grid.m < 1) fail("m must be at least 1");
  const std::size_t m = static_cast<std::size_t>(model.grid.m);

  const json& rho = field(j, "model", "rho");
  if (!rho.is_array() || rho.size() != m) fail("rho must have one row per spread state");
  for (const auto& row : rho) model.rho.push_back(number_array(row, "rho rows"));

  const json& clock = field(j, "model", "tick_clock");
  check_keys(clock, "tick_clock", {"boundaries", "rates"});
  model.tick_clock.boundaries =
      number_array(field(clock, "tick_clock", "boundaries"), "tick_clock.boundaries");
  model.tick_clock.rates = number_array(field(clock, "tick_clock", "rates"), "tick_clock.rates");

  model.exec_bid = exec_table(field(j, "model", "exec_bid"), "exec_bid", "Bb", "Bb+", m);
  model.exec_ask = exec_table(field(j, "model", "exec_ask"), "exec_ask", "Ba", "Ba-", m);

  const json& fees = field(j, "model", "fees");
  check_keys(fees, "fees",
             {"rebate_per_share", "take_fee_per_share", "fixed_fee", "proportional_rebate",
              "proportional_fee"});
  model.fees.rebate_per_share =
      number(field(fees, "fees", "rebate_per_share"), "fees.rebate_per_share");
  model.fees.take_fee_per_share =
      number(field(fees, "fees", "take_fee_per_share"), "fees.take_fee_per_share");
  model.fees.fixed_fee = number(field(fees, "fees", "fixed_fee"), "fees.fixed_fee");
  reject_proportional(fees, "proportional_rebate");
  reject_proportional(fees, "proportional_fee");

  const json& price = field(j, "model", "price");
  check_keys(price, "price", {"kind", "b", "sigma", "p0"});
  const json& kind = field(price, "price", "kind");
  if (!kind.is_string()) fail("price.kind must be a string");
  const std::string kind_s = kind.get<std::string>();
  if (kind_s == "martingale") {
    model.price.kind = PriceModel::Kind::martingale;
  } else if (kind_s == "bachelier") {
    model.price.kind = PriceModel::Kind::bachelier;
  } else {
    fail("price.kind must be 'martingale' or 'bachelier'");
  }
  model.price.b = number(field(price, "price", "b"), "price.b");
  model.price.sigma = number(field(price, "price", "sigma"), "price.sigma");
  model.price.p0 = number(field(price, "price", "p0"), "price.p0");

  model.validate();
  return model;
}

std::string market_model_to_json(const MarketModel& model) {
  json j;
  j["delta"] = model.grid.delta;
  j["m"] = model.grid.m;
  j["rho"] = model.rho;
  j["tick_clock"] = {{"boundaries", model.tick_clock.boundaries},
                     {"rates", model.tick_clock.rates}};
  j["exec_bid"] = {{"Bb", model.exec_bid[0]}, {"Bb+", model.exec_bid[1]}};
  j["exec_ask"] = {{"Ba", model.exec_ask[0]}, {"Ba-", model.exec_ask[1]}};
  j["fees"] = {{"rebate_per_share", model.fees.rebate_per_share},
               {"take_fee_per_share", model.fees.take_fee_per_share},
               {"fixed_fee", model.fees.fixed_fee}};
  j["price"] = {{"kind", model.price.kind == PriceModel::Kind::martingale ? "martingale"
                                                                          : "bachelier"},
                {"b", model.price.b},
                {"sigma", model.price.sigma},
                {"p0", model.price.p0}};
  return j.dump(2) + "\n";
}

MarketModel load_market_model(const std::filesystem::path& path) {
  return market_model_from_json(read_file(path));
}

void save_market_model(const MarketModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, market_model_to_json(model));
}

}  // namespace lobmm

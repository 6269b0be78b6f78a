#include "lobmm/policy_io.hpp"

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lobmm/io_util.hpp"

namespace lobmm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("policy: " + msg); }

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

std::string text(const json& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx + " must be a string");
  return v.get<std::string>();
}

json action_to_json(const Action& action) {
  json j;
  if (const auto* make = std::get_if<MakeAction>(&action)) {
    j["type"] = "make";
    j["qb"] = to_string(make->qb);
    j["qa"] = to_string(make->qa);
    j["lb"] = make->lb;
    j["la"] = make->la;
  } else {
    j["type"] = "take";
    j["e"] = std::get<TakeAction>(action).e;
  }
  return j;
}

Action action_from_json(const json& j, const std::string& ctx, int state) {
  const std::string type = text(field(j, ctx, "type"), ctx + ".type");
  if (type == "make") {
    check_keys(j, ctx, {"type", "qb", "qa", "lb", "la"});
    MakeAction make;
    try {
      make.qb = quote_bid_from_string(text(field(j, ctx, "qb"), ctx + ".qb"));
      make.qa = quote_ask_from_string(text(field(j, ctx, "qa"), ctx + ".qa"));
    } catch (const std::invalid_argument& e) {
      fail(ctx + ": " + e.what());
    }
    make.lb = number(field(j, ctx, "lb"), ctx + ".lb");
    make.la = number(field(j, ctx, "la"), ctx + ".la");
    if (!(make.lb >= 0) || !(make.la >= 0)) fail(ctx + ": order sizes must be nonnegative");
    if (!quote_admissible(make.qb, state) || !quote_admissible(make.qa, state)) {
      fail(ctx + ": quote placement not admissible at spread state " + std::to_string(state));
    }
    return make;
  }
  if (type == "take") {
    check_keys(j, ctx, {"type", "e"});
    TakeAction take;
    take.e = number(field(j, ctx, "e"), ctx + ".e");
    if (take.e == 0 || !std::isfinite(take.e)) fail(ctx + ": take size must be finite and nonzero");
    return take;
  }
  fail(ctx + ".type must be 'make' or 'take'");
}

}  // namespace

std::string policy_to_json(const PolicyTable& policy) {
  json j;
  j["criterion"] = to_string(policy.criterion);
  j["gamma"] = policy.gamma;
  j["eta"] = policy.eta;
  j["grid"] = {{"y_max", policy.grid.y_max}, {"dy", policy.grid.dy}};
  j["m"] = policy.m;
  j["horizon"] = policy.T;
  j["n_out"] = policy.n_out;
  json actions = json::array();
  for (const Action& action : policy.actions) actions.push_back(action_to_json(action));
  j["actions"] = std::move(actions);
  return j.dump(2) + "\n";
}

PolicyTable policy_from_json(const std::string& text_in) {
  json j;
  try {
    j = json::parse(text_in);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "policy",
             {"criterion", "gamma", "eta", "grid", "m", "horizon", "n_out", "actions"});

  PolicyTable policy;
  try {
    policy.criterion = criterion_from_string(text(field(j, "policy", "criterion"), "criterion"));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  policy.gamma = number(field(j, "policy", "gamma"), "gamma");
  policy.eta = number(field(j, "policy", "eta"), "eta");

  const json& grid = field(j, "policy", "grid");
  check_keys(grid, "grid", {"y_max", "dy"});
  policy.grid.y_max = number(field(grid, "grid", "y_max"), "grid.y_max");
  policy.grid.dy = number(field(grid, "grid", "dy"), "grid.dy");
  try {
    policy.grid.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }

  policy.m = integer(field(j, "policy", "m"), "m");
  if (policy.m < 1) fail("m must be at least 1");
  policy.T = number(field(j, "policy", "horizon"), "horizon");
  if (!(policy.T > 0)) fail("horizon must be positive");
  policy.n_out = integer(field(j, "policy", "n_out"), "n_out");
  if (policy.n_out < 1) fail("n_out must be at least 1");

  const json& actions = field(j, "policy", "actions");
  if (!actions.is_array()) fail("actions must be an array");
  const std::size_t expected =
      static_cast<std::size_t>(policy.n_out) * policy.grid.n_y() * policy.m;
  if (actions.size() != expected) {
    fail("actions must have n_out * n_y * m entries (" + std::to_string(expected) + "), got " +
         std::to_string(actions.size()));
  }
  policy.actions.reserve(expected);
  for (std::size_t n = 0; n < actions.size(); ++n) {
    const int state = static_cast<int>(n % policy.m) + 1;
    policy.actions.push_back(
        action_from_json(actions[n], "actions[" + std::to_string(n) + "]", state));
  }
  return policy;
}

PolicyTable load_policy(const std::filesystem::path& path) {
  return policy_from_json(read_file(path));
}

void save_policy(const PolicyTable& policy, const std::filesystem::path& path) {
  write_file_atomic(path, policy_to_json(policy));
}

std::string value_surface_to_csv(const ValueSurface& surface) {
  std::string out = "t,y,i,value\n";
  const int ny = surface.grid.n_y();
  for (int k = 0; k <= surface.n_out; ++k) {
    const std::string t = fmt_double(surface.time_of(k));
    for (int iy = 0; iy < ny; ++iy) {
      const std::string y = fmt_double(surface.grid.y(iy));
      for (int i = 1; i <= surface.m; ++i) {
        out += t;
        out += ',';
        out += y;
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += fmt_double(surface.at(k, iy, i));
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace lobmm

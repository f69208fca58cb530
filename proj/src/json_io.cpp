#include "nomamec/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nomamec {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

double require_number(const json& node, const std::string& field, const std::string& path) {
  if (!node.contains(field)) throw ParseError("missing field: " + path + field);
  const json& value = node.at(field);
  if (!value.is_number()) throw ParseError("field is not a number: " + path + field);
  return value.get<double>();
}

json user_to_json(const UserProfile& u) {
  return json{{"data_bits", u.data_bits},
              {"cycles_per_bit", u.cycles_per_bit},
              {"energy_per_cycle_j", u.energy_per_cycle_j},
              {"local_capacity_cycles_per_s", u.local_capacity_cycles_per_s},
              {"channel_gain", u.channel_gain}};
}

UserProfile user_from_json(const json& node, const std::string& path) {
  if (!node.is_object()) throw ParseError("expected object at " + path);
  UserProfile u;
  u.data_bits = require_number(node, "data_bits", path);
  u.cycles_per_bit = require_number(node, "cycles_per_bit", path);
  u.energy_per_cycle_j = require_number(node, "energy_per_cycle_j", path);
  u.local_capacity_cycles_per_s = require_number(node, "local_capacity_cycles_per_s", path);
  u.channel_gain = require_number(node, "channel_gain", path);
  return u;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance) {
  json root;
  root["version"] = kFormatVersion;
  root["bandwidth_hz"] = instance.bandwidth_hz;
  root["noise_psd_w_per_hz"] = instance.noise_psd_w_per_hz;
  root["deadline_s"] = instance.deadline_s;
  root["cloud_capacity_cycles"] = instance.cloud_capacity_cycles;
  json groups = json::array();
  for (const NomaGroup& g : instance.groups)
    groups.push_back(json{{"user1", user_to_json(g.user1)}, {"user2", user_to_json(g.user2)}});
  root["groups"] = groups;
  return root.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("instance file must hold a JSON object");
  if (root.contains("version") && root.at("version").is_number_integer() &&
      root.at("version").get<int>() != kFormatVersion)
    throw ParseError("unsupported instance file version");

  const double bandwidth = require_number(root, "bandwidth_hz", "");
  const double noise = require_number(root, "noise_psd_w_per_hz", "");
  const double deadline = require_number(root, "deadline_s", "");
  const double capacity = require_number(root, "cloud_capacity_cycles", "");
  if (!root.contains("groups")) throw ParseError("missing field: groups");
  const json& groups = root.at("groups");
  if (!groups.is_array() || groups.empty())
    throw ParseError("groups must be a non-empty array");

  std::vector<std::pair<UserProfile, UserProfile>> pairs;
  pairs.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::ostringstream prefix;
    prefix << "groups[" << i << "].";
    const json& g = groups.at(i);
    if (!g.is_object()) throw ParseError("expected object at groups[" + std::to_string(i) + "]");
    if (!g.contains("user1")) throw ParseError("missing field: " + prefix.str() + "user1");
    if (!g.contains("user2")) throw ParseError("missing field: " + prefix.str() + "user2");
    pairs.emplace_back(user_from_json(g.at("user1"), prefix.str() + "user1."),
                       user_from_json(g.at("user2"), prefix.str() + "user2."));
  }
  return make_instance(std::move(pairs), bandwidth, noise, deadline, capacity);
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << instance_to_json(instance);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

ScenarioSpec scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scenario file must hold a JSON object");

  ScenarioSpec spec;
  auto number = [&](const char* field, double fallback) {
    if (!root.contains(field)) return fallback;
    if (!root.at(field).is_number()) throw ParseError(std::string("field is not a number: ") + field);
    return root.at(field).get<double>();
  };
  spec.n_users = static_cast<int>(number("n_users", spec.n_users));
  spec.cell_radius_m = number("cell_radius_m", spec.cell_radius_m);
  spec.min_distance_m = number("min_distance_m", spec.min_distance_m);
  spec.shadowing_std_db = number("shadowing_std_db", spec.shadowing_std_db);
  spec.bandwidth_hz = number("bandwidth_hz", spec.bandwidth_hz);
  spec.noise_psd_dbm_hz = number("noise_psd_dbm_hz", spec.noise_psd_dbm_hz);
  spec.r_min_bits = number("r_min_bits", spec.r_min_bits);
  spec.r_max_bits = number("r_max_bits", spec.r_max_bits);
  spec.c_min_cycles_per_bit = number("c_min_cycles_per_bit", spec.c_min_cycles_per_bit);
  spec.c_max_cycles_per_bit = number("c_max_cycles_per_bit", spec.c_max_cycles_per_bit);
  spec.local_capacity_cycles_per_s =
      number("local_capacity_cycles_per_s", spec.local_capacity_cycles_per_s);
  spec.energy_per_cycle_j = number("energy_per_cycle_j", spec.energy_per_cycle_j);
  spec.deadline_s = number("deadline_s", spec.deadline_s);
  spec.cloud_capacity_cycles = number("cloud_capacity_cycles", spec.cloud_capacity_cycles);
  spec.seed = static_cast<std::uint64_t>(number("seed", static_cast<double>(spec.seed)));
  if (root.contains("pairing")) {
    const std::string p = root.at("pairing").get<std::string>();
    if (p == "sorted_extremes")
      spec.pairing = Pairing::kSortedExtremes;
    else if (p == "random")
      spec.pairing = Pairing::kRandom;
    else
      throw ParseError("pairing must be \"sorted_extremes\" or \"random\"");
  }
  check_spec(spec);
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json(buffer.str());
}

}  // namespace nomamec

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "idio/experiment.hpp"
#include "idio/idiotope.hpp"
#include "idio/sim.hpp"

namespace idio {

// TOML-style key = value file; '#' comments; flags override file values.
inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    if (key.empty() || val.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key or value");
    kv[key] = val;
  }
  return kv;
}

struct RunConfig {
  SelectionMode mode = SelectionMode::S3;
  ImmuneParams params;
  ReinforcementConfig reinforcement;
  SensorConfig sensors;
  std::string world_path;            // empty -> built-in maze
  std::string paratope_path;         // empty -> generated from paratope_seed
  std::uint64_t paratope_seed = 1000;
  std::uint64_t seed = 1;
  double timeout = 1200.0;
  double phi = 9.08;
  int jobs = 1;

  void apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) set(key, val);
  }

  void set(const std::string& key, const std::string& val) {
    auto d = [&] { return std::stod(val); };
    auto u = [&] { return static_cast<std::uint64_t>(std::stoull(val)); };
    if (key == "system") {
      if (val == "S1") mode = SelectionMode::S1;
      else if (val == "S2") mode = SelectionMode::S2;
      else if (val == "S3") mode = SelectionMode::S3;
      else throw std::runtime_error("config: system must be S1, S2 or S3, got '" + val + "'");
      params.mode = mode;
    } else if (key == "strategy") {
      if (val == "strong") reinforcement.strategy = Strategy::Strong;
      else if (val == "weak") reinforcement.strategy = Strategy::Weak;
      else throw std::runtime_error("config: strategy must be strong or weak, got '" + val + "'");
    } else if (key == "k1") params.k1 = d();
    else if (key == "k2") params.k2 = d();
    else if (key == "b") params.b = d();
    else if (key == "world") world_path = val;
    else if (key == "paratope") paratope_path = val;
    else if (key == "paratope_seed") paratope_seed = u();
    else if (key == "seed") seed = u();
    else if (key == "timeout") timeout = d();
    else if (key == "phi") phi = d();
    else if (key == "jobs") jobs = static_cast<int>(d());
    else if (key == "obstacle_gain") reinforcement.obstacle_gain = d();
    else if (key == "open_space_gain") reinforcement.open_space_gain = d();
    else if (key == "movement_gain") reinforcement.movement_gain = d();
    else if (key == "speed_gain") reinforcement.speed_gain = d();
    else if (key == "tracking_bonus") reinforcement.tracking_bonus = d();
    else if (key == "lost_marker_penalty") reinforcement.lost_marker_penalty = d();
    else if (key == "reverse_penalty") reinforcement.reverse_penalty = d();
    else if (key == "no_move_penalty") reinforcement.no_move_penalty = d();
    else if (key == "sector_change_attenuation") reinforcement.sector_change_attenuation = d();
    else if (key == "slow_threshold") reinforcement.slow_threshold = d();
    else if (key == "close_marker_area") reinforcement.close_marker_area = d();
    else if (key == "movement_epsilon") reinforcement.movement_epsilon = d();
    else if (key == "obstacle_dist") sensors.obstacle_dist = d();
    else if (key == "low_average") sensors.low_average = d();
    else if (key == "rear_blocked") sensors.rear_blocked = d();
    else if (key == "laser_max") sensors.laser_max = d();
    else if (key == "blob_constant") sensors.blob_constant = d();
    else if (key == "goal_area") sensors.goal_area = d();
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }

  World load_world() const {
    if (world_path.empty()) return make_maze_world();
    return load_world_file(world_path);
  }

  ParatopeMatrix load_paratope() const {
    if (paratope_path.empty()) return init_paratope(paratope_seed);
    return ParatopeMatrix(load_matrix_file(paratope_path));
  }

  // full resolved configuration, embedded in every output for provenance
  nlohmann::json to_json() const {
    return {
        {"system", to_string(mode)},
        {"strategy", to_string(reinforcement.strategy)},
        {"k1", params.k1},
        {"k2", params.k2},
        {"b", params.b},
        {"world", world_path.empty() ? "builtin:maze" : world_path},
        {"paratope", paratope_path.empty() ? "seed:" + std::to_string(paratope_seed)
                                           : paratope_path},
        {"seed", seed},
        {"timeout", timeout},
        {"phi", phi},
        {"jobs", jobs},
        {"scoring",
         {{"obstacle_gain", reinforcement.obstacle_gain},
          {"open_space_gain", reinforcement.open_space_gain},
          {"movement_gain", reinforcement.movement_gain},
          {"speed_gain", reinforcement.speed_gain},
          {"tracking_bonus", reinforcement.tracking_bonus},
          {"lost_marker_penalty", reinforcement.lost_marker_penalty},
          {"reverse_penalty", reinforcement.reverse_penalty},
          {"no_move_penalty", reinforcement.no_move_penalty},
          {"sector_change_attenuation", reinforcement.sector_change_attenuation},
          {"slow_threshold", reinforcement.slow_threshold},
          {"close_marker_area", reinforcement.close_marker_area},
          {"movement_epsilon", reinforcement.movement_epsilon}}},
        {"thresholds",
         {{"obstacle_dist", sensors.obstacle_dist},
          {"low_average", sensors.low_average},
          {"rear_blocked", sensors.rear_blocked},
          {"laser_max", sensors.laser_max},
          {"blob_constant", sensors.blob_constant},
          {"goal_area", sensors.goal_area}}},
    };
  }
};

}  // namespace idio

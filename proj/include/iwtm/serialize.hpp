#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iwtm/machine.hpp"

namespace iwtm {

inline const char* to_string(Weighting weighting) noexcept {
  return weighting == Weighting::None ? "none" : "integer";
}

inline Weighting weighting_from_string(const std::string& text) {
  if (text == "none") return Weighting::None;
  if (text == "integer") return Weighting::Integer;
  throw std::runtime_error("unknown weighting '" + text +
                           "' (expected 'none' or 'integer')");
}

inline const char* to_string(Polarity polarity) noexcept {
  return polarity == Polarity::Positive ? "positive" : "negative";
}

namespace detail {

inline const nlohmann::json& member(const nlohmann::json& node,
                                    const char* key, const char* where) {
  const auto it = node.find(key);
  if (it == node.end()) {
    throw std::runtime_error(std::string(where) + ": missing field '" + key +
                             "'");
  }
  return *it;
}

}  // namespace detail

// Versioned machine snapshot.  Everything that defines behaviour is
// stored as exact integers (plus the one real-valued parameter s), so a
// round trip reproduces the machine bit for bit.
inline nlohmann::json machine_to_json(const Machine& machine) {
  const MachineConfig& config = machine.config();
  nlohmann::json doc;
  doc["format"] = "iwtm-model";
  doc["version"] = 1;
  doc["config"] = {
      {"num_clauses", config.num_clauses},
      {"threshold", config.threshold},
      {"specificity", config.specificity},
      {"ta_half_states", config.ta_half_states},
      {"epochs", config.epochs},
      {"weighting", to_string(config.weighting)},
      {"seed", config.seed},
  };
  doc["num_features"] = machine.num_features();
  nlohmann::json clauses = nlohmann::json::array();
  for (std::size_t j = 0; j < machine.num_clauses(); ++j) {
    const Clause& clause = machine.clause(j);
    nlohmann::json entry;
    entry["polarity"] = to_string(clause.polarity());
    entry["weight"] = clause.weight();
    nlohmann::json states = nlohmann::json::array();
    for (std::size_t k = 0; k < clause.team_size(); ++k) {
      states.push_back(clause.ta_state(k));
    }
    entry["ta_states"] = std::move(states);
    clauses.push_back(std::move(entry));
  }
  doc["clauses"] = std::move(clauses);
  return doc;
}

inline Machine machine_from_json(const nlohmann::json& doc) {
  using detail::member;
  if (member(doc, "format", "model").get<std::string>() != "iwtm-model") {
    throw std::runtime_error("model: not an iwtm-model document");
  }
  if (member(doc, "version", "model").get<int>() != 1) {
    throw std::runtime_error("model: unsupported version " +
                             member(doc, "version", "model").dump());
  }
  const nlohmann::json& cfg = member(doc, "config", "model");
  MachineConfig config;
  config.num_clauses = member(cfg, "num_clauses", "model config").get<std::uint32_t>();
  config.threshold = member(cfg, "threshold", "model config").get<std::uint32_t>();
  config.specificity = member(cfg, "specificity", "model config").get<double>();
  config.ta_half_states =
      member(cfg, "ta_half_states", "model config").get<std::uint32_t>();
  config.epochs = member(cfg, "epochs", "model config").get<std::uint32_t>();
  config.weighting = weighting_from_string(
      member(cfg, "weighting", "model config").get<std::string>());
  config.seed = member(cfg, "seed", "model config").get<std::uint64_t>();

  const std::size_t num_features =
      member(doc, "num_features", "model").get<std::size_t>();
  const nlohmann::json& clauses = member(doc, "clauses", "model");
  if (!clauses.is_array()) {
    throw std::runtime_error("model: 'clauses' must be an array");
  }
  std::vector<ClauseSnapshot> parts;
  parts.reserve(clauses.size());
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    const nlohmann::json& entry = clauses[j];
    const std::string where = "model clause " + std::to_string(j);
    ClauseSnapshot part;
    part.weight = member(entry, "weight", where.c_str()).get<std::uint64_t>();
    const nlohmann::json& states = member(entry, "ta_states", where.c_str());
    if (!states.is_array()) {
      throw std::runtime_error(where + ": 'ta_states' must be an array");
    }
    part.ta_states.reserve(states.size());
    for (const auto& state : states) {
      part.ta_states.push_back(state.get<std::uint32_t>());
    }
    const std::string polarity =
        member(entry, "polarity", where.c_str()).get<std::string>();
    const Polarity expected = Machine::polarity_of(static_cast<std::uint32_t>(j));
    if (polarity != to_string(expected)) {
      throw std::runtime_error(where + ": polarity '" + polarity +
                               "' contradicts clause position");
    }
    parts.push_back(std::move(part));
  }
  return Machine::from_parts(config, num_features, parts);
}

inline void save_machine(const Machine& machine, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << machine_to_json(machine).dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("failed writing model to '" + path + "'");
  }
}

inline Machine load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& error) {
    throw std::runtime_error("model file '" + path + "': " + error.what());
  }
  return machine_from_json(doc);
}

}  // namespace iwtm

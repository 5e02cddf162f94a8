#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iwtm/machine.hpp"
#include "iwtm/serialize.hpp"

namespace iwtm {

// One clause viewed as a rule.  Dead rules (weight 0 under integer
// weighting) are kept in the set but skipped by default when rendering.
struct Rule {
  std::size_t clause = 0;  // 1-based, matching the rendered label
  int vote_class = 1;
  std::uint64_t weight = 1;
  bool active = true;
  bool empty = false;
  std::vector<std::string> literals;  // names, ascending literal index

  bool operator==(const Rule&) const = default;
};

struct RuleSet {
  MachineConfig config;
  std::size_t num_features = 0;
  std::vector<Rule> rules;

  bool operator==(const RuleSet&) const = default;
};

// Total included literals over the clauses that can influence inference:
// weight-0 clauses are skipped under integer weighting, and every clause
// counts when weighting is off (all weights are pinned at 1 then).
inline std::size_t count_literals(const Machine& machine) {
  std::size_t total = 0;
  for (std::size_t j = 0; j < machine.num_clauses(); ++j) {
    const Clause& clause = machine.clause(j);
    if (machine.config().weighting == Weighting::Integer &&
        clause.weight() == 0) {
      continue;
    }
    total += clause.included_count();
  }
  return total;
}

inline RuleSet extract_rules(const Machine& machine,
                             std::span<const std::string> literal_names) {
  if (literal_names.size() != 2 * machine.num_features()) {
    throw std::invalid_argument(
        "extract_rules: name table has " +
        std::to_string(literal_names.size()) + " entries, machine needs " +
        std::to_string(2 * machine.num_features()));
  }
  RuleSet rules;
  rules.config = machine.config();
  rules.num_features = machine.num_features();
  rules.rules.reserve(machine.num_clauses());
  for (std::size_t j = 0; j < machine.num_clauses(); ++j) {
    const Clause& clause = machine.clause(j);
    Rule rule;
    rule.clause = j + 1;
    rule.vote_class = clause.polarity() == Polarity::Positive ? 1 : 0;
    rule.weight = clause.weight();
    rule.active = machine.config().weighting != Weighting::Integer ||
                  clause.weight() > 0;
    std::vector<std::size_t> included = clause.included_literals();
    // Group by underlying feature bit so x_i and ¬x_i read side by side;
    // plain form first when both appear.
    const std::size_t o = machine.num_features();
    std::sort(included.begin(), included.end(),
              [o](std::size_t a, std::size_t b) {
                return std::pair{a % o, a / o} < std::pair{b % o, b / o};
              });
    rule.empty = included.empty();
    for (const std::size_t k : included) {
      rule.literals.push_back(literal_names[k]);
    }
    rules.rules.push_back(std::move(rule));
  }
  return rules;
}

inline std::string render_rule_body(const Rule& rule) {
  std::ostringstream out;
  out << rule.weight << " × [";
  if (rule.empty) {
    out << "always-true during learning; ignored at inference";
  } else {
    for (std::size_t i = 0; i < rule.literals.size(); ++i) {
      if (i > 0) out << " ∧ ";
      out << rule.literals[i];
    }
  }
  out << "] → vote class " << rule.vote_class;
  return out.str();
}

inline std::string render_rules_text(const RuleSet& rules,
                                     bool include_dead = false) {
  std::size_t active = 0;
  for (const Rule& rule : rules.rules) {
    if (rule.active) ++active;
  }
  std::ostringstream out;
  out << "# clauses: " << rules.rules.size() << " ("
      << to_string(rules.config.weighting) << " weighting), features: "
      << rules.num_features << ", active rules: " << active << "\n";
  for (const Rule& rule : rules.rules) {
    if (!rule.active && !include_dead) continue;
    out << "clause " << rule.clause << ": " << render_rule_body(rule) << "\n";
  }
  return out.str();
}

inline nlohmann::json rules_to_json(const RuleSet& rules,
                                    bool include_dead = false) {
  nlohmann::json doc;
  doc["format"] = "iwtm-rules";
  doc["version"] = 1;
  doc["config"] = {
      {"num_clauses", rules.config.num_clauses},
      {"threshold", rules.config.threshold},
      {"specificity", rules.config.specificity},
      {"ta_half_states", rules.config.ta_half_states},
      {"epochs", rules.config.epochs},
      {"weighting", to_string(rules.config.weighting)},
      {"seed", rules.config.seed},
  };
  doc["num_features"] = rules.num_features;
  nlohmann::json entries = nlohmann::json::array();
  for (const Rule& rule : rules.rules) {
    if (!rule.active && !include_dead) continue;
    nlohmann::json entry;
    entry["clause"] = rule.clause;
    entry["vote_class"] = rule.vote_class;
    entry["weight"] = rule.weight;
    entry["active"] = rule.active;
    entry["empty"] = rule.empty;
    entry["literals"] = rule.literals;
    entries.push_back(std::move(entry));
  }
  doc["rules"] = std::move(entries);
  return doc;
}

inline RuleSet rules_from_json(const nlohmann::json& doc) {
  const auto get = [](const nlohmann::json& node,
                      const char* key) -> const nlohmann::json& {
    const auto it = node.find(key);
    if (it == node.end()) {
      throw std::runtime_error(std::string("rules document: missing field '") +
                               key + "'");
    }
    return *it;
  };
  if (get(doc, "format").get<std::string>() != "iwtm-rules") {
    throw std::runtime_error("not an iwtm-rules document");
  }
  if (get(doc, "version").get<int>() != 1) {
    throw std::runtime_error("unsupported iwtm-rules version");
  }
  RuleSet rules;
  const nlohmann::json& cfg = get(doc, "config");
  rules.config.num_clauses = get(cfg, "num_clauses").get<std::uint32_t>();
  rules.config.threshold = get(cfg, "threshold").get<std::uint32_t>();
  rules.config.specificity = get(cfg, "specificity").get<double>();
  rules.config.ta_half_states = get(cfg, "ta_half_states").get<std::uint32_t>();
  rules.config.epochs = get(cfg, "epochs").get<std::uint32_t>();
  rules.config.weighting =
      weighting_from_string(get(cfg, "weighting").get<std::string>());
  rules.config.seed = get(cfg, "seed").get<std::uint64_t>();
  rules.num_features = get(doc, "num_features").get<std::size_t>();
  for (const nlohmann::json& entry : get(doc, "rules")) {
    Rule rule;
    rule.clause = get(entry, "clause").get<std::size_t>();
    rule.vote_class = get(entry, "vote_class").get<int>();
    rule.weight = get(entry, "weight").get<std::uint64_t>();
    rule.active = get(entry, "active").get<bool>();
    rule.empty = get(entry, "empty").get<bool>();
    rule.literals = get(entry, "literals").get<std::vector<std::string>>();
    rules.rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace iwtm

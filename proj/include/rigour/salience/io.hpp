#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/core/format.hpp"
#include "rigour/core/text.hpp"
#include "rigour/salience/search.hpp"

namespace rigour::salience {

inline std::string salience_csv(const std::vector<SalienceResult>& ranked, const CriteriaRegistry& registry) {
  std::string out = "bitmask,criteria_names,mode,tau,p_value\n";
  for (const auto& r : ranked) {
    out += std::to_string(r.set.bitmask()) + "," + fmt::csv_field(text::join(r.set.names(registry), "; ")) + "," +
           std::string(to_string(r.mode)) + "," + fmt::shortest(r.tau) + "," + fmt::shortest(r.p_value) + "\n";
  }
  return out;
}

/// Every evaluated set, for plotting the tau landscape.
inline std::string evaluated_csv(const std::vector<SetScore>& scores, const CriteriaRegistry& registry,
                                 ScoringMode mode) {
  std::string out = "bitmask,criteria_names,mode,tau,p_value\n";
  const auto hash = registry.hash();
  for (const auto& s : scores) {
    const CriteriaSet set(s.bitmask, registry.size(), hash);
    out += std::to_string(s.bitmask) + "," + fmt::csv_field(text::join(set.names(registry), "; ")) + "," +
           std::string(to_string(mode)) + "," + (s.defined ? fmt::shortest(s.tau) : "NA") + "," +
           (s.defined ? fmt::shortest(s.p_value) : "NA") + "\n";
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const ClassSummary& s) {
  nlohmann::ordered_json j;
  j["n_four_star"] = s.n_four;
  j["n_non_four_star"] = s.n_non;
  j["mean_four_star"] = s.mean_four;
  j["mean_non_four_star"] = s.mean_non;
  j["sd_four_star"] = s.sd_four;
  j["sd_non_four_star"] = s.sd_non;
  j["median_four_star"] = s.median_four;
  j["median_non_four_star"] = s.median_non;
  j["raw_gap"] = s.raw_gap;
  j["gap"] = s.gap;
  return j;
}

/// Chosen set plus one similarity per document tagged with id and label.
inline nlohmann::ordered_json best_set_json(const SalienceResult& best, const CriteriaRegistry& registry,
                                            const std::vector<std::string>& ids,
                                            const std::vector<RigourLabel>& labels) {
  if (ids.size() != best.similarities.size() || labels.size() != ids.size()) {
    throw std::invalid_argument("ids, labels and similarities differ in length");
  }
  nlohmann::ordered_json j;
  j["bitmask"] = best.set.bitmask();
  j["criteria"] = best.set.names(registry);
  j["registry_hash"] = best.set.registry_hash();
  j["mode"] = std::string(to_string(best.mode));
  j["tau"] = best.tau;
  j["p_value"] = best.p_value;
  j["summary"] = summary_json(summarize_by_class(labels, best.similarities));
  j["documents"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    nlohmann::ordered_json d;
    d["id"] = ids[i];
    d["label"] = std::string(to_string(labels[i]));
    d["similarity"] = best.similarities[i];
    j["documents"].push_back(std::move(d));
  }
  return j;
}

/// Criterion names of a best-set JSON.
inline std::vector<std::string> best_set_criteria(const nlohmann::json& j) {
  if (!j.contains("criteria") || !j["criteria"].is_array()) throw SchemaError("best-set JSON needs \"criteria\"");
  return j["criteria"].get<std::vector<std::string>>();
}

}  // namespace rigour::salience

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rigour/core/digest.hpp"
#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"

namespace rigour::criteria {

enum class CriterionSource { Generated, Manual };

inline std::string_view to_string(CriterionSource s) { return s == CriterionSource::Manual ? "manual" : "generated"; }

inline CriterionSource parse_source(std::string_view s) {
  if (s == "generated") return CriterionSource::Generated;
  if (s == "manual") return CriterionSource::Manual;
  throw SchemaError("unknown criterion source: " + std::string(s));
}

struct ProviderMeta {
  std::string model;
  std::optional<std::string> timestamp;
  bool operator==(const ProviderMeta&) const = default;
};

struct Criterion {
  std::string name;
  std::string definition;
  CriterionSource source = CriterionSource::Generated;
  std::optional<ProviderMeta> provider_meta;
  bool operator==(const Criterion&) const = default;
};

/// Ordered criteria with unique names. Position i is bit i of every
/// criteria-set mask built against this registry.
class CriteriaRegistry {
 public:
  CriteriaRegistry() = default;
  explicit CriteriaRegistry(std::vector<Criterion> criteria) : criteria_(std::move(criteria)) {
    for (std::size_t i = 0; i < criteria_.size(); ++i) {
      const auto& c = criteria_[i];
      if (c.name.empty()) throw SchemaError("criterion name is empty");
      if (c.definition.empty()) throw SchemaError("criterion " + c.name + " has an empty definition");
      if (c.source == CriterionSource::Generated && !c.definition.starts_with("Refers to")) {
        throw SchemaError("generated definition of " + c.name + " does not begin with \"Refers to\"");
      }
      if (!index_.emplace(c.name, i).second) throw SchemaError("duplicate criterion name: " + c.name);
    }
  }

  const std::vector<Criterion>& criteria() const noexcept { return criteria_; }
  std::size_t size() const noexcept { return criteria_.size(); }
  bool empty() const noexcept { return criteria_.empty(); }
  const Criterion& operator[](std::size_t i) const { return criteria_.at(i); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : criteria_) out.push_back(c.name);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Binds masks to this exact ordering of names and definitions.
  std::string hash() const {
    digest::Sha256 h;
    h.field(std::to_string(criteria_.size()));
    for (const auto& c : criteria_) h.field(c.name).field(c.definition);
    return h.hex();
  }

  /// Registry restricted to the named criteria, kept in this registry's order.
  CriteriaRegistry subset(const std::vector<std::string>& names) const {
    std::vector<bool> keep(criteria_.size(), false);
    for (const auto& n : names) {
      auto i = index_of(n);
      if (!i) throw SchemaError("unknown criterion: " + n);
      keep[*i] = true;
    }
    std::vector<Criterion> out;
    for (std::size_t i = 0; i < criteria_.size(); ++i) {
      if (keep[i]) out.push_back(criteria_[i]);
    }
    return CriteriaRegistry(std::move(out));
  }

  bool operator==(const CriteriaRegistry& o) const { return criteria_ == o.criteria_; }

 private:
  std::vector<Criterion> criteria_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline nlohmann::ordered_json to_json(const CriteriaRegistry& registry) {
  nlohmann::ordered_json j;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : registry.criteria()) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["definition"] = c.definition;
    e["source"] = std::string(to_string(c.source));
    if (c.provider_meta) {
      e["provider_meta"]["model"] = c.provider_meta->model;
      if (c.provider_meta->timestamp) e["provider_meta"]["timestamp"] = *c.provider_meta->timestamp;
    }
    j["criteria"].push_back(std::move(e));
  }
  return j;
}

inline CriteriaRegistry registry_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("criteria") || !j["criteria"].is_array()) {
    throw SchemaError("registry must be an object with a \"criteria\" array");
  }
  std::vector<Criterion> out;
  for (const auto& e : j["criteria"]) {
    if (!e.is_object()) throw SchemaError("criterion entry must be an object");
    for (const char* key : {"name", "definition"}) {
      if (!e.contains(key) || !e[key].is_string()) throw SchemaError(std::string("criterion needs string \"") + key + "\"");
    }
    Criterion c;
    c.name = e["name"].get<std::string>();
    c.definition = e["definition"].get<std::string>();
    if (e.contains("source")) {
      if (!e["source"].is_string()) throw SchemaError("criterion source must be a string");
      c.source = parse_source(e["source"].get<std::string>());
    }
    if (e.contains("provider_meta")) {
      const auto& m = e["provider_meta"];
      if (!m.is_object() || !m.contains("model") || !m["model"].is_string()) {
        throw SchemaError("provider_meta needs a string \"model\"");
      }
      ProviderMeta meta{m["model"].get<std::string>(), std::nullopt};
      if (m.contains("timestamp")) meta.timestamp = m["timestamp"].get<std::string>();
      c.provider_meta = std::move(meta);
    }
    out.push_back(std::move(c));
  }
  return CriteriaRegistry(std::move(out));
}

inline CriteriaRegistry parse_registry(std::string_view content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("registry is not valid JSON: ") + e.what());
  }
  return registry_from_json(j);
}

inline CriteriaRegistry load_registry(const std::filesystem::path& path) { return parse_registry(files::read(path)); }

inline void save_registry(const CriteriaRegistry& registry, const std::filesystem::path& path) {
  files::write(path, to_json(registry).dump(2) + "\n");
}

/// The sixteen criteria in their canonical order.
inline const CriteriaRegistry& default_registry() {
  static const CriteriaRegistry registry(std::vector<Criterion>{
      {"Biases",
       "Refers to systematic errors or distortions in the collection, analysis, or interpretation of data that can lead to skewed or inaccurate results. Uncertainties refer to the lack of precision or confidence in measurements, predictions, or conclusions due to limitations in data or knowledge.",
       CriterionSource::Generated, std::nullopt},
      {"Settings",
       "Refers to adjustable parameters or configurations that define the behavior or performance of a system or model. They are typically set before the learning or optimization process and impact the final outcome.",
       CriterionSource::Generated, std::nullopt},
      {"Constraints",
       "Refers to restrictions or bottlenecks imposed on a system, software application, algorithm, or problem-solving process. Constraints define the boundaries within which a solution or system must operate, and they help guide the design, implementation, and behaviour of computer systems.",
       CriterionSource::Generated, std::nullopt},
      {"Limitations",
       "Refers to the inherent shortcomings that exist within a system, technology, algorithm, or problem-solving approach. Limitations define the boundaries of what a system or solution can achieve or the constraints that restrict its performance, functionality, or applicability.",
       CriterionSource::Manual, std::nullopt},
      {"Baselines",
       "Refers to reference points or initial measurements that serve as a starting point for comparison or evaluation. Baselines provide a foundation for assessing the performance, effectiveness, or efficiency of systems, algorithms, models, or solutions.",
       CriterionSource::Generated, std::nullopt},
      {"Benchmarks",
       "Refers to standardised tests, metrics, or reference points used to measure and evaluate the performance, efficiency, or capability of computer systems, software applications, algorithms, or hardware components. Benchmarks provide a basis for comparing different systems or solutions and assessing their relative strengths and weaknesses.",
       CriterionSource::Generated, std::nullopt},
      {"Empirical Findings",
       "Refers to observations, data, or evidence obtained through direct observations, experiments, or measurements in the real world. They are based on empirical evidence rather than theoretical or speculative reasoning.",
       CriterionSource::Generated, std::nullopt},
      {"Examples",
       "Refers to specific instances or data points that are used to illustrate or demonstrate a concept, principle, or the behavior of an algorithm or model. These examples serve to showcase the application of a technique or highlight particular characteristics, allowing for a clearer understanding and communication of the ideas involved.",
       CriterionSource::Generated, std::nullopt},
      {"Motivations",
       "Refers to the reasons, goals, or driving factors behind a particular study, project, or research endeavor. A gap refers to a missing or unaddressed aspect or area within existing knowledge or literature, which motivates further investigation or research.",
       CriterionSource::Generated, std::nullopt},
      {"Generalisation",
       "Refers to the process of extracting common patterns, concepts, or properties from specific instances or examples and formulating more abstract or generalised representations or models. Generalisations help capture the essential characteristics or behaviours shared by a set of objects, data, or systems, enabling more efficient and flexible problem-solving, analysis, or design.",
       CriterionSource::Generated, std::nullopt},
      {"Robustness",
       "Refers to the ability of a system, software application, algorithm, or network to effectively handle and recover from abnormal or unexpected conditions, inputs, or events. A robust system is designed to withstand errors, exceptions, invalid inputs, or challenging operating conditions and continue functioning correctly or gracefully degrade without catastrophic failures.",
       CriterionSource::Generated, std::nullopt},
      {"Assumptions",
       "Refers to the statements or conditions that are considered to be true or valid for the purpose of designing, developing, or analysing systems, algorithms, models, or solutions. Assumptions simplify problem-solving processes by providing a set of predefined conditions or constraints under which a particular approach or solution is expected to work correctly.",
       CriterionSource::Generated, std::nullopt},
      {"Justifications",
       "Refers to present reasons, evidence, or logical justifications in support of a particular claim, position, or viewpoint. It involves making a persuasive case or engaging in a reasoned debate.",
       CriterionSource::Manual, std::nullopt},
      {"Challenges",
       "Refers to difficulties, obstacles, or problems that need to be addressed or overcome in a particular context or task. They may arise due to technical, theoretical, practical, or ethical factors.",
       CriterionSource::Generated, std::nullopt},
      {"Contributions",
       "Refers to the original ideas, innovations, or advancements made by individuals or groups in the field. Contributions can take various forms and impact different aspects of computer science, including research, technology development, software engineering, algorithms, systems design, or theoretical advancements.",
       CriterionSource::Generated, std::nullopt},
      {"Reproducibility",
       "Refers to the ability to reliably recreate the same results or outputs from a given model or experiment, given the same input data and configuration settings, by providing the complete source code and using openly available tools and datasets.",
       CriterionSource::Manual, std::nullopt},
  });
  return registry;
}

}  // namespace rigour::criteria

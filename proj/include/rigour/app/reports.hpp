#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/app/manifest.hpp"
#include "rigour/app/stages.hpp"
#include "rigour/core/format.hpp"
#include "rigour/salience/io.hpp"

namespace rigour::app {

inline constexpr std::string_view kIncluded = "✓";
inline constexpr std::string_view kExcluded = "–";

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.generic_string());
  auto rows = fmt::parse_csv(files::read(p));
  if (rows.empty()) throw SchemaError("empty CSV: " + p.generic_string());
  return rows;
}

inline std::string markdown_table(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += "|";
    for (const auto& cell : rows[r]) out += " " + cell + " |";
    out += "\n";
    if (r == 0) {
      out += "|";
      for (std::size_t c = 0; c < rows[r].size(); ++c) out += " --- |";
      out += "\n";
    }
  }
  return out;
}

inline std::string write_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + fmt::csv_field(row[c]);
    out += "\n";
  }
  return out;
}

/// Keyword coefficients per class with rank, for bar charts.
inline std::string keyword_chart(const fs::path& keywords) {
  const auto rows = read_csv_file(keywords);
  std::vector<std::vector<std::string>> out = {{"class", "rank", "token", "coefficient", "mi_score"}};
  std::map<std::string, std::size_t> rank;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 4) throw MalformedRecord(r + 1, "expected 4 fields in keywords CSV");
    out.push_back({row[3], std::to_string(++rank[row[3]]), row[0], row[2], row[1]});
  }
  return write_csv(out);
}

/// One row per ranked set, one column per criterion.
inline std::vector<std::vector<std::string>> membership_rows(const fs::path& salience_csv,
                                                             const std::vector<std::string>& criteria) {
  const auto rows = read_csv_file(salience_csv);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> header = {"rank"};
  header.insert(header.end(), criteria.begin(), criteria.end());
  header.push_back("tau");
  header.push_back("p_value");
  out.push_back(std::move(header));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) throw MalformedRecord(r + 1, "expected 5 fields in salience CSV");
    std::set<std::string> members;
    std::string_view rest = row[1];
    while (!rest.empty()) {
      const auto cut = rest.find("; ");
      members.emplace(rest.substr(0, cut));
      rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 2);
    }
    std::vector<std::string> line = {std::to_string(r)};
    for (const auto& c : criteria) line.emplace_back(members.contains(c) ? kIncluded : kExcluded);
    line.push_back(fmt::fixed(std::stod(row[3]), 3));
    line.push_back(row[4]);
    out.push_back(std::move(line));
  }
  return out;
}

struct Distribution {
  std::vector<std::string> ids;
  std::vector<RigourLabel> labels;
  std::vector<double> similarities;
};

inline Distribution read_best_set(const fs::path& best_set) {
  if (!fs::is_regular_file(best_set)) throw MissingStageOutput(best_set.generic_string());
  const auto j = nlohmann::json::parse(files::read(best_set));
  Distribution d;
  try {
    for (const auto& doc : j.at("documents")) {
      const auto label = parse_label(doc.at("label").get<std::string>());
      if (!label) throw SchemaError("unknown label in best-set report");
      d.ids.push_back(doc.at("id").get<std::string>());
      d.labels.push_back(*label);
      d.similarities.push_back(doc.at("similarity").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed best-set report: ") + e.what());
  }
  return d;
}

/// Equal-width histogram per class over the pooled similarity range.
inline nlohmann::ordered_json histogram(const Distribution& d, std::size_t bins) {
  const auto [lo_it, hi_it] = std::minmax_element(d.similarities.begin(), d.similarities.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  std::vector<std::size_t> four(bins, 0), non(bins, 0);
  for (std::size_t i = 0; i < d.similarities.size(); ++i) {
    auto b = static_cast<std::size_t>((d.similarities[i] - lo) / width);
    b = std::min(b, bins - 1);
    (d.labels[i] == RigourLabel::FourStar ? four : non)[b] += 1;
  }
  nlohmann::ordered_json j;
  std::vector<double> edges;
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(lo + width * static_cast<double>(b));
  j["edges"] = edges;
  j["four_star"] = four;
  j["non_four_star"] = non;
  return j;
}

inline std::string certainty_grid(const Layout& l) {
  std::string out = "# Certainty differences (4* minus non-4*, x100)\n";
  for (auto [title, path] : {std::pair{"Certain", l.certainty_certain}, std::pair{"Uncertain", l.certainty_uncertain}}) {
    out += "\n## " + std::string(title) + "\n\n" + markdown_table(read_csv_file(path));
  }
  out += "\n## Sentence counts\n\n" + markdown_table(read_csv_file(l.certainty_counts));
  return out;
}

}  // namespace detail

/// Writes the report files for every completed stage recorded in the
/// manifest and returns their paths.
inline std::vector<fs::path> emit_reports(const RunManifest& manifest, const Layout& l) {
  std::vector<fs::path> written;
  fs::remove_all(l.reports);
  auto emit = [&](const std::string& name, const std::string& content) {
    const auto p = l.reports / name;
    files::write(p, content);
    written.push_back(p);
  };
  std::string summary = "# Run summary\n";

  if (manifest.completed("keywords")) {
    emit("keyword_chart.csv", detail::keyword_chart(l.keywords));
    if (fs::is_regular_file(l.classifier)) {
      const auto c = nlohmann::json::parse(files::read(l.classifier));
      summary += "\n## Classifier\n\n";
      summary += "- evaluated on: " + c.value("evaluation", std::string("?")) + " (" +
                 std::to_string(c.value("evaluation_documents", 0)) + " documents)\n";
      summary += "- accuracy: " + fmt::fixed(c.value("accuracy", 0.0), 3) + "\n";
      summary += "- F1: " + (c["f1"].is_number() ? fmt::fixed(c["f1"].get<double>(), 3) : std::string("NA")) + "\n";
    }
  }

  if (manifest.completed("salience")) {
    std::vector<std::string> criteria;
    if (manifest.config.contains("salience")) criteria = manifest.config["salience"].value("criteria", criteria);
    if (criteria.empty()) criteria = read_registry(l.registry).names();
    const auto rows = detail::membership_rows(l.salience, criteria);
    emit("membership.csv", detail::write_csv(rows));
    emit("membership.md", detail::markdown_table(rows));

    const auto d = detail::read_best_set(l.best_set);
    std::vector<std::vector<std::string>> dist = {{"id", "label", "similarity"}};
    for (std::size_t i = 0; i < d.ids.size(); ++i) {
      dist.push_back({d.ids[i], std::string(to_string(d.labels[i])), fmt::shortest(d.similarities[i])});
    }
    emit("distribution.csv", detail::write_csv(dist));
    nlohmann::ordered_json ds = salience::summary_json(salience::summarize_by_class(d.labels, d.similarities));
    ds["histogram"] = detail::histogram(d, 20);
    emit("distribution_summary.json", ds.dump(2) + "\n");

    const auto best = nlohmann::json::parse(files::read(l.best_set));
    summary += "\n## Most salient criteria set\n\n";
    summary += "- criteria: " + text::join(salience::best_set_criteria(best), ", ") + "\n";
    summary += "- mode: " + best.value("mode", std::string("?")) + "\n";
    summary += "- tau: " + fmt::fixed(best.value("tau", 0.0), 4) + "\n";
    summary += "- p-value: " + fmt::shortest(best.value("p_value", 1.0)) + "\n";
    summary += "- standardized gap: " + fmt::fixed(ds["gap"].get<double>(), 3) + "\n";
  }

  if (manifest.completed("certainty")) {
    emit("certainty_grid.md", detail::certainty_grid(l));
  }

  if (written.empty()) throw MissingStageOutput("no completed stage with reportable outputs");
  emit("summary.md", summary);
  return written;
}

}  // namespace rigour::app

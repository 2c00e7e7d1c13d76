#pragma once

// Serializers: similarity tables and cluster results as CSV/JSON, map join
// files, dendrogram JSON, wide pyramid tables, and SVG pyramid charts.
// Distances print with 3 decimals and pyramid shares with 2; JSON keeps full
// precision. All output is deterministic.

#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "agecoda/analysis.hpp"
#include "agecoda/clustering.hpp"
#include "agecoda/demographics.hpp"

namespace agecoda::report {

inline std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

// -- epitome tables ----------------------------------------------------------

inline void write_epitome_csv(std::ostream& out, const analysis::EpitomeTable& table) {
  csvio::write_row(out, std::vector<std::string>{"rank", "entity", "kind", "distance",
                                                 "beyond_threshold"});
  for (const auto& entry : table.entries) {
    csvio::write_row(out, std::vector<std::string>{
                              std::to_string(entry.rank), entry.name,
                              std::string(demog::to_string(entry.kind)),
                              fixed(entry.distance, 3),
                              entry.beyond_threshold ? "true" : "false"});
  }
}

inline nlohmann::json epitome_json(const analysis::EpitomeTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& entry : table.entries) {
    nlohmann::json e{{"rank", entry.rank},
                     {"id", entry.entity_id},
                     {"entity", entry.name},
                     {"kind", demog::to_string(entry.kind)},
                     {"distance", entry.distance},
                     {"beyond_threshold", entry.beyond_threshold}};
    if (!entry.iso3.empty()) e["iso3"] = entry.iso3;
    entries.push_back(std::move(e));
  }
  return nlohmann::json{{"world_year", table.world_year},
                        {"reference_year", table.reference_year},
                        {"section", demog::to_string(table.section)},
                        {"threshold", table.threshold},
                        {"entries", std::move(entries)}};
}

// -- map join files ----------------------------------------------------------

inline void write_map_csv(std::ostream& out, const std::map<std::string, double>& values) {
  csvio::write_row(out, std::vector<std::string>{"iso3", "distance"});
  for (const auto& [iso3, distance] : values) {
    csvio::write_row(out, std::vector<std::string>{iso3, fixed(distance, 3)});
  }
}

/// GeoJSON-properties fragment: an object keyed by ISO3, ready to be merged
/// into feature properties by a downstream join.
inline nlohmann::json map_geojson_properties(const std::map<std::string, double>& values,
                                             int world_year) {
  nlohmann::json by_iso3 = nlohmann::json::object();
  for (const auto& [iso3, distance] : values) {
    by_iso3[iso3] = nlohmann::json{{"aitchison_distance", distance},
                                   {"world_year", world_year}};
  }
  return by_iso3;
}

// -- clustering --------------------------------------------------------------

inline void write_assignment_csv(std::ostream& out, const cluster::ClusterAssignment& assignment,
                                 const demog::Dataset& dataset) {
  struct Row {
    int cluster;
    std::string name;
    std::string iso3;
    int id;
  };
  std::vector<Row> rows;
  rows.reserve(assignment.cluster_of.size());
  for (const auto& [id, label] : assignment.cluster_of) {
    const demog::Entity* entity = dataset.entity_by_id(id);
    rows.push_back({label, entity ? entity->name : std::to_string(id),
                    entity ? entity->iso3 : std::string(), id});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.cluster != b.cluster) return a.cluster < b.cluster;
    if (a.name != b.name) return a.name < b.name;
    return a.id < b.id;
  });
  csvio::write_row(out, std::vector<std::string>{"entity", "iso3", "cluster"});
  for (const Row& row : rows) {
    csvio::write_row(out, std::vector<std::string>{row.name, row.iso3,
                                                   std::to_string(row.cluster)});
  }
}

/// Wide pyramid table, fixture-compatible: one column per pyramid, age rows
/// descending from 100+, two decimals, zero-padded bounds in the class
/// labels. parse_fixture_table reads this format back.
inline void write_pyramid_table_csv(std::ostream& out, std::span<const Composition> pyramids,
                                    std::span<const std::string> labels) {
  std::vector<std::string> header{"Class"};
  header.insert(header.end(), labels.begin(), labels.end());
  csvio::write_row(out, header);
  for (std::size_t bin = demog::kAgeBinCount; bin-- > 0;) {
    std::vector<std::string> row;
    if (bin == 20) {
      row.push_back("100+");
    } else {
      char label[16];
      std::snprintf(label, sizeof(label), "%02zu-%02zu", bin * 5, bin * 5 + 4);
      row.push_back(label);
    }
    for (const Composition& p : pyramids) {
      row.push_back(fixed(p.reclosed(100.0)[bin], 2));
    }
    csvio::write_row(out, row);
  }
}

/// Raw labeled pyramids in the same wide format, zeros preserved. Parsing a
/// bundled fixture and writing it back reproduces the file byte for byte.
inline void write_fixture_csv(std::ostream& out,
                              std::span<const demog::LabeledPyramid> pyramids) {
  std::vector<std::string> header{"Class"};
  for (const auto& labeled : pyramids) header.push_back(labeled.label);
  csvio::write_row(out, header);
  for (std::size_t bin = demog::kAgeBinCount; bin-- > 0;) {
    std::vector<std::string> row;
    if (bin == 20) {
      row.push_back("100+");
    } else {
      char label[16];
      std::snprintf(label, sizeof(label), "%02zu-%02zu", bin * 5, bin * 5 + 4);
      row.push_back(label);
    }
    for (const auto& labeled : pyramids) {
      row.push_back(fixed(labeled.pyramid.values[bin], 2));
    }
    csvio::write_row(out, row);
  }
}

inline void write_centroid_csv(std::ostream& out, std::span<const Composition> centroids) {
  std::vector<std::string> labels;
  labels.reserve(centroids.size());
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    labels.push_back("Cluster " + std::to_string(i + 1));
  }
  write_pyramid_table_csv(out, centroids, labels);
}

namespace detail {

inline nlohmann::json dendrogram_node(const cluster::Dendrogram& dendrogram, int id,
                                      const demog::Dataset* dataset) {
  const int n = static_cast<int>(dendrogram.leaf_labels.size());
  if (id < n) {
    const int entity_id = dendrogram.leaf_labels[id];
    nlohmann::json leaf{{"id", entity_id}, {"size", 1}};
    if (dataset != nullptr) {
      if (const demog::Entity* entity = dataset->entity_by_id(entity_id)) {
        leaf["name"] = entity->name;
      }
    }
    return leaf;
  }
  const cluster::Merge& merge = dendrogram.merges[id - n];
  return nlohmann::json{{"height", merge.height},
                        {"size", merge.size},
                        {"children", nlohmann::json::array(
                                         {dendrogram_node(dendrogram, merge.left, dataset),
                                          dendrogram_node(dendrogram, merge.right, dataset)})}};
}

}  // namespace detail

/// Nested dendrogram structure rooted at the final merge.
inline nlohmann::json dendrogram_json(const cluster::Dendrogram& dendrogram,
                                      const demog::Dataset* dataset = nullptr) {
  const int root = static_cast<int>(dendrogram.leaf_labels.size() +
                                    dendrogram.merges.size() - 1);
  return detail::dendrogram_node(dendrogram, root, dataset);
}

// -- trajectories ------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& out,
                                 std::span<const analysis::TrajectoryPoint> points) {
  csvio::write_row(out, std::vector<std::string>{"entity", "world_year", "distance"});
  for (const auto& point : points) {
    csvio::write_row(out, std::vector<std::string>{point.name, std::to_string(point.world_year),
                                                   fixed(point.distance, 3)});
  }
}

// -- SVG pyramid -------------------------------------------------------------

/// Horizontal mirrored bar chart of a percent pyramid: 21 bar pairs, oldest
/// bin on top, each side drawn at half the bin share (the data is
/// both-sexes; the mirroring is visual convention only). Bars carry the full
/// share as a two-decimal percent label.
inline void write_pyramid_svg(std::ostream& out, std::span<const double> shares,
                              const std::string& title) {
  constexpr double kRowHeight = 20.0;
  constexpr double kHalfWidth = 300.0;
  constexpr double kCenterX = 60.0 + kHalfWidth;  // label gutter + left half
  constexpr double kTop = 50.0;
  const double height = kTop + demog::kAgeBinCount * kRowHeight + 40.0;
  const double width = kCenterX + kHalfWidth + 80.0;

  double max_share = 0.0;
  for (double s : shares) max_share = std::max(max_share, s);
  if (max_share <= 0.0) max_share = 1.0;
  const double scale = kHalfWidth / max_share;  // pixels per percentage point (full bar)

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0)
      << "\" height=\"" << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0) << " "
      << fixed(height, 0) << "\">\n";
  out << "  <title>" << title << "</title>\n";
  out << "  <text x=\"" << fixed(kCenterX, 1)
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  for (std::size_t bin = 0; bin < demog::kAgeBinCount; ++bin) {
    // oldest at the top
    const std::size_t row = demog::kAgeBinCount - 1 - bin;
    const double y = kTop + row * kRowHeight;
    const double share = shares[bin];
    const double half = share / 2.0 * scale;
    out << "  <g class=\"bin\" data-age=\"" << demog::age_bin_labels()[bin]
        << "\" data-share=\"" << fixed(share, 2) << "\">\n";
    out << "    <rect x=\"" << fixed(kCenterX - half, 2) << "\" y=\"" << fixed(y + 2, 1)
        << "\" width=\"" << fixed(half, 2) << "\" height=\"" << fixed(kRowHeight - 4, 1)
        << "\" fill=\"#4878a8\"/>\n";
    out << "    <rect x=\"" << fixed(kCenterX, 2) << "\" y=\"" << fixed(y + 2, 1)
        << "\" width=\"" << fixed(half, 2) << "\" height=\"" << fixed(kRowHeight - 4, 1)
        << "\" fill=\"#a85048\"/>\n";
    out << "    <text x=\"8\" y=\"" << fixed(y + kRowHeight - 6, 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << demog::age_bin_labels()[bin]
        << "</text>\n";
    out << "    <text x=\"" << fixed(kCenterX + half + 6, 2) << "\" y=\""
        << fixed(y + kRowHeight - 6, 1) << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << fixed(share, 2) << "%</text>\n";
    out << "  </g>\n";
  }

  // percent axis under the bars, marking the widest bin on both sides
  const double axis_y = kTop + demog::kAgeBinCount * kRowHeight + 16.0;
  out << "  <line x1=\"" << fixed(kCenterX - kHalfWidth, 1) << "\" y1=\"" << fixed(axis_y - 12, 1)
      << "\" x2=\"" << fixed(kCenterX + kHalfWidth, 1) << "\" y2=\"" << fixed(axis_y - 12, 1)
      << "\" stroke=\"#444\"/>\n";
  for (const double tick : {-max_share, 0.0, max_share}) {
    const double x = kCenterX + (tick / max_share) * kHalfWidth;
    out << "  <text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(axis_y, 1)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << fixed(std::abs(tick) / 2.0, 1) << "%</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace agecoda::report

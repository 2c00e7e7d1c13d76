#pragma once

// Command implementations behind the agecoda CLI. Each returns a process
// exit code: 0 success, 1 data error, 2 usage/config error. Diagnostics go
// to the stream the caller provides; results go to files under out_dir.

#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agecoda/analysis.hpp"
#include "agecoda/clustering.hpp"
#include "agecoda/demographics.hpp"
#include "agecoda/report.hpp"

namespace agecoda::cli {

struct RunConfig {
  std::vector<std::string> inputs;    // long-format CSV paths
  bool fixtures_only = false;         // use the bundled wide-format table
  std::string data_dir = ".";         // where fixtures/ and data/ live
  std::string variant = "Medium";
  int reference_year = 2015;
  std::vector<int> world_years = {1990, 2000, 2010, 2015, 2020, 2030,
                                  2040, 2050, 2060, 2070, 2080};
  double threshold = 1.0;
  double delta = analysis::kAutoDelta;
  double min_population = 90000.0;
  std::size_t clusters = 7;
  cluster::CentroidMode centroid_mode = cluster::CentroidMode::Geometric;
  bool include_aggregates = false;    // cluster aggregates alongside countries
  std::vector<std::string> formats;   // empty = every format the command knows
  std::string out_dir = "out";

  void validate() const {
    if (!(threshold > 0.0)) throw ConfigError("--threshold must be positive");
    if (!std::isnan(delta) && !(delta > 0.0)) {
      throw ConfigError("--delta must be positive or 'auto'");
    }
    if (clusters < 1) throw ConfigError("--clusters must be at least 1");
    if (world_years.empty()) throw ConfigError("--world-years must not be empty");
    if (inputs.empty() && !fixtures_only) {
      throw ConfigError("no input: pass --input FILE or --fixtures-only");
    }
    static const std::set<std::string> known{"csv", "json", "geojson-join", "svg"};
    for (const std::string& f : formats) {
      if (!known.contains(f)) throw ConfigError("unknown format '" + f + "'");
    }
  }

  analysis::Options analysis_options() const {
    analysis::Options options;
    options.reference_year = reference_year;
    options.variant = variant;
    options.threshold = threshold;
    options.delta = delta;
    return options;
  }

  bool wants(const std::string& format) const {
    return formats.empty() ||
           std::find(formats.begin(), formats.end(), format) != formats.end();
  }
};

namespace detail {

inline std::filesystem::path data_path(const RunConfig& config, const std::string& relative) {
  return std::filesystem::path(config.data_dir) / relative;
}

inline demog::M49Table load_m49(const RunConfig& config, std::ostream& diag) {
  demog::M49Table table;
  const auto path = data_path(config, "data/m49_to_iso3.csv");
  std::ifstream in(path);
  if (!in) {
    diag << "note: " << path.string() << " not found; ISO3 codes will be missing\n";
    return table;
  }
  table.load(in);
  return table;
}

inline void annotate_iso3(demog::Dataset& dataset, const demog::M49Table& m49) {
  for (demog::Entity& entity : dataset.entities) {
    if (entity.kind != demog::EntityKind::Country || !entity.iso3.empty()) continue;
    if (auto iso = m49.iso3(entity.id)) entity.iso3 = *iso;
  }
}

inline std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file " + path.string());
  return out;
}

inline void report_rejects(const demog::Dataset& dataset, std::ostream& diag) {
  for (const auto& reject : dataset.rejected) {
    diag << "note: rejected row " << reject.row << ": " << reject.reason << "\n";
  }
}

inline void report_zero_bins(const demog::Dataset& dataset, std::ostream& diag) {
  for (const auto& [key, pyramid] : dataset.series.all()) {
    const std::size_t zeros = demog::zero_bin_count(pyramid);
    if (zeros > 0) {
      diag << "note: entity " << key.entity_id << " year " << key.year << " has " << zeros
           << " zero age group(s); zero replacement applies\n";
    }
  }
}

}  // namespace detail

/// Loads and filters the configured dataset. Fixture mode reads the bundled
/// wide-format table; otherwise every --input file is ingested.
inline demog::Dataset load_dataset(const RunConfig& config, std::ostream& diag) {
  const demog::M49Table m49 = detail::load_m49(config, diag);
  demog::Dataset dataset;
  if (config.fixtures_only) {
    const auto path = detail::data_path(config, "fixtures/figure2.csv");
    std::ifstream in(path);
    if (!in) throw Error("cannot open fixture file " + path.string());
    dataset = demog::fixture_dataset(demog::parse_fixture_table(in), &m49);
  } else {
    demog::ColumnMap cm;
    cm.keep_variant = config.variant;
    for (const std::string& input : config.inputs) {
      std::ifstream in(input);
      if (!in) throw Error("cannot open input file " + input);
      demog::Dataset part = demog::parse_wpp_csv(in, cm);
      if (dataset.entities.empty() && dataset.series.size() == 0) {
        dataset = std::move(part);
      } else {
        for (auto& entity : part.entities) {
          if (dataset.entity_by_id(entity.id) == nullptr) {
            dataset.entities.push_back(std::move(entity));
          }
        }
        for (const auto& [key, pyramid] : part.series.all()) dataset.series.add(pyramid);
        for (auto& reject : part.rejected) dataset.rejected.push_back(std::move(reject));
      }
    }
  }
  detail::annotate_iso3(dataset, m49);
  detail::report_rejects(dataset, diag);
  detail::report_zero_bins(dataset, diag);
  dataset.entities =
      demog::filter_population_threshold(dataset.entities, dataset.series, config.min_population);
  return dataset;
}

namespace detail {

/// Sections that can actually be ranked: kinds (other than World) with at
/// least one entity holding a reference-year pyramid.
inline std::vector<demog::EntityKind> present_sections(const demog::Dataset& dataset,
                                                       const RunConfig& config) {
  std::vector<demog::EntityKind> sections;
  for (demog::EntityKind kind :
       {demog::EntityKind::Country, demog::EntityKind::GeographicRegion,
        demog::EntityKind::UnDevelopmentCategory, demog::EntityKind::IncomeCategory}) {
    for (const demog::Entity& entity : dataset.entities) {
      if (entity.kind != kind) continue;
      if (dataset.series.find_preferring(entity.id, config.reference_year, config.variant)) {
        sections.push_back(kind);
        break;
      }
    }
  }
  return sections;
}

inline std::string section_slug(demog::EntityKind kind) {
  switch (kind) {
    case demog::EntityKind::Country: return "countries";
    case demog::EntityKind::GeographicRegion: return "regions";
    case demog::EntityKind::UnDevelopmentCategory: return "un_categories";
    case demog::EntityKind::IncomeCategory: return "income_categories";
    case demog::EntityKind::World: return "world";
  }
  return "unknown";
}

inline const demog::Entity* resolve_entity(const demog::Dataset& dataset,
                                           const std::string& spec) {
  if (auto id = csvio::parse_int(spec)) return dataset.entity_by_id(static_cast<int>(*id));
  return dataset.entity_by_name(spec);
}

inline std::vector<demog::LabeledPyramid> load_fixture_file(const RunConfig& config,
                                                            const std::string& relative) {
  const auto path = data_path(config, relative);
  std::ifstream in(path);
  if (!in) throw Error("cannot open fixture file " + path.string());
  return demog::parse_fixture_table(in);
}

}  // namespace detail

/// One ranked table per world year per rankable section.
inline int cmd_epitome(const RunConfig& config, std::ostream& diag) {
  config.validate();
  const demog::Dataset dataset = load_dataset(config, diag);
  const auto sections = detail::present_sections(dataset, config);
  if (sections.empty()) throw ConfigError("no rankable entities in the dataset");
  const analysis::Options options = config.analysis_options();
  for (int year : config.world_years) {
    for (demog::EntityKind section : sections) {
      const analysis::EpitomeTable table =
          analysis::epitome_table(dataset, year, section, options);
      const std::string stem =
          "epitome_" + detail::section_slug(section) + "_" + std::to_string(year);
      if (config.wants("csv")) {
        auto out = detail::open_output(config, stem + ".csv");
        report::write_epitome_csv(out, table);
      }
      if (config.wants("json")) {
        auto out = detail::open_output(config, stem + ".json");
        out << report::epitome_json(table).dump(2) << "\n";
      }
    }
  }
  return 0;
}

/// Per-country distance join table for one world year.
inline int cmd_map(const RunConfig& config, int world_year, std::ostream& diag) {
  config.validate();
  const demog::Dataset dataset = load_dataset(config, diag);
  bool any_country = false;
  for (const demog::Entity& entity : dataset.entities) {
    if (entity.kind == demog::EntityKind::Country) {
      any_country = true;
      break;
    }
  }
  if (!any_country) throw ConfigError("no countries left after filtering");
  std::vector<std::string> unmapped;
  const auto values =
      analysis::similarity_map_values(dataset, world_year, config.analysis_options(), &unmapped);
  for (const std::string& name : unmapped) {
    diag << "note: no ISO3 mapping for " << name << "\n";
  }
  if (config.wants("csv")) {
    auto out = detail::open_output(config, "map_" + std::to_string(world_year) + ".csv");
    report::write_map_csv(out, values);
  }
  if (config.wants("geojson-join")) {
    auto out = detail::open_output(config,
                                   "map_" + std::to_string(world_year) + "_properties.json");
    out << report::map_geojson_properties(values, world_year).dump(2) << "\n";
  }
  return 0;
}

/// Ward clustering of reference-year compositions: assignment, centroid
/// table, and dendrogram.
inline int cmd_cluster(const RunConfig& config, std::ostream& diag) {
  config.validate();
  const demog::Dataset dataset = load_dataset(config, diag);
  const analysis::Options options = config.analysis_options();

  std::vector<cluster::LabeledComposition> items;
  for (const demog::Entity& entity : dataset.entities) {
    const bool eligible =
        entity.kind == demog::EntityKind::Country ||
        (config.include_aggregates && entity.kind != demog::EntityKind::World);
    if (!eligible) continue;
    const demog::AgePyramid* pyramid =
        dataset.series.find_preferring(entity.id, config.reference_year, config.variant);
    if (pyramid == nullptr) continue;
    items.emplace_back(entity.id, analysis::composition_of(*pyramid, options));
  }
  if (items.size() < config.clusters) {
    throw ConfigError("requested " + std::to_string(config.clusters) + " clusters from " +
                      std::to_string(items.size()) + " entities");
  }

  const cluster::DistanceMatrix matrix = cluster::pairwise_distance_matrix(items);
  const cluster::Dendrogram dendrogram = cluster::ward_linkage(matrix);
  const cluster::ClusterAssignment assignment =
      cluster::cut_tree(dendrogram, config.clusters, items, config.centroid_mode);
  const auto centroids = cluster::cluster_centroids(assignment, items, config.centroid_mode);

  if (config.wants("csv")) {
    {
      auto out = detail::open_output(config, "cluster_assignment.csv");
      report::write_assignment_csv(out, assignment, dataset);
    }
    {
      auto out = detail::open_output(config, "cluster_centroids.csv");
      report::write_centroid_csv(out, centroids);
    }
  }
  if (config.wants("json")) {
    auto out = detail::open_output(config, "cluster_dendrogram.json");
    out << report::dendrogram_json(dendrogram, &dataset).dump(2) << "\n";
  }
  diag << "clustered " << items.size() << " entities into " << config.clusters << " clusters\n";
  return 0;
}

/// SVG pyramid chart for one entity-year.
inline int cmd_pyramid(const RunConfig& config, const std::string& entity_spec, int year,
                       std::ostream& diag) {
  config.validate();
  const demog::Dataset dataset = load_dataset(config, diag);
  const demog::Entity* entity = detail::resolve_entity(dataset, entity_spec);
  if (entity == nullptr) throw Error("unknown entity '" + entity_spec + "'");
  const demog::AgePyramid* pyramid =
      dataset.series.find_preferring(entity->id, year, config.variant);
  if (pyramid == nullptr) {
    throw Error("no pyramid for " + entity->name + " at year " + std::to_string(year));
  }
  const double total = pyramid->total();
  std::vector<double> shares(pyramid->values.begin(), pyramid->values.end());
  for (double& v : shares) v *= 100.0 / total;
  if (config.wants("svg")) {
    auto out = detail::open_output(
        config, "pyramid_" + std::to_string(entity->id) + "_" + std::to_string(year) + ".svg");
    report::write_pyramid_svg(out, shares, entity->name + " " + std::to_string(year));
  }
  return 0;
}

/// Long-format distance trajectories for a list of entities.
inline int cmd_trajectory(const RunConfig& config, const std::vector<std::string>& entity_specs,
                          std::ostream& diag) {
  config.validate();
  if (entity_specs.empty()) throw ConfigError("no entities given");
  const demog::Dataset dataset = load_dataset(config, diag);
  std::vector<int> ids;
  ids.reserve(entity_specs.size());
  for (const std::string& spec : entity_specs) {
    const demog::Entity* entity = detail::resolve_entity(dataset, spec);
    if (entity == nullptr) throw Error("unknown entity '" + spec + "'");
    ids.push_back(entity->id);
  }
  const auto points =
      analysis::distance_trajectory(dataset, ids, config.world_years, config.analysis_options());
  if (config.wants("csv")) {
    auto out = detail::open_output(config, "trajectory.csv");
    report::write_trajectory_csv(out, points);
  }
  return 0;
}

/// Runs `action`, translating exceptions into exit codes and diagnostics.
template <typename Action>
int run_command(Action&& action, std::ostream& diag) {
  try {
    return action();
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace agecoda::cli

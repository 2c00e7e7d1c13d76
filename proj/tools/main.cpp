// agecoda: age-structure similarity and clustering on the simplex.
//
// Subcommands:
//   epitome     ranked similarity tables of entities vs the world per year
//   map         per-country distance join files for one world year
//   cluster     Ward clustering of reference-year compositions
//   pyramid     SVG pyramid chart for one entity-year
//   trajectory  distance trajectories for selected entities

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agecoda/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, agecoda::cli::RunConfig& config, std::string& delta_text) {
  cmd->add_option("--input", config.inputs, "Long-format age-group CSV file(s)");
  cmd->add_flag("--fixtures-only", config.fixtures_only,
                "Use the bundled wide-format sample table instead of --input");
  cmd->add_option("--variant", config.variant, "Projection variant to ingest")
      ->capture_default_str();
  cmd->add_option("--reference-year", config.reference_year,
                  "Year whose entity structures are compared")
      ->capture_default_str();
  cmd->add_option("--world-years", config.world_years,
                  "Comma-separated target years for the world structure")
      ->delimiter(',');
  cmd->add_option("--threshold", config.threshold, "Similarity threshold on the distance")
      ->capture_default_str();
  cmd->add_option("--delta", delta_text,
                  "Zero-replacement delta in percentage points, or 'auto'");
  cmd->add_option("--min-population", config.min_population,
                  "Drop countries below this many inhabitants in 2015")
      ->capture_default_str();
  cmd->add_option("--clusters", config.clusters, "Number of clusters for the tree cut")
      ->capture_default_str();
  cmd->add_option("--centroid-mode", [&config](const std::vector<std::string>& values) {
        if (values.back() == "geometric") {
          config.centroid_mode = agecoda::cluster::CentroidMode::Geometric;
        } else if (values.back() == "arithmetic") {
          config.centroid_mode = agecoda::cluster::CentroidMode::Arithmetic;
        } else {
          return false;
        }
        return true;
      },
      "Cluster centroid mode: geometric|arithmetic");
  cmd->add_flag("--include-aggregates", config.include_aggregates,
                "Cluster aggregate regions alongside countries");
  cmd->add_option("--format", config.formats,
                  "Output formats (csv,json,geojson-join,svg); default: all that apply")
      ->delimiter(',');
  cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
}

void apply_delta(agecoda::cli::RunConfig& config, const std::string& delta_text) {
  if (delta_text.empty() || delta_text == "auto") return;
  char* end = nullptr;
  const double value = std::strtod(delta_text.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    throw agecoda::ConfigError("--delta must be a number or 'auto', got '" + delta_text + "'");
  }
  config.delta = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-structure similarity and clustering in Aitchison geometry"};
  app.require_subcommand(1);

  agecoda::cli::RunConfig config;
  if (const char* data_dir = std::getenv("AGECODA_DATA_DIR")) {
    config.data_dir = data_dir;
  }
  std::string delta_text = "auto";

  CLI::App* epitome = app.add_subcommand(
      "epitome", "Rank entities by similarity to the world at each target year");
  add_common_options(epitome, config, delta_text);

  CLI::App* map_cmd = app.add_subcommand("map", "Write per-country distance join files");
  add_common_options(map_cmd, config, delta_text);
  int map_year = 2015;
  map_cmd->add_option("--year", map_year, "World year to compare against")->required();

  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "Ward-cluster reference-year age structures");
  add_common_options(cluster_cmd, config, delta_text);

  CLI::App* pyramid = app.add_subcommand("pyramid", "Render one pyramid as SVG");
  add_common_options(pyramid, config, delta_text);
  std::string pyramid_entity;
  int pyramid_year = 2015;
  pyramid->add_option("--entity", pyramid_entity, "Entity id or name")->required();
  pyramid->add_option("--year", pyramid_year, "Year")->required();

  CLI::App* trajectory =
      app.add_subcommand("trajectory", "Distance trajectories for selected entities");
  add_common_options(trajectory, config, delta_text);
  std::vector<std::string> trajectory_entities;
  trajectory->add_option("--entities", trajectory_entities, "Entity ids or names")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  return agecoda::cli::run_command(
      [&]() -> int {
        apply_delta(config, delta_text);
        if (epitome->parsed()) return agecoda::cli::cmd_epitome(config, std::cerr);
        if (map_cmd->parsed()) return agecoda::cli::cmd_map(config, map_year, std::cerr);
        if (cluster_cmd->parsed()) return agecoda::cli::cmd_cluster(config, std::cerr);
        if (pyramid->parsed()) {
          return agecoda::cli::cmd_pyramid(config, pyramid_entity, pyramid_year, std::cerr);
        }
        return agecoda::cli::cmd_trajectory(config, trajectory_entities, std::cerr);
      },
      std::cerr);
}

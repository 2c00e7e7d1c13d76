#pragma once

// Epitome analysis: which entities' reference-year age structures are
// closest, in Aitchison distance, to the world's structure at a target year.
// Produces ranked similarity tables, per-country map values, and distance
// trajectories.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agecoda/coda.hpp"
#include "agecoda/demographics.hpp"
#include "agecoda/errors.hpp"

namespace agecoda::analysis {

/// Marker for "derive the zero-replacement delta from each pyramid".
inline constexpr double kAutoDelta = std::numeric_limits<double>::quiet_NaN();

struct Options {
  int reference_year = 2015;
  std::string variant = "Medium";
  double threshold = 1.0;      // entries above this are "not similar"
  double delta = kAutoDelta;   // zero-replacement delta, percentage points
  int beyond_from_year = 2060; // append near misses starting with this year
  std::size_t beyond_count = 5;
};

inline double resolve_delta(const demog::AgePyramid& pyramid, const Options& options) {
  return std::isnan(options.delta) ? demog::auto_delta(pyramid) : options.delta;
}

inline Composition composition_of(const demog::AgePyramid& pyramid, const Options& options) {
  return demog::pyramid_to_composition(pyramid, resolve_delta(pyramid, options));
}

struct EpitomeEntry {
  int rank = 0;
  int entity_id = 0;
  std::string name;
  demog::EntityKind kind = demog::EntityKind::Country;
  std::string iso3;
  double distance = 0.0;
  bool beyond_threshold = false;
};

/// One section of the similarity table for one target world year: entries
/// sorted by ascending distance, ranks consecutive from 1, ties broken by
/// entity id.
struct EpitomeTable {
  int world_year = 0;
  int reference_year = 2015;
  demog::EntityKind section = demog::EntityKind::Country;
  double threshold = 1.0;
  std::vector<EpitomeEntry> entries;
};

namespace detail {

inline Composition world_composition(const demog::Dataset& dataset, int world_year,
                                     const Options& options) {
  const demog::Entity* world = dataset.world();
  if (world == nullptr) {
    throw MissingWorldPyramid("dataset has no World entity");
  }
  const demog::AgePyramid* pyramid =
      dataset.series.find_preferring(world->id, world_year, options.variant);
  if (pyramid == nullptr) {
    throw MissingWorldPyramid("no World pyramid for year " + std::to_string(world_year));
  }
  return composition_of(*pyramid, options);
}

struct ScoredEntity {
  const demog::Entity* entity;
  double distance;
};

/// Distances of every `section` entity's reference-year composition to the
/// given world composition, sorted ascending with id tie-break. Entities
/// without a reference-year pyramid are skipped.
inline std::vector<ScoredEntity> scored_section(const demog::Dataset& dataset,
                                                const Composition& world,
                                                demog::EntityKind section,
                                                const Options& options) {
  std::vector<ScoredEntity> scored;
  for (const demog::Entity& entity : dataset.entities) {
    if (entity.kind != section || entity.kind == demog::EntityKind::World) continue;
    const demog::AgePyramid* pyramid =
        dataset.series.find_preferring(entity.id, options.reference_year, options.variant);
    if (pyramid == nullptr) continue;
    scored.push_back({&entity, aitchison_distance(composition_of(*pyramid, options), world)});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredEntity& a, const ScoredEntity& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.entity->id < b.entity->id;
  });
  return scored;
}

}  // namespace detail

/// Ranked similarity table of one entity kind against the world at
/// `world_year`. Entries within the threshold are always included; for years
/// at or past beyond_from_year the `beyond_count` nearest entries over the
/// threshold are appended, flagged beyond_threshold.
inline EpitomeTable epitome_table(const demog::Dataset& dataset, int world_year,
                                  demog::EntityKind section, const Options& options = {}) {
  if (section == demog::EntityKind::World) {
    throw EmptySection("the world is not a rankable section");
  }
  const Composition world = detail::world_composition(dataset, world_year, options);
  const auto scored = detail::scored_section(dataset, world, section, options);
  if (scored.empty()) {
    throw EmptySection("no " + std::string(demog::to_string(section)) +
                       " entities with a pyramid at reference year " +
                       std::to_string(options.reference_year));
  }

  EpitomeTable table;
  table.world_year = world_year;
  table.reference_year = options.reference_year;
  table.section = section;
  table.threshold = options.threshold;

  std::size_t appended_beyond = 0;
  for (const auto& s : scored) {
    const bool beyond = s.distance > options.threshold;
    if (beyond) {
      if (world_year < options.beyond_from_year) break;
      if (appended_beyond == options.beyond_count) break;
      ++appended_beyond;
    }
    EpitomeEntry entry;
    entry.rank = static_cast<int>(table.entries.size()) + 1;
    entry.entity_id = s.entity->id;
    entry.name = s.entity->name;
    entry.kind = s.entity->kind;
    entry.iso3 = s.entity->iso3;
    entry.distance = s.distance;
    entry.beyond_threshold = beyond;
    table.entries.push_back(std::move(entry));
  }
  return table;
}

/// Per-country distance values for a choropleth join: ISO3 code to Aitchison
/// distance, unthresholded. Countries without an ISO3 mapping are skipped;
/// their names are appended to `unmapped` when provided.
inline std::map<std::string, double> similarity_map_values(
    const demog::Dataset& dataset, int world_year, const Options& options = {},
    std::vector<std::string>* unmapped = nullptr) {
  const Composition world = detail::world_composition(dataset, world_year, options);
  const auto scored =
      detail::scored_section(dataset, world, demog::EntityKind::Country, options);
  std::map<std::string, double> values;
  for (const auto& s : scored) {
    if (s.entity->iso3.empty()) {
      if (unmapped) unmapped->push_back(s.entity->name);
      continue;
    }
    values[s.entity->iso3] = s.distance;
  }
  return values;
}

struct TrajectoryPoint {
  int entity_id = 0;
  std::string name;
  int world_year = 0;
  double distance = 0.0;
};

/// Complete (entity, world_year) distance grid, unfiltered. Rows are grouped
/// by entity in input order, then by world year in input order.
inline std::vector<TrajectoryPoint> distance_trajectory(const demog::Dataset& dataset,
                                                        std::span<const int> entity_ids,
                                                        std::span<const int> world_years,
                                                        const Options& options = {}) {
  std::vector<Composition> worlds;
  worlds.reserve(world_years.size());
  for (int year : world_years) {
    worlds.push_back(detail::world_composition(dataset, year, options));
  }
  std::vector<TrajectoryPoint> points;
  points.reserve(entity_ids.size() * world_years.size());
  for (int id : entity_ids) {
    const demog::Entity* entity = dataset.entity_by_id(id);
    if (entity == nullptr) {
      throw Error("unknown entity id " + std::to_string(id));
    }
    const demog::AgePyramid* pyramid =
        dataset.series.find_preferring(id, options.reference_year, options.variant);
    if (pyramid == nullptr) {
      throw Error("entity " + entity->name + " has no pyramid at reference year " +
                  std::to_string(options.reference_year));
    }
    const Composition reference = composition_of(*pyramid, options);
    for (std::size_t w = 0; w < worlds.size(); ++w) {
      points.push_back(
          {id, entity->name, world_years[w], aitchison_distance(reference, worlds[w])});
    }
  }
  return points;
}

}  // namespace agecoda::analysis

#pragma once

// Ingestion of quinquennial age-group data (UN World Population Prospects
// long format and bundled wide-format fixture tables), the entity catalog,
// and the bridge from age pyramids to simplex compositions.

#include <array>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agecoda/coda.hpp"
#include "agecoda/csv.hpp"
#include "agecoda/errors.hpp"

namespace agecoda::demog {

inline constexpr std::size_t kAgeBinCount = 21;

/// Canonical labels for the 21 five-year age groups, youngest first.
inline const std::array<std::string, kAgeBinCount>& age_bin_labels() {
  static const std::array<std::string, kAgeBinCount> labels = {
      "0-4",   "5-9",   "10-14", "15-19", "20-24", "25-29", "30-34",
      "35-39", "40-44", "45-49", "50-54", "55-59", "60-64", "65-69",
      "70-74", "75-79", "80-84", "85-89", "90-94", "95-99", "100+"};
  return labels;
}

/// Maps an age-group label to its bin index. Accepts cosmetic variations:
/// zero-padded bounds ("00-04", "05-09"), en dashes, stray spaces and a
/// trailing "years". Returns nullopt for anything else ("80+", "Total", ...).
inline std::optional<std::size_t> age_bin_index(std::string_view raw) {
  std::string norm;
  norm.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == ' ' || c == '\t') continue;
    // en dash (U+2013) as a separator
    if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
        static_cast<unsigned char>(raw[i + 2]) == 0x93) {
      norm += '-';
      i += 2;
      continue;
    }
    norm += static_cast<char>(std::tolower(c));
  }
  if (norm.size() > 5 && norm.ends_with("years")) norm.resize(norm.size() - 5);
  if (norm == "100+" || norm == "100andover" || norm == "100plus") return 20;
  const auto dash = norm.find('-');
  if (dash == std::string::npos) return std::nullopt;
  const auto lo = csvio::parse_int(std::string_view(norm).substr(0, dash));
  const auto hi = csvio::parse_int(std::string_view(norm).substr(dash + 1));
  if (!lo || !hi) return std::nullopt;
  if (*lo % 5 != 0 || *hi != *lo + 4 || *lo < 0 || *lo > 95) return std::nullopt;
  return static_cast<std::size_t>(*lo / 5);
}

enum class EntityKind { Country, GeographicRegion, UnDevelopmentCategory, IncomeCategory, World };

inline std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Country: return "country";
    case EntityKind::GeographicRegion: return "geographic_region";
    case EntityKind::UnDevelopmentCategory: return "un_development_category";
    case EntityKind::IncomeCategory: return "income_category";
    case EntityKind::World: return "world";
  }
  return "unknown";
}

/// A country, aggregate region, development/income category, or the World.
struct Entity {
  int id = 0;                  // numeric area code (M49 for countries)
  std::string name;
  EntityKind kind = EntityKind::Country;
  std::string iso3;            // empty when unknown or not a country
  std::optional<double> population_2015;  // persons
};

enum class Unit { Persons, Thousands, Percent };

inline double unit_multiplier(Unit unit) {
  switch (unit) {
    case Unit::Persons: return 1.0;
    case Unit::Thousands: return 1000.0;
    case Unit::Percent: return 0.0;  // carries no absolute size
  }
  return 0.0;
}

/// One entity-year age distribution: 21 nonnegative five-year bin values.
struct AgePyramid {
  int entity_id = 0;
  int year = 0;
  std::string variant;
  Unit unit = Unit::Persons;
  std::array<double, kAgeBinCount> values{};

  double total() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
};

struct SeriesKey {
  int entity_id;
  int year;
  std::string variant;
  auto operator<=>(const SeriesKey&) const = default;
};

/// Immutable-after-build store of pyramids keyed by (entity, year, variant).
class PyramidSeries {
 public:
  void add(AgePyramid pyramid) {
    SeriesKey key{pyramid.entity_id, pyramid.year, pyramid.variant};
    auto [it, inserted] = by_key_.emplace(std::move(key), std::move(pyramid));
    if (!inserted) {
      throw DuplicateRow("duplicate pyramid for entity " + std::to_string(it->first.entity_id) +
                         " year " + std::to_string(it->first.year) + " variant '" +
                         it->first.variant + "'");
    }
  }

  const AgePyramid* find(int entity_id, int year, std::string_view variant) const {
    auto it = by_key_.find(SeriesKey{entity_id, year, std::string(variant)});
    return it == by_key_.end() ? nullptr : &it->second;
  }

  /// Preferred variant if present, otherwise the lexicographically first
  /// variant stored for (entity, year). Estimate years typically carry a
  /// single variant whose name differs from the projection variant.
  const AgePyramid* find_preferring(int entity_id, int year, std::string_view preferred) const {
    if (const AgePyramid* exact = find(entity_id, year, preferred)) return exact;
    auto it = by_key_.lower_bound(SeriesKey{entity_id, year, ""});
    if (it != by_key_.end() && it->first.entity_id == entity_id && it->first.year == year) {
      return &it->second;
    }
    return nullptr;
  }

  const std::map<SeriesKey, AgePyramid>& all() const { return by_key_; }
  std::size_t size() const { return by_key_.size(); }

 private:
  std::map<SeriesKey, AgePyramid> by_key_;
};

struct RejectedRow {
  std::size_t row = 0;  // 1-based, header is row 1
  std::string reason;
};

/// Parsed catalog plus series. Entities are unique by id and sorted.
struct Dataset {
  std::vector<Entity> entities;
  PyramidSeries series;
  std::vector<RejectedRow> rejected;

  const Entity* entity_by_id(int id) const {
    for (const Entity& e : entities) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  /// Case-insensitive exact name match.
  const Entity* entity_by_name(std::string_view name) const;

  const Entity* world() const {
    for (const Entity& e : entities) {
      if (e.kind == EntityKind::World) return &e;
    }
    return nullptr;
  }
};

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline const Entity* Dataset::entity_by_name(std::string_view name) const {
  const std::string needle = lowercase(name);
  for (const Entity& e : entities) {
    if (lowercase(e.name) == needle) return &e;
  }
  return nullptr;
}

/// Aggregate rows in WPP files use area codes >= 900; countries carry their
/// M49 code below 900. Aggregate kinds are told apart by name.
inline EntityKind infer_kind(int id, std::string_view name) {
  const std::string lower = lowercase(name);
  if (id == 900 || lower == "world") return EntityKind::World;
  if (id < 900) return EntityKind::Country;
  if (lower.find("income") != std::string::npos) return EntityKind::IncomeCategory;
  if (lower.find("developed") != std::string::npos) return EntityKind::UnDevelopmentCategory;
  return EntityKind::GeographicRegion;
}

/// Column roles for the long-format ingestion. Defaults match the UN WPP
/// CSV layout (one row per location-variant-year-agegroup, values in
/// thousands). Projection rows are kept only for keep_variant; rows at or
/// before estimate_horizon are estimates and kept regardless of variant.
struct ColumnMap {
  std::string id = "LocID";
  std::string name = "Location";
  std::string variant = "Variant";
  std::string year = "Time";
  std::string age = "AgeGrp";
  std::string value = "PopTotal";
  Unit unit = Unit::Thousands;
  std::string keep_variant = "Medium";
  int estimate_horizon = 2015;
};

namespace detail {

inline std::size_t require_column(const csvio::Table& table, const std::string& name) {
  if (auto idx = csvio::column_index(table, name)) return *idx;
  throw ParseError("missing required column '" + name + "'");
}

struct PyramidBuilder {
  std::array<double, kAgeBinCount> values{};
  std::array<bool, kAgeBinCount> seen{};
};

inline AgePyramid finish_pyramid(const SeriesKey& key, const PyramidBuilder& builder, Unit unit,
                                 const std::string& key_description) {
  for (std::size_t bin = 0; bin < kAgeBinCount; ++bin) {
    if (!builder.seen[bin]) {
      throw MissingBin(key_description + ": missing age group '" + age_bin_labels()[bin] + "'");
    }
  }
  AgePyramid pyramid;
  pyramid.entity_id = key.entity_id;
  pyramid.year = key.year;
  pyramid.variant = key.variant;
  pyramid.unit = unit;
  pyramid.values = builder.values;
  if (pyramid.total() <= 0.0) {
    throw AllZero(key_description + ": all 21 age groups are zero");
  }
  return pyramid;
}

}  // namespace detail

/// Parses a long-format table (one row per entity-year-agegroup). Rows with
/// unrecognized age labels are rejected and reported in Dataset::rejected
/// with their row number; every surviving (entity, year, variant) key must
/// have all 21 bins.
inline Dataset parse_wpp_csv(std::istream& in, const ColumnMap& cm = {}) {
  const csvio::Table table = csvio::read_table(in);
  if (table.header.empty() || table.rows.empty()) {
    throw EmptyVector("input table has no data rows");
  }
  const std::size_t col_id = detail::require_column(table, cm.id);
  const std::size_t col_name = detail::require_column(table, cm.name);
  const std::size_t col_variant = detail::require_column(table, cm.variant);
  const std::size_t col_year = detail::require_column(table, cm.year);
  const std::size_t col_age = detail::require_column(table, cm.age);
  const std::size_t col_value = detail::require_column(table, cm.value);

  Dataset dataset;
  std::map<int, Entity> catalog;
  std::map<SeriesKey, detail::PyramidBuilder> builders;

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t file_row = csvio::Table::file_row(i);
    const std::size_t needed =
        std::max({col_id, col_name, col_variant, col_year, col_age, col_value});
    if (row.size() <= needed) {
      throw UnparsableValue("row " + std::to_string(file_row) + ": expected at least " +
                            std::to_string(needed + 1) + " columns, got " +
                            std::to_string(row.size()));
    }
    const auto id = csvio::parse_int(row[col_id]);
    if (!id) {
      throw UnparsableValue("row " + std::to_string(file_row) + ": cannot parse entity id '" +
                            row[col_id] + "'");
    }
    const auto year = csvio::parse_int(row[col_year]);
    if (!year) {
      throw UnparsableValue("row " + std::to_string(file_row) + ": cannot parse year '" +
                            row[col_year] + "'");
    }
    const std::string& variant = row[col_variant];
    if (*year > cm.estimate_horizon && variant != cm.keep_variant) continue;
    if (*year < 1950 || *year > 2100) {
      dataset.rejected.push_back(
          {file_row, "year " + std::to_string(*year) + " outside 1950-2100"});
      continue;
    }
    const auto bin = age_bin_index(row[col_age]);
    if (!bin) {
      dataset.rejected.push_back({file_row, "unrecognized age group '" + row[col_age] + "'"});
      continue;
    }
    const auto value = csvio::parse_double(row[col_value]);
    if (!value || *value < 0.0) {
      throw UnparsableValue("row " + std::to_string(file_row) + ": cannot parse value '" +
                            row[col_value] + "'");
    }

    const int entity_id = static_cast<int>(*id);
    auto [cat_it, is_new] = catalog.try_emplace(entity_id);
    if (is_new) {
      cat_it->second.id = entity_id;
      cat_it->second.name = row[col_name];
      cat_it->second.kind = infer_kind(entity_id, row[col_name]);
    }

    SeriesKey key{entity_id, static_cast<int>(*year), variant};
    detail::PyramidBuilder& builder = builders[key];
    if (builder.seen[*bin]) {
      throw DuplicateRow("row " + std::to_string(file_row) + ": duplicate value for entity " +
                         std::to_string(entity_id) + " year " + std::to_string(*year) +
                         " variant '" + variant + "' age group '" + row[col_age] + "'");
    }
    builder.seen[*bin] = true;
    builder.values[*bin] = *value;
  }

  for (const auto& [key, builder] : builders) {
    const std::string description = "entity " + std::to_string(key.entity_id) + " year " +
                                    std::to_string(key.year) + " variant '" + key.variant + "'";
    dataset.series.add(detail::finish_pyramid(key, builder, cm.unit, description));
  }
  dataset.entities.reserve(catalog.size());
  for (auto& [id, entity] : catalog) dataset.entities.push_back(std::move(entity));
  return dataset;
}

struct LabeledPyramid {
  std::string label;
  AgePyramid pyramid;  // Unit::Percent
};

namespace detail {

/// "Colombia 2015" -> ("Colombia", 2015). Labels without a trailing year
/// keep the whole string as the name.
inline std::pair<std::string, std::optional<int>> split_label_year(const std::string& label) {
  const auto space = label.find_last_of(' ');
  if (space != std::string::npos) {
    if (auto year = csvio::parse_int(std::string_view(label).substr(space + 1))) {
      return {label.substr(0, space), static_cast<int>(*year)};
    }
  }
  return {label, std::nullopt};
}

}  // namespace detail

/// Parses a wide fixture table: first column age-class labels (descending
/// from 100+), one pyramid per remaining column, percent units. Column order
/// is preserved. Pyramid years come from a trailing year in the column label
/// when present, otherwise default to 2015.
inline std::vector<LabeledPyramid> parse_fixture_table(std::istream& in) {
  const csvio::Table table = csvio::read_table(in);
  if (table.header.size() < 2 || table.rows.empty()) {
    throw EmptyVector("fixture table has no pyramid columns or no data rows");
  }
  const std::size_t count = table.header.size() - 1;
  std::vector<detail::PyramidBuilder> builders(count);

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t file_row = csvio::Table::file_row(i);
    const auto bin = age_bin_index(row[0]);
    if (!bin) {
      // rejected rows are tolerated here the same way as in the long format,
      // but a fixture with junk rows will fail the completeness check below
      continue;
    }
    if (row.size() != table.header.size()) {
      throw UnparsableValue("row " + std::to_string(file_row) + ": expected " +
                            std::to_string(table.header.size()) + " columns, got " +
                            std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < count; ++c) {
      const auto value = csvio::parse_double(row[c + 1]);
      if (!value || *value < 0.0) {
        throw UnparsableValue("row " + std::to_string(file_row) + ": cannot parse value '" +
                              row[c + 1] + "'");
      }
      if (builders[c].seen[*bin]) {
        throw DuplicateRow("row " + std::to_string(file_row) + ": duplicate age group '" +
                           row[0] + "'");
      }
      builders[c].seen[*bin] = true;
      builders[c].values[*bin] = *value;
    }
  }

  std::vector<LabeledPyramid> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    const std::string& label = table.header[c + 1];
    const auto [name, year] = detail::split_label_year(label);
    SeriesKey key{-(static_cast<int>(c) + 1), year.value_or(2015), "Medium"};
    AgePyramid pyramid =
        detail::finish_pyramid(key, builders[c], Unit::Percent, "column '" + label + "'");
    out.push_back({label, std::move(pyramid)});
  }
  return out;
}

/// Numeric area code to ISO3 lookup, loaded from a two-way mapping file with
/// columns m49,iso3,name. Used to attach ISO3 codes for map joins and to give
/// fixture columns their real area codes.
class M49Table {
 public:
  void load(std::istream& in) {
    const csvio::Table table = csvio::read_table(in);
    const std::size_t col_m49 = detail::require_column(table, "m49");
    const std::size_t col_iso3 = detail::require_column(table, "iso3");
    const std::size_t col_name = detail::require_column(table, "name");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      const auto id = csvio::parse_int(row[col_m49]);
      if (!id) {
        throw UnparsableValue("row " + std::to_string(csvio::Table::file_row(i)) +
                              ": cannot parse m49 code '" + row[col_m49] + "'");
      }
      iso3_by_id_[static_cast<int>(*id)] = row[col_iso3];
      id_by_name_[lowercase(row[col_name])] = static_cast<int>(*id);
    }
  }

  std::optional<std::string> iso3(int id) const {
    auto it = iso3_by_id_.find(id);
    if (it == iso3_by_id_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  std::optional<int> id_of(std::string_view name) const {
    auto it = id_by_name_.find(lowercase(name));
    if (it == id_by_name_.end()) return std::nullopt;
    return it->second;
  }

  bool empty() const { return iso3_by_id_.empty(); }

 private:
  std::map<int, std::string> iso3_by_id_;
  std::map<std::string, int> id_by_name_;
};

/// Builds a Dataset from fixture columns. "World ..." becomes the World
/// entity; anything else becomes a country. Area codes come from the M49
/// table when a name matches; otherwise synthetic ids above 9000 are used
/// in column order.
inline Dataset fixture_dataset(const std::vector<LabeledPyramid>& pyramids,
                               const M49Table* m49 = nullptr) {
  Dataset dataset;
  int next_synthetic = 9001;
  for (const auto& labeled : pyramids) {
    const auto [name, year] = detail::split_label_year(labeled.label);
    Entity entity;
    entity.name = name;
    entity.kind = lowercase(name) == "world" ? EntityKind::World : EntityKind::Country;
    if (entity.kind == EntityKind::World) {
      entity.id = 900;
    } else if (m49) {
      if (auto id = m49->id_of(name)) {
        entity.id = *id;
        if (auto iso = m49->iso3(*id)) entity.iso3 = *iso;
      }
    }
    if (entity.id == 0) entity.id = next_synthetic++;

    AgePyramid pyramid = labeled.pyramid;
    pyramid.entity_id = entity.id;
    if (dataset.entity_by_id(entity.id) == nullptr) {
      dataset.entities.push_back(std::move(entity));
    }
    dataset.series.add(std::move(pyramid));
  }
  return dataset;
}

/// 2015 population of an entity in persons: the catalog value when present,
/// otherwise the sum of a 2015 pyramid in count units. Percent pyramids carry
/// no absolute size, so they yield no estimate.
inline std::optional<double> population_2015(const Entity& entity, const PyramidSeries& series) {
  if (entity.population_2015) return entity.population_2015;
  if (const AgePyramid* p = series.find_preferring(entity.id, 2015, "Medium")) {
    const double multiplier = unit_multiplier(p->unit);
    if (multiplier > 0.0) return p->total() * multiplier;
  }
  return std::nullopt;
}

/// Drops countries whose 2015 population is known to be below `minimum`
/// persons. Aggregates and the World are always retained, as are countries
/// whose population cannot be established.
inline std::vector<Entity> filter_population_threshold(const std::vector<Entity>& catalog,
                                                       const PyramidSeries& series,
                                                       double minimum) {
  std::vector<Entity> kept;
  kept.reserve(catalog.size());
  for (const Entity& entity : catalog) {
    if (entity.kind == EntityKind::Country) {
      if (auto pop = population_2015(entity, series); pop && *pop < minimum) continue;
    }
    kept.push_back(entity);
  }
  return kept;
}

/// Default zero-replacement delta for a pyramid, in percentage points:
/// 0.005 (half the last printed digit) for two-decimal percent tables, half
/// the smallest nonzero share for count data.
inline double auto_delta(const AgePyramid& pyramid) {
  if (pyramid.unit == Unit::Percent) return 0.005;
  const double total = pyramid.total();
  if (total <= 0.0) throw AllZero("pyramid has no positive age group");
  double smallest = 0.0;
  for (double v : pyramid.values) {
    if (v > 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
  }
  return 0.5 * smallest * 100.0 / total;
}

/// Converts a pyramid to a 21-part percent composition: values are first
/// expressed as shares of 100 (which removes the unit), zeros are replaced
/// multiplicatively with `delta` percentage points, and the result is closed
/// to k = 100.
inline Composition pyramid_to_composition(const AgePyramid& pyramid, double delta) {
  const double total = pyramid.total();
  if (total <= 0.0) throw AllZero("pyramid has no positive age group");
  std::vector<double> shares(pyramid.values.begin(), pyramid.values.end());
  const double factor = 100.0 / total;
  for (double& v : shares) v *= factor;
  return closure(zero_replace(shares, delta), 100.0);
}

/// Count of zero bins that zero replacement would touch.
inline std::size_t zero_bin_count(const AgePyramid& pyramid) {
  std::size_t zeros = 0;
  for (double v : pyramid.values) {
    if (v == 0.0) ++zeros;
  }
  return zeros;
}

}  // namespace agecoda::demog

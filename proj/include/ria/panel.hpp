#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ria/common.hpp"

namespace ria {

enum class Direction { positive, negative };
enum class RegionLevel { city, county };

struct IndicatorSpec {
  std::string id;
  std::string name;
  Direction direction = Direction::positive;
  std::string dimension;
  std::string units;

  bool operator==(const IndicatorSpec&) const = default;
};

struct Region {
  std::string id;
  std::string name;
  RegionLevel level = RegionLevel::city;
  std::optional<std::string> parent;  // county -> owning city
  std::string group;
  std::optional<std::pair<double, double>> centroid;  // (lon, lat) degrees
  std::set<std::string> neighbors;

  bool operator==(const Region&) const = default;
};

/// Region x year x indicator tensor with NaN as the missing marker.
/// Immutable by convention once built: every transform returns a copy.
struct PanelDataset {
  std::vector<Region> regions;
  std::vector<int> years;
  std::vector<IndicatorSpec> schema;
  std::vector<std::string> dimensions;  // declared first-level dimensions
  std::vector<std::string> groups;      // declared group keys, in order
  std::vector<double> values;           // flat, (region * Y + year) * K + k

  static bool is_missing(double v) { return std::isnan(v); }
  static double missing() { return std::numeric_limits<double>::quiet_NaN(); }

  std::size_t n_regions() const { return regions.size(); }
  std::size_t n_years() const { return years.size(); }
  std::size_t n_indicators() const { return schema.size(); }

  double& at(std::size_t r, std::size_t y, std::size_t k) {
    return values[(r * years.size() + y) * schema.size() + k];
  }
  double at(std::size_t r, std::size_t y, std::size_t k) const {
    return values[(r * years.size() + y) * schema.size() + k];
  }

  int region_index(const std::string& id) const {
    for (std::size_t i = 0; i < regions.size(); ++i)
      if (regions[i].id == id) return static_cast<int>(i);
    return -1;
  }
  int year_index(int year) const {
    for (std::size_t i = 0; i < years.size(); ++i)
      if (years[i] == year) return static_cast<int>(i);
    return -1;
  }
  int indicator_index(const std::string& id) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
      if (schema[i].id == id) return static_cast<int>(i);
    return -1;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (double v : values)
      if (is_missing(v)) ++n;
    return n;
  }

  /// Structural + tensor invariants. Throws data_error on violation.
  void validate() const {
    {
      std::set<std::string> seen;
      for (const auto& ind : schema) {
        if (!seen.insert(ind.id).second)
          throw data_error("duplicate indicator id '" + ind.id + "'");
        if (std::find(dimensions.begin(), dimensions.end(), ind.dimension) ==
            dimensions.end())
          throw data_error("indicator '" + ind.id +
                           "' references undeclared dimension '" +
                           ind.dimension + "'");
      }
    }
    {
      std::set<std::string> seen;
      for (const auto& r : regions)
        if (!seen.insert(r.id).second)
          throw data_error("duplicate region id '" + r.id + "'");
    }
    for (const auto& r : regions) {
      if (r.level == RegionLevel::county) {
        if (!r.parent)
          throw data_error("county '" + r.id + "' has no parent city");
        int pi = region_index(*r.parent);
        if (pi < 0 || regions[pi].level != RegionLevel::city)
          throw data_error("county '" + r.id + "' parent '" + *r.parent +
                           "' is not a known city");
      }
      if (!r.group.empty() && !groups.empty() &&
          std::find(groups.begin(), groups.end(), r.group) == groups.end())
        throw data_error("region '" + r.id + "' references undeclared group '" +
                         r.group + "'");
      for (const auto& nb : r.neighbors) {
        int ni = region_index(nb);
        if (ni < 0)
          throw data_error("region '" + r.id + "' names unknown neighbor '" +
                           nb + "'");
        if (!regions[ni].neighbors.count(r.id))
          throw data_error("asymmetric neighbor relation between '" + r.id +
                           "' and '" + nb + "'");
      }
    }
    for (std::size_t i = 1; i < years.size(); ++i)
      if (years[i] <= years[i - 1])
        throw data_error("years must be strictly increasing");
    if (values.size() != regions.size() * years.size() * schema.size())
      throw data_error("value tensor does not match regions x years x schema");
  }

  bool operator==(const PanelDataset& other) const {
    if (regions != other.regions || years != other.years ||
        schema != other.schema || dimensions != other.dimensions ||
        groups != other.groups || values.size() != other.values.size())
      return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      bool ma = is_missing(values[i]), mb = is_missing(other.values[i]);
      if (ma != mb) return false;
      if (!ma && values[i] != other.values[i]) return false;
    }
    return true;
  }
};

namespace detail {

inline Direction parse_direction(const std::string& s) {
  if (s == "positive") return Direction::positive;
  if (s == "negative") return Direction::negative;
  throw data_error("indicator direction must be positive|negative, got '" + s +
                   "'");
}

inline RegionLevel parse_level(const std::string& s) {
  if (s == "city") return RegionLevel::city;
  if (s == "county") return RegionLevel::county;
  throw data_error("region level must be city|county, got '" + s + "'");
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw data_error("unknown key '" + it.key() + "' in " + where);
}

}  // namespace detail

/// Parse the schema file (dimensions, indicators, regions, groups) into a
/// PanelDataset skeleton with no years/values yet.
inline PanelDataset load_schema(const std::string& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw data_error("cannot open schema file '" + schema_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("schema parse failure in '" + schema_path +
                     "': " + e.what());
  }
  detail::reject_unknown_keys(doc, {"dimensions", "groups", "indicators",
                                    "regions"},
                              "schema");

  PanelDataset panel;
  for (const auto& d : doc.at("dimensions"))
    panel.dimensions.push_back(d.get<std::string>());
  if (doc.contains("groups"))
    for (const auto& g : doc["groups"])
      panel.groups.push_back(g.get<std::string>());

  for (const auto& j : doc.at("indicators")) {
    detail::reject_unknown_keys(j, {"id", "name", "direction", "dimension",
                                    "units"},
                                "indicator");
    IndicatorSpec spec;
    spec.id = j.at("id").get<std::string>();
    spec.name = j.value("name", spec.id);
    spec.direction = detail::parse_direction(j.value("direction", "positive"));
    spec.dimension = j.at("dimension").get<std::string>();
    spec.units = j.value("units", "");
    panel.schema.push_back(std::move(spec));
  }

  for (const auto& j : doc.at("regions")) {
    detail::reject_unknown_keys(
        j, {"id", "name", "level", "parent", "group", "lon", "lat",
            "neighbors"},
        "region");
    Region r;
    r.id = j.at("id").get<std::string>();
    r.name = j.value("name", r.id);
    r.level = detail::parse_level(j.value("level", "city"));
    if (j.contains("parent") && !j["parent"].is_null())
      r.parent = j["parent"].get<std::string>();
    r.group = j.value("group", "");
    if (j.contains("lon") != j.contains("lat"))
      throw data_error("region '" + r.id + "' must declare lon and lat together");
    if (j.contains("lon"))
      r.centroid = {j["lon"].get<double>(), j["lat"].get<double>()};
    if (j.contains("neighbors"))
      for (const auto& nb : j["neighbors"])
        r.neighbors.insert(nb.get<std::string>());
    panel.regions.push_back(std::move(r));
  }

  // groups default to order of first appearance
  if (panel.groups.empty()) {
    for (const auto& r : panel.regions)
      if (!r.group.empty() &&
          std::find(panel.groups.begin(), panel.groups.end(), r.group) ==
              panel.groups.end())
        panel.groups.push_back(r.group);
  }
  return panel;
}

/// Load a long-format panel CSV (`region_id,year,indicator_id,value`)
/// against a schema. Empty or unparseable cells become missing markers
/// (the latter counted in `warnings`); duplicate keys and unknown ids are
/// hard errors.
inline PanelDataset load_panel(const std::string& panel_path,
                               const std::string& schema_path,
                               warning_log* warnings = nullptr) {
  PanelDataset panel = load_schema(schema_path);

  std::ifstream in(panel_path);
  if (!in) throw data_error("cannot open panel file '" + panel_path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw data_error("panel file '" + panel_path + "' is empty");
  if (join_csv(split_csv_line(line)) != "region_id,year,indicator_id,value")
    throw data_error("panel header must be region_id,year,indicator_id,value");

  struct Row {
    int region, year_value, indicator;
    double value;
  };
  std::vector<Row> rows;
  std::set<int> year_set;
  std::size_t unparseable = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw data_error("panel line " + std::to_string(line_no) +
                       ": expected 4 fields");
    int r = panel.region_index(fields[0]);
    if (r < 0)
      throw data_error("panel line " + std::to_string(line_no) +
                       ": unknown region id '" + fields[0] + "'");
    int year_value = 0;
    try {
      std::size_t pos = 0;
      year_value = std::stoi(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw data_error("panel line " + std::to_string(line_no) +
                       ": bad year '" + fields[1] + "'");
    }
    int k = panel.indicator_index(fields[2]);
    if (k < 0)
      throw data_error("panel line " + std::to_string(line_no) +
                       ": unknown indicator id '" + fields[2] + "'");
    double v = PanelDataset::missing();
    if (!fields[3].empty()) {
      try {
        std::size_t pos = 0;
        v = std::stod(fields[3], &pos);
        if (pos != fields[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        v = PanelDataset::missing();
        ++unparseable;
      }
    }
    rows.push_back({r, year_value, k, v});
    year_set.insert(year_value);
  }
  if (unparseable)
    warn(warnings, "panel '" + panel_path + "': " +
                       std::to_string(unparseable) +
                       " unparseable cells treated as missing");

  panel.years.assign(year_set.begin(), year_set.end());
  panel.values.assign(
      panel.regions.size() * panel.years.size() * panel.schema.size(),
      PanelDataset::missing());

  std::vector<bool> seen(panel.values.size(), false);
  for (const auto& row : rows) {
    int y = panel.year_index(row.year_value);
    std::size_t idx = (static_cast<std::size_t>(row.region) * panel.years.size() +
                       static_cast<std::size_t>(y)) *
                          panel.schema.size() +
                      static_cast<std::size_t>(row.indicator);
    if (seen[idx])
      throw data_error("duplicate panel row for (" +
                       panel.regions[row.region].id + ", " +
                       std::to_string(row.year_value) + ", " +
                       panel.schema[row.indicator].id + ")");
    seen[idx] = true;
    panel.values[idx] = row.value;
  }

  panel.validate();
  return panel;
}

/// Serialize values back to the canonical long CSV (region x year x
/// indicator order, missing as empty field, LF endings, full precision).
inline void save_panel_csv(const PanelDataset& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write panel file '" + path + "'");
  out << "region_id,year,indicator_id,value\n";
  for (std::size_t r = 0; r < panel.n_regions(); ++r)
    for (std::size_t y = 0; y < panel.n_years(); ++y)
      for (std::size_t k = 0; k < panel.n_indicators(); ++k) {
        out << panel.regions[r].id << ',' << panel.years[y] << ','
            << panel.schema[k].id << ',';
        double v = panel.at(r, y, k);
        if (!PanelDataset::is_missing(v)) {
          std::ostringstream ss;
          ss.precision(17);
          ss << v;
          out << ss.str();
        }
        out << '\n';
      }
}

inline void save_schema_json(const PanelDataset& panel,
                             const std::string& path) {
  nlohmann::json doc;
  doc["dimensions"] = panel.dimensions;
  doc["groups"] = panel.groups;
  doc["indicators"] = nlohmann::json::array();
  for (const auto& ind : panel.schema) {
    nlohmann::json j;
    j["id"] = ind.id;
    j["name"] = ind.name;
    j["direction"] = ind.direction == Direction::positive ? "positive"
                                                          : "negative";
    j["dimension"] = ind.dimension;
    if (!ind.units.empty()) j["units"] = ind.units;
    doc["indicators"].push_back(j);
  }
  doc["regions"] = nlohmann::json::array();
  for (const auto& r : panel.regions) {
    nlohmann::json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["level"] = r.level == RegionLevel::city ? "city" : "county";
    if (r.parent) j["parent"] = *r.parent;
    if (!r.group.empty()) j["group"] = r.group;
    if (r.centroid) {
      j["lon"] = r.centroid->first;
      j["lat"] = r.centroid->second;
    }
    if (!r.neighbors.empty())
      j["neighbors"] = std::vector<std::string>(r.neighbors.begin(),
                                                r.neighbors.end());
    doc["regions"].push_back(j);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write schema file '" + path + "'");
  out << doc.dump(2) << '\n';
}

/// Restrict the schema to indicators whose dimension is in `keep`;
/// regions/years unchanged.
inline PanelDataset subset_dimensions(const PanelDataset& panel,
                                      const std::vector<std::string>& keep) {
  PanelDataset out;
  out.regions = panel.regions;
  out.years = panel.years;
  out.groups = panel.groups;
  for (const auto& d : keep) {
    if (std::find(panel.dimensions.begin(), panel.dimensions.end(), d) ==
        panel.dimensions.end())
      throw data_error("subset references undeclared dimension '" + d + "'");
    out.dimensions.push_back(d);
  }
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < panel.schema.size(); ++k)
    if (std::find(keep.begin(), keep.end(), panel.schema[k].dimension) !=
        keep.end()) {
      out.schema.push_back(panel.schema[k]);
      cols.push_back(k);
    }
  out.values.resize(out.regions.size() * out.years.size() * out.schema.size());
  for (std::size_t r = 0; r < out.n_regions(); ++r)
    for (std::size_t y = 0; y < out.n_years(); ++y)
      for (std::size_t k = 0; k < cols.size(); ++k)
        out.at(r, y, k) = panel.at(r, y, cols[k]);
  return out;
}

}  // namespace ria

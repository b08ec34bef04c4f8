#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "condstein/condstein.hpp"

namespace condstein {

using nlohmann::json;

namespace detail {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SpecParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

inline std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw SpecParseError("missing or non-array field: " + field);
  }
  std::vector<double> out;
  for (const auto& v : j[field]) {
    if (!v.is_number()) throw SpecParseError("non-numeric entry in field: " + field);
    out.push_back(v.get<double>());
  }
  return out;
}

inline double number_field(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw SpecParseError("missing or non-numeric field: " + path + "." + field);
  }
  return j[field].get<double>();
}

}  // namespace detail

/// Parses {support, weights} into a finite law.
inline FiniteLaw finite_law_from_json(const json& j, const std::string& path) {
  try {
    return FiniteLaw(detail::number_array(j, "support"), detail::number_array(j, "weights"));
  } catch (const ValidationError& e) {
    throw SpecParseError(path + ": " + e.what());
  }
}

/// Model spec format:
/// {"y_values": [...], "y_weights": [...],
///  "families": [{"tag": "Gaussian", "params": {"mean": m, "variance": v}}, ...]}
inline ConditionalModel model_from_json(const json& j) {
  if (!j.is_object()) throw SpecParseError("model spec must be a JSON object");
  std::vector<double> y_values = detail::number_array(j, "y_values");
  std::vector<double> y_weights = detail::number_array(j, "y_weights");
  if (!j.contains("families") || !j["families"].is_array()) {
    throw SpecParseError("missing or non-array field: families");
  }
  std::vector<TargetFamily> families;
  std::size_t idx = 0;
  for (const auto& fj : j["families"]) {
    const std::string path = "families[" + std::to_string(idx) + "]";
    if (!fj.is_object() || !fj.contains("tag") || !fj["tag"].is_string()) {
      throw SpecParseError(path + ".tag: missing or non-string");
    }
    const std::string tag = fj["tag"].get<std::string>();
    const json params = fj.contains("params") ? fj["params"] : json::object();
    try {
      if (tag == "Gaussian") {
        families.push_back(TargetFamily::gaussian(
            detail::number_field(params, "mean", path + ".params"),
            detail::number_field(params, "variance", path + ".params")));
      } else if (tag == "Poisson") {
        families.push_back(
            TargetFamily::poisson(detail::number_field(params, "lambda", path + ".params")));
      } else if (tag == "Gamma") {
        families.push_back(
            TargetFamily::gamma(detail::number_field(params, "shape", path + ".params"),
                                detail::number_field(params, "rate", path + ".params")));
      } else if (tag == "FiniteDiscrete") {
        families.push_back(
            TargetFamily::finite_discrete(finite_law_from_json(params, path + ".params")));
      } else {
        throw SpecParseError(path + ".tag: unknown family tag '" + tag + "'");
      }
    } catch (const ValidationError& e) {
      throw SpecParseError(path + ".params: " + e.what());
    }
    ++idx;
  }
  try {
    return ConditionalModel(FiniteLaw(std::move(y_values), std::move(y_weights)),
                            std::move(families));
  } catch (const ValidationError& e) {
    throw SpecParseError(std::string("y_values/y_weights: ") + e.what());
  }
}

inline ConditionalModel load_model_file(const std::string& path) {
  return model_from_json(detail::load_json_file(path));
}

inline json model_to_json(const ConditionalModel& model) {
  json j;
  j["y_values"] = model.y_values();
  j["y_weights"] = model.y_weights().weights();
  j["families"] = json::array();
  for (const auto& fam : model.families()) {
    json fj;
    fj["tag"] = family_kind_name(fam.kind());
    switch (fam.kind()) {
      case FamilyKind::gaussian:
        fj["params"] = {{"mean", fam.gaussian_params().mean},
                        {"variance", fam.gaussian_params().variance}};
        break;
      case FamilyKind::poisson:
        fj["params"] = {{"lambda", fam.poisson_params().lambda}};
        break;
      case FamilyKind::gamma:
        fj["params"] = {{"shape", fam.gamma_params().shape}, {"rate", fam.gamma_params().rate}};
        break;
      case FamilyKind::finite_discrete:
        fj["params"] = {{"support", fam.law().support()}, {"weights", fam.law().weights()}};
        break;
    }
    j["families"].push_back(std::move(fj));
  }
  return j;
}

/// Joint table format: {"x_grid": [...], "y_grid": [...],
/// "mass": [[row per x grid point, one entry per y grid point], ...]}
inline JointTable joint_from_json(const json& j) {
  std::vector<double> x_grid = detail::number_array(j, "x_grid");
  std::vector<double> y_grid = detail::number_array(j, "y_grid");
  if (!j.contains("mass") || !j["mass"].is_array()) {
    throw SpecParseError("missing or non-array field: mass");
  }
  std::vector<double> mass;
  mass.reserve(x_grid.size() * y_grid.size());
  if (j["mass"].size() != x_grid.size()) {
    throw SpecParseError("mass: expected one row per x_grid point");
  }
  for (const auto& row : j["mass"]) {
    if (!row.is_array() || row.size() != y_grid.size()) {
      throw SpecParseError("mass: each row needs one entry per y_grid point");
    }
    for (const auto& v : row) {
      if (!v.is_number()) throw SpecParseError("mass: non-numeric entry");
      mass.push_back(v.get<double>());
    }
  }
  try {
    return JointTable(std::move(x_grid), std::move(y_grid), std::move(mass));
  } catch (const ValidationError& e) {
    throw SpecParseError(std::string("mass: ") + e.what());
  }
}

inline JointTable load_joint_file(const std::string& path) {
  return joint_from_json(detail::load_json_file(path));
}

inline json joint_to_json(const JointTable& t) {
  json j;
  j["x_grid"] = t.x_grid();
  j["y_grid"] = t.y_grid();
  json rows = json::array();
  for (std::size_t i = 0; i < t.nx(); ++i) {
    json row = json::array();
    for (std::size_t jj = 0; jj < t.ny(); ++jj) row.push_back(t.mass(i, jj));
    rows.push_back(std::move(row));
  }
  j["mass"] = std::move(rows);
  return j;
}

/// Samples CSV: header `x,y`, one pair per line, 17 significant digits so the
/// round trip through write/read is bit-exact.
inline std::string samples_to_csv(const SampleSet& samples) {
  std::string out = "x,y\n";
  char buf[80];
  for (const auto& [x, y] : samples.pairs) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x, y);
    out += buf;
  }
  return out;
}

inline SampleSet samples_from_csv(const std::string& text, const std::string& provenance) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || (line != "x,y" && line != "x,y\r")) {
    throw SpecParseError("samples CSV: expected header 'x,y'");
  }
  std::vector<std::pair<double, double>> pairs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw SpecParseError("samples CSV: missing comma at line " + std::to_string(lineno));
    }
    char* end_x = nullptr;
    char* end_y = nullptr;
    const char* start_y = line.c_str() + comma + 1;
    const double x = std::strtod(line.c_str(), &end_x);
    const double y = std::strtod(start_y, &end_y);
    if (end_x == line.c_str() || end_y == start_y) {
      throw SpecParseError("samples CSV: non-numeric value at line " + std::to_string(lineno));
    }
    pairs.emplace_back(x, y);
  }
  try {
    return SampleSet(std::move(pairs), provenance);
  } catch (const ValidationError& e) {
    throw SpecParseError(std::string("samples CSV: ") + e.what());
  }
}

inline SampleSet load_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return samples_from_csv(ss.str(), path);
}

/// Atomic write: temp file in the target directory, then rename.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path().empty()
                           ? fs::path(path + ".tmp")
                           : target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open temporary file for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

/// FNV-1a 64 over a canonical rendering of the model spec.
inline std::string model_digest(const ConditionalModel& model) {
  const std::string canon = model_to_json(model).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json discrepancy_to_json(const DiscrepancyReport& rep) {
  json j;
  j["sup"] = rep.sup_value;
  j["dictionary_seed"] = rep.dictionary_seed;
  if (rep.dictionary_lower_bound) j["lower_estimate"] = true;
  json per = json::array();
  for (const auto& fv : rep.per_function) {
    json e;
    e["label"] = fv.label;
    e["value"] = fv.value;
    if (fv.std_error) {
      e["std_error"] = *fv.std_error;
    } else {
      e["exact"] = true;
    }
    per.push_back(std::move(e));
  }
  j["per_function"] = std::move(per);
  return j;
}

}  // namespace condstein

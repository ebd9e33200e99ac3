// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/region_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace hcr {

namespace {

using nlohmann::ordered_json;

VectorXd vector_from_json(const ordered_json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("region file: '" + field + "' must be a nonempty array");
  }
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError("region file: '" + field + "' has a non-numeric entry");
    }
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

ordered_json vector_to_json(const VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

FeasibleRegion<double> parse_region(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("region file: ") + e.what());
  }
  if (!j.contains("origin")) {
    throw ParseError("region file: missing 'origin'");
  }
  if (!j.contains("constraints") || !j["constraints"].is_array() ||
      j["constraints"].empty()) {
    throw ParseError("region file: 'constraints' must be a nonempty array");
  }
  VectorXd origin = vector_from_json(j["origin"], "origin");
  std::vector<ConstraintFunction<double>> constraints;
  constraints.reserve(j["constraints"].size());
  for (const auto& cj : j["constraints"]) {
    if (!cj.contains("kind") || !cj["kind"].is_string()) {
      throw ParseError("region file: constraint without a 'kind' string");
    }
    const std::string kind = cj["kind"].get<std::string>();
    if (kind == "ball") {
      if (!cj.contains("center") || !cj.contains("radius") ||
          !cj["radius"].is_number()) {
        throw ParseError("region file: ball needs 'center' and 'radius'");
      }
      constraints.push_back(ConstraintFunction<double>::ball(
          vector_from_json(cj["center"], "center"),
          cj["radius"].get<double>()));
    } else if (kind == "halfspace") {
      if (!cj.contains("normal") || !cj.contains("offset") ||
          !cj["offset"].is_number()) {
        throw ParseError("region file: halfspace needs 'normal' and 'offset'");
      }
      constraints.push_back(ConstraintFunction<double>::halfspace(
          vector_from_json(cj["normal"], "normal"),
          cj["offset"].get<double>()));
    } else {
      throw ParseError("region file: unknown constraint kind '" + kind + "'");
    }
  }
  return FeasibleRegion<double>(std::move(constraints), std::move(origin));
}

FeasibleRegion<double> load_region(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open region file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_region(buffer.str());
}

std::string region_to_json_text(const FeasibleRegion<double>& region) {
  ordered_json j;
  j["origin"] = vector_to_json(region.origin());
  j["constraints"] = ordered_json::array();
  for (const auto& c : region.constraints()) {
    ordered_json cj;
    if (c.is_ball()) {
      cj["kind"] = "ball";
      cj["center"] = vector_to_json(c.as_ball().center);
      cj["radius"] = c.as_ball().radius;
    } else if (c.is_halfspace()) {
      cj["kind"] = "halfspace";
      cj["normal"] = vector_to_json(c.as_halfspace().normal);
      cj["offset"] = c.as_halfspace().offset;
    } else {
      throw std::invalid_argument(
          "generic constraints have no file representation");
    }
    j["constraints"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

void save_region(const FeasibleRegion<double>& region,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write region file: " + path);
  out << region_to_json_text(region);
  if (!out) throw IoError("failed writing region file: " + path);
}

}  // namespace hcr

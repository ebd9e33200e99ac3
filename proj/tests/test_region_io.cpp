// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/region_io.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("parse_region reads the documented schema") {
  const std::string text = R"({
    "origin": [0, 0],
    "constraints": [
      {"kind": "ball", "center": [0, 0], "radius": 10},
      {"kind": "halfspace", "normal": [1, 0], "offset": 1}
    ]
  })";
  const auto region = hcr::parse_region(text);
  CHECK(region.dimension() == 2);
  CHECK(region.constraint_count() == 2);
  CHECK(region.constraint(0).is_ball());
  CHECK(region.constraint(0).as_ball().radius == 10.0);
  CHECK(region.constraint(1).is_halfspace());
  CHECK(region.constraint(1).as_halfspace().offset == 1.0);
}

TEST_CASE("region files round trip") {
  const std::string text = R"({
    "origin": [0.5, -0.25],
    "constraints": [
      {"kind": "halfspace", "normal": [1, 0], "offset": 1},
      {"kind": "halfspace", "normal": [-1, 0], "offset": 1},
      {"kind": "halfspace", "normal": [0, 1], "offset": 1},
      {"kind": "halfspace", "normal": [0, -1], "offset": 1}
    ]
  })";
  const auto region = hcr::parse_region(text);
  const auto path = temp_file("hcr_region_roundtrip.json");
  hcr::save_region(region, path.string());
  const auto loaded = hcr::load_region(path.string());
  std::filesystem::remove(path);

  CHECK(loaded.constraint_count() == region.constraint_count());
  CHECK(loaded.origin() == region.origin());
  for (hcr::Index i = 0; i < region.constraint_count(); ++i) {
    CHECK(loaded.constraint(i).as_halfspace().normal ==
          region.constraint(i).as_halfspace().normal);
    CHECK(loaded.constraint(i).as_halfspace().offset ==
          region.constraint(i).as_halfspace().offset);
  }
}

TEST_CASE("malformed region files are rejected") {
  CHECK_THROWS_AS(hcr::parse_region("not json"), hcr::ParseError);
  CHECK_THROWS_AS(hcr::parse_region(R"({"constraints": []})"),
                  hcr::ParseError);
  CHECK_THROWS_AS(hcr::parse_region(R"({"origin": [0], "constraints": []})"),
                  hcr::ParseError);
  CHECK_THROWS_AS(
      hcr::parse_region(
          R"({"origin": [0], "constraints": [{"kind": "cone"}]})"),
      hcr::ParseError);
  CHECK_THROWS_AS(
      hcr::parse_region(
          R"({"origin": [0], "constraints": [{"kind": "ball"}]})"),
      hcr::ParseError);
  // Schema-valid but geometrically invalid.
  CHECK_THROWS_AS(
      hcr::parse_region(R"({"origin": [0, 0], "constraints":
        [{"kind": "ball", "center": [0, 0], "radius": -1}]})"),
      hcr::InvalidRegion);
}

TEST_CASE("missing region files raise IoError") {
  CHECK_THROWS_AS(hcr::load_region("/nonexistent/region.json"),
                  hcr::IoError);
}

// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "hcr/constraint.hpp"

namespace hcr {

/// Region description files are JSON:
///
///   {"origin": [0, 0],
///    "constraints": [{"kind": "ball", "center": [0, 0], "radius": 10},
///                    {"kind": "halfspace", "normal": [1, 0], "offset": 1}]}
///
/// Unknown kinds are rejected; generic constraints have no file form.
FeasibleRegion<double> load_region(const std::string& path);
FeasibleRegion<double> parse_region(const std::string& text);
std::string region_to_json_text(const FeasibleRegion<double>& region);
void save_region(const FeasibleRegion<double>& region,
                 const std::string& path);

}  // namespace hcr

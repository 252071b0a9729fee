#pragma once

#include <string>
#include <utility>
#include <vector>

#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"

namespace iqdesign {

struct Preset {
  std::string name;
  ModelSpec model;
  DesignSpace space;
  double extrapolation_point = 0.0;
  std::vector<std::pair<std::string, Design>> comparison_designs;
};

// "landete": red deer lactation case study. P1 with
// theta = (0.0002865, 0.0002117, 0.0000301) on [1, 14], extrapolation at 21,
// and the uniform comparison design on (1,...,6,10,14).
const Preset& preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace iqdesign

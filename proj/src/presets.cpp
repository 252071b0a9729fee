#include "iqdesign/presets.hpp"

#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {

Preset make_landete() {
  Preset p;
  p.name = "landete";
  p.model = {ModelKind::P1, {0.0002865, 0.0002117, 0.0000301}};
  p.space = {1.0, 14.0};
  p.extrapolation_point = 21.0;
  Design uniform;
  uniform.points = {1, 2, 3, 4, 5, 6, 10, 14};
  uniform.weights.assign(8, 1.0 / 8.0);
  p.comparison_designs.emplace_back("xi_u", uniform);
  return p;
}

}  // namespace

const Preset& preset(const std::string& name) {
  static const Preset landete = make_landete();
  if (name == "landete") return landete;
  throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"landete"}; }

}  // namespace iqdesign

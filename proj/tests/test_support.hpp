#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "iqdesign/model.hpp"

namespace iqdesign::test {

// Deterministic generators for valid models. Gamma ranges stay inside the
// regime covered by the closed-form theory (P1: gamma > -2; P2: 0 < gamma < 2).
inline ModelSpec random_p1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_scale(-4.0, 1.0);
  std::uniform_real_distribution<double> gamma_dist(-1.8, 6.0);
  const double t0 = std::pow(10.0, log_scale(rng));
  const double t2 = std::pow(10.0, log_scale(rng));
  const double gamma = gamma_dist(rng);
  return {ModelKind::P1, {t0, gamma * std::sqrt(t0 * t2), t2}};
}

inline ModelSpec random_p2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_scale(-2.0, 1.0);
  std::uniform_real_distribution<double> gamma_dist(0.1, 1.9);
  const double t0 = std::pow(10.0, log_scale(rng));
  const double t1 = std::pow(10.0, log_scale(rng));
  const double gamma = gamma_dist(rng);
  const double t2 = 1.0 / (gamma * gamma * t1);
  return {ModelKind::P2, {t0, t1, t2}};
}

inline ModelSpec random_model(std::mt19937_64& rng) {
  return (rng() & 1) ? random_p1(rng) : random_p2(rng);
}

inline ModelSpec landete_model() {
  return {ModelKind::P1, {0.0002865, 0.0002117, 0.0000301}};
}

}  // namespace iqdesign::test

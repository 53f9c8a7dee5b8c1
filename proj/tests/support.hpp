#pragma once

#include <random>

#include "spin7/form_spaces.hpp"
#include "spin7/torsion.hpp"
#include "spin7/verify.hpp"

namespace spin7::testing {

inline Matrix8 random_rotation(std::mt19937_64& rng) { return detail::random_rotation(rng); }

inline TwoForm random_two_form(std::mt19937_64& rng) { return detail::random_two_form(rng); }

inline FourForm random_four_form(std::mt19937_64& rng) { return detail::random_four_form(rng); }

inline TwoForm random_in(TwoFormPart part, std::mt19937_64& rng, const FourForm& phi = standard_phi()) {
  return project_two_form(random_two_form(rng), part, phi);
}

inline ThreeForm random_three_form(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ThreeForm g;
  for (const auto& t : kTriples) {
    const double v = n(rng);
    const int i = t[0], j = t[1], k = t[2];
    g(i, j, k) = v, g(j, k, i) = v, g(k, i, j) = v;
    g(j, i, k) = -v, g(i, k, j) = -v, g(k, j, i) = -v;
  }
  return g;
}

inline TorsionTensor random_torsion(std::mt19937_64& rng, const FourForm& phi = standard_phi()) {
  TorsionTensor t;
  for (int m = 0; m < kDim; ++m) t.slice[m] = random_in(TwoFormPart::seven, rng, phi);
  return t;
}

inline Vector8 unit_vector(int a) {
  Vector8 v{};
  v[a] = 1.0;
  return v;
}

}  // namespace spin7::testing

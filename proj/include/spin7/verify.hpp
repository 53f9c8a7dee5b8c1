#pragma once

// The identity catalogue run by `spin7 verify`: every pointwise identity of
// the algebra and form-space modules, evaluated on a given Cayley form.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spin7/cayley.hpp"
#include "spin7/fiber.hpp"
#include "spin7/form_spaces.hpp"
#include "spin7/forms.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  std::string detail;

  bool passed() const { return residual <= threshold; }  // NaN fails
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::pair<double, int>> lambda_spectrum;  // (eigenvalue, multiplicity)

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }
};

/// Names of all checks, in report order.
inline const std::vector<std::string>& verify_manifest() {
  static const std::vector<std::string> names{
      "phi.entries",          "phi.self_dual",        "hodge.involution",      "contraction.three_index",
      "contraction.two_index",    "contraction.one_index",    "contraction.full",          "pullback.identities",
      "nabla.two_index",      "nabla.one_index",      "nabla.full",            "two_form.idempotent",
      "two_form.orthogonal",  "two_form.complementary", "two_form.eigen_7",    "two_form.eigen_21",
      "two_form.lie_algebra", "lambda.spectrum",      "diamond.rank",          "diamond.kernel",
      "diamond.triple_96",    "three_form.split",     "four_form.resum",       "four_form.eigen",
      "four_form.self_duality", "fiber_basis.orthonormal", "fiber_basis.diamond_norms",
  };
  return names;
}

/// A Cayley form with term `term` (0..13) sign-flipped, for fault injection.
inline PackedFourForm corrupted_phi(int term) {
  PackedFourForm p = standard_phi_packed();
  p[kSortedCayleyTerms.at(term).quad] *= -1.0;
  return p;
}

namespace detail {

inline Matrix8 random_skew(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix8 a;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) a(i, j) = n(rng);
  return a - a.transpose();
}

inline TwoForm random_two_form(std::mt19937_64& rng) { return to_two_form(random_skew(rng, 1.0)); }

/// exp of a random skew matrix, polished by one Newton-Schulz step so that
/// Q^T Q = I to a few ulp (the raw exponential is off by up to ~1e-15, which
/// already shows in |Q.Phi|^2 at the 1e-12 level).
inline Matrix8 random_rotation(std::mt19937_64& rng) {
  const Matrix8 q = random_skew(rng, 1.0).exp();
  return 0.5 * q * (3.0 * Matrix8::Identity() - q.transpose() * q);
}

inline FourForm random_four_form(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  PackedFourForm p;
  for (double& x : p) x = n(rng);
  return unpack(p);
}

}  // namespace detail

/// Runs the catalogue on `phi` with `threshold` for every residual check.
/// Deterministic: the random probes use a fixed seed.
inline VerifyReport verify_identities(const PackedFourForm& phi_packed, double threshold = 1e-11) {
  VerifyReport report;
  auto add = [&](std::string name, double residual, std::string detail = {}) {
    report.checks.push_back({std::move(name), residual, threshold, std::move(detail)});
  };
  auto add_exact = [&](std::string name, double residual, std::string detail = {}) {
    report.checks.push_back({std::move(name), residual, 0.0, std::move(detail)});
  };
  const FourForm phi = unpack(phi_packed);
  std::mt19937_64 rng(20240607);

  // entries: 336 nonzero components, each +-1
  int nonzero = 0;
  double off_unit = 0.0;
  for (double x : phi.components())
    if (x != 0.0) {
      ++nonzero;
      off_unit = std::max(off_unit, std::abs(std::abs(x) - 1.0));
    }
  add_exact("phi.entries", std::abs(nonzero - 336) + off_unit, std::to_string(nonzero) + " nonzero entries");
  add("phi.self_dual", max_abs_difference(hodge_star(phi), phi));
  {
    const FourForm s = detail::random_four_form(rng);
    add("hodge.involution", max_abs_difference(hodge_star(hodge_star(s)), s));
  }

  const IdentityResiduals id = contraction_identity_residuals(phi);
  add("contraction.three_index", id.three_index);
  add("contraction.two_index", id.two_index);
  add("contraction.one_index", id.one_index);
  add("contraction.full", id.full);
  {
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
      const Matrix8 q = detail::random_rotation(rng);
      worst = std::max(worst, contraction_identity_residuals(act(q, phi)).max());
    }
    add("pullback.identities", worst, "4 random rotations");
  }

  // derivative identities with dPhi = T_m <> Phi, T_m in the 7-part
  {
    TorsionTensor t;
    for (int m = 0; m < kDim; ++m)
      t.slice[m] = project_two_form(detail::random_two_form(rng), TwoFormPart::seven, phi);
    const FormGradient d = gradient_from_torsion(t, phi);
    const NablaResiduals nr = nabla_contraction_residuals(d, phi);
    add("nabla.two_index", nr.two_index);
    add("nabla.one_index", nr.one_index);
    add("nabla.full", nr.full);
  }

  {
    const TwoForm b = detail::random_two_form(rng);
    const TwoForm p7 = project_two_form(b, TwoFormPart::seven, phi);
    const TwoForm p21 = project_two_form(b, TwoFormPart::twenty_one, phi);
    add("two_form.idempotent", std::max(max_abs_difference(project_two_form(p7, TwoFormPart::seven, phi), p7),
                                        max_abs_difference(project_two_form(p21, TwoFormPart::twenty_one, phi), p21)));
    add("two_form.orthogonal", std::max(std::abs(p7.dot(p21)), project_two_form(p7, TwoFormPart::twenty_one, phi).max_abs()));
    add("two_form.complementary", max_abs_difference(p7 + p21, b));
    add("two_form.eigen_7", two_form_eigen_residual(p7, TwoFormPart::seven, phi));
    add("two_form.eigen_21", two_form_eigen_residual(p21, TwoFormPart::twenty_one, phi));
    add("two_form.lie_algebra", lie_algebra_identity_residual(p21, phi));
  }

  // Lambda_Phi spectrum {-24:1, -12:7, 4:27, 0:35}
  {
    const Eigen::MatrixXd lm = lambda_matrix(phi);
    Eigen::EigenSolver<Eigen::MatrixXd> es(lm, false);
    std::vector<double> ev;
    double imag = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      ev.push_back(es.eigenvalues()[k].real());
      imag = std::max(imag, std::abs(es.eigenvalues()[k].imag()));
    }
    std::sort(ev.begin(), ev.end());
    for (double v : ev) {
      if (!report.lambda_spectrum.empty() && std::abs(report.lambda_spectrum.back().first - v) < 1e-6)
        ++report.lambda_spectrum.back().second;
      else
        report.lambda_spectrum.push_back({v, 1});
    }
    // expected sorted: -24 x1, -12 x7, 0 x35, 4 x27
    std::vector<double> expected;
    expected.insert(expected.end(), 1, -24.0);
    expected.insert(expected.end(), 7, -12.0);
    expected.insert(expected.end(), 35, 0.0);
    expected.insert(expected.end(), 27, 4.0);
    double worst = imag;
    for (std::size_t k = 0; k < ev.size(); ++k) worst = std::max(worst, std::abs(ev[k] - expected[k]));
    std::string mult;
    for (const auto& [v, m] : report.lambda_spectrum)
      mult += (mult.empty() ? "" : " ") + std::to_string(static_cast<long>(std::lround(v))) + ":" + std::to_string(m);
    add("lambda.spectrum", worst, mult);
  }

  // diamond map End(R^8) -> 4-forms: rank 43, kernel the 21-part
  {
    const Eigen::MatrixXd dm = diamond_matrix(phi);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dm);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k) rank += sv[k] > 1e-8 * sv[0] ? 1 : 0;
    add_exact("diamond.rank", std::abs(rank - 43), "rank " + std::to_string(rank) + ", kernel " + std::to_string(64 - rank));
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const TwoForm b = project_two_form(detail::random_two_form(rng), TwoFormPart::twenty_one, phi);
      worst = std::max(worst, diamond(b, phi).max_abs());
    }
    add("diamond.kernel", worst);
    const TwoForm b7 = project_two_form(detail::random_two_form(rng), TwoFormPart::seven, phi);
    add("diamond.triple_96", max_abs_difference(triple_contract(diamond(b7, phi), phi), 96.0 * b7));
  }

  {
    ThreeForm g;
    std::normal_distribution<double> n(0.0, 1.0);
    for (const auto& t : kTriples) {
      const double v = n(rng);
      const int i = t[0], j = t[1], k = t[2];
      g(i, j, k) = v, g(j, k, i) = v, g(k, i, j) = v;
      g(j, i, k) = -v, g(i, k, j) = -v, g(k, j, i) = -v;
    }
    const ThreeFormSplit split = decompose_three_form(g, phi);
    const ThreeFormSplit again = decompose_three_form(interior(split.vector, phi), phi);
    double worst = max_abs_difference(interior(split.vector, phi) + split.rest, g);
    for (double x : contract_three_form(split.rest, phi)) worst = std::max(worst, std::abs(x));
    for (int l = 0; l < kDim; ++l) worst = std::max(worst, std::abs(again.vector[l] - split.vector[l]));
    add("three_form.split", worst);
  }

  {
    const FourForm s = detail::random_four_form(rng);
    const FourFormSplit split = decompose_four_form(s, phi);
    FourForm sum = split.parts[0];
    for (int p = 1; p < 4; ++p) sum += split.parts[p];
    add("four_form.resum", max_abs_difference(sum, s));
    double eig = 0.0, dual = 0.0;
    for (int p = 0; p < 4; ++p) {
      eig = std::max(eig, max_abs_difference(lambda_phi(split.parts[p], phi), kLambdaEigenvalues[p] * split.parts[p]));
      const double sign = p == 3 ? -1.0 : 1.0;  // 1 + 7 + 27 self-dual, 35 anti-self-dual
      dual = std::max(dual, max_abs_difference(hodge_star(split.parts[p]), sign * split.parts[p]));
    }
    add("four_form.eigen", eig);
    add("four_form.self_duality", dual);
  }

  {
    double ortho = 0.0, norms = 0.0;
    try {
      const Omega27Basis basis = omega27_basis(phi);
      std::vector<FourForm> images;
      for (int n = 0; n < kFiberDim; ++n) {
        images.push_back(diamond(basis.element[n], phi));
        ortho = std::max(ortho, two_form_eigen_residual(basis.element[n], TwoFormPart::seven, phi));
        for (int m = 0; m < kFiberDim; ++m)
          ortho = std::max(ortho, std::abs(basis.element[n].dot(basis.element[m]) - (n == m ? 1.0 : 0.0)));
      }
      for (int n = 0; n < kFiberDim; ++n)
        for (int m = 0; m < kFiberDim; ++m)
          norms = std::max(norms, std::abs(images[n].dot(images[m]) - (n == m ? 384.0 : 0.0)));
      add("fiber_basis.orthonormal", ortho);
      add("fiber_basis.diamond_norms", norms, "|B <> Phi|^2 = 384");
    } catch (const std::exception& e) {
      add("fiber_basis.orthonormal", std::numeric_limits<double>::infinity(), e.what());
      add("fiber_basis.diamond_norms", std::numeric_limits<double>::infinity(), e.what());
    }
  }
  return report;
}

}  // namespace spin7

#include <gtest/gtest.h>

#include <random>

#include "spin7/cayley.hpp"
#include "spin7/forms.hpp"
#include "support.hpp"

using namespace spin7;
using namespace spin7::testing;

TEST(StandardPhi, ListedTerms) {
  const FourForm phi = standard_phi();
  EXPECT_EQ(phi(0, 1, 2, 3), 1.0);
  EXPECT_EQ(phi(0, 1, 6, 7), -1.0);
  EXPECT_EQ(phi(0, 1, 2, 4), 0.0);
  EXPECT_EQ(phi(1, 0, 2, 3), -1.0);
  EXPECT_EQ(phi(3, 2, 1, 0), 1.0);
}

TEST(StandardPhi, SumOfSquaresIs336) {
  const FourForm phi = standard_phi();
  EXPECT_EQ(phi.norm_squared(), 336.0);
  int nonzero = 0;
  for (double x : phi.components()) {
    if (x == 0.0) continue;
    ++nonzero;
    EXPECT_EQ(std::abs(x), 1.0);
  }
  EXPECT_EQ(nonzero, 14 * 24);
}

TEST(StandardPhi, ExactlyAntisymmetric) {
  EXPECT_EQ(antisymmetry_violation(standard_phi()).magnitude, 0.0);
}

TEST(StandardPhi, TermsShareZeroOrTwoIndices) {
  for (int a = 0; a < 14; ++a)
    for (int b = a + 1; b < 14; ++b) {
      int shared = 0;
      for (int i : kCayleyTerms[a].indices)
        for (int j : kCayleyTerms[b].indices) shared += i == j;
      EXPECT_TRUE(shared == 0 || shared == 2) << a << " " << b;
    }
}

TEST(HodgeStar, FixesStandardPhi) { EXPECT_EQ(max_abs_difference(hodge_star(standard_phi()), standard_phi()), 0.0); }

TEST(HodgeStar, ComplementaryMonomial) {
  const FourForm s = four_form_from_monomial({0, 1, 2, 3}, 1.0);
  const FourForm star = hodge_star(s);
  EXPECT_EQ(star(4, 5, 6, 7), 1.0);
  EXPECT_EQ(star.norm_squared(), 24.0);
  // dx^{0246}: complement 1357, sign of the permutation (0,2,4,6,1,3,5,7)
  const FourForm t = hodge_star(four_form_from_monomial({0, 2, 4, 6}, 1.0));
  EXPECT_EQ(t(1, 3, 5, 7), 1.0);
}

TEST(HodgeStar, Involution) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const FourForm s = random_four_form(rng);
    EXPECT_LE(max_abs_difference(hodge_star(hodge_star(s)), s), 1e-14);
  }
}

TEST(HodgeStar, PackedMatchesDense) {
  std::mt19937_64 rng(2);
  const FourForm s = random_four_form(rng);
  const PackedFourForm p = hodge_star(pack(s));
  EXPECT_LE(max_abs_difference(unpack(p), hodge_star(s)), 1e-15);
}

TEST(Packing, RoundTripIsExact) {
  std::mt19937_64 rng(3);
  const FourForm s = random_four_form(rng);
  EXPECT_EQ(unpack(pack(s)), s);
}

TEST(Antisymmetry, ReportsOffendingSlots) {
  FourForm s = standard_phi();
  s(0, 1, 2, 3) = 0.5;  // breaks the swap partners of this one entry
  const AntisymmetryViolation v = antisymmetry_violation(s);
  EXPECT_DOUBLE_EQ(v.magnitude, 0.5);
  std::array<int, 4> sorted = v.index;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::array<int, 4>{0, 1, 2, 3}));
  EXPECT_LT(v.first, v.second);
}

TEST(Antisymmetry, ProjectionFixesForms) {
  std::mt19937_64 rng(4);
  const FourForm s = random_four_form(rng);
  EXPECT_LE(max_abs_difference(antisymmetrize(s), s), 1e-14);
}

TEST(ContractionIdentities, StandardForm) {
  const IdentityResiduals r = contraction_identity_residuals(standard_phi());
  EXPECT_LE(r.three_index, 1e-13);
  EXPECT_LE(r.two_index, 1e-13);
  EXPECT_LE(r.one_index, 1e-13);
  EXPECT_LE(r.full, 1e-13);
}

TEST(ContractionIdentities, RandomPullbacks) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const FourForm p = act(random_rotation(rng), standard_phi());
    EXPECT_LE(contraction_identity_residuals(p).max(), 1e-12);
    EXPECT_LE(max_abs_difference(hodge_star(p), p), 1e-12);
  }
}

TEST(ContractionIdentities, DoubledFormBreaksTheFullContraction) {
  const IdentityResiduals r = contraction_identity_residuals(2.0 * standard_phi());
  EXPECT_DOUBLE_EQ(r.full, 1008.0);
}

TEST(ContractionIdentities, SignFlippedTermBreaksTheQuadraticIdentities) {
  const IdentityResiduals r = contraction_identity_residuals(unpack(corrupted_phi(3)));
  EXPECT_GT(r.two_index, 1.0);
  EXPECT_GT(r.three_index, 1.0);
  // no two Cayley quads share three indices, so sign flips cannot disturb 42 g
  EXPECT_EQ(r.one_index, 0.0);
  EXPECT_EQ(r.full, 0.0);
}

TEST(NablaIdentities, ZeroDerivative) {
  const FormGradient zero(kDim);
  const NablaResiduals r = nabla_contraction_residuals(zero, standard_phi());
  EXPECT_EQ(r.two_index, 0.0);
  EXPECT_EQ(r.one_index, 0.0);
  EXPECT_EQ(r.full, 0.0);
}

TEST(NablaIdentities, DiamondGradients) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 3; ++k) {
    const FourForm phi = act(random_rotation(rng), standard_phi());
    const FormGradient d = gradient_from_torsion(random_torsion(rng, phi), phi);
    EXPECT_LE(nabla_contraction_residuals(d, phi).max(), 1e-12);
  }
}

TEST(NablaIdentities, FormItselfIsNotADerivative) {
  const FormGradient d(kDim, standard_phi());
  EXPECT_DOUBLE_EQ(nabla_contraction_residuals(d, standard_phi()).full, 336.0);
}

TEST(NablaIdentities, MatchFiniteDifferenceOfPullbackFamily) {
  // d/dt of the 2-index identity along exp(tA).Phi, A in the 7-part,
  // computed by central differences: the derivative identities must agree
  std::mt19937_64 rng(7);
  const FourForm phi = standard_phi();
  const TwoForm a = random_in(TwoFormPart::seven, rng);
  const FourForm exact = diamond(a, phi);
  const double eps = 1e-5;
  const Matrix8 gen = to_matrix(a);
  const FourForm plus = act((eps * gen).exp(), phi);
  const FourForm minus = act((-eps * gen).exp(), phi);
  const FourForm fd = (1.0 / (2.0 * eps)) * (plus - minus);
  EXPECT_LE(max_abs_difference(fd, exact), 1e-7);
  const FormGradient d(kDim, fd);
  EXPECT_LE(nabla_contraction_residuals(d, phi).max(), 1e-7);
}

TEST(Action, PackedMatchesDense) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 5; ++k) {
    const Matrix8 q = random_rotation(rng);
    EXPECT_LE(max_abs_difference(unpack(act_on_standard(q)), act(q, standard_phi())), 1e-14);
  }
}

TEST(Action, IdentityRotation) {
  EXPECT_EQ(act_on_standard(Matrix8::Identity()), standard_phi_packed());
}

TEST(Action, DerivativeIsDiamond) {
  std::mt19937_64 rng(9);
  Endomorphism a;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < Endomorphism::size; ++i) a[i] = n(rng);
  Matrix8 m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m(i, j) = a(i, j);
  const double eps = 1e-5;
  const FourForm fd = (1.0 / (2.0 * eps)) * (act((eps * m).exp(), standard_phi()) - act((-eps * m).exp(), standard_phi()));
  EXPECT_LE(max_abs_difference(fd, diamond(a, standard_phi())), 1e-7);
}

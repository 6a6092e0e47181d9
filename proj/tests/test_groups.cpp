#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace gw;

namespace {

template <class G>
void check_representations(const G& group, int band, int samples) {
  std::mt19937_64 rng(7);
  for (int s = 0; s < samples; ++s) {
    auto a = group.random(rng), b = group.random(rng);
    for (const auto& ir : group.irreps(band)) {
      Mat da = group.irrep_matrix(ir.label, a), db = group.irrep_matrix(ir.label, b);
      Mat dab = group.irrep_matrix(ir.label, group.multiply(a, b));
      EXPECT_LT(max_abs(da * db - dab), 1e-12) << group.id() << " label " << ir.label;
      EXPECT_LT(max_abs(da * da.adjoint() - Mat::Identity(ir.dim, ir.dim)), 1e-12);
      EXPECT_LT(max_abs(group.irrep_matrix(ir.label, group.inverse(a)) - da.adjoint()), 1e-12);
    }
  }
}

template <class G>
void check_orthogonality(const G& group, int band) {
  auto rule = group.haar_quadrature(band);
  auto irreps = group.irreps(band);
  for (const auto& a : irreps)
    for (const auto& b : irreps) {
      if (group.degree(a.label) + group.degree(b.label) > band && !group.is_finite()) continue;
      for (int i = 0; i < a.dim * a.dim; ++i)
        for (int k = 0; k < b.dim * b.dim; ++k) {
          cplx s = 0.0;
          for (std::size_t n = 0; n < rule.size(); ++n)
            s += rule.weights[n] * group.irrep_matrix(a.label, rule.nodes[n])(i / a.dim, i % a.dim) *
                 std::conj(group.irrep_matrix(b.label, rule.nodes[n])(k / b.dim, k % b.dim));
          double expected = (a.label == b.label && i == k) ? 1.0 / a.dim : 0.0;
          EXPECT_NEAR(std::abs(s - expected), 0.0, 1e-12) << group.id() << " " << a.label << " " << b.label;
        }
    }
}

template <class G>
void check_square_root(const G& group, int samples) {
  std::mt19937_64 rng(11);
  for (int s = 0; s < samples; ++s) {
    auto g = group.random(rng);
    auto r = group.sqrt0(g);
    EXPECT_FALSE(r.cut);
    EXPECT_LT(group.distance(group.multiply(r.root, r.root), g), 1e-12);
    auto g1 = group.random(rng), g2 = group.random(rng);
    auto mid = midpoint(group, g1, g2).root;
    EXPECT_LT(group.distance(group.multiply(mid, group.multiply(group.inverse(g1), mid)), g2), 1e-12);
  }
}

// intertwining (D1 x D2) C = C D3 with C the isometry, and completeness of the blocks
template <class G>
void check_cg(const G& group, int l1, int l2) {
  auto blocks = group.clebsch_gordan(l1, l2);
  const int n = group.dim(l1) * group.dim(l2);
  Mat completeness = Mat::Zero(n, n);
  std::mt19937_64 rng(3);
  auto g = group.random(rng);
  Mat d12 = kron(group.irrep_matrix(l1, g), group.irrep_matrix(l2, g));
  for (const auto& b : blocks) {
    Mat iso = b.coeffs.conjugate();
    completeness += iso * iso.adjoint();
    EXPECT_LT(max_abs(d12 * iso - iso * group.irrep_matrix(b.label, g)), 1e-10) << l1 << " " << l2 << " " << b.label;
    EXPECT_LT(max_abs(iso.adjoint() * iso - Mat::Identity(iso.cols(), iso.cols())), 1e-10);
  }
  EXPECT_LT(max_abs(completeness - Mat::Identity(n, n)), 1e-10);
}

}  // namespace

TEST(Groups, RepresentationsAreUnitaryHomomorphisms) {
  check_representations(Circle{}, 5, 5);
  check_representations(SU2{}, 6, 5);
  check_representations(Cyclic{7}, 0, 5);
  check_representations(Frobenius21{}, 0, 10);
}

TEST(Groups, Su2MatricesMatchEulerAngleFormula) {
  SU2 g;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2 * pi);
  for (int s = 0; s < 5; ++s) {
    double a = u(rng), b = u(rng) / 2, c = u(rng);
    auto q = g.multiply(g.multiply(SU2::qz(a), SU2::qy(b)), SU2::qz(c));
    for (int l = 0; l <= 8; ++l) EXPECT_LT(max_abs(g.irrep_matrix(l, q) - oracle::euler_d(l, a, b, c)), 1e-12);
  }
}

TEST(Groups, Su2MatricesMatchExponentialOfGenerators) {
  SU2 g;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int s = 0; s < 5; ++s) {
    RVec a(3);
    a << n(rng), n(rng), n(rng);
    auto q = g.exp(a);
    for (int l = 0; l <= 6; ++l) {
      auto js = g.lie_generators(l);
      Mat gen = -I * (a(0) * js[0] + a(1) * js[1] + a(2) * js[2]);
      EXPECT_LT(max_abs(g.irrep_matrix(l, q) - oracle::expm(gen)), 1e-11);
    }
    RVec back = g.log(q);
    EXPECT_LT(g.distance(g.exp(back), q), 1e-12);
  }
}

TEST(Groups, Su2GeneratorCommutators) {
  SU2 g;
  for (int l = 0; l <= 4; ++l) {
    auto js = g.lie_generators(l);
    EXPECT_LT(max_abs(js[0] * js[1] - js[1] * js[0] - I * js[2]), 1e-12);
    EXPECT_LT(max_abs(js[1] * js[2] - js[2] * js[1] - I * js[0]), 1e-12);
  }
}

TEST(Groups, AdjointMatrixRotatesGenerators) {
  SU2 g;
  std::mt19937_64 rng(8);
  auto q = g.random(rng);
  Mat d = g.irrep_matrix(1, q);
  auto js = g.lie_generators(1);
  RMat r = g.adjoint_matrix(q);
  for (int k = 0; k < 3; ++k) {
    Mat lhs = d * js[k] * d.adjoint();
    Mat rhs = Mat::Zero(2, 2);
    for (int s = 0; s < 3; ++s) rhs += r(s, k) * js[s];
    EXPECT_LT(max_abs(lhs - rhs), 1e-12);
  }
}

TEST(Groups, HaarQuadratureOrthogonality) {
  check_orthogonality(Circle{}, 8);
  check_orthogonality(SU2{}, 6);
  check_orthogonality(Cyclic{5}, 0);
  check_orthogonality(Frobenius21{}, 0);
}

TEST(Groups, HaarQuadratureIsInvariant) {
  SU2 g;
  auto rule = g.haar_quadrature(6);
  std::mt19937_64 rng(12);
  auto g0 = g.random(rng);
  std::vector<std::pair<int, Mat>> coeffs;
  for (int l = 0; l <= 6; ++l) coeffs.push_back({l, oracle::random_matrix(l + 1, rng)});
  auto f = [&](const SU2::Element& x) {
    cplx s = 0.0;
    for (auto& [l, c] : coeffs) s += (c.transpose() * g.irrep_matrix(l, x)).trace();
    return s;
  };
  cplx a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    a += rule.weights[k] * f(rule.nodes[k]);
    b += rule.weights[k] * f(g.multiply(g0, rule.nodes[k]));
  }
  EXPECT_LT(std::abs(a - b), 1e-11);
  EXPECT_LT(std::abs(a - coeffs[0].second(0, 0)), 1e-11);
}

TEST(Groups, ReproducingKernelAtBandLimit) {
  SU2 g;
  const int band = 3;
  auto rule = g.haar_quadrature(2 * band);
  std::mt19937_64 rng(13);
  std::vector<Mat> coeffs;
  for (int l = 0; l <= band; ++l) coeffs.push_back(oracle::random_matrix(l + 1, rng));
  auto f = [&](const SU2::Element& x) {
    cplx s = 0.0;
    for (int l = 0; l <= band; ++l) s += (coeffs[l].transpose() * g.irrep_matrix(l, x)).trace();
    return s;
  };
  for (int t = 0; t < 3; ++t) {
    auto g1 = g.random(rng);
    cplx s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      cplx kern = 0.0;
      auto rel = g.multiply(g.inverse(g1), rule.nodes[k]);
      for (int l = 0; l <= band; ++l) kern += (l + 1.0) * g.irrep_matrix(l, rel).trace();
      s += rule.weights[k] * std::conj(kern) * f(rule.nodes[k]);
    }
    EXPECT_LT(std::abs(s - f(g1)), 1e-10);
  }
}

TEST(Groups, PrincipalSquareRoots) {
  check_square_root(Circle{}, 10);
  check_square_root(SU2{}, 10);
  check_square_root(Cyclic{9}, 10);
  check_square_root(Frobenius21{}, 21);
  SU2 g;
  auto r = g.sqrt0({-1.0, 0.0, 0.0, 0.0});
  EXPECT_TRUE(r.cut);
  EXPECT_LT(g.distance(g.multiply(r.root, r.root), {-1.0, 0.0, 0.0, 0.0}), 1e-14);
  EXPECT_TRUE(Circle{}.sqrt0(pi).cut);
  for (int k = 0; k < 21; ++k) {
    Frobenius21 f;
    EXPECT_EQ(f.multiply(f.sqrt0(k).root, f.sqrt0(k).root), k);
  }
}

TEST(Groups, PrincipalRuleIntegratesOverTheGroup) {
  SU2 g;
  std::mt19937_64 rng(14);
  const int deg = 6;
  std::vector<Mat> coeffs;
  for (int l = 0; l <= deg; ++l) coeffs.push_back(oracle::random_matrix(l + 1, rng));
  auto f = [&](const SU2::Element& x) {
    cplx s = 0.0;
    for (int l = 0; l <= deg; ++l) s += (coeffs[l].transpose() * g.irrep_matrix(l, x)).trace();
    return s;
  };
  auto rule = g.principal_quadrature(2 * deg + 2);
  cplx s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(g.multiply(rule.nodes[k], rule.nodes[k]));
  EXPECT_LT(std::abs(s - coeffs[0](0, 0)), 1e-12);

  Circle c;
  auto crule = c.principal_quadrature(10);
  cplx t = 0.0;
  for (std::size_t k = 0; k < crule.size(); ++k)
    t += crule.weights[k] * (2.0 + std::exp(I * 3.0 * c.multiply(crule.nodes[k], crule.nodes[k])));
  EXPECT_LT(std::abs(t - 2.0), 1e-13);
}

TEST(Groups, PrincipalJacobianAgainstAdaptiveClassIntegral) {
  SU2 g;
  auto rule = g.principal_quadrature(40);
  std::vector<std::function<double(double)>> fs = {
      [](double p) { return std::cos(p) * std::cos(p); },
      [](double p) { return std::exp(std::cos(p)); },
      [](double p) { return std::sin(3 * p) / std::sin(p); },
      [](double p) { return 1.0 / (2.0 + std::cos(p)); },
      [](double p) { return std::pow(std::cos(p / 2), 6); },
  };
  for (const auto& f : fs) {
    double exact = oracle::adaptive([&](double p) { return 2.0 / pi * std::sin(p) * std::sin(p) * f(p); }, 0.0, pi);
    double q = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      auto x = g.multiply(rule.nodes[k], rule.nodes[k]);
      q += rule.weights[k] * f(std::acos(std::clamp(x[0], -1.0, 1.0)));
    }
    EXPECT_NEAR(q, exact, 1e-9);
  }
}

TEST(Groups, ClebschGordanIntertwines) {
  SU2 g;
  for (int l1 = 0; l1 <= 3; ++l1)
    for (int l2 = 0; l2 <= 3; ++l2) check_cg(g, l1, l2);
  Frobenius21 f;
  for (int l1 = 0; l1 < 5; ++l1)
    for (int l2 = 0; l2 < 5; ++l2) check_cg(f, l1, l2);
  Cyclic z(7);
  check_cg(z, 3, 5);
}

TEST(Groups, RacahAgreesWithProjectionUpToPhase) {
  SU2 g;
  auto rule = g.haar_quadrature(12);
  for (int l1 = 0; l1 <= 2; ++l1)
    for (int l2 = 0; l2 <= 2; ++l2) {
      auto racah = g.clebsch_gordan(l1, l2);
      auto proj = projection_clebsch_gordan(g, l1, l2, g.irreps(l1 + l2), rule);
      ASSERT_EQ(racah.size(), proj.size());
      for (std::size_t b = 0; b < racah.size(); ++b) {
        Mat pr = racah[b].coeffs * racah[b].coeffs.adjoint();
        Mat pp = proj[b].coeffs * proj[b].coeffs.adjoint();
        EXPECT_LT(max_abs(pr - pp), 1e-10);
      }
    }
}

TEST(Groups, ProductOfMatrixElementsExpandsWithCSymbols) {
  SU2 g;
  std::mt19937_64 rng(15);
  auto x = g.random(rng);
  const int l1 = 2, l2 = 1;
  auto blocks = g.clebsch_gordan(l1, l2);
  for (int a1 = 0; a1 <= l1; ++a1)
    for (int b1 = 0; b1 <= l1; ++b1)
      for (int a2 = 0; a2 <= l2; ++a2)
        for (int b2 = 0; b2 <= l2; ++b2) {
          cplx lhs = g.irrep_matrix(l1, x)(a1, b1) * g.irrep_matrix(l2, x)(a2, b2);
          cplx rhs = 0.0;
          for (const auto& b : blocks) {
            Mat d = g.irrep_matrix(b.label, x);
            for (int a3 = 0; a3 <= b.label; ++a3)
              for (int b3 = 0; b3 <= b.label; ++b3)
                rhs += c_symbol(blocks, l2 + 1, b.label, a1, a2, a3, b1, b2, b3) * d(a3, b3);
          }
          EXPECT_LT(std::abs(lhs - rhs), 1e-12);
        }
}

#ifndef GROUPWIGNER_CIRCLE_HPP
#define GROUPWIGNER_CIRCLE_HPP

#include "core.hpp"

#include <cmath>
#include <random>

namespace gw {

// U(1) as angles in (-pi, pi]; irrep m is exp(i m theta)
class Circle {
 public:
  using Element = double;

  std::string id() const { return "circle"; }
  bool is_finite() const { return false; }
  int order() const { return 0; }
  int lie_dimension() const { return 1; }

  static double canonical(double t) {
    double r = std::remainder(t, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
  }

  Element identity() const { return 0.0; }
  Element multiply(Element a, Element b) const { return canonical(a + b); }
  Element inverse(Element a) const { return canonical(-a); }
  double distance(Element a, Element b) const { return std::abs(canonical(a - b)); }

  std::vector<Irrep> irreps(int band) const {
    std::vector<Irrep> out;
    for (int m = -band; m <= band; ++m) out.push_back({m, 1});
    return out;
  }
  int dim(int) const { return 1; }
  int degree(int label) const { return std::abs(label); }
  int degree_of_band(int band) const { return band; }
  int product_degree(int a, int b) const { return a + b; }

  Mat irrep_matrix(int label, Element t) const {
    Mat d(1, 1);
    d(0, 0) = std::exp(I * (label * t));
    return d;
  }

  SqrtResult<Element> sqrt0(Element t) const {
    double c = canonical(t);
    return {c / 2.0, std::abs(c - pi) < 1e-15};
  }

  Element principal_representative(Element h) const {
    double r = std::remainder(h, pi);
    if (r <= -pi / 2) r += pi;
    return r;
  }
  double principal_jacobian(Element) const { return 2.0; }

  QuadratureRule<Element> haar_quadrature(int band) const {
    QuadratureRule<Element> q;
    int n = std::max(band, 0) + 1;
    for (int k = 0; k < n; ++k) {
      q.nodes.push_back(canonical(2.0 * pi * k / n));
      q.weights.push_back(1.0 / n);
    }
    q.exactness = band;
    q.id = "circle-haar:" + std::to_string(band);
    return q;
  }

  // nodes h in (-pi/2, pi/2], weights already include the Jacobian
  QuadratureRule<Element> principal_quadrature(int degree) const {
    QuadratureRule<Element> q;
    std::vector<double> x, w;
    gauss_legendre(2 * std::max(degree, 0) + 24, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      q.nodes.push_back(x[i] * pi / 2);
      q.weights.push_back(w[i] / 2.0);
    }
    q.exactness = -2;
    q.id = "circle-principal:" + std::to_string(degree);
    return q;
  }

  std::vector<CGBlock> clebsch_gordan(int l1, int l2) const {
    CGBlock b{l1 + l2, 0, Mat::Ones(1, 1)};
    return {b};
  }

  std::vector<Mat> lie_generators(int label) const {
    Mat j(1, 1);
    j(0, 0) = -static_cast<double>(label);
    return {j};
  }
  RMat adjoint_matrix(Element) const { return RMat::Identity(1, 1); }
  RMat structure_constants() const { return RMat::Zero(1, 1); }
  Element exp(const RVec& a) const { return canonical(a(0)); }
  RVec log(Element t) const { return RVec::Constant(1, canonical(t)); }

  template <class Rng>
  Element random(Rng& rng) const {
    std::uniform_real_distribution<double> u(-pi, pi);
    return u(rng);
  }

  std::string label_name(int label) const { return std::to_string(label); }
};

}  // namespace gw

#endif

#ifndef GROUPWIGNER_FINITE_HPP
#define GROUPWIGNER_FINITE_HPP

#include "core.hpp"

#include <random>

namespace gw {

namespace detail {

template <class G>
QuadratureRule<int> element_rule(const G& g, const std::string& id) {
  QuadratureRule<int> q;
  for (int k = 0; k < g.order(); ++k) {
    q.nodes.push_back(k);
    q.weights.push_back(1.0 / g.order());
  }
  q.exactness = -1;
  q.id = id;
  return q;
}

template <class G>
QuadratureRule<int> principal_rule(const G& g, const std::string& id) {
  QuadratureRule<int> q = element_rule(g, id);
  for (auto& x : q.nodes) x = g.sqrt0(x).root;
  return q;
}

}  // namespace detail

// Z_n with odd n; elements 0..n-1, irrep j is exp(2 pi i j k / n)
class Cyclic {
 public:
  using Element = int;

  explicit Cyclic(int n = 3) : n_(n) {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("cyclic group order must be odd");
  }

  std::string id() const { return "cyclic:" + std::to_string(n_); }
  bool is_finite() const { return true; }
  int order() const { return n_; }

  Element identity() const { return 0; }
  Element multiply(Element a, Element b) const { return (a + b) % n_; }
  Element inverse(Element a) const { return (n_ - a) % n_; }
  double distance(Element a, Element b) const { return a == b ? 0.0 : 1.0; }

  std::vector<Irrep> irreps(int = 0) const {
    std::vector<Irrep> out;
    for (int j = 0; j < n_; ++j) out.push_back({j, 1});
    return out;
  }
  int dim(int) const { return 1; }
  int degree(int) const { return 0; }
  int degree_of_band(int) const { return 0; }
  int product_degree(int, int) const { return 0; }

  Mat irrep_matrix(int label, Element k) const {
    Mat d(1, 1);
    d(0, 0) = std::exp(I * (2.0 * pi * ((static_cast<long>(label) * k) % n_) / n_));
    return d;
  }

  SqrtResult<Element> sqrt0(Element k) const {
    return {static_cast<int>((static_cast<long>(k) * (n_ + 1) / 2) % n_), false};
  }
  Element principal_representative(Element h) const { return h; }

  QuadratureRule<Element> haar_quadrature(int = 0) const { return detail::element_rule(*this, id() + ":elements"); }
  QuadratureRule<Element> principal_quadrature(int = 0) const {
    return detail::principal_rule(*this, id() + ":principal");
  }

  std::vector<CGBlock> clebsch_gordan(int l1, int l2) const { return {{(l1 + l2) % n_, 0, Mat::Ones(1, 1)}}; }

  template <class Rng>
  Element random(Rng& rng) const {
    return std::uniform_int_distribution<int>(0, n_ - 1)(rng);
  }

  std::string label_name(int label) const { return std::to_string(label); }

 private:
  int n_;
};

// Z_7 x| Z_3 with (t1, s1)(t2, s2) = (t1 + 2^s1 t2, s1 + s2); element index is 3 t + s
class Frobenius21 {
 public:
  using Element = int;

  std::string id() const { return "frobenius21"; }
  bool is_finite() const { return true; }
  int order() const { return 21; }

  static int make(int t, int s) { return 3 * (((t % 7) + 7) % 7) + (((s % 3) + 3) % 3); }
  static int t_of(int e) { return e / 3; }
  static int s_of(int e) { return e % 3; }

  Element identity() const { return 0; }
  Element multiply(Element a, Element b) const {
    static const int pow2[3] = {1, 2, 4};
    return make(t_of(a) + pow2[s_of(a)] * t_of(b), s_of(a) + s_of(b));
  }
  Element inverse(Element a) const {
    for (int b = 0; b < 21; ++b)
      if (multiply(a, b) == 0) return b;
    return 0;
  }
  double distance(Element a, Element b) const { return a == b ? 0.0 : 1.0; }

  // labels 0, 1, 2: one-dimensional; 3, 4: three-dimensional
  std::vector<Irrep> irreps(int = 0) const { return {{0, 1}, {1, 1}, {2, 1}, {3, 3}, {4, 3}}; }
  int dim(int label) const { return label < 3 ? 1 : 3; }
  int degree(int) const { return 0; }
  int degree_of_band(int) const { return 0; }
  int product_degree(int, int) const { return 0; }

  Mat irrep_matrix(int label, Element e) const {
    const int t = t_of(e), s = s_of(e);
    if (label < 3) {
      Mat d(1, 1);
      d(0, 0) = std::exp(I * (2.0 * pi * ((label * s) % 3) / 3.0));
      return d;
    }
    const int u = label == 3 ? 1 : 3;
    static const int pow2[3] = {1, 2, 4};
    Mat delta = Mat::Zero(3, 3), p = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) delta(i, i) = std::exp(I * (2.0 * pi * ((pow2[i] * u * t) % 7) / 7.0));
    for (int i = 0; i < 3; ++i) p((i + 2) % 3, i) = 1.0;
    Mat ps = Mat::Identity(3, 3);
    for (int k = 0; k < s; ++k) ps = ps * p;
    return delta * ps;
  }

  SqrtResult<Element> sqrt0(Element e) const {
    Element r = identity();
    for (int k = 0; k < 11; ++k) r = multiply(r, e);
    return {r, false};
  }
  Element principal_representative(Element h) const { return h; }

  QuadratureRule<Element> haar_quadrature(int = 0) const { return detail::element_rule(*this, id() + ":elements"); }
  QuadratureRule<Element> principal_quadrature(int = 0) const {
    return detail::principal_rule(*this, id() + ":principal");
  }

  std::vector<CGBlock> clebsch_gordan(int l1, int l2) const {
    return projection_clebsch_gordan(*this, l1, l2, irreps(), haar_quadrature());
  }

  template <class Rng>
  Element random(Rng& rng) const {
    return std::uniform_int_distribution<int>(0, 20)(rng);
  }

  std::string label_name(int label) const { return std::to_string(label); }
};

}  // namespace gw

#endif

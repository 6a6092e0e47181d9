#ifndef GROUPWIGNER_CORE_HPP
#define GROUPWIGNER_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gw {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Irrep {
  int label = 0;
  int dim = 1;
  bool operator==(const Irrep&) const = default;
};

template <class E>
struct QuadratureRule {
  std::vector<E> nodes;
  std::vector<double> weights;
  int exactness = -1;  // -1: exact for every band
  std::string id;
  std::size_t size() const { return nodes.size(); }
  bool exact_for(int degree) const { return exactness < 0 || degree <= exactness; }
};

template <class E>
struct SqrtResult {
  E root;
  bool cut = false;
};

// coeffs(i1 * dim2 + i2, i3) is the conjugate of the isometry
struct CGBlock {
  int label = 0;
  int multiplicity = 0;
  Mat coeffs;
};

class BandError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InsufficientBand : public std::runtime_error {
 public:
  InsufficientBand(const std::string& what, int required)
      : std::runtime_error(what + " (required band " + std::to_string(required) + ")"), required_(required) {}
  int required() const { return required_; }

 private:
  int required_;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class G>
concept Group = requires(const G& g, typename G::Element e, int label) {
  { g.id() } -> std::convertible_to<std::string>;
  { g.is_finite() } -> std::same_as<bool>;
  { g.identity() } -> std::same_as<typename G::Element>;
  { g.multiply(e, e) } -> std::same_as<typename G::Element>;
  { g.inverse(e) } -> std::same_as<typename G::Element>;
  { g.distance(e, e) } -> std::convertible_to<double>;
  { g.irreps(label) } -> std::same_as<std::vector<Irrep>>;
  { g.dim(label) } -> std::same_as<int>;
  { g.degree(label) } -> std::same_as<int>;
  { g.irrep_matrix(label, e) } -> std::same_as<Mat>;
  { g.sqrt0(e) } -> std::same_as<SqrtResult<typename G::Element>>;
  { g.haar_quadrature(label) } -> std::same_as<QuadratureRule<typename G::Element>>;
  { g.principal_quadrature(label) } -> std::same_as<QuadratureRule<typename G::Element>>;
  { g.clebsch_gordan(label, label) } -> std::same_as<std::vector<CGBlock>>;
};

template <class G>
concept LieGroup = Group<G> && requires(const G& g, typename G::Element e, int label, const RVec& a) {
  { g.lie_dimension() } -> std::same_as<int>;
  { g.lie_generators(label) } -> std::same_as<std::vector<Mat>>;
  { g.adjoint_matrix(e) } -> std::same_as<RMat>;
  { g.exp(a) } -> std::same_as<typename G::Element>;
  { g.log(e) } -> std::same_as<RVec>;
};

template <Group G>
SqrtResult<typename G::Element> midpoint(const G& group, const typename G::Element& g1,
                                         const typename G::Element& g2) {
  auto s = group.sqrt0(group.multiply(group.inverse(g1), g2));
  return {group.multiply(g1, s.root), s.cut};
}

inline int label_index(const std::vector<Irrep>& irreps, int label) {
  for (std::size_t i = 0; i < irreps.size(); ++i)
    if (irreps[i].label == label) return static_cast<int>(i);
  return -1;
}

inline std::vector<double> factorials(int n) {
  std::vector<double> f(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) f[i] = f[i - 1] * i;
  return f;
}

// nodes and weights on [-1, 1]
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::size_t t = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c < t; ++c) {
    pool.emplace_back([&, c] {
      for (std::size_t i = c * n / t; i < (c + 1) * n / t; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// orthonormal basis of the column span, Gram-Schmidt in column order
inline Mat column_range(const Mat& p, double tol = 1e-8) {
  std::vector<Vec> basis;
  for (int c = 0; c < p.cols(); ++c) {
    Vec v = p.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (auto& b : basis) v -= b * b.dot(v);
    double nv = v.norm();
    if (nv > tol) basis.push_back(v / nv);
  }
  Mat out(p.rows(), static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) out.col(static_cast<int>(i)) = basis[i];
  return out;
}

// numerical Clebsch-Gordan by projection; rule must integrate products of the three irreps exactly
template <Group G>
std::vector<CGBlock> projection_clebsch_gordan(const G& group, int l1, int l2, const std::vector<Irrep>& candidates,
                                               const QuadratureRule<typename G::Element>& rule) {
  const int n1 = group.dim(l1), n2 = group.dim(l2);
  std::vector<Mat> prod;
  prod.reserve(rule.size());
  for (const auto& g : rule.nodes) prod.push_back(kron(group.irrep_matrix(l1, g), group.irrep_matrix(l2, g)));
  std::vector<CGBlock> out;
  for (const auto& ir : candidates) {
    const int n3 = ir.dim;
    std::vector<Mat> d3;
    d3.reserve(rule.size());
    for (const auto& g : rule.nodes) d3.push_back(group.irrep_matrix(ir.label, g));
    auto projector = [&](int a, int b) {
      Mat p = Mat::Zero(n1 * n2, n1 * n2);
      for (std::size_t k = 0; k < rule.size(); ++k) p += rule.weights[k] * std::conj(d3[k](a, b)) * prod[k];
      return Mat(p * static_cast<double>(n3));
    };
    Mat range = column_range(projector(0, 0));
    std::vector<Mat> pb;
    for (int b = 0; b < n3; ++b) pb.push_back(projector(b, 0));
    for (int mu = 0; mu < range.cols(); ++mu) {
      Mat iso(n1 * n2, n3);
      for (int b = 0; b < n3; ++b) iso.col(b) = pb[b] * range.col(mu);
      out.push_back({ir.label, mu, iso.conjugate()});
    }
  }
  return out;
}

// sum over multiplicity of conj(C1) C2 for (l1 a1, l2 a2 | l3 a3) and (l1 b1, l2 b2 | l3 b3)
inline cplx c_symbol(const std::vector<CGBlock>& blocks, int dim2, int l3, int a1, int a2, int a3, int b1, int b2,
                     int b3) {
  cplx s = 0.0;
  for (const auto& b : blocks) {
    if (b.label != l3) continue;
    s += std::conj(b.coeffs(a1 * dim2 + a2, a3)) * b.coeffs(b1 * dim2 + b2, b3);
  }
  return s;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace gw

#endif

#ifndef GROUPWIGNER_SU2_HPP
#define GROUPWIGNER_SU2_HPP

#include "core.hpp"

#include <array>
#include <cmath>
#include <random>

namespace gw {

// SU(2) as unit quaternions (w, x, y, z). Labels are twice the spin; row i has m = j - i.
class SU2 {
 public:
  using Element = std::array<double, 4>;

  std::string id() const { return "su2"; }
  bool is_finite() const { return false; }
  int order() const { return 0; }
  int lie_dimension() const { return 3; }

  static Element normalized(Element q) {
    double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (auto& c : q) c /= n;
    return q;
  }

  Element identity() const { return {1.0, 0.0, 0.0, 0.0}; }

  Element multiply(const Element& a, const Element& b) const {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
  }
  Element inverse(const Element& a) const { return {a[0], -a[1], -a[2], -a[3]}; }
  Element negate(const Element& a) const { return {-a[0], -a[1], -a[2], -a[3]}; }

  double distance(const Element& a, const Element& b) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }

  std::vector<Irrep> irreps(int band) const {
    std::vector<Irrep> out;
    for (int l = 0; l <= band; ++l) out.push_back({l, l + 1});
    return out;
  }
  int dim(int label) const { return label + 1; }
  int degree(int label) const { return label; }
  int degree_of_band(int band) const { return band; }
  int product_degree(int a, int b) const { return a + b; }

  // symmetric tensor power of U = [[a, b], [-conj(b), conj(a)]], a = w - i z, b = -y - i x
  Mat irrep_matrix(int label, const Element& q) const {
    const int n = label;
    Mat d = Mat::Zero(n + 1, n + 1);
    const cplx a(q[0], -q[3]), b(-q[2], -q[1]), c(q[2], -q[1]), dd(q[0], q[3]);
    static const std::vector<double> fact = factorials(170);
    auto binom = [&](int p, int s) { return fact[p] / (fact[s] * fact[p - s]); };
    std::vector<cplx> pa(n + 1, 1.0), pb(n + 1, 1.0), pc(n + 1, 1.0), pd(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) {
      pa[k] = pa[k - 1] * a;
      pb[k] = pb[k - 1] * b;
      pc[k] = pc[k - 1] * c;
      pd[k] = pd[k - 1] * dd;
    }
    for (int k = 0; k <= n; ++k) {
      const int p = n - k;
      for (int i = 0; i <= n; ++i) {
        cplx sum = 0.0;
        for (int s = 0; s <= p; ++s) {
          int t = n - i - s;
          if (t < 0 || t > k) continue;
          sum += binom(p, s) * binom(k, t) * pa[s] * pc[p - s] * pb[t] * pd[k - t];
        }
        d(i, k) = sum * std::sqrt(fact[n - i] * fact[i] / (fact[n - k] * fact[k]));
      }
    }
    return d;
  }

  SqrtResult<Element> sqrt0(const Element& q) const {
    Element s{1.0 + q[0], q[1], q[2], q[3]};
    double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
    if (n < 1e-14) return {{0.0, 0.0, 0.0, 1.0}, true};
    for (auto& c : s) c /= n;
    return {s, false};
  }

  Element principal_representative(const Element& h) const { return h[0] < 0 ? negate(h) : h; }
  double principal_jacobian(const Element& h) const { return 8.0 * h[0] * h[0]; }

  static Element qz(double t) { return {std::cos(t / 2), 0.0, 0.0, std::sin(t / 2)}; }
  static Element qy(double t) { return {std::cos(t / 2), 0.0, std::sin(t / 2), 0.0}; }

  // exact for products D^{l1} conj(D^{l2}) with l1 + l2 <= band (twice-spin units)
  QuadratureRule<Element> haar_quadrature(int band) const {
    QuadratureRule<Element> q;
    band = std::max(band, 0);
    const int nu = band + 2;
    const int nb = band / 2 + 1 + (band % 2);
    std::vector<double> x, w;
    gauss_legendre(nb, x, w);
    for (int a = 0; a < nu; ++a)
      for (int b = 0; b < nb; ++b)
        for (int c = 0; c < nu; ++c) {
          Element g = multiply(multiply(qz(2.0 * pi * a / nu), qy(std::acos(x[b]))), qz(4.0 * pi * c / nu));
          q.nodes.push_back(g);
          q.weights.push_back(w[b] / 2.0 / (nu * nu));
        }
    q.exactness = band;
    q.id = "su2-haar:" + std::to_string(band);
    return q;
  }

  // hemisphere w >= 0, weights include the Jacobian 8 w^2; degree counts quaternion-polynomial order
  QuadratureRule<Element> principal_quadrature(int degree) const {
    QuadratureRule<Element> q;
    degree = std::max(degree, 0);
    const int npsi = degree + 24;
    const int nb = degree / 2 + 2;
    const int nphi = degree + 2;
    std::vector<double> xp, wp, xb, wb;
    gauss_legendre(npsi, xp, wp);
    gauss_legendre(nb, xb, wb);
    for (int i = 0; i < npsi; ++i) {
      double psi = (xp[i] + 1.0) * pi / 4.0;
      double wpsi = wp[i] * pi / 4.0 * (2.0 / pi) * std::sin(psi) * std::sin(psi);
      double w0 = std::cos(psi);
      double jac = 8.0 * w0 * w0;
      for (int b = 0; b < nb; ++b) {
        double ct = xb[b], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int f = 0; f < nphi; ++f) {
          double phi = 2.0 * pi * f / nphi;
          double s = std::sin(psi);
          q.nodes.push_back({w0, s * st * std::cos(phi), s * st * std::sin(phi), s * ct});
          q.weights.push_back(wpsi * jac * wb[b] / 2.0 / nphi);
        }
      }
    }
    q.exactness = -2;
    q.id = "su2-principal:" + std::to_string(degree);
    return q;
  }

  // Racah formula, all arguments in twice-spin units
  static double cg_coefficient(int j1, int m1, int j2, int m2, int j, int m) {
    if (m1 + m2 != m) return 0.0;
    if (j < std::abs(j1 - j2) || j > j1 + j2 || (j1 + j2 + j) % 2) return 0.0;
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m) > j) return 0.0;
    static const std::vector<double> f = factorials(170);
    auto F = [&](int twice) { return f[twice / 2]; };
    double pre = std::sqrt((j + 1) * F(j + j1 - j2) * F(j - j1 + j2) * F(j1 + j2 - j) / F(j1 + j2 + j + 2)) *
                 std::sqrt(F(j + m) * F(j - m) * F(j1 - m1) * F(j1 + m1) * F(j2 - m2) * F(j2 + m2));
    double sum = 0.0;
    for (int k = 0; k <= 2 * (j1 + j2); k += 2) {
      int a = j1 + j2 - j - k, b = j1 - m1 - k, c = j2 + m2 - k, d = j - j2 + m1 + k, e = j - j1 - m2 + k;
      if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
      double term = 1.0 / (F(k) * F(a) * F(b) * F(c) * F(d) * F(e));
      sum += ((k / 2) % 2 ? -term : term);
    }
    return pre * sum;
  }

  std::vector<CGBlock> clebsch_gordan(int l1, int l2) const {
    std::vector<CGBlock> out;
    const int n1 = l1 + 1, n2 = l2 + 1;
    for (int l = std::abs(l1 - l2); l <= l1 + l2; l += 2) {
      Mat c = Mat::Zero(n1 * n2, l + 1);
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
          for (int i3 = 0; i3 <= l; ++i3)
            c(i1 * n2 + i2, i3) = cg_coefficient(l1, l1 - 2 * i1, l2, l2 - 2 * i2, l, l - 2 * i3);
      out.push_back({l, 0, c});
    }
    return out;
  }

  // J_x, J_y, J_z in the label representation, D(exp(a e_r)) = exp(-i a J_r)
  std::vector<Mat> lie_generators(int label) const {
    const int n = label + 1;
    const double j = label / 2.0;
    Mat jz = Mat::Zero(n, n), jp = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double m = j - i;
      jz(i, i) = m;
      if (i > 0) jp(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    Mat jm = jp.adjoint();
    Mat jx = (jp + jm) / 2.0;
    Mat jy = (jp - jm) / (2.0 * I);
    return {jx, jy, jz};
  }

  RMat adjoint_matrix(const Element& q) const {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    RMat r(3, 3);
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y), 2 * (x * y + w * z),
        1 - 2 * (x * x + z * z), 2 * (y * z - w * x), 2 * (x * z - w * y), 2 * (y * z + w * x),
        1 - 2 * (x * x + y * y);
    return r;
  }

  RMat structure_constants() const {
    RMat c = RMat::Zero(3, 9);
    c(2, 0 * 3 + 1) = 1.0;
    c(2, 1 * 3 + 0) = -1.0;
    c(0, 1 * 3 + 2) = 1.0;
    c(0, 2 * 3 + 1) = -1.0;
    c(1, 2 * 3 + 0) = 1.0;
    c(1, 0 * 3 + 2) = -1.0;
    return c;
  }

  Element exp(const RVec& a) const {
    double t = a.norm();
    if (t < 1e-300) return identity();
    double s = std::sin(t / 2) / t;
    return {std::cos(t / 2), s * a(0), s * a(1), s * a(2)};
  }

  RVec log(const Element& q) const {
    double v = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    RVec a = RVec::Zero(3);
    if (v < 1e-300) return a;
    double t = 2.0 * std::atan2(v, q[0]);
    for (int i = 0; i < 3; ++i) a(i) = t * q[i + 1] / v;
    return a;
  }

  template <class Rng>
  Element random(Rng& rng) const {
    std::normal_distribution<double> n(0.0, 1.0);
    return normalized({n(rng), n(rng), n(rng), n(rng)});
  }

  std::string label_name(int label) const {
    return label % 2 ? std::to_string(label) + "/2" : std::to_string(label / 2);
  }
};

}  // namespace gw

#endif

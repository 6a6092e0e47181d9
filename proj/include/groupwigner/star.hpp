#ifndef GROUPWIGNER_STAR_HPP
#define GROUPWIGNER_STAR_HPP

#include "wigner.hpp"

namespace gw {

enum class StarRoute { Operator, Kernel };

inline StarRoute parse_star_route(const std::string& s) {
  if (s == "operator") return StarRoute::Operator;
  if (s == "kernel") return StarRoute::Kernel;
  throw std::invalid_argument("unknown star route " + s);
}

template <Group G>
SymbolField<typename G::Element> star(const PhaseSpace<G>& ps, const SymbolField<typename G::Element>& a,
                                      const SymbolField<typename G::Element>& b,
                                      StarRoute route = StarRoute::Operator, bool allow_lossy = false) {
  Mat prod;
  if (route == StarRoute::Operator)
    prod = ps.reconstruct(a, ReconstructMode::Dual, allow_lossy) * ps.reconstruct(b, ReconstructMode::Dual, allow_lossy);
  else
    prod = ps.frame_sum(a) * ps.frame_sum(b);
  auto out = ps.symbol(prod);
  out.route = route == StarRoute::Operator ? "operator" : "kernel";
  return out;
}

// Tr(W(s'') W(s') W(s)) over slots s = (node, label)
template <Group G>
class StarKernel {
 public:
  using Element = typename G::Element;

  StarKernel(const PhaseSpace<G>& ps, std::size_t max_entries = 20000000) : ps_(&ps) {
    const auto& nodes = ps.symbol_nodes();
    const int labels = ps.num_labels();
    slots_ = static_cast<int>(nodes.size()) * labels;
    const std::size_t entries = static_cast<std::size_t>(slots_) * slots_ * slots_;
    if (entries > max_entries)
      throw std::length_error("star kernel needs " + std::to_string(entries) + " entries, cap is " +
                              std::to_string(max_entries));
    const int d = ps.space().dim();
    std::vector<Mat> w;
    w.reserve(slots_);
    for (const auto& g : nodes.nodes)
      for (auto& m : ps.phase_points(g)) w.push_back(std::move(m));
    Mat right(d * d, slots_);
    for (int s = 0; s < slots_; ++s) right.col(s) = vec(w[s].transpose());
    data_.resize(entries);
    Mat left(slots_, d * d);
    for (int s2 = 0; s2 < slots_; ++s2) {
      for (int s1 = 0; s1 < slots_; ++s1) left.row(s1) = vec(w[s2] * w[s1]).transpose();
      Mat block = left * right;
      for (int s1 = 0; s1 < slots_; ++s1)
        for (int s = 0; s < slots_; ++s) data_[(static_cast<std::size_t>(s2) * slots_ + s1) * slots_ + s] = block(s1, s);
    }
  }

  int slots() const { return slots_; }
  cplx operator()(int s2, int s1, int s) const {
    return data_[(static_cast<std::size_t>(s2) * slots_ + s1) * slots_ + s];
  }

  SymbolField<Element> contract(const SymbolField<Element>& a, const SymbolField<Element>& b) const {
    const auto& irreps = ps_->symbol_irreps();
    const int labels = ps_->num_labels();
    Vec ca(slots_), cb(slots_);
    for (std::size_t k = 0; k < a.nodes.size(); ++k)
      for (std::size_t j = 0; j < irreps.size(); ++j) {
        const int n = irreps[j].dim;
        for (int m = 0; m < n; ++m)
          for (int mp = 0; mp < n; ++mp) {
            int s = static_cast<int>(k) * labels + ps_->label_offset(static_cast<int>(j)) + m * n + mp;
            ca(s) = a.weights[k] * static_cast<double>(n) * a.values[k][j](mp, m);
            cb(s) = b.weights[k] * static_cast<double>(n) * b.values[k][j](mp, m);
          }
      }
    auto out = ps_->empty_field();
    out.route = "kernel-tensor";
    for (std::size_t k = 0; k < a.nodes.size(); ++k)
      for (std::size_t j = 0; j < irreps.size(); ++j) {
        const int n = irreps[j].dim;
        for (int m = 0; m < n; ++m)
          for (int mp = 0; mp < n; ++mp) {
            int s = static_cast<int>(k) * labels + ps_->label_offset(static_cast<int>(j)) + m * n + mp;
            cplx acc = 0.0;
            for (int s2 = 0; s2 < slots_; ++s2) {
              if (ca(s2) == 0.0) continue;
              for (int s1 = 0; s1 < slots_; ++s1) acc += ca(s2) * cb(s1) * (*this)(s2, s1, s);
            }
            out.values[k][j](m, mp) = acc;
          }
      }
    return out;
  }

 private:
  const PhaseSpace<G>* ps_;
  int slots_ = 0;
  std::vector<cplx> data_;
};

struct PhaseLabel {
  int label = 0;
  int m = 0;
  int n = 0;
};

// triple position-space sum with Kronecker deltas on the midpoints
template <Group G>
cplx triple_trace_finite(const G& group, const typename G::Element& g2, const PhaseLabel& l2,
                         const typename G::Element& g1, const PhaseLabel& l1, const typename G::Element& g,
                         const PhaseLabel& l) {
  if (!group.is_finite()) throw UnsupportedOperation("triple delta sum needs a finite group");
  const int n = group.order();
  auto kernel = [&](int x, int y, const typename G::Element& at, const PhaseLabel& lab) -> cplx {
    if (midpoint(group, x, y).root != at) return 0.0;
    return group.irrep_matrix(lab.label, group.multiply(x, group.inverse(y)))(lab.m, lab.n) * static_cast<double>(n);
  };
  cplx s = 0.0;
  for (int x0 = 0; x0 < n; ++x0)
    for (int x1 = 0; x1 < n; ++x1) {
      cplx a = kernel(x0, x1, g2, l2);
      if (a == 0.0) continue;
      for (int x2 = 0; x2 < n; ++x2) {
        cplx b = kernel(x1, x2, g1, l1);
        if (b == 0.0) continue;
        s += a * b * kernel(x2, x0, g, l);
      }
    }
  return s / (static_cast<double>(n) * n * n);
}

// Clebsch-Gordan expanded triple trace, finite groups only
template <Group G>
cplx triple_trace_cg(const G& group, const typename G::Element& g2, const PhaseLabel& l2,
                     const typename G::Element& g1, const PhaseLabel& l1, const typename G::Element& g,
                     const PhaseLabel& l) {
  if (!group.is_finite()) throw UnsupportedOperation("expanded triple trace needs a finite group");
  using E = typename G::Element;
  const int n = group.order();
  const auto irreps = group.irreps(0);
  auto D = [&](int label, const E& x, int a, int b) { return group.irrep_matrix(label, x)(a, b); };
  auto s0 = [&](const E& x) { return group.sqrt0(x).root; };
  cplx total = 0.0;
  for (int x0 = 0; x0 < n; ++x0)
    for (int x1 = 0; x1 < n; ++x1) {
      cplx base = D(l.label, x0, l.m, l.n) * D(l1.label, x1, l1.m, l1.n) *
                  std::conj(D(l2.label, group.multiply(x1, x0), l2.n, l2.m));
      if (base == 0.0) continue;
      const E a0 = group.multiply(group.inverse(g), s0(group.inverse(x0)));
      const E a1 = group.multiply(group.inverse(g1), s0(group.inverse(x1)));
      const E a2 = group.multiply(s0(group.multiply(x1, x0)), g2);
      const E x1i = group.inverse(x1);
      cplx acc = 0.0;
      for (const auto& j0 : irreps)
        for (const auto& j1 : irreps) {
          auto blocks = group.clebsch_gordan(j1.label, j0.label);
          Mat d0a = group.irrep_matrix(j0.label, x1i), d0b = group.irrep_matrix(j0.label, a0);
          Mat d1 = group.irrep_matrix(j1.label, a1);
          for (const auto& cb : blocks) {
            Mat d2 = group.irrep_matrix(cb.label, a2);
            const int n2 = group.dim(cb.label);
            for (int m0 = 0; m0 < j0.dim; ++m0)
              for (int k0 = 0; k0 < j0.dim; ++k0)
                for (int n0 = 0; n0 < j0.dim; ++n0)
                  for (int m1 = 0; m1 < j1.dim; ++m1)
                    for (int n1 = 0; n1 < j1.dim; ++n1) {
                      cplx f = d0a(m0, k0) * d0b(n0, m0) * d1(n1, m1);
                      if (f == 0.0) continue;
                      for (int m2 = 0; m2 < n2; ++m2)
                        for (int nn2 = 0; nn2 < n2; ++nn2) {
                          cplx c = std::conj(cb.coeffs(m1 * j0.dim + k0, m2)) * cb.coeffs(n1 * j0.dim + n0, nn2);
                          if (c == 0.0) continue;
                          acc += static_cast<double>(j0.dim * j1.dim) * c * f * d2(m2, nn2);
                        }
                    }
          }
        }
      total += base * acc;
    }
  return total / (static_cast<double>(n) * n);
}

// U(l1) U(l2) = sum C U(l3): returns the right-hand side as an operator on the space
template <Group G>
Mat product_uu(const Space<G>& space, const PhaseLabel& a, const PhaseLabel& b) {
  const auto& group = space.group();
  const auto& blocks = space.cg(a.label, b.label);
  const int nb = group.dim(b.label);
  Mat out = Mat::Zero(space.dim(), space.dim());
  for (const auto& cb : blocks) {
    const int n3 = group.dim(cb.label);
    for (int m3 = 0; m3 < n3; ++m3)
      for (int n3i = 0; n3i < n3; ++n3i) {
        cplx c = std::conj(cb.coeffs(a.m * nb + b.m, m3)) * cb.coeffs(a.n * nb + b.n, n3i);
        if (c == 0.0) continue;
        out += c * space.U(cb.label, m3, n3i).value;
      }
  }
  return out;
}

// U(a) V(g1) U(b) V(g) = sum_k D^b_{m k}(g1^-1) C U(l3) V(g1 g)
template <Group G>
Mat product_uvuv(const Space<G>& space, const PhaseLabel& a, const typename G::Element& g1, const PhaseLabel& b,
                 const typename G::Element& g) {
  const auto& group = space.group();
  Mat d = group.irrep_matrix(b.label, group.inverse(g1));
  Mat acc = Mat::Zero(space.dim(), space.dim());
  for (int k = 0; k < group.dim(b.label); ++k) acc += d(b.m, k) * product_uu(space, a, {b.label, k, b.n});
  return acc * space.left_regular(group.multiply(g1, g));
}

// U(jmn) V(g) resummed from phase-point operators at the symbol nodes
template <Group G>
Mat uv_expand(const PhaseSpace<G>& ps, const PhaseLabel& l, const typename G::Element& g) {
  const auto& group = ps.group();
  const auto& nodes = ps.symbol_nodes();
  const auto& irreps = ps.symbol_irreps();
  const auto s0 = group.sqrt0(g).root;
  std::vector<Mat> dg;
  for (const auto& ir : irreps) dg.push_back(group.irrep_matrix(ir.label, g).conjugate() * static_cast<double>(ir.dim));
  const int d = ps.space().dim();
  Mat out = Mat::Zero(d, d);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    cplx f = group.irrep_matrix(l.label, group.multiply(s0, nodes.nodes[k]))(l.m, l.n) * nodes.weights[k];
    auto ws = ps.phase_points(nodes.nodes[k]);
    for (std::size_t j = 0; j < irreps.size(); ++j) {
      const int n = irreps[j].dim;
      for (int m = 0; m < n; ++m)
        for (int mp = 0; mp < n; ++mp) out += (f * dg[j](m, mp)) * ws[ps.label_offset(static_cast<int>(j)) + m * n + mp];
    }
  }
  return out;
}

struct CircleKernelValue {
  cplx value = 0.0;
  double tail = 0.0;
};

// Tr(W(t2; m2) W(t1; m1) W(t; m)) for circle phase-point operators compressed to |k| <= band
inline cplx circle_triple_trace(double t2, int m2, double t1, int m1, double t, int m, int band) {
  auto sinc = [](double x) { return std::abs(x) < 1e-15 ? 1.0 : std::sin(pi * x) / (pi * x); };
  auto entry = [&](int a, int b, double th, int mm) {
    return std::exp(-I * ((a - b) * th)) * sinc(0.5 * (a + b) - mm);
  };
  cplx s = 0.0;
  for (int a = -band; a <= band; ++a)
    for (int b = -band; b <= band; ++b) {
      cplx e1 = entry(a, b, t2, m2);
      for (int c = -band; c <= band; ++c) s += e1 * entry(b, c, t1, m1) * entry(c, a, t, m);
    }
  return s;
}

inline CircleKernelValue circle_star_kernel(double t2, int m2, double t1, int m1, double t, int m, int band) {
  cplx v = circle_triple_trace(t2, m2, t1, m1, t, m, band);
  cplx wide = circle_triple_trace(t2, m2, t1, m1, t, m, 4 * band);
  return {v, std::abs(wide - v)};
}

}  // namespace gw

#endif

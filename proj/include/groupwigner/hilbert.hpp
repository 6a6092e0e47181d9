#ifndef GROUPWIGNER_HILBERT_HPP
#define GROUPWIGNER_HILBERT_HPP

#include "core.hpp"

#include <functional>
#include <map>
#include <utility>

namespace gw {

struct Block {
  int label = 0;
  int dim = 1;
  int offset = 0;
};

// f(g) = sum value * D^label_{m n}(g), indices are matrix rows/columns
struct DTerm {
  int label = 0;
  int m = 0;
  int n = 0;
  cplx value = 0.0;
};

template <class M>
struct Flagged {
  M value;
  bool lossy = false;
};

// band-limited L^2(G): basis |j m n> with <g|j m n> = sqrt(N_j) D^j_{mn}(g)
template <Group G>
class Space {
 public:
  using Element = typename G::Element;

  Space(G group, int band) : group_(std::move(group)), band_(band) {
    if (band < 0) throw BandError("band must be non-negative");
    int offset = 0;
    for (const auto& ir : group_.irreps(band_)) {
      blocks_.push_back({ir.label, ir.dim, offset});
      offset += ir.dim * ir.dim;
    }
    dim_ = offset;
    for (const auto& ir : group_.irreps(2 * band_))
      for (const auto& b : blocks_) cg_[{ir.label, b.label}] = group_.clebsch_gordan(ir.label, b.label);
  }

  const G& group() const { return group_; }
  int band() const { return band_; }
  int dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  int block_of_label(int label) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].label == label) return static_cast<int>(i);
    return -1;
  }
  int index(int block, int m, int n) const { return blocks_[block].offset + m * blocks_[block].dim + n; }

  Vec basis_values(const Element& g) const {
    Vec v(dim_);
    for (const auto& b : blocks_) {
      Mat d = group_.irrep_matrix(b.label, g) * std::sqrt(static_cast<double>(b.dim));
      for (int m = 0; m < b.dim; ++m)
        for (int n = 0; n < b.dim; ++n) v(b.offset + m * b.dim + n) = d(m, n);
    }
    return v;
  }

  // coefficients from samples on the rule nodes
  Vec analysis(const QuadratureRule<Element>& rule, const Vec& samples) const {
    if (!rule.exact_for(2 * band_)) throw InsufficientBand("analysis rule too coarse", 2 * band_);
    Vec c = Vec::Zero(dim_);
    for (std::size_t k = 0; k < rule.size(); ++k)
      c += rule.weights[k] * samples(static_cast<int>(k)) * basis_values(rule.nodes[k]).conjugate();
    return c;
  }

  Vec synthesis(const QuadratureRule<Element>& rule, const Vec& coeffs) const {
    Vec s(static_cast<int>(rule.size()));
    for (std::size_t k = 0; k < rule.size(); ++k) s(static_cast<int>(k)) = basis_values(rule.nodes[k]).transpose() * coeffs;
    return s;
  }

  cplx evaluate(const Vec& coeffs, const Element& g) const { return basis_values(g).transpose() * coeffs; }

  Mat left_regular(const Element& g) const {
    Mat v = Mat::Zero(dim_, dim_);
    for (const auto& b : blocks_) {
      Mat d = group_.irrep_matrix(b.label, group_.inverse(g));
      for (int m = 0; m < b.dim; ++m)
        for (int mp = 0; mp < b.dim; ++mp)
          for (int n = 0; n < b.dim; ++n) v(b.offset + mp * b.dim + n, b.offset + m * b.dim + n) = d(m, mp);
    }
    return v;
  }

  Mat right_regular(const Element& g) const {
    Mat v = Mat::Zero(dim_, dim_);
    for (const auto& b : blocks_) {
      Mat d = group_.irrep_matrix(b.label, g);
      for (int m = 0; m < b.dim; ++m)
        for (int n = 0; n < b.dim; ++n)
          for (int np = 0; np < b.dim; ++np) v(b.offset + m * b.dim + np, b.offset + m * b.dim + n) = d(np, n);
    }
    return v;
  }

  const std::vector<CGBlock>& cg(int l1, int l2) const {
    auto it = cg_.find({l1, l2});
    if (it == cg_.end()) it = cg_.emplace(std::make_pair(l1, l2), group_.clebsch_gordan(l1, l2)).first;
    return it->second;
  }

  // multiplication by D^{label}_{mp np}; lossy when part of the image leaves the band
  Flagged<Mat> U(int label, int mp, int np) const {
    Mat u = Mat::Zero(dim_, dim_);
    bool lossy = false;
    for (const auto& b : blocks_) {
      const auto& blocks = cg(label, b.label);
      for (const auto& cb : blocks) {
        int target = block_of_label(cb.label);
        if (target < 0) {
          if (max_abs(cb.coeffs) > 0) lossy = true;
          continue;
        }
        const Block& t = blocks_[target];
        double scale = std::sqrt(static_cast<double>(b.dim) / t.dim);
        for (int m = 0; m < b.dim; ++m)
          for (int n = 0; n < b.dim; ++n)
            for (int m2 = 0; m2 < t.dim; ++m2) {
              cplx cm = std::conj(cb.coeffs(mp * b.dim + m, m2));
              if (cm == 0.0) continue;
              for (int n2 = 0; n2 < t.dim; ++n2)
                u(t.offset + m2 * t.dim + n2, b.offset + m * b.dim + n) += scale * cm * cb.coeffs(np * b.dim + n, n2);
            }
      }
    }
    return {u, lossy};
  }

  Flagged<Mat> multiplication(const std::vector<DTerm>& f) const {
    Mat out = Mat::Zero(dim_, dim_);
    bool lossy = false;
    for (const auto& t : f) {
      auto u = U(t.label, t.m, t.n);
      out += t.value * u.value;
      lossy = lossy || u.lossy;
    }
    return {out, lossy};
  }

  // pointwise multiplication by exp(i f) followed by compression on the rule
  Flagged<Mat> exp_multiplication(const std::function<double(const Element&)>& f,
                                  const QuadratureRule<Element>& rule) const {
    Mat m = Mat::Zero(dim_, dim_);
    double fmin = 1e300, fmax = -1e300;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      Vec psi = basis_values(rule.nodes[k]);
      double v = f(rule.nodes[k]);
      fmin = std::min(fmin, v);
      fmax = std::max(fmax, v);
      m += rule.weights[k] * std::exp(I * v) * psi.conjugate() * psi.transpose();
    }
    return {m, !group_.is_finite() && fmax - fmin > 1e-14};
  }

  // lie-algebra action: left generators act on the row index, right generators on the column index
  std::vector<Mat> generators() const
    requires LieGroup<G>
  {
    std::vector<Mat> out(group_.lie_dimension(), Mat::Zero(dim_, dim_));
    for (const auto& b : blocks_) {
      auto js = group_.lie_generators(b.label);
      for (std::size_t r = 0; r < js.size(); ++r)
        for (int m = 0; m < b.dim; ++m)
          for (int mp = 0; mp < b.dim; ++mp)
            for (int n = 0; n < b.dim; ++n) out[r](b.offset + mp * b.dim + n, b.offset + m * b.dim + n) = -js[r](m, mp);
    }
    return out;
  }

  std::vector<Mat> right_generators() const
    requires LieGroup<G>
  {
    std::vector<Mat> out(group_.lie_dimension(), Mat::Zero(dim_, dim_));
    for (const auto& b : blocks_) {
      auto js = group_.lie_generators(b.label);
      for (std::size_t r = 0; r < js.size(); ++r)
        for (int m = 0; m < b.dim; ++m)
          for (int n = 0; n < b.dim; ++n)
            for (int np = 0; np < b.dim; ++np) out[r](b.offset + m * b.dim + np, b.offset + m * b.dim + n) = js[r](np, n);
    }
    return out;
  }

  Mat projector_to_band(int sub_band) const {
    Mat p = Mat::Zero(dim_, dim_);
    for (const auto& b : blocks_)
      if (group_.degree(b.label) <= sub_band)
        for (int i = 0; i < b.dim * b.dim; ++i) p(b.offset + i, b.offset + i) = 1.0;
    return p;
  }

 private:
  G group_;
  int band_;
  int dim_ = 0;
  std::vector<Block> blocks_;
  mutable std::map<std::pair<int, int>, std::vector<CGBlock>> cg_;
};

// D-expansion f_{lmn} = N_l Q[conj(D^l_mn) f] on the rule
template <Group G>
std::vector<DTerm> expand_function(const G& group, const std::function<cplx(const typename G::Element&)>& f, int band,
                                   const QuadratureRule<typename G::Element>& rule, double drop = 1e-13) {
  std::vector<DTerm> out;
  std::vector<cplx> vals;
  for (const auto& g : rule.nodes) vals.push_back(f(g));
  for (const auto& ir : group.irreps(band)) {
    Mat acc = Mat::Zero(ir.dim, ir.dim);
    for (std::size_t k = 0; k < rule.size(); ++k)
      acc += rule.weights[k] * vals[k] * group.irrep_matrix(ir.label, rule.nodes[k]).conjugate();
    acc *= static_cast<double>(ir.dim);
    for (int m = 0; m < ir.dim; ++m)
      for (int n = 0; n < ir.dim; ++n)
        if (std::abs(acc(m, n)) > drop) out.push_back({ir.label, m, n, acc(m, n)});
  }
  return out;
}

template <Group G>
cplx evaluate_terms(const G& group, const std::vector<DTerm>& f, const typename G::Element& g) {
  cplx s = 0.0;
  for (const auto& t : f) s += t.value * group.irrep_matrix(t.label, g)(t.m, t.n);
  return s;
}

// max_r || right_r + sum_s R_sr left_s || with R_sr multiplication operators
template <LieGroup G>
double adjoint_relation_residual(const Space<G>& space) {
  const auto& group = space.group();
  const int n = group.lie_dimension();
  auto left = space.generators();
  auto right = space.right_generators();
  auto rule = group.haar_quadrature(2 * space.band() + 4);
  double worst = 0.0;
  for (int r = 0; r < n; ++r) {
    Mat acc = right[r];
    for (int s = 0; s < n; ++s) {
      auto f = expand_function<G>(
          group, [&](const typename G::Element& g) { return cplx(group.adjoint_matrix(g)(s, r)); }, 2, rule);
      acc += space.multiplication(f).value * left[s];
    }
    worst = std::max(worst, max_abs(acc));
  }
  return worst;
}

}  // namespace gw

#endif

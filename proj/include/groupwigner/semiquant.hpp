#ifndef GROUPWIGNER_SEMIQUANT_HPP
#define GROUPWIGNER_SEMIQUANT_HPP

#include <algorithm>
#include <functional>
#include <map>

#include "su2.hpp"
#include "wigner.hpp"

namespace gw {

// blocks[node][irrep] = sqrt(N_j) W(g; j m n), one block per irrep of H_0
template <class E>
struct BlockSymbol {
  std::vector<E> nodes;
  std::vector<double> weights;
  std::vector<Irrep> irreps;
  std::vector<std::vector<Mat>> blocks;
};

template <class E>
BlockSymbol<E> to_block_symbol(const SymbolField<E>& field) {
  BlockSymbol<E> out{field.nodes, field.weights, field.irreps, field.values};
  for (auto& node : out.blocks)
    for (std::size_t j = 0; j < node.size(); ++j) node[j] *= std::sqrt(static_cast<double>(field.irreps[j].dim));
  return out;
}

template <class E>
cplx block_trace_integral(const BlockSymbol<E>& a, const BlockSymbol<E>& b) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    cplx t = 0.0;
    for (std::size_t j = 0; j < a.irreps.size(); ++j) t += (a.blocks[k][j] * b.blocks[k][j]).trace();
    s += a.weights[k] * t;
  }
  return s;
}

struct TraceIdentity {
  cplx operator_side;
  cplx symbol_side;
  double residual;
};

template <Group G>
TraceIdentity trace_identity(const PhaseSpace<G>& ps, const Mat& a, const Mat& b) {
  cplx lhs = (a * b).trace();
  cplx rhs = block_trace_integral(to_block_symbol(ps.symbol(a)), to_block_symbol(ps.symbol(b)));
  return {lhs, rhs, std::abs(lhs - rhs)};
}

// sorted index tuples of length n over {0, ..., dim-1}
inline std::vector<std::vector<int>> multisets(int dim, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  if (n == 0) return {{}};
  while (true) {
    out.push_back(cur);
    int p = n - 1;
    while (p >= 0 && cur[p] == dim - 1) --p;
    if (p < 0) break;
    ++cur[p];
    for (int q = p + 1; q < n; ++q) cur[q] = cur[p];
  }
  return out;
}

inline double permutation_count(const std::vector<int>& ms) {
  std::map<int, int> mult;
  for (int r : ms) ++mult[r];
  double c = std::tgamma(ms.size() + 1.0);
  for (auto [r, k] : mult) c /= std::tgamma(k + 1.0);
  return c;
}

inline Mat symmetrised_product(const std::vector<Mat>& gens, std::vector<int> ms, int dim) {
  Mat s = Mat::Zero(dim, dim);
  if (ms.empty()) return Mat::Identity(dim, dim);
  int count = 0;
  do {
    Mat p = Mat::Identity(dim, dim);
    for (int r : ms) p = p * gens[r];
    s += p;
    ++count;
  } while (std::next_permutation(ms.begin(), ms.end()));
  return s / static_cast<double>(count);
}

// coefficients a_{r1..rN} stored once per multiset; the sum over ordered tuples
// contributes permutation_count(ms) copies of each
struct SymmetrisedExpansion {
  int label = 0;
  std::vector<std::vector<std::vector<int>>> index_sets;
  std::vector<Vec> coeffs;

  cplx coefficient(std::vector<int> indices) const {
    std::sort(indices.begin(), indices.end());
    const std::size_t n = indices.size();
    if (n >= coeffs.size()) return 0.0;
    auto it = std::find(index_sets[n].begin(), index_sets[n].end(), indices);
    return coeffs[n](it - index_sets[n].begin());
  }
};

// expansion of each SU(2) block in symmetrised monomials of the block generators,
// degree up to the twice-spin label; each degree-N coefficient tensor is taken
// traceless, which removes the Casimir redundancy and makes the expansion unique
class SymmetrisedBasis {
 public:
  explicit SymmetrisedBasis(int label) : label_(label), dim_(label + 1) {
    SU2 g;
    gens_ = g.lie_generators(label);
    for (int n = 0; n <= label; ++n) sets_.push_back(multisets(3, n));
    int unknowns = 0, constraints = 0;
    for (int n = 0; n <= label; ++n) {
      offsets_.push_back(unknowns);
      unknowns += static_cast<int>(sets_[n].size());
      if (n >= 2) constraints += static_cast<int>(multisets(3, n - 2).size());
    }
    system_ = Mat::Zero(dim_ * dim_ + constraints, unknowns);
    for (int n = 0; n <= label; ++n)
      for (std::size_t c = 0; c < sets_[n].size(); ++c) {
        Mat s = permutation_count(sets_[n][c]) * symmetrised_product(gens_, sets_[n][c], dim_);
        system_.col(offsets_[n] + c).head(dim_ * dim_) = vec(s);
      }
    int row = dim_ * dim_;
    for (int n = 2; n <= label; ++n)
      for (const auto& rest : multisets(3, n - 2)) {
        for (int r = 0; r < 3; ++r) {
          std::vector<int> full = rest;
          full.push_back(r);
          full.push_back(r);
          std::sort(full.begin(), full.end());
          auto it = std::find(sets_[n].begin(), sets_[n].end(), full);
          system_(row, offsets_[n] + (it - sets_[n].begin())) += 1.0;
        }
        ++row;
      }
    qr_.compute(system_);
    if (qr_.rank() < unknowns) {
      int deg = 0;
      for (int n = 0; n <= label; ++n)
        if (offsets_[n] <= qr_.rank()) deg = n;
      throw NumericalFailure("symmetrised basis rank deficient in block " + g.label_name(label) + " near degree " +
                             std::to_string(deg));
    }
  }

  int label() const { return label_; }
  const std::vector<Mat>& generators() const { return gens_; }

  SymmetrisedExpansion expand(const Mat& block) const {
    if (block.rows() != dim_ || block.cols() != dim_) throw BandError("block size does not match label");
    Vec rhs = Vec::Zero(system_.rows());
    rhs.head(dim_ * dim_) = vec(block);
    Vec x = qr_.solve(rhs);
    SymmetrisedExpansion e;
    e.label = label_;
    e.index_sets = sets_;
    for (int n = 0; n <= label_; ++n) e.coeffs.push_back(x.segment(offsets_[n], sets_[n].size()));
    return e;
  }

  Mat reconstruct(const SymmetrisedExpansion& e) const {
    Mat out = Mat::Zero(dim_, dim_);
    for (std::size_t n = 0; n < e.coeffs.size(); ++n)
      for (std::size_t c = 0; c < e.index_sets[n].size(); ++c)
        out += e.coeffs[n](c) * permutation_count(e.index_sets[n][c]) *
               symmetrised_product(gens_, e.index_sets[n][c], dim_);
    return out;
  }

 private:
  int label_;
  int dim_;
  std::vector<Mat> gens_;
  std::vector<std::vector<std::vector<int>>> sets_;
  std::vector<int> offsets_;
  Mat system_;
  Eigen::ColPivHouseholderQR<Mat> qr_;
};

inline double casimir(int label) { return label / 2.0 * (label / 2.0 + 1.0); }

// a(g; J) from the block expansions: coefficients are divided by sqrt(N_j) so
// that f-hat maps to f(g), then interpolated in C = j(j+1) and evaluated at |J|^2
class ClassicalFunction {
 public:
  // source(g) returns the symbol blocks W(g; j) for twice-spin labels 0..max_label
  using Source = std::function<std::vector<Mat>(const SU2::Element&)>;

  ClassicalFunction(Source source, int max_label) : source_(std::move(source)), max_label_(max_label) {
    for (int l = 0; l <= max_label; ++l) bases_.emplace_back(l);
  }

  // blocks above the Hilbert-space band only see the truncation, so they are left out
  ClassicalFunction(const PhaseSpace<SU2>& ps, const Mat& a)
      : ClassicalFunction([&ps, a](const SU2::Element& g) { return ps.symbol_at(a, g); }, ps.space().band()) {}

  int max_label() const { return max_label_; }
  double max_casimir() const { return casimir(max_label_); }

  std::vector<SymmetrisedExpansion> expansions(const SU2::Element& g) const {
    auto blocks = source_(g);
    std::vector<SymmetrisedExpansion> out;
    for (std::size_t j = 0; j < bases_.size(); ++j) {
      const double n = static_cast<double>(blocks[j].rows());
      out.push_back(bases_[j].expand(std::sqrt(n) * blocks[j]));
    }
    return out;
  }

  cplx operator()(const SU2::Element& g, const RVec& jvec) const { return evaluate(expansions(g), jvec); }

  cplx evaluate(const std::vector<SymmetrisedExpansion>& ex, const RVec& jvec) const {
    const double c = jvec.squaredNorm();
    if (c > max_casimir() * (1 + 1e-12) + 1e-12) throw BandError("classical momentum beyond the computed blocks");
    cplx out = 0.0;
    for (int n = 0; n <= max_label_; ++n) {
      // degree-n harmonic terms vanish identically on blocks with label < n
      std::vector<double> weight(ex.size(), 0.0);
      for (std::size_t p = n; p < ex.size(); ++p) {
        double l = 1.0;
        for (std::size_t q = n; q < ex.size(); ++q)
          if (q != p) l *= (c - casimir(ex[q].label)) / (casimir(ex[p].label) - casimir(ex[q].label));
        weight[p] = l / std::sqrt(ex[p].label + 1.0);
      }
      for (const auto& ms : multisets(3, n)) {
        cplx coeff = 0.0;
        for (std::size_t p = n; p < ex.size(); ++p) coeff += weight[p] * ex[p].coefficient(ms);
        double mono = permutation_count(ms);
        for (int r : ms) mono *= jvec(r);
        out += coeff * mono;
      }
    }
    return out;
  }

 private:
  Source source_;
  int max_label_ = 0;
  std::vector<SymmetrisedBasis> bases_;
};

}  // namespace gw

#endif

#ifndef GROUPWIGNER_WIGNER_HPP
#define GROUPWIGNER_WIGNER_HPP

#include "hilbert.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>

namespace gw {

enum class Route { A, Kernel, Finite };

inline std::string route_name(Route r) {
  switch (r) {
    case Route::A: return "A";
    case Route::Kernel: return "kernel";
    case Route::Finite: return "finite";
  }
  return "?";
}

inline Route parse_route(const std::string& s) {
  if (s == "A" || s == "a") return Route::A;
  if (s == "kernel") return Route::Kernel;
  if (s == "finite" || s == "B" || s == "b") return Route::Finite;
  throw std::invalid_argument("unknown route " + s);
}

struct PhaseSpaceOptions {
  int symbol_band = -1;      // default 2 * band
  int internal_band = -1;    // default 2 * band
  int principal_degree = -1; // default: from the integrand
  Route route = Route::A;
  int threads = 1;
};

// values[node][irrep](m, m') = W(node; j m m')
template <class E>
struct SymbolField {
  std::string group;
  int band = 0;
  int symbol_band = 0;
  std::string node_set;
  std::string route;
  std::vector<E> nodes;
  std::vector<double> weights;
  std::vector<Irrep> irreps;
  std::vector<std::vector<Mat>> values;

  SymbolField zeros_like() const {
    SymbolField z = *this;
    for (auto& node : z.values)
      for (auto& m : node) m.setZero();
    return z;
  }
};

template <class E>
SymbolField<E> operator-(SymbolField<E> a, const SymbolField<E>& b) {
  for (std::size_t k = 0; k < a.values.size(); ++k)
    for (std::size_t j = 0; j < a.values[k].size(); ++j) a.values[k][j] -= b.values[k][j];
  return a;
}

template <class E>
double max_abs(const SymbolField<E>& f) {
  double m = 0.0;
  for (const auto& node : f.values)
    for (const auto& b : node) m = std::max(m, max_abs(b));
  return m;
}

enum class ReconstructMode { Dual, Literal };

struct FrameReport {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double deficit = 0.0;
};

inline Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
inline Mat unvec(const Vec& v, int d) { return Eigen::Map<const Mat>(v.data(), d, d); }

template <Group G>
class PhaseSpace {
 public:
  using Element = typename G::Element;

  PhaseSpace(Space<G> space, PhaseSpaceOptions opt = {}) : space_(std::move(space)), opt_(opt) {
    const auto& group = space_.group();
    const int band = space_.band();
    if (opt_.symbol_band < 0) opt_.symbol_band = 2 * band;
    if (opt_.internal_band < 0) opt_.internal_band = 2 * band;
    if (!group.is_finite() && opt_.internal_band < 2 * band)
      throw InsufficientBand("internal band below twice the state band", 2 * band);
    if (opt_.route == Route::Finite && !group.is_finite())
      throw UnsupportedOperation("literal finite-group route needs a finite group");
    irreps_ = group.irreps(opt_.symbol_band);
    int offset = 0;
    for (const auto& ir : irreps_) {
      offsets_.push_back(offset);
      offset += ir.dim * ir.dim;
    }
    labels_ = offset;
    const int d = space_.dim();
    switch (opt_.route) {
      case Route::A: we_ = build_route_a(group.identity()); break;
      case Route::Kernel: we_ = build_kernel(group.identity()); break;
      case Route::Finite: we_ = build_finite(group.identity()); break;
    }
    stack_t_ = Mat(labels_, d * d);
    stack_ = Mat(labels_, d * d);
    for (int l = 0; l < labels_; ++l) {
      stack_t_.row(l) = vec(we_[l].transpose()).transpose();
      stack_.row(l) = vec(we_[l]).transpose();
    }
    nodes_ = group.is_finite() ? group.haar_quadrature(0) : group.haar_quadrature(4 * band);
  }

  const Space<G>& space() const { return space_; }
  const G& group() const { return space_.group(); }
  const PhaseSpaceOptions& options() const { return opt_; }
  int symbol_band() const { return opt_.symbol_band; }
  const std::vector<Irrep>& symbol_irreps() const { return irreps_; }
  int num_labels() const { return labels_; }
  int label_offset(int irrep) const { return offsets_[irrep]; }
  const QuadratureRule<Element>& symbol_nodes() const { return nodes_; }
  const std::vector<Mat>& identity_operators() const { return we_; }

  int route_a_degree() const {
    return 2 * group().degree_of_band(space_.band()) + 2 * group().degree_of_band(opt_.symbol_band) +
           group().degree_of_band(opt_.internal_band) + 2;
  }

  std::vector<Mat> phase_points(const Element& g) const {
    Mat vt = space_.right_regular(g);
    std::vector<Mat> out;
    out.reserve(labels_);
    for (const auto& w : we_) out.push_back(vt.adjoint() * w * vt);
    return out;
  }

  // W(g; j m m') = sum_{j1} N_{j1} int_P dh J U(j1 m2 m1) V(h^-2) D^j_{mm'}(h^-2) D^{j1}_{m1 m2}(g^-1 h)
  std::vector<Mat> build_route_a(const Element& g) const {
    const auto& group = space_.group();
    const int d = space_.dim();
    std::vector<std::tuple<int, int, int, Mat>> us;
    for (const auto& ir : group.irreps(opt_.internal_band))
      for (int m1 = 0; m1 < ir.dim; ++m1)
        for (int m2 = 0; m2 < ir.dim; ++m2) us.emplace_back(ir.label, m1, m2, space_.U(ir.label, m2, m1).value);
    int degree = opt_.principal_degree >= 0 ? opt_.principal_degree : route_a_degree();
    auto rule = group.principal_quadrature(degree);
    const Element ginv = group.inverse(g);
    std::vector<Mat> w(labels_, Mat::Zero(d, d));
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Element& h = rule.nodes[k];
      Element y = group.inverse(group.multiply(h, h));
      Element gh = group.multiply(ginv, h);
      Mat x = Mat::Zero(d, d);
      int last = -1000000;
      Mat dj1;
      for (const auto& [label, m1, m2, u] : us) {
        if (label != last) {
          dj1 = group.irrep_matrix(label, gh) * static_cast<double>(group.dim(label));
          last = label;
        }
        x += dj1(m1, m2) * u;
      }
      Mat yv = x * space_.left_regular(y);
      for (std::size_t j = 0; j < irreps_.size(); ++j) {
        Mat dj = group.irrep_matrix(irreps_[j].label, y);
        for (int m = 0; m < irreps_[j].dim; ++m)
          for (int mp = 0; mp < irreps_[j].dim; ++mp)
            w[offsets_[j] + m * irreps_[j].dim + mp] += (rule.weights[k] * dj(m, mp)) * yv;
      }
    }
    return w;
  }

  // <a|W(g; j m m')|b> = int_P dh J conj(psi_a(g h^-1)) psi_b(g h) D^j_{mm'}(g h^-2 g^-1)
  std::vector<Mat> build_kernel(const Element& g) const {
    const auto& group = space_.group();
    const int d = space_.dim();
    int degree = opt_.principal_degree >= 0
                     ? opt_.principal_degree
                     : 2 * group.degree_of_band(space_.band()) + 2 * group.degree_of_band(opt_.symbol_band) + 2;
    auto rule = group.principal_quadrature(degree);
    const Element ginv = group.inverse(g);
    std::vector<Mat> w(labels_, Mat::Zero(d, d));
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Element& h = rule.nodes[k];
      Vec pa = space_.basis_values(group.multiply(g, group.inverse(h))).conjugate();
      Vec pb = space_.basis_values(group.multiply(g, h));
      Mat outer = pa * pb.transpose();
      Element z = group.multiply(group.multiply(g, group.inverse(group.multiply(h, h))), ginv);
      for (std::size_t j = 0; j < irreps_.size(); ++j) {
        Mat dj = group.irrep_matrix(irreps_[j].label, z);
        for (int m = 0; m < irreps_[j].dim; ++m)
          for (int mp = 0; mp < irreps_[j].dim; ++mp)
            w[offsets_[j] + m * irreps_[j].dim + mp] += (rule.weights[k] * dj(m, mp)) * outer;
      }
    }
    return w;
  }

  // literal double sum with Kronecker delta on s(g', g'') = g
  std::vector<Mat> build_finite(const Element& g) const {
    const auto& group = space_.group();
    if constexpr (!std::is_integral_v<Element>) {
      throw UnsupportedOperation("finite route on a Lie group");
    } else {
    const int d = space_.dim();
    const int n = group.order();
    std::vector<Vec> psi(n);
    for (int x = 0; x < n; ++x) psi[x] = space_.basis_values(x);
    std::vector<Mat> w(labels_, Mat::Zero(d, d));
    const double scale = 1.0 / n;
    for (int g1 = 0; g1 < n; ++g1)
      for (int g2 = 0; g2 < n; ++g2) {
        if (midpoint(group, g1, g2).root != g) continue;
        Mat outer = psi[g1].conjugate() * psi[g2].transpose();
        Element z = group.multiply(g1, group.inverse(g2));
        for (std::size_t j = 0; j < irreps_.size(); ++j) {
          Mat dj = group.irrep_matrix(irreps_[j].label, z);
          for (int m = 0; m < irreps_[j].dim; ++m)
            for (int mp = 0; mp < irreps_[j].dim; ++mp)
              w[offsets_[j] + m * irreps_[j].dim + mp] += (scale * dj(m, mp)) * outer;
        }
      }
    return w;
    }
  }

  std::vector<Mat> symbol_at(const Mat& a, const Element& g) const {
    Mat vt = space_.right_regular(g);
    Mat ag = vt * a * vt.adjoint();
    Vec s = stack_t_ * vec(ag);
    std::vector<Mat> out;
    for (std::size_t j = 0; j < irreps_.size(); ++j) {
      const int n = irreps_[j].dim;
      Mat b(n, n);
      for (int m = 0; m < n; ++m)
        for (int mp = 0; mp < n; ++mp) b(m, mp) = s(offsets_[j] + m * n + mp);
      out.push_back(b);
    }
    return out;
  }

  SymbolField<Element> empty_field() const {
    SymbolField<Element> f;
    f.group = group().id();
    f.band = space_.band();
    f.symbol_band = opt_.symbol_band;
    f.node_set = nodes_.id;
    f.route = route_name(opt_.route);
    f.nodes = nodes_.nodes;
    f.weights = nodes_.weights;
    f.irreps = irreps_;
    f.values.assign(nodes_.size(), {});
    for (auto& node : f.values)
      for (const auto& ir : irreps_) node.push_back(Mat::Zero(ir.dim, ir.dim));
    return f;
  }

  SymbolField<Element> symbol(const Mat& a) const {
    check_operator(a);
    auto f = empty_field();
    parallel_for(nodes_.size(), opt_.threads, [&](std::size_t k) { f.values[k] = symbol_at(a, nodes_.nodes[k]); });
    return f;
  }

  // sum_k w_k sum_j N_j sum_{m m'} W(g_k; j m' m) W(g_k; j m m')
  Mat frame_sum(const SymbolField<Element>& field) const {
    check_field(field);
    const int d = space_.dim();
    std::vector<Mat> parts(field.nodes.size());
    parallel_for(field.nodes.size(), opt_.threads, [&](std::size_t k) {
      Vec c(labels_);
      for (std::size_t j = 0; j < irreps_.size(); ++j) {
        const int n = irreps_[j].dim;
        for (int m = 0; m < n; ++m)
          for (int mp = 0; mp < n; ++mp) c(offsets_[j] + m * n + mp) = static_cast<double>(n) * field.values[k][j](mp, m);
      }
      Mat inner = unvec(stack_.transpose() * c, d);
      Mat vt = space_.right_regular(field.nodes[k]);
      parts[k] = field.weights[k] * (vt.adjoint() * inner * vt);
    });
    Mat out = Mat::Zero(d, d);
    for (const auto& p : parts) out += p;
    return out;
  }

  // F = sum_k w_k sum_lambda N vec(W_k,lambda) vec(W_k,lambda)^dagger on band-J operators
  const Mat& frame_operator() const {
    std::call_once(frame_->once, [&] {
      const int d = space_.dim();
      Mat f = Mat::Zero(d * d, d * d);
      Mat b(d * d, labels_);
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        auto ws = phase_points(nodes_.nodes[k]);
        for (std::size_t j = 0; j < irreps_.size(); ++j) {
          const int n = irreps_[j].dim;
          double s = std::sqrt(nodes_.weights[k] * n);
          for (int l = offsets_[j]; l < offsets_[j] + n * n; ++l) b.col(l) = s * vec(ws[l]);
        }
        f.noalias() += b * b.adjoint();
      }
      frame_->f = f;
      Eigen::SelfAdjointEigenSolver<Mat> es(f, Eigen::EigenvaluesOnly);
      frame_->report.lambda_min = es.eigenvalues().minCoeff();
      frame_->report.lambda_max = es.eigenvalues().maxCoeff();
      frame_->report.deficit = 1.0 - frame_->report.lambda_min;
      frame_->llt.compute(f);
    });
    return frame_->f;
  }

  FrameReport frame_report() const {
    frame_operator();
    return frame_->report;
  }

  Mat reconstruct(const SymbolField<Element>& field, ReconstructMode mode = ReconstructMode::Dual,
                  bool allow_lossy = false) const {
    const auto& group = space_.group();
    if (!group.is_finite() && opt_.symbol_band < 2 * space_.band() && !allow_lossy)
      throw InsufficientBand("symbol band too small for reconstruction", 2 * space_.band());
    Mat r = frame_sum(field);
    if (mode == ReconstructMode::Literal || group.is_finite()) return r;
    frame_operator();
    if (frame_->report.lambda_min < 1e-10 && !allow_lossy)
      throw NumericalFailure("frame operator is singular, deficit " + std::to_string(frame_->report.deficit));
    Vec x = frame_->llt.solve(vec(r));
    return unvec(x, space_.dim());
  }

  // F^-1 A, so that the literal frame sum of its symbol returns A
  Mat dual_operator(const Mat& a) const {
    check_operator(a);
    if (space_.group().is_finite()) return a;
    frame_operator();
    return unvec(frame_->llt.solve(vec(a)), space_.dim());
  }

  cplx trace_pairing(const SymbolField<Element>& a, const SymbolField<Element>& b) const {
    check_field(a);
    check_field(b);
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
      cplx t = 0.0;
      for (std::size_t j = 0; j < irreps_.size(); ++j)
        t += static_cast<double>(irreps_[j].dim) * (a.values[k][j] * b.values[k][j]).trace();
      s += a.weights[k] * t;
    }
    return s;
  }

  // overcomplete Wigner block (m n, m' n') of an operator at g for one label
  Mat overcomplete(const Mat& rho, const Element& g, int label) const {
    const auto& group = space_.group();
    const int n = group.dim(label);
    int required = 2 * group.degree_of_band(space_.band()) + 2 * group.degree(label) + 2;
    if (opt_.principal_degree >= 0 && opt_.principal_degree < required && !group.is_finite())
      throw InsufficientBand("principal rule too coarse for the overcomplete Wigner function", required);
    auto rule = group.principal_quadrature(std::max(required, opt_.principal_degree));
    Mat out = Mat::Zero(n * n, n * n);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Element& h = rule.nodes[k];
      Element x = group.multiply(g, h), y = group.multiply(g, group.inverse(h));
      cplx kern = space_.basis_values(x).transpose() * rho * space_.basis_values(y).conjugate();
      Mat dx = group.irrep_matrix(label, x).conjugate(), dy = group.irrep_matrix(label, y);
      Vec vy(n * n), vx(n * n);
      for (int m = 0; m < n; ++m)
        for (int nn = 0; nn < n; ++nn) {
          vy(m * n + nn) = dy(m, nn);
          vx(m * n + nn) = dx(m, nn);
        }
      out += (rule.weights[k] * static_cast<double>(n) * kern) * vy * vx.transpose();
    }
    return out;
  }

  static Mat contract_overcomplete(const Mat& wt, int n) {
    Mat w = Mat::Zero(n, n);
    for (int m = 0; m < n; ++m)
      for (int mp = 0; mp < n; ++mp)
        for (int k = 0; k < n; ++k) w(m, mp) += wt(m * n + k, mp * n + k);
    return w / static_cast<double>(n);
  }

  // (left, right) covariance residuals over the symbol nodes
  std::pair<double, double> covariance_check(const Mat& a, const Element& g0, std::size_t max_nodes = 50) const {
    const auto& group = space_.group();
    Mat v = space_.left_regular(g0), vt = space_.right_regular(g0);
    Mat al = v * a * v.adjoint(), ar = vt * a * vt.adjoint();
    double left = 0.0, right = 0.0;
    const std::size_t step = std::max<std::size_t>(1, nodes_.size() / max_nodes);
    for (std::size_t k = 0; k < nodes_.size(); k += step) {
      const Element& g = nodes_.nodes[k];
      auto lhs = symbol_at(al, g);
      auto base = symbol_at(a, group.multiply(group.inverse(g0), g));
      auto rhs_r = symbol_at(a, group.multiply(g, g0));
      auto lr = symbol_at(ar, g);
      for (std::size_t j = 0; j < irreps_.size(); ++j) {
        Mat d = group.irrep_matrix(irreps_[j].label, g0);
        left = std::max(left, max_abs(lhs[j] - d * base[j] * d.adjoint()));
        right = std::max(right, max_abs(lr[j] - rhs_r[j]));
      }
    }
    return {left, right};
  }

 private:
  void check_operator(const Mat& a) const {
    if (a.rows() != space_.dim() || a.cols() != space_.dim())
      throw BandError("operator dimension " + std::to_string(a.rows()) + " does not match band dimension " +
                      std::to_string(space_.dim()));
  }
  void check_field(const SymbolField<Element>& f) const {
    if (f.values.size() != nodes_.size() || f.irreps != irreps_)
      throw BandError("symbol field was built for a different band or node set");
  }

  struct FrameCache {
    std::once_flag once;
    Mat f;
    FrameReport report;
    Eigen::LLT<Mat> llt;
  };

  Space<G> space_;
  PhaseSpaceOptions opt_;
  std::vector<Irrep> irreps_;
  std::vector<int> offsets_;
  int labels_ = 0;
  std::vector<Mat> we_;
  Mat stack_t_, stack_;
  QuadratureRule<Element> nodes_;
  std::shared_ptr<FrameCache> frame_ = std::make_shared<FrameCache>();
};

// exact symbol of f_L V(a) Vtilde(b) f_R at g from the delta kernel
template <Group G>
Mat delta_kernel_symbol(const G& group, const std::function<cplx(const typename G::Element&)>& fl,
                        const typename G::Element& a, const typename G::Element& b,
                        const std::function<cplx(const typename G::Element&)>& fr, const typename G::Element& g,
                        int label) {
  using E = typename G::Element;
  const E c = group.multiply(group.multiply(group.inverse(g), a), g);
  auto term = [&](const E& h) {
    E gh = group.multiply(g, h), ghi = group.multiply(g, group.inverse(h));
    E z = group.multiply(group.multiply(g, group.inverse(group.multiply(h, h))), group.inverse(g));
    return Mat(fl(gh) * fr(ghi) * group.irrep_matrix(label, z));
  };
  if constexpr (LieGroup<G>) {
    E h = group.principal_representative(
        group.multiply(group.sqrt0(group.multiply(c, b)).root, group.inverse(b)));
    auto phi = [&](const E& x) {
      E xi = group.inverse(x);
      return group.multiply(group.multiply(group.multiply(xi, c), xi), group.inverse(b));
    };
    const int n = group.lie_dimension();
    const E p0inv = group.inverse(phi(h));
    const double eps = 1e-3;
    RMat dphi(n, n);
    for (int k = 0; k < n; ++k) {
      auto at = [&](double t) {
        RVec x = RVec::Zero(n);
        x(k) = t;
        return group.log(group.multiply(p0inv, phi(group.multiply(h, group.exp(x)))));
      };
      dphi.col(k) = (-at(2 * eps) + 8.0 * at(eps) - 8.0 * at(-eps) + at(-2 * eps)) / (12.0 * eps);
    }
    return term(h) * (group.principal_jacobian(h) / std::abs(dphi.determinant()));
  } else {
    Mat out = Mat::Zero(group.dim(label), group.dim(label));
    for (E h = 0; h < group.order(); ++h) {
      E x = group.multiply(group.multiply(group.multiply(group.inverse(h), c), group.inverse(h)), group.inverse(b));
      if (x == group.identity()) out += term(h);
    }
    return out;
  }
}

}  // namespace gw

#endif

#pragma once

// Continuous Fourier transforms approximated on uniform grids.
//
// Normalisation: f̂(ω) = (2π)^{-n} ∫ f(x) e^{-i<ω,x>} dx, with the inverse
// f(x) = ∫ f̂(ω) e^{i<ω,x>} dω carrying no prefactor.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "barronlab/errors.hpp"
#include "barronlab/quadrature.hpp"
#include "barronlab/special.hpp"

namespace barronlab {

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

namespace detail {

inline Eigen::Index ipow(Eigen::Index base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Applies `kernels[d]` (new_len x old_len) along every axis d of a row-major
/// tensor whose axis lengths are `dims`. Axis 0 varies slowest.
template <class Scalar>
ComplexVectorX<Scalar> separable_apply(
    ComplexVectorX<Scalar> data, std::vector<Eigen::Index> dims,
    const std::vector<MatrixX<std::complex<Scalar>>>& kernels) {
  using Complex = std::complex<Scalar>;
  using RowMajor =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const auto& kernel = kernels[axis];
    Eigen::Index outer = 1;
    Eigen::Index inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= dims[d];
    for (std::size_t d = axis + 1; d < dims.size(); ++d) inner *= dims[d];
    const Eigen::Index old_len = dims[axis];
    const Eigen::Index new_len = kernel.rows();
    ComplexVectorX<Scalar> next(outer * new_len * inner);
    for (Eigen::Index o = 0; o < outer; ++o) {
      Eigen::Map<const RowMajor> in(data.data() + o * old_len * inner, old_len,
                                    inner);
      Eigen::Map<RowMajor> out(next.data() + o * new_len * inner, new_len,
                               inner);
      out.noalias() = kernel * in;
    }
    data = std::move(next);
    dims[axis] = new_len;
  }
  return data;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Real samples of a function on the uniform grid
/// center_d - h_d + j * 2 h_d / (N - 1), j = 0..N-1, stored row-major.
template <class Scalar = double>
class GridFunction {
 public:
  using Vector = VectorX<Scalar>;

  GridFunction(Vector center, Vector half_width, int resolution, Vector values)
      : center_(std::move(center)),
        half_width_(std::move(half_width)),
        resolution_(resolution),
        values_(std::move(values)) {
    if (center_.size() < 1 || center_.size() != half_width_.size()) {
      throw InvalidInput("GridFunction: center and half-width dimensions");
    }
    if ((half_width_.array() <= 0).any()) {
      throw InvalidInput("GridFunction: half-widths must be positive");
    }
    if (resolution_ < 2) throw InvalidInput("GridFunction: resolution < 2");
    if (values_.size() != detail::ipow(resolution_, dimension())) {
      throw InvalidInput("GridFunction: expected resolution^n values");
    }
    if (!values_.allFinite()) {
      throw InvalidInput("GridFunction: non-finite samples");
    }
  }

  /// Samples `fn(x)` at every node.
  template <class F>
  static GridFunction sample(const Vector& center, const Vector& half_width,
                             int resolution, F&& fn) {
    const int n = static_cast<int>(center.size());
    Vector values(detail::ipow(resolution, n));
    GridFunction shape(center, half_width, resolution, Vector::Zero(values.size()));
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      values[k] = static_cast<Scalar>(fn(shape.point(k)));
    }
    return GridFunction(center, half_width, resolution, std::move(values));
  }

  int dimension() const { return static_cast<int>(center_.size()); }
  int resolution() const { return resolution_; }
  Eigen::Index size() const { return values_.size(); }
  const Vector& center() const { return center_; }
  const Vector& half_width() const { return half_width_; }
  const Vector& values() const { return values_; }

  Scalar spacing(int axis) const {
    return 2 * half_width_[axis] / (resolution_ - 1);
  }
  Scalar node(int axis, int j) const {
    return center_[axis] - half_width_[axis] + j * spacing(axis);
  }
  /// Per-axis multi-index of a flat index.
  std::vector<int> index(Eigen::Index flat) const {
    std::vector<int> idx(dimension());
    for (int d = dimension() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % resolution_);
      flat /= resolution_;
    }
    return idx;
  }
  Vector point(Eigen::Index flat) const {
    const auto idx = index(flat);
    Vector x(dimension());
    for (int d = 0; d < dimension(); ++d) x[d] = node(d, idx[d]);
    return x;
  }
  Scalar cell_volume() const {
    Scalar v = 1;
    for (int d = 0; d < dimension(); ++d) v *= spacing(d);
    return v;
  }
  /// Product trapezoid weights (1/2 per boundary axis), without spacing.
  Scalar trapezoid_weight(Eigen::Index flat) const {
    Scalar w = 1;
    for (int j : index(flat)) {
      if (j == 0 || j == resolution_ - 1) w *= Scalar(0.5);
    }
    return w;
  }

  bool same_grid(const GridFunction& o) const {
    return resolution_ == o.resolution_ && center_ == o.center_ &&
           half_width_ == o.half_width_;
  }

  GridFunction with_values(Vector values) const {
    return GridFunction(center_, half_width_, resolution_, std::move(values));
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    a.require_same(b);
    return a.with_values(a.values_ + b.values_);
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    a.require_same(b);
    return a.with_values(a.values_ - b.values_);
  }
  friend GridFunction operator*(Scalar s, const GridFunction& a) {
    return a.with_values(s * a.values_);
  }
  /// Pointwise product.
  GridFunction cwiseProduct(const GridFunction& b) const {
    require_same(b);
    return with_values(values_.cwiseProduct(b.values_));
  }

 private:
  void require_same(const GridFunction& b) const {
    if (!same_grid(b)) throw InvalidInput("GridFunction: grids differ");
  }

  Vector center_;
  Vector half_width_;
  int resolution_;
  Vector values_;
};

/// ∫ f dx by the trapezoid rule.
template <class Scalar>
Scalar integral(const GridFunction<Scalar>& f) {
  Scalar s = 0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    s += f.trapezoid_weight(k) * f.values()[k];
  }
  return s * f.cell_volume();
}

/// ∫ |f|² dx by the trapezoid rule.
template <class Scalar>
Scalar squared_norm(const GridFunction<Scalar>& f) {
  return integral(f.cwiseProduct(f));
}

// ---------------------------------------------------------------------------

/// Complex amplitudes f̂(ω_k) on a set of frequency nodes. Tensor grids keep
/// their per-axis nodes so transforms can be applied separably.
template <class Scalar = double>
class SpectrumGrid {
 public:
  using Vector = VectorX<Scalar>;
  using Complex = std::complex<Scalar>;
  using ComplexVector = ComplexVectorX<Scalar>;

  /// Uniform tensor grid, `count` nodes per axis spanning [-cutoff, cutoff].
  static Vector axis_nodes(Scalar cutoff, int count) {
    if (count < 2) throw InvalidInput("SpectrumGrid: need >= 2 nodes per axis");
    return Vector::LinSpaced(count, -cutoff, cutoff);
  }

  SpectrumGrid(int dimension, Scalar cutoff, Vector axis, ComplexVector amplitudes)
      : dimension_(dimension),
        cutoff_(cutoff),
        axis_(std::move(axis)),
        amplitudes_(std::move(amplitudes)) {
    if (dimension_ < 1) throw InvalidInput("SpectrumGrid: dimension < 1");
    if (!(cutoff_ > 0)) throw InvalidInput("SpectrumGrid: cutoff must be > 0");
    if (axis_.size() < 2) throw InvalidInput("SpectrumGrid: axis too short");
    if (amplitudes_.size() != detail::ipow(axis_.size(), dimension_)) {
      throw InvalidInput("SpectrumGrid: one amplitude per node required");
    }
    if (axis_.cwiseAbs().maxCoeff() > cutoff_ * (1 + Scalar(1e-12))) {
      throw InvalidInput("SpectrumGrid: nodes beyond cutoff");
    }
    cell_volume_ = std::pow(axis_[1] - axis_[0], dimension_);
    nodes_ = MatrixX<Scalar>(dimension_, amplitudes_.size());
    for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
      Eigen::Index flat = k;
      for (int d = dimension_ - 1; d >= 0; --d) {
        nodes_(d, k) = axis_[flat % axis_.size()];
        flat /= axis_.size();
      }
    }
    check_amplitudes();
  }

  /// Arbitrary node set (columns of `nodes`) with a caller-supplied cell volume.
  SpectrumGrid(MatrixX<Scalar> nodes, ComplexVector amplitudes,
               Scalar cell_volume, Scalar cutoff)
      : dimension_(static_cast<int>(nodes.rows())),
        cutoff_(cutoff),
        cell_volume_(cell_volume),
        nodes_(std::move(nodes)),
        amplitudes_(std::move(amplitudes)) {
    if (dimension_ < 1) throw InvalidInput("SpectrumGrid: dimension < 1");
    if (nodes_.cols() != amplitudes_.size()) {
      throw InvalidInput("SpectrumGrid: one amplitude per node required");
    }
    if (!(cell_volume_ > 0) || !(cutoff_ > 0)) {
      throw InvalidInput("SpectrumGrid: cell volume and cutoff must be > 0");
    }
    if (nodes_.size() > 0 &&
        nodes_.cwiseAbs().maxCoeff() > cutoff_ * (1 + Scalar(1e-12))) {
      throw InvalidInput("SpectrumGrid: nodes beyond cutoff");
    }
    check_amplitudes();
  }

  int dimension() const { return dimension_; }
  Scalar cutoff() const { return cutoff_; }
  Scalar cell_volume() const { return cell_volume_; }
  bool is_tensor() const { return axis_.size() > 0; }
  const Vector& axis() const { return axis_; }
  const MatrixX<Scalar>& nodes() const { return nodes_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Eigen::Index size() const { return amplitudes_.size(); }
  auto node(Eigen::Index k) const { return nodes_.col(k); }

  /// Σ |f̂| Δω over the outermost shell of a tensor grid.
  Scalar tail_estimate() const { return tail_estimate_; }
  void set_tail_estimate(Scalar t) { tail_estimate_ = t; }

  /// True for nodes on the outer face of a tensor grid.
  bool on_outer_shell(Eigen::Index k) const {
    if (!is_tensor()) return false;
    const Eigen::Index m = axis_.size();
    for (int d = 0; d < dimension_; ++d) {
      const Eigen::Index j = k % m;
      if (j == 0 || j == m - 1) return true;
      k /= m;
    }
    return false;
  }

  /// Same nodes, new amplitudes.
  SpectrumGrid with_amplitudes(ComplexVector a) const {
    SpectrumGrid out = *this;
    if (a.size() != amplitudes_.size()) {
      throw InvalidInput("SpectrumGrid: amplitude count mismatch");
    }
    out.amplitudes_ = std::move(a);
    out.check_amplitudes();
    return out;
  }

 private:
  void check_amplitudes() const {
    if (!amplitudes_.allFinite()) {
      throw InvalidInput("SpectrumGrid: non-finite amplitudes");
    }
  }

  int dimension_;
  Scalar cutoff_;
  Scalar cell_volume_ = 0;
  Vector axis_;
  MatrixX<Scalar> nodes_;
  ComplexVector amplitudes_;
  Scalar tail_estimate_ = 0;
};

// ---------------------------------------------------------------------------

/// Uniform-grid approximation of f̂ on a centred tensor frequency grid with
/// `freq_resolution` nodes per axis spanning [-cutoff, cutoff].
template <class Scalar>
SpectrumGrid<Scalar> forward_ft(const GridFunction<Scalar>& f, Scalar cutoff,
                                int freq_resolution) {
  using Complex = std::complex<Scalar>;
  const int n = f.dimension();
  if (!(cutoff > 0)) throw InvalidInput("forward_ft: cutoff must be positive");
  for (int d = 0; d < n; ++d) {
    if (cutoff > std::numbers::pi_v<Scalar> / f.spacing(d)) {
      throw ResolutionError("forward_ft: cutoff exceeds pi / dx; refine the "
                            "spatial grid");
    }
  }
  const VectorX<Scalar> axis =
      SpectrumGrid<Scalar>::axis_nodes(cutoff, freq_resolution);
  std::vector<MatrixX<Complex>> kernels;
  for (int d = 0; d < n; ++d) {
    MatrixX<Complex> kernel(freq_resolution, f.resolution());
    const Scalar dx = f.spacing(d);
    for (int j = 0; j < f.resolution(); ++j) {
      const Scalar x = f.node(d, j);
      const Scalar w = (j == 0 || j == f.resolution() - 1) ? dx / 2 : dx;
      for (int k = 0; k < freq_resolution; ++k) {
        kernel(k, j) = w * std::polar(Scalar(1), -axis[k] * x);
      }
    }
    kernels.push_back(std::move(kernel));
  }
  ComplexVectorX<Scalar> data = f.values().template cast<Complex>();
  data = detail::separable_apply<Scalar>(
      std::move(data), std::vector<Eigen::Index>(n, f.resolution()), kernels);
  data *= std::pow(2 * std::numbers::pi_v<Scalar>, -n);
  SpectrumGrid<Scalar> s(n, cutoff, axis, std::move(data));
  Scalar tail = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s.on_outer_shell(k)) tail += std::abs(s.amplitudes()[k]);
  }
  s.set_tail_estimate(tail * s.cell_volume());
  return s;
}

/// f̂ at a single frequency by direct summation over the grid.
template <class Scalar, class Derived>
std::complex<Scalar> fourier_at(const GridFunction<Scalar>& f,
                                const Eigen::MatrixBase<Derived>& omega) {
  using Complex = std::complex<Scalar>;
  const int n = f.dimension();
  if (omega.size() != n) throw InvalidInput("fourier_at: dimension mismatch");
  std::vector<MatrixX<Complex>> kernels;
  for (int d = 0; d < n; ++d) {
    MatrixX<Complex> kernel(1, f.resolution());
    const Scalar dx = f.spacing(d);
    for (int j = 0; j < f.resolution(); ++j) {
      const Scalar w = (j == 0 || j == f.resolution() - 1) ? dx / 2 : dx;
      kernel(0, j) = w * std::polar(Scalar(1), -Scalar(omega[d]) * f.node(d, j));
    }
    kernels.push_back(std::move(kernel));
  }
  const ComplexVectorX<Scalar> out = detail::separable_apply<Scalar>(
      f.values().template cast<Complex>(),
      std::vector<Eigen::Index>(n, f.resolution()), kernels);
  return out[0] * std::pow(2 * std::numbers::pi_v<Scalar>, -n);
}

template <class Scalar>
struct InverseResult {
  GridFunction<Scalar> function;
  Scalar imaginary_residual;  // max |Im f(x)| over the target grid
};

/// f(x) ≈ Σ_k f̂(ω_k) e^{i<ω_k,x>} Δω on the target grid.
template <class Scalar>
InverseResult<Scalar> inverse_ft(const SpectrumGrid<Scalar>& s,
                                 const std::type_identity_t<VectorX<Scalar>>& center,
                                 const std::type_identity_t<VectorX<Scalar>>& half_width,
                                 int resolution) {
  using Complex = std::complex<Scalar>;
  const int n = s.dimension();
  if (center.size() != n || half_width.size() != n) {
    throw InvalidInput("inverse_ft: target box dimension mismatch");
  }
  // Shape-only grid used for node coordinates.
  const GridFunction<Scalar> target(
      center, half_width, resolution,
      VectorX<Scalar>::Zero(detail::ipow(resolution, n)));
  ComplexVectorX<Scalar> out;
  if (s.is_tensor()) {
    std::vector<MatrixX<Complex>> kernels;
    for (int d = 0; d < n; ++d) {
      MatrixX<Complex> kernel(resolution, s.axis().size());
      for (int j = 0; j < resolution; ++j) {
        for (Eigen::Index k = 0; k < s.axis().size(); ++k) {
          kernel(j, k) = std::polar(Scalar(1), s.axis()[k] * target.node(d, j));
        }
      }
      kernels.push_back(std::move(kernel));
    }
    out = detail::separable_apply<Scalar>(
        s.amplitudes(), std::vector<Eigen::Index>(n, s.axis().size()), kernels);
  } else {
    out = ComplexVectorX<Scalar>::Zero(target.size());
    for (Eigen::Index j = 0; j < target.size(); ++j) {
      const VectorX<Scalar> x = target.point(j);
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        out[j] += s.amplitudes()[k] *
                  std::polar(Scalar(1), Scalar(s.node(k).dot(x)));
      }
    }
  }
  out *= s.cell_volume();
  return {target.with_values(out.real()), out.imag().cwiseAbs().maxCoeff()};
}

/// |∫|f|² dx - (2π)^n ∫|f̂|² dω| / ∫|f|² dx; 0 when f vanishes.
template <class Scalar>
Scalar plancherel_residual(const GridFunction<Scalar>& f,
                           const SpectrumGrid<Scalar>& s) {
  const Scalar spatial = squared_norm(f);
  if (spatial == 0) return 0;
  const Scalar spectral = std::pow(2 * std::numbers::pi_v<Scalar>, f.dimension()) *
                          s.amplitudes().squaredNorm() * s.cell_volume();
  return std::abs(spatial - spectral) / spatial;
}

/// Central differences inside, one-sided differences on the boundary.
template <class Scalar>
std::vector<GridFunction<Scalar>> gradient_grid(const GridFunction<Scalar>& f) {
  const int n = f.dimension();
  const int N = f.resolution();
  if (N < 4) throw InvalidInput("gradient_grid: resolution must be >= 4");
  std::vector<GridFunction<Scalar>> out;
  for (int d = 0; d < n; ++d) {
    const Eigen::Index stride = detail::ipow(N, n - 1 - d);
    const Scalar dx = f.spacing(d);
    VectorX<Scalar> g(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) {
      const int j = static_cast<int>((k / stride) % N);
      const auto& v = f.values();
      if (j == 0) {
        g[k] = (v[k + stride] - v[k]) / dx;
      } else if (j == N - 1) {
        g[k] = (v[k] - v[k - stride]) / dx;
      } else {
        g[k] = (v[k + stride] - v[k - stride]) / (2 * dx);
      }
    }
    out.push_back(f.with_values(std::move(g)));
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class SetKind { ball, box, polytope };

/// Origin-centred bounded set B used by the support norm ‖ω‖_B.
template <class Scalar = double>
class BoundedSet {
 public:
  static BoundedSet ball(int dimension, Scalar radius) {
    if (dimension < 1) throw InvalidInput("BoundedSet: dimension < 1");
    if (!(radius > 0)) throw InvalidInput("BoundedSet: radius must be > 0");
    BoundedSet b(SetKind::ball, dimension);
    b.radius_ = radius;
    return b;
  }
  static BoundedSet box(VectorX<Scalar> half_width,
                        const VectorX<Scalar>& center = VectorX<Scalar>()) {
    if (half_width.size() < 1) throw InvalidInput("BoundedSet: empty box");
    if ((half_width.array() <= 0).any()) {
      throw InvalidInput("BoundedSet: half-widths must be > 0");
    }
    if (center.size() > 0 && (center.array() != 0).any()) {
      throw InvalidInput("BoundedSet: boxes must be origin-centred");
    }
    BoundedSet b(SetKind::box, static_cast<int>(half_width.size()));
    b.half_width_ = std::move(half_width);
    return b;
  }
  /// Vertices as columns.
  static BoundedSet polytope(MatrixX<Scalar> vertices) {
    if (vertices.cols() < 1 || vertices.rows() < 1) {
      throw InvalidInput("BoundedSet: polytope needs >= 1 vertex");
    }
    if (!vertices.allFinite()) throw InvalidInput("BoundedSet: bad vertex");
    BoundedSet b(SetKind::polytope, static_cast<int>(vertices.rows()));
    b.vertices_ = std::move(vertices);
    return b;
  }

  SetKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  Scalar radius() const { return radius_; }
  const VectorX<Scalar>& half_width() const { return half_width_; }
  const MatrixX<Scalar>& vertices() const { return vertices_; }

  /// sup_{x in B} ‖x‖₂.
  Scalar outer_radius() const {
    switch (kind_) {
      case SetKind::ball:
        return radius_;
      case SetKind::box:
        return half_width_.norm();
      case SetKind::polytope:
        return vertices_.colwise().norm().maxCoeff();
    }
    return 0;
  }

  BoundedSet scaled(Scalar factor) const {
    BoundedSet b = *this;
    b.radius_ *= factor;
    b.half_width_ *= factor;
    b.vertices_ *= factor;
    return b;
  }

  friend bool operator==(const BoundedSet& a, const BoundedSet& b) {
    return a.kind_ == b.kind_ && a.dimension_ == b.dimension_ &&
           a.radius_ == b.radius_ && a.half_width_ == b.half_width_ &&
           a.vertices_ == b.vertices_;
  }

 private:
  BoundedSet(SetKind kind, int dimension) : kind_(kind), dimension_(dimension) {}

  SetKind kind_;
  int dimension_;
  Scalar radius_ = 0;
  VectorX<Scalar> half_width_;
  MatrixX<Scalar> vertices_;
};

/// ‖ω‖_B = sup_{x in B} |<ω, x>|.
template <class Scalar, class Derived>
Scalar support_norm(const BoundedSet<Scalar>& set,
                    const Eigen::MatrixBase<Derived>& omega) {
  if (omega.size() != set.dimension()) {
    throw InvalidInput("support_norm: dimension mismatch");
  }
  switch (set.kind()) {
    case SetKind::ball:
      return set.radius() * Scalar(omega.norm());
    case SetKind::box:
      return set.half_width().dot(omega.cwiseAbs().template cast<Scalar>());
    case SetKind::polytope:
      return (set.vertices().transpose() * omega.template cast<Scalar>())
          .cwiseAbs()
          .maxCoeff();
  }
  return 0;
}

// ---------------------------------------------------------------------------

template <class Scalar>
struct RadialTransform {
  std::vector<Scalar> values;
  Scalar error_bound = 0;  // propagated Bessel evaluation error
};

/// f̂(ω) for f(x) = f₁(‖x‖) on R^n at the given ‖ω‖ values:
/// (2π)^{-n/2} ρ^{1-n/2} ∫ r^{n/2} f₁(r) J_{n/2-1}(ρ r) dr.
template <class Scalar = double>
RadialTransform<Scalar> radial_ft(const RadialProfile& profile, int n,
                                  const std::vector<Scalar>& magnitudes,
                                  double tolerance = 1e-13) {
  if (n < 2) throw InvalidInput("radial_ft: dimension must be >= 2");
  const double a = std::max(0.0, profile.lower());
  const double b = profile.upper();
  if (!(b > a)) throw InvalidInput("radial_ft: empty profile support");
  const double half = 0.5 * n;
  const double order = half - 1.0;
  const double two_pi = 2.0 * std::numbers::pi;
  // ∫ |r^{n/2} f1| dr, used to scale tolerances and the Bessel error bound.
  const auto weight = [&](double r) { return std::pow(r, half) * std::abs(profile(r)); };
  double rough = 0.0;
  for (int t = 0; t < 256; ++t) rough += weight(a + (t + 0.5) * (b - a) / 256);
  rough *= (b - a) / 256;
  const double mass = adaptive_simpson(weight, a, b, 1e-12 * std::max(rough, 1e-300), 64);

  RadialTransform<Scalar> out;
  out.values.reserve(magnitudes.size());
  for (Scalar rho_s : magnitudes) {
    const double rho = static_cast<double>(rho_s);
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
      throw InvalidInput("radial_ft: magnitudes must be finite and >= 0");
    }
    if (rho == 0.0) {
      const double moment = adaptive_simpson(
          [&](double r) { return std::pow(r, n - 1.0) * profile(r); }, a, b,
          tolerance * std::max(mass, 1e-300), 64);
      out.values.push_back(static_cast<Scalar>(
          std::pow(two_pi, -half) * std::pow(2.0, 1.0 - half) /
          gamma_fn(half) * moment));
      continue;
    }
    const double periods = (b - a) * rho / two_pi;
    const int panels = std::max(16, static_cast<int>(std::ceil(16.0 * periods)));
    double worst_bessel = 0.0;
    const double value = adaptive_simpson(
        [&](double r) {
          if (r <= 0.0) return 0.0;
          const BesselEval j = bessel_j(order, rho * r);
          worst_bessel = std::max(worst_bessel, j.error_bound);
          return std::pow(r, half) * profile(r) * j.value;
        },
        a, b, tolerance * std::max(mass, 1e-300), panels);
    const double prefactor = std::pow(two_pi, -half) * std::pow(rho, 1.0 - half);
    out.values.push_back(static_cast<Scalar>(prefactor * value));
    out.error_bound = std::max(
        out.error_bound, static_cast<Scalar>(prefactor * worst_bessel * mass));
  }
  return out;
}

using GridFunctiond = GridFunction<double>;
using SpectrumGridd = SpectrumGrid<double>;
using BoundedSetd = BoundedSet<double>;

}  // namespace barronlab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/linsolve.hpp"
#include "hfsc/model.hpp"

namespace hfsc {

/// exp(|Re theta|) must stay clear of double overflow even after the
/// products inside the M entries; 300 keeps every e^{+-2 Re theta} finite.
inline constexpr double kPhaseRealBound = 300.0;
inline constexpr double kCondWarn = 1e12;
inline constexpr double kCondFail = 1e15;

using PhaseValue = Complex;

/// theta_j = i sigma_j (x + k y) - i alpha4 sigma_j^2 t.
/// Throws Errc::domain_too_large when |Re theta| exceeds the overflow guard.
inline PhaseValue phase(const SpectrumEntry& entry, const SpaceTimePoint& p,
                        const PhysicalModel& model) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
    throw Error(Errc::invalid_parameter, "non-finite space-time point");
  }
  const Complex i(0.0, 1.0);
  const double xt = p.xtilde(model);
  const Complex theta =
      i * entry.sigma * xt - i * model.alpha4 * entry.sigma * entry.sigma * p.t;
  if (!(std::abs(theta.real()) <= kPhaseRealBound)) {
    throw Error(Errc::domain_too_large,
                "phase overflow guard tripped: |Re theta| = " +
                    std::to_string(std::abs(theta.real())) + " > 300 at (x=" +
                    std::to_string(p.x) + ", y=" + std::to_string(p.y) +
                    ", t=" + std::to_string(p.t) + "), sigma = (" +
                    std::to_string(entry.sigma.real()) + ", " +
                    std::to_string(entry.sigma.imag()) + ")");
  }
  return theta;
}

/// N x N matrix of the reflectionless closed form:
///   m_kj = (a_k* a_j e^{theta_k* + theta_j} + b_k* b_j e^{-theta_k* - theta_j})
///          / (sigma_j - sigma_k*).
struct MMatrix {
  std::vector<Complex> m;  // row-major
  std::size_t n = 0;
  double cond_estimate = 0.0;
  bool ill_conditioned = false;  // cond_estimate > 1e12
};

namespace detail {

inline std::vector<Complex> phases_at(const SolitonSpectrum& spectrum,
                                      const SpaceTimePoint& p,
                                      const PhysicalModel& model) {
  std::vector<Complex> th(spectrum.size());
  for (std::size_t j = 0; j < spectrum.size(); ++j)
    th[j] = phase(spectrum[j], p, model);
  return th;
}

inline std::vector<Complex> m_entries(const SolitonSpectrum& spectrum,
                                      const std::vector<Complex>& th) {
  const std::size_t n = spectrum.size();
  std::vector<Complex> m(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex ak = std::conj(spectrum[k].a);
    const Complex bk = std::conj(spectrum[k].b);
    const Complex thk = std::conj(th[k]);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex num = ak * spectrum[j].a * std::exp(thk + th[j]) +
                          bk * spectrum[j].b * std::exp(-thk - th[j]);
      m[k * n + j] = num / (spectrum[j].sigma - std::conj(spectrum[k].sigma));
    }
  }
  return m;
}

/// Pivoted factorization of S M S with the symmetric diagonal scaling
/// S_j = |m_jj|^{-1/2}.  Far-separated solitons grade M by e^{+-2 Re theta}
/// without making the solve meaningless; equilibrating first lets the
/// condition estimate measure genuine degeneracy (nearly coincident
/// spectral points) instead of that benign grading.  The diagonal is
/// bounded below by |a_j b_j| / Im(sigma_j), so S is always well defined.
struct ScaledFactors {
  LuFactors factors;          // of S M S
  std::vector<double> scale;  // S_j
  double cond = 0.0;          // 1-norm condition estimate of S M S
};

inline ScaledFactors factor_m(std::vector<Complex> m, std::size_t n) {
  ScaledFactors out;
  out.scale.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::abs(m[j * n + j]);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(Errc::conditioning,
                  "M matrix diagonal entry degenerate or overflowed",
                  std::numeric_limits<double>::infinity());
    }
    out.scale[j] = 1.0 / std::sqrt(d);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      m[k * n + j] *= out.scale[k] * out.scale[j];
  const double a1 = norm1(m, n);
  out.factors = lu_factor(std::move(m), n);
  out.cond = condition_estimate(out.factors, a1);
  return out;
}

}  // namespace detail

inline MMatrix build_m_matrix(const SolitonSpectrum& spectrum,
                              const SpaceTimePoint& p,
                              const PhysicalModel& model) {
  MMatrix out;
  out.n = spectrum.size();
  out.m = detail::m_entries(spectrum, detail::phases_at(spectrum, p, model));
  out.cond_estimate = detail::factor_m(out.m, out.n).cond;
  out.ill_conditioned = out.cond_estimate > kCondWarn;
  return out;
}

struct FieldSample {
  Complex u;
  SpaceTimePoint point;
};

/// General N-soliton field
///   u = -2 sum_{k,j} b_k a_j* e^{theta_j* - theta_k} (M^{-1})_{kj},
/// evaluated by one pivoted linear solve against M (the double sum is
/// B^T M^{-1} A with A_j = a_j* e^{theta_j*}, B_k = b_k e^{-theta_k}).
inline FieldSample eval_nsoliton(const SolitonSpectrum& spectrum,
                                 const SpaceTimePoint& p,
                                 const PhysicalModel& model) {
  const std::size_t n = spectrum.size();
  const std::vector<Complex> th = detail::phases_at(spectrum, p, model);
  const detail::ScaledFactors f =
      detail::factor_m(detail::m_entries(spectrum, th), n);
  if (!(f.cond < kCondFail)) {
    throw Error(Errc::conditioning,
                "M matrix numerically singular (cond ~ " +
                    std::to_string(f.cond) + ") at (x=" + std::to_string(p.x) +
                    ", y=" + std::to_string(p.y) +
                    ", t=" + std::to_string(p.t) + ")",
                f.cond);
  }

  // M z = A with A_j = a_j* e^{theta_j*}, via (S M S)(S^{-1} z) = S A
  std::vector<Complex> rhs(n);
  for (std::size_t j = 0; j < n; ++j)
    rhs[j] = f.scale[j] * std::conj(spectrum[j].a) * std::exp(std::conj(th[j]));
  const std::vector<Complex> w = lu_solve(f.factors, rhs);

  Complex u(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    u += spectrum[k].b * std::exp(-th[k]) * f.scale[k] * w[k];
  u *= -2.0;
  if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
    throw Error(Errc::domain_too_large,
                "field evaluation overflowed at (x=" + std::to_string(p.x) +
                    ", y=" + std::to_string(p.y) +
                    ", t=" + std::to_string(p.t) + ")");
  }
  return FieldSample{u, p};
}

/// One-soliton closed form, implemented directly (not through M):
///   u = -2 a1* b1 (sigma1 - sigma1*) e^{theta1* - theta1}
///       / (|a1|^2 e^{theta1* + theta1} + |b1|^2 e^{-theta1* - theta1}).
inline FieldSample eval_one_soliton(const SpectrumEntry& entry,
                                    const SpaceTimePoint& p,
                                    const PhysicalModel& model) {
  const Complex th = phase(entry, p, model);
  const Complex thc = std::conj(th);
  const double two_re = (thc + th).real();
  const double aa = std::norm(entry.a);
  const double bb = std::norm(entry.b);
  const Complex denom = aa * std::exp(two_re) + bb * std::exp(-two_re);
  const Complex num = -2.0 * std::conj(entry.a) * entry.b *
                      (entry.sigma - std::conj(entry.sigma)) *
                      std::exp(thc - th);
  return FieldSample{num / denom, p};
}

/// Two-soliton closed form through the explicit 2x2 inverse.  The
/// determinant guard is a relative-cancellation test: it trips when the
/// two entry products nearly cancel (spectral points too close), not when
/// the matrix is merely strongly graded by separated solitons.
inline FieldSample eval_two_soliton(const SolitonSpectrum& spectrum,
                                    const SpaceTimePoint& p,
                                    const PhysicalModel& model) {
  if (spectrum.size() != 2) {
    throw Error(Errc::invalid_parameter,
                "two-soliton evaluator requires exactly 2 spectrum entries");
  }
  const std::vector<Complex> th = detail::phases_at(spectrum, p, model);
  const std::vector<Complex> m = detail::m_entries(spectrum, th);

  const Complex prod_diag = m[0] * m[3];
  const Complex prod_off = m[1] * m[2];
  const Complex det = prod_diag - prod_off;
  const double scale2 = std::max(std::abs(prod_diag), std::abs(prod_off));
  if (!std::isfinite(scale2)) {
    throw Error(Errc::domain_too_large,
                "two-soliton entry products overflowed at (x=" +
                    std::to_string(p.x) + ", y=" + std::to_string(p.y) +
                    ", t=" + std::to_string(p.t) + ")");
  }
  if (std::abs(det) < 1e-14 * scale2) {
    throw Error(Errc::conditioning,
                "two-soliton determinant cancels below 1e-14 of entry scale",
                scale2 / std::abs(det));
  }

  const Complex a1c = std::conj(spectrum[0].a);
  const Complex a2c = std::conj(spectrum[1].a);
  const Complex b1 = spectrum[0].b;
  const Complex b2 = spectrum[1].b;
  const Complex num = b1 * a1c * m[3] * std::exp(std::conj(th[0]) - th[0]) -
                      b1 * a2c * m[1] * std::exp(std::conj(th[1]) - th[0]) -
                      b2 * a1c * m[2] * std::exp(std::conj(th[0]) - th[1]) +
                      b2 * a2c * m[0] * std::exp(std::conj(th[1]) - th[1]);
  const Complex u = -2.0 * num / det;
  if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
    throw Error(Errc::domain_too_large,
                "field evaluation overflowed at (x=" + std::to_string(p.x) +
                    ", y=" + std::to_string(p.y) +
                    ", t=" + std::to_string(p.t) + ")");
  }
  return FieldSample{u, p};
}

enum class Evaluator { general, one, two };

inline const char* evaluator_name(Evaluator e) {
  switch (e) {
    case Evaluator::general: return "general";
    case Evaluator::one: return "one";
    case Evaluator::two: return "two";
  }
  return "general";
}

struct GridAxis {
  char name = 'x';  // one of x, y, t
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;

  double node(std::size_t i) const {
    if (count <= 1) return min;
    return min + (max - min) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
  }
};

struct GridFixed {
  char name = 'y';
  double value = 0.0;
};

/// Uniform ranges over a subset of {x, y, t}; the rest pinned by `fixed`
/// (coordinates mentioned nowhere default to 0).
struct GridSpec {
  std::vector<GridAxis> axes;
  std::vector<GridFixed> fixed;
};

namespace detail {

inline void validate_grid_spec(const GridSpec& spec) {
  if (spec.axes.empty()) {
    throw Error(Errc::invalid_parameter, "grid spec has no axes");
  }
  bool seen[3] = {false, false, false};
  auto slot = [](char name) -> int {
    switch (name) {
      case 'x': return 0;
      case 'y': return 1;
      case 't': return 2;
      default: return -1;
    }
  };
  auto mark = [&](char name, const char* what) {
    const int s = slot(name);
    if (s < 0) {
      throw Error(Errc::invalid_parameter,
                  std::string(what) + " name must be one of x, y, t");
    }
    if (seen[s]) {
      throw Error(Errc::invalid_parameter,
                  std::string("coordinate '") + name + "' specified twice");
    }
    seen[s] = true;
  };
  for (const GridAxis& a : spec.axes) {
    mark(a.name, "axis");
    if (a.count < 1) {
      throw Error(Errc::invalid_parameter, "axis count must be >= 1");
    }
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || a.min > a.max) {
      throw Error(Errc::invalid_parameter, "axis range invalid");
    }
  }
  for (const GridFixed& f : spec.fixed) {
    mark(f.name, "fixed coordinate");
    if (!std::isfinite(f.value)) {
      throw Error(Errc::invalid_parameter, "fixed coordinate not finite");
    }
  }
}

}  // namespace detail

/// Field values on a grid, row-major over the axes in declaration order
/// (last axis fastest), so CSV output is reproducible byte-for-byte.
struct FieldGrid {
  GridSpec spec;
  std::vector<Complex> values;
  PhysicalModel model;
  SolitonSpectrum spectrum;
  Evaluator evaluator = Evaluator::general;

  std::size_t node_count() const {
    std::size_t n = 1;
    for (const GridAxis& a : spec.axes) n *= a.count;
    return n;
  }
};

inline FieldGrid eval_grid(const SolitonSpectrum& spectrum,
                           const PhysicalModel& model, const GridSpec& spec,
                           Evaluator evaluator = Evaluator::general) {
  detail::validate_grid_spec(spec);
  if (evaluator == Evaluator::one && spectrum.size() != 1) {
    throw Error(Errc::invalid_parameter,
                "evaluator 'one' requires a 1-entry spectrum");
  }
  if (evaluator == Evaluator::two && spectrum.size() != 2) {
    throw Error(Errc::invalid_parameter,
                "evaluator 'two' requires a 2-entry spectrum");
  }

  FieldGrid grid;
  grid.spec = spec;
  grid.model = model;
  grid.spectrum = spectrum;
  grid.evaluator = evaluator;
  grid.values.resize(grid.node_count());

  SpaceTimePoint base;
  for (const GridFixed& f : spec.fixed) {
    if (f.name == 'x') base.x = f.value;
    if (f.name == 'y') base.y = f.value;
    if (f.name == 't') base.t = f.value;
  }

  const std::size_t total = grid.values.size();
  const std::size_t naxes = spec.axes.size();
  std::vector<std::size_t> idx(naxes, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = naxes; a-- > 0;) {
      idx[a] = rem % spec.axes[a].count;
      rem /= spec.axes[a].count;
    }
    SpaceTimePoint p = base;
    for (std::size_t a = 0; a < naxes; ++a) {
      const double v = spec.axes[a].node(idx[a]);
      if (spec.axes[a].name == 'x') p.x = v;
      if (spec.axes[a].name == 'y') p.y = v;
      if (spec.axes[a].name == 't') p.t = v;
    }
    switch (evaluator) {
      case Evaluator::general:
        grid.values[flat] = eval_nsoliton(spectrum, p, model).u;
        break;
      case Evaluator::one:
        grid.values[flat] = eval_one_soliton(spectrum[0], p, model).u;
        break;
      case Evaluator::two:
        grid.values[flat] = eval_two_soliton(spectrum, p, model).u;
        break;
    }
  }
  return grid;
}

}  // namespace hfsc

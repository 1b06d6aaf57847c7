#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/model.hpp"
#include "hfsc/soliton.hpp"

namespace hfsc {

/// Field sampled in the full (x, y, t) coordinates of the unreduced
/// equation.
using Sampler3 = std::function<Complex(double x, double y, double t)>;

/// Field in the reduced coordinates (xt, t), xt = x + k y.
using Sampler2 = std::function<Complex(double xt, double t)>;

struct FdSteps {
  double hx = 1e-3;
  double hy = 1e-3;
  double ht = 1e-3;

  FdSteps() = default;
  explicit FdSteps(double h) : hx(h), hy(h), ht(h) {}
};

namespace detail {

inline Complex checked(const Sampler3& s, double x, double y, double t) {
  const Complex v = s(x, y, t);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw Error(Errc::nonfinite_sample,
                "sampler returned non-finite value at (x=" +
                    std::to_string(x) + ", y=" + std::to_string(y) +
                    ", t=" + std::to_string(t) + ")");
  }
  return v;
}

inline Complex checked(const Sampler2& s, double xt, double t) {
  const Complex v = s(xt, t);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw Error(Errc::nonfinite_sample,
                "sampler returned non-finite value at (xt=" +
                    std::to_string(xt) + ", t=" + std::to_string(t) + ")");
  }
  return v;
}

}  // namespace detail

/// Central-difference residual of
///   i u_t + a1 u_xx + a2 u_yy + a3 u_xy - a4 |u|^2 u
/// at one point.  u_t first-order central, u_xx/u_yy three-point second
/// differences, u_xy the symmetric four-point cross stencil; all O(h^2).
inline Complex fd_residual(const Sampler3& u, const SpaceTimePoint& p,
                           const PhysicalModel& model, const FdSteps& h) {
  if (!(h.hx > 0.0) || !(h.hy > 0.0) || !(h.ht > 0.0)) {
    throw Error(Errc::invalid_parameter, "finite-difference step must be > 0");
  }
  const Complex i(0.0, 1.0);
  const Complex u0 = detail::checked(u, p.x, p.y, p.t);

  const Complex ut = (detail::checked(u, p.x, p.y, p.t + h.ht) -
                      detail::checked(u, p.x, p.y, p.t - h.ht)) /
                     (2.0 * h.ht);
  const Complex uxx = (detail::checked(u, p.x + h.hx, p.y, p.t) - 2.0 * u0 +
                       detail::checked(u, p.x - h.hx, p.y, p.t)) /
                      (h.hx * h.hx);
  const Complex uyy = (detail::checked(u, p.x, p.y + h.hy, p.t) - 2.0 * u0 +
                       detail::checked(u, p.x, p.y - h.hy, p.t)) /
                      (h.hy * h.hy);
  const Complex uxy = (detail::checked(u, p.x + h.hx, p.y + h.hy, p.t) -
                       detail::checked(u, p.x + h.hx, p.y - h.hy, p.t) -
                       detail::checked(u, p.x - h.hx, p.y + h.hy, p.t) +
                       detail::checked(u, p.x - h.hx, p.y - h.hy, p.t)) /
                      (4.0 * h.hx * h.hy);

  return i * ut + model.alpha1 * uxx + model.alpha2 * uyy +
         model.alpha3 * uxy - model.alpha4 * std::norm(u0) * u0;
}

inline Complex fd_residual(const Sampler3& u, const SpaceTimePoint& p,
                           const PhysicalModel& model, double h) {
  return fd_residual(u, p, model, FdSteps(h));
}

struct ResidualReport {
  double max_abs = 0.0;
  double rms = 0.0;
  FdSteps steps;
  std::size_t samples = 0;
  std::optional<double> order;  // empirical convergence order, if measured
};

inline ResidualReport residual_norms(const Sampler3& u,
                                     const PhysicalModel& model,
                                     const std::vector<SpaceTimePoint>& points,
                                     double h) {
  ResidualReport r;
  r.steps = FdSteps(h);
  r.samples = points.size();
  double sum2 = 0.0;
  for (const SpaceTimePoint& p : points) {
    const double a = std::abs(fd_residual(u, p, model, h));
    r.max_abs = std::max(r.max_abs, a);
    sum2 += a * a;
  }
  r.rms = points.empty() ? 0.0 : std::sqrt(sum2 / static_cast<double>(points.size()));
  return r;
}

/// Norms at h_fine plus the empirical order from the max_abs ratio between
/// the two step sizes: order = log(r(h_coarse)/r(h_fine)) / log(hc/hf).
inline ResidualReport residual_norms(const Sampler3& u,
                                     const PhysicalModel& model,
                                     const std::vector<SpaceTimePoint>& points,
                                     double h_coarse, double h_fine) {
  const ResidualReport coarse = residual_norms(u, model, points, h_coarse);
  ResidualReport fine = residual_norms(u, model, points, h_fine);
  if (coarse.max_abs > 0.0 && fine.max_abs > 0.0) {
    fine.order = std::log(coarse.max_abs / fine.max_abs) /
                 std::log(h_coarse / h_fine);
  }
  return fine;
}

/// Lax matrices of the reduced equation at one point:
///   U = i sigma L + i Q,  V = -i a4 sigma^2 L + V1,  L = diag(1, -1).
struct LaxMatrices {
  std::array<Complex, 4> U;  // row-major 2x2
  std::array<Complex, 4> V;
};

inline LaxMatrices lax_matrices(Complex u, Complex ux,
                                Complex sigma, const PhysicalModel& model) {
  const Complex i(0.0, 1.0);
  const double a4 = model.alpha4;
  const Complex uc = std::conj(u);
  const Complex uxc = std::conj(ux);
  LaxMatrices lm;
  lm.U = {i * sigma, i * uc, i * u, -i * sigma};
  const Complex vdiag = -i * a4 * sigma * sigma;
  lm.V = {vdiag + 0.5 * i * a4 * u * uc,
          -i * a4 * sigma * uc - 0.5 * a4 * uxc,
          -i * a4 * sigma * u + 0.5 * a4 * ux,
          -vdiag - 0.5 * i * a4 * u * uc};
  return lm;
}

/// Frobenius norm of U_t - V_xt + U V - V U assembled from central
/// differences of the sampled field; vanishes at O(h^2) iff the field
/// solves the reduced equation.
inline double zero_curvature_residual(const Sampler2& u, Complex sigma,
                                      double xt, double t,
                                      const PhysicalModel& model, double h) {
  if (!(h > 0.0)) {
    throw Error(Errc::invalid_parameter, "finite-difference step must be > 0");
  }
  if (std::abs(sigma) > 1e3) {
    throw Error(Errc::invalid_parameter,
                "spectral test value too large (cap |sigma| <= 1e3)");
  }

  // u on the (xt, t) stencil
  const Complex um2 = detail::checked(u, xt - 2.0 * h, t);
  const Complex um1 = detail::checked(u, xt - h, t);
  const Complex u00 = detail::checked(u, xt, t);
  const Complex up1 = detail::checked(u, xt + h, t);
  const Complex up2 = detail::checked(u, xt + 2.0 * h, t);
  const Complex utm = detail::checked(u, xt, t - h);
  const Complex utp = detail::checked(u, xt, t + h);

  const Complex ux_m = (u00 - um2) / (2.0 * h);
  const Complex ux_0 = (up1 - um1) / (2.0 * h);
  const Complex ux_p = (up2 - u00) / (2.0 * h);

  const LaxMatrices c0 = lax_matrices(u00, ux_0, sigma, model);
  const LaxMatrices cm = lax_matrices(um1, ux_m, sigma, model);
  const LaxMatrices cp = lax_matrices(up1, ux_p, sigma, model);
  // time neighbors only enter through U (V_t is not needed)
  const Complex i(0.0, 1.0);
  std::array<Complex, 4> Ut = {0.0, (i * std::conj(utp) - i * std::conj(utm)) / (2.0 * h),
                               (i * utp - i * utm) / (2.0 * h), 0.0};

  std::array<Complex, 4> Vx;
  for (int e = 0; e < 4; ++e) Vx[e] = (cp.V[e] - cm.V[e]) / (2.0 * h);

  const auto& U = c0.U;
  const auto& V = c0.V;
  std::array<Complex, 4> comm = {
      U[0] * V[0] + U[1] * V[2] - (V[0] * U[0] + V[1] * U[2]),
      U[0] * V[1] + U[1] * V[3] - (V[0] * U[1] + V[1] * U[3]),
      U[2] * V[0] + U[3] * V[2] - (V[2] * U[0] + V[3] * U[2]),
      U[2] * V[1] + U[3] * V[3] - (V[2] * U[1] + V[3] * U[3])};

  double fro2 = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Complex r = Ut[e] - Vx[e] + comm[e];
    fro2 += std::norm(r);
  }
  return std::sqrt(fro2);
}

/// Trapezoid quadrature of |u|^2 over a uniformly spaced line field.
/// Rejects fields that have not decayed below 1e-10 at both ends.
inline double mass(const std::vector<Complex>& u, double dx) {
  if (u.size() < 2 || !(dx > 0.0)) {
    throw Error(Errc::invalid_parameter, "mass needs >= 2 samples and dx > 0");
  }
  if (std::abs(u.front()) > 1e-10 || std::abs(u.back()) > 1e-10) {
    throw Error(Errc::domain_too_small,
                "field has not decayed below 1e-10 at the domain ends");
  }
  double s = 0.5 * (std::norm(u.front()) + std::norm(u.back()));
  for (std::size_t i = 1; i + 1 < u.size(); ++i) s += std::norm(u[i]);
  return s * dx;
}

struct PeakSample {
  double t = 0.0;
  double position = 0.0;   // refined xt of the peak
  double amplitude = 0.0;  // refined |u| at the peak
};

struct FeatureReport {
  double peak_amplitude = 0.0;          // max refined |u| over all slices
  std::vector<PeakSample> peak_trajectory;  // global max per slice
  double fitted_velocity = 0.0;
  // sorted ascending by amplitude; only for two-peak movies
  std::optional<std::array<double, 2>> pre_collision_amplitudes;
  std::optional<std::array<double, 2>> post_collision_amplitudes;
  std::optional<double> oscillation_period;
};

struct TrackOptions {
  std::size_t expected_peaks = 1;  // peaks required in first and last slices
  bool estimate_period = false;    // bound state: period of the |u| series
};

namespace detail {

struct SlicePeak {
  double position;
  double amplitude;
};

/// Local maxima of |u| over one slice, refined by a parabola through the
/// three neighboring samples; sorted descending by amplitude.
inline std::vector<SlicePeak> slice_peaks(const std::vector<double>& absu,
                                          const GridAxis& xaxis,
                                          std::size_t slice_index) {
  std::vector<SlicePeak> peaks;
  const std::size_t n = absu.size();
  // global max must not sit on the boundary
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (absu[i] > absu[imax]) imax = i;
  if (imax == 0 || imax + 1 == n) {
    throw Error(Errc::tracking, "peak touches the spatial boundary in slice " +
                                    std::to_string(slice_index));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (absu[i] >= absu[i - 1] && absu[i] > absu[i + 1]) {
      const double ym = absu[i - 1], y0 = absu[i], yp = absu[i + 1];
      const double denom = ym - 2.0 * y0 + yp;
      double delta = 0.0;
      if (denom < 0.0) delta = 0.5 * (ym - yp) / denom;
      const double dx = (xaxis.max - xaxis.min) /
                        static_cast<double>(xaxis.count - 1);
      SlicePeak pk;
      pk.position = xaxis.node(i) + delta * dx;
      pk.amplitude = y0 - 0.25 * (ym - yp) * delta;
      peaks.push_back(pk);
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SlicePeak& a, const SlicePeak& b) {
              return a.amplitude > b.amplitude;
            });
  return peaks;
}

/// Dominant-frequency period of a uniformly sampled series: coarse DFT
/// scan over the resolvable band, then ternary-search refinement of the
/// spectral magnitude around the best bin.
inline double dominant_period(const std::vector<double>& s, double dt) {
  const std::size_t n = s.size();
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);

  auto power_at = [&](double freq) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ph =
          -2.0 * std::numbers::pi * freq * dt * static_cast<double>(i);
      acc += (s[i] - mean) * Complex(std::cos(ph), std::sin(ph));
    }
    return std::norm(acc);
  };

  const double df = 1.0 / (dt * static_cast<double>(n));
  const double fmax = 0.5 / dt;
  double best_f = df, best_p = power_at(df);
  for (double f = 2.0 * df; f < fmax; f += df) {
    const double p = power_at(f);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  double lo = std::max(best_f - df, 0.5 * df), hi = best_f + df;
  for (int it = 0; it < 60; ++it) {
    const double f1 = lo + (hi - lo) / 3.0;
    const double f2 = hi - (hi - lo) / 3.0;
    if (power_at(f1) < power_at(f2)) lo = f1; else hi = f2;
  }
  const double f = 0.5 * (lo + hi);
  if (!(f > 0.0)) {
    throw Error(Errc::tracking, "no dominant oscillation frequency found");
  }
  return 1.0 / f;
}

}  // namespace detail

/// Extracts soliton features from an (x, t) movie: per-slice peak
/// locations with sub-grid parabolic refinement, a least-squares velocity
/// fit of the global-max trajectory, per-peak amplitudes in the first and
/// last slices for two-peak movies, and the oscillation period of the
/// per-slice peak amplitude for bound states.
inline FeatureReport track_features(const FieldGrid& grid,
                                    const TrackOptions& opt = {}) {
  if (grid.spec.axes.size() != 2) {
    throw Error(Errc::invalid_parameter,
                "feature tracking needs a 2-axis (x, t) movie");
  }
  const bool x_first = grid.spec.axes[0].name == 'x';
  const GridAxis& xaxis = x_first ? grid.spec.axes[0] : grid.spec.axes[1];
  const GridAxis& taxis = x_first ? grid.spec.axes[1] : grid.spec.axes[0];
  if (xaxis.name != 'x' || taxis.name != 't') {
    throw Error(Errc::invalid_parameter, "movie axes must be x and t");
  }
  if (taxis.count < 8) {
    throw Error(Errc::invalid_parameter, "movie needs at least 8 time slices");
  }
  if (xaxis.count < 3) {
    throw Error(Errc::invalid_parameter, "movie needs at least 3 x nodes");
  }

  const std::size_t nx = xaxis.count;
  const std::size_t nt = taxis.count;
  auto value_at = [&](std::size_t it, std::size_t ix) {
    return x_first ? grid.values[ix * nt + it] : grid.values[it * nx + ix];
  };

  FeatureReport rep;
  std::vector<double> absu(nx);
  std::vector<double> amp_series(nt);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix)
      absu[ix] = std::abs(value_at(it, ix));
    const std::vector<detail::SlicePeak> peaks =
        detail::slice_peaks(absu, xaxis, it);
    if (peaks.empty()) {
      throw Error(Errc::peak_count,
                  "no interior peak in slice " + std::to_string(it));
    }
    if ((it == 0 || it + 1 == nt) && peaks.size() < opt.expected_peaks) {
      throw Error(Errc::peak_count,
                  "slice " + std::to_string(it) + " has " +
                      std::to_string(peaks.size()) + " peaks, expected " +
                      std::to_string(opt.expected_peaks));
    }
    rep.peak_trajectory.push_back(
        PeakSample{taxis.node(it), peaks[0].position, peaks[0].amplitude});
    amp_series[it] = peaks[0].amplitude;
    rep.peak_amplitude = std::max(rep.peak_amplitude, peaks[0].amplitude);

    if (opt.expected_peaks == 2 && (it == 0 || it + 1 == nt)) {
      std::array<double, 2> two = {peaks[1].amplitude, peaks[0].amplitude};
      std::sort(two.begin(), two.end());
      if (it == 0) rep.pre_collision_amplitudes = two;
      else rep.post_collision_amplitudes = two;
    }
  }

  // least-squares slope of position vs time
  double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
  for (const PeakSample& ps : rep.peak_trajectory) {
    st += ps.t;
    sx += ps.position;
    stt += ps.t * ps.t;
    stx += ps.t * ps.position;
  }
  const double nn = static_cast<double>(nt);
  rep.fitted_velocity = (nn * stx - st * sx) / (nn * stt - st * st);

  if (opt.estimate_period) {
    const double dt_slice = (taxis.max - taxis.min) / static_cast<double>(nt - 1);
    rep.oscillation_period = detail::dominant_period(amp_series, dt_slice);
  }
  return rep;
}

}  // namespace hfsc

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/fft.hpp"
#include "hfsc/model.hpp"
#include "hfsc/soliton.hpp"
#include "hfsc/verify.hpp"

namespace hfsc {

inline constexpr double kMaxDt = 0.01;
inline constexpr std::size_t kMinModes = 64;
inline constexpr double kBoundaryDecayTol = 1e-8;
inline constexpr std::size_t kBoundaryGuardNodes = 8;

/// Periodic spectral state for the reduced equation
///   i u_t + c u_xtxt - a4 |u|^2 u = 0.
/// Nodes are xt_i = xmin + i L / n (right endpoint excluded).
struct PropagationState {
  double xmin = 0.0;
  double xmax = 0.0;
  std::size_t n_modes = 0;
  std::vector<Complex> field;
  double time = 0.0;
  PhysicalModel model;
  SolitonSpectrum spectrum;  // closed form used for initialization/comparison

  double length() const { return xmax - xmin; }
  double dx() const { return length() / static_cast<double>(n_modes); }
  double node(std::size_t i) const {
    return xmin + dx() * static_cast<double>(i);
  }
};

struct PropagationReport {
  double t_final = 0.0;
  double l_inf_error = 0.0;
  double l2_error = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double mass_rel_drift = 0.0;
  std::size_t steps = 0;
  double wall_seconds = 0.0;  // console diagnostics only; never serialized
};

namespace detail {

inline double suggested_half_width(const SolitonSpectrum& spectrum) {
  double min_rate = std::numeric_limits<double>::infinity();
  for (const SpectrumEntry& e : spectrum.entries)
    min_rate = std::min(min_rate, 2.0 * e.sigma.imag());
  // sech tail ~ 2 e^{-rate |xt|}; solve 2 e^{-rate d} = 1e-10
  return std::log(2e10) / min_rate;
}

inline void check_boundary_decay(const PropagationState& s) {
  const std::size_t guard = std::min(kBoundaryGuardNodes, s.n_modes / 2);
  for (std::size_t i = 0; i < guard; ++i) {
    if (std::abs(s.field[i]) >= kBoundaryDecayTol ||
        std::abs(s.field[s.n_modes - 1 - i]) >= kBoundaryDecayTol) {
      throw Error(Errc::domain_too_small,
                  "field exceeds 1e-8 within 8 nodes of the boundary; "
                  "suggested half-width >= " +
                      std::to_string(suggested_half_width(s.spectrum)),
                  suggested_half_width(s.spectrum));
    }
  }
}

/// Trapezoid mass on the periodic grid (all nodes weighted equally since
/// the right endpoint is the wrapped left one).
inline double grid_mass(const PropagationState& s) {
  double acc = 0.0;
  for (const Complex& v : s.field) acc += std::norm(v);
  return acc * s.dx();
}

}  // namespace detail

/// Samples the closed-form N-soliton at t0 with y = 0 onto a periodic
/// grid.  Rejects domains whose boundary tails have not decayed.
inline PropagationState init_from_closed_form(const SolitonSpectrum& spectrum,
                                              const PhysicalModel& model,
                                              double xmin, double xmax,
                                              std::size_t n_modes, double t0) {
  if (!is_power_of_two(n_modes) || n_modes < kMinModes) {
    throw Error(Errc::invalid_parameter,
                "n_modes must be a power of two >= 64");
  }
  if (!(xmax > xmin)) {
    throw Error(Errc::invalid_parameter, "propagation domain is empty");
  }
  PropagationState s;
  s.xmin = xmin;
  s.xmax = xmax;
  s.n_modes = n_modes;
  s.time = t0;
  s.model = model;
  s.spectrum = spectrum;
  s.field.resize(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const SpaceTimePoint p{s.node(i), 0.0, t0};
    s.field[i] = eval_nsoliton(spectrum, p, model).u;
  }
  detail::check_boundary_decay(s);
  return s;
}

/// One Strang step: half nonlinear phase rotation, exact spectral linear
/// step, half nonlinear rotation.  Second order in dt.
inline void step(PropagationState& s, double dt) {
  if (!(dt > 0.0) || dt > kMaxDt) {
    throw Error(Errc::invalid_parameter,
                "dt must be in (0, 0.01] for splitting accuracy");
  }
  const double a4 = s.model.alpha4;
  const double c = s.model.c;
  const std::size_t n = s.n_modes;

  auto rotate_half = [&](double tau) {
    for (Complex& v : s.field) {
      const double ang = -a4 * std::norm(v) * tau;
      v *= Complex(std::cos(ang), std::sin(ang));
    }
  };

  rotate_half(0.5 * dt);
  fft_pow2(s.field, false);
  const double base = 2.0 * std::numbers::pi / s.length();
  for (std::size_t mslot = 0; mslot < n; ++mslot) {
    const double kf = base * fft_mode_index(mslot, n);
    const double ang = -c * kf * kf * dt;
    s.field[mslot] *= Complex(std::cos(ang), std::sin(ang));
  }
  fft_pow2(s.field, true);
  rotate_half(0.5 * dt);
  s.time += dt;
}

/// Repeated stepping to t_final (final fractional step included), then an
/// accuracy report against the closed form on the same nodes.
inline PropagationReport propagate(PropagationState& s, double t_final,
                                   double dt) {
  if (!(t_final > s.time)) {
    throw Error(Errc::invalid_parameter, "t_final must exceed current time");
  }
  const auto t_start = std::chrono::steady_clock::now();
  PropagationReport rep;
  rep.mass_initial = detail::grid_mass(s);

  // A non-finite value reaches every node through the transform, so
  // sampling one node per step detects blow-up promptly.
  auto check_alive = [&]() {
    if (!std::isfinite(s.field[0].real()) || !std::isfinite(s.field[0].imag())) {
      throw Error(Errc::blow_up,
                  "field blew up at step " + std::to_string(rep.steps));
    }
  };

  const double span = t_final - s.time;
  const std::size_t full = static_cast<std::size_t>(span / dt);
  double done = 0.0;
  for (std::size_t k = 0; k < full; ++k) {
    step(s, dt);
    done += dt;
    ++rep.steps;
    check_alive();
  }
  const double rest = span - done;
  if (rest > 1e-15 * std::max(1.0, std::abs(t_final))) {
    step(s, std::min(rest, dt));
    ++rep.steps;
    check_alive();
  }
  s.time = t_final;  // absorb accumulated round-off in the time stamp

  for (std::size_t i = 0; i < s.n_modes; ++i) {
    if (!std::isfinite(s.field[i].real()) || !std::isfinite(s.field[i].imag())) {
      throw Error(Errc::blow_up,
                  "field blew up by step " + std::to_string(rep.steps) +
                      " (node " + std::to_string(i) + ")");
    }
  }

  // Boundary contamination re-check: the peak must stay >= 8 nodes away
  // from both ends.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < s.n_modes; ++i)
    if (std::abs(s.field[i]) > std::abs(s.field[imax])) imax = i;
  if (imax < kBoundaryGuardNodes || imax >= s.n_modes - kBoundaryGuardNodes) {
    throw Error(Errc::domain_too_small,
                "peak drifted within 8 nodes of the periodic boundary",
                detail::suggested_half_width(s.spectrum));
  }

  rep.t_final = t_final;
  rep.mass_final = detail::grid_mass(s);
  rep.mass_rel_drift = std::abs(rep.mass_final - rep.mass_initial) /
                       std::max(rep.mass_initial, 1e-300);

  double linf = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < s.n_modes; ++i) {
    const SpaceTimePoint p{s.node(i), 0.0, t_final};
    const Complex exact = eval_nsoliton(s.spectrum, p, s.model).u;
    const double d = std::abs(s.field[i] - exact);
    linf = std::max(linf, d);
    l2 += d * d;
  }
  rep.l_inf_error = linf;
  rep.l2_error = std::sqrt(l2 * s.dx());

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

}  // namespace hfsc

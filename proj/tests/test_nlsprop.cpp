#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hfsc/nlsprop.hpp"
#include "hfsc/soliton.hpp"

using namespace hfsc;

namespace {

const PhysicalModel kRefModel = build_model(1, 1, 1, 1);  // c = 3, alpha4 = -6

SolitonSpectrum ref_soliton_spectrum() {
  return validate_spectrum({{Complex(0.2, 0.3), Complex(1, 0), Complex(0.5, 0)}});
}

SolitonSpectrum collision_spectrum() {
  return validate_spectrum({{Complex(0.1, 0.3), Complex(1, 0), Complex(1, 0)},
                            {Complex(0.3, 0.5), Complex(1, 0), Complex(1, 0)}});
}

double state_mass(const PropagationState& s) {
  double acc = 0.0;
  for (const Complex& v : s.field) acc += std::norm(v);
  return acc * s.dx();
}

}  // namespace

TEST_CASE("init accepts a decayed domain and rejects a tight one") {
  CHECK_NOTHROW(
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 1024, 0));
  try {
    init_from_closed_form(ref_soliton_spectrum(), kRefModel, -10, 10, 64, 0);
    FAIL("expected domain-too-small");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain_too_small);
    // suggested half-width: sech tail at rate 2*0.3 reaching 1e-10
    CHECK(e.detail() == doctest::Approx(std::log(2e10) / 0.6).epsilon(0.01));
  }
}

TEST_CASE("init validates the mode count") {
  CHECK_THROWS_AS(
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 100, 0),
      Error);
  CHECK_THROWS_AS(
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 32, 0),
      Error);
}

TEST_CASE("step: zero field is a fixed point and dt is capped") {
  PropagationState s;
  s.xmin = -20;
  s.xmax = 20;
  s.n_modes = 64;
  s.field.assign(64, Complex(0, 0));
  s.model = kRefModel;
  step(s, 0.01);
  for (const Complex& v : s.field) CHECK(std::abs(v) == 0.0);
  CHECK_THROWS_AS(step(s, 0.02), Error);
  CHECK_THROWS_AS(step(s, 0.0), Error);
}

TEST_CASE("step reproduces the constant-amplitude single-mode solution") {
  // u = A e^{i p xt} with p on the mode lattice evolves exactly as
  // e^{-i(c p^2 + alpha4 A^2) t}; both sub-flows act by the exact phases
  // here, so only round-off accumulates.
  const double L = 40.0, A = 0.5;
  const double p = 2.0 * std::numbers::pi * 3.0 / L;
  PropagationState s;
  s.xmin = -20;
  s.xmax = 20;
  s.n_modes = 256;
  s.model = kRefModel;
  s.field.resize(256);
  for (std::size_t i = 0; i < 256; ++i) {
    const double x = s.node(i);
    s.field[i] = A * Complex(std::cos(p * x), std::sin(p * x));
  }
  const double w = kRefModel.c * p * p + kRefModel.alpha4 * A * A;
  const double T = 0.1, dt = 1e-3;
  for (int k = 0; k < 100; ++k) step(s, dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    const double x = s.node(i);
    const Complex exact =
        A * std::exp(Complex(0.0, p * x - w * T));
    worst = std::max(worst, std::abs(s.field[i] - exact));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("mass is preserved to round-off per step") {
  PropagationState s =
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 1024, 0);
  const double m0 = state_mass(s);
  step(s, 1e-3);
  CHECK(std::abs(state_mass(s) - m0) / m0 < 1e-12);
}

TEST_CASE("one-soliton propagation matches the closed form (frozen bound)") {
  PropagationState s =
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 1024, 0);
  const PropagationReport rep = propagate(s, 5.0, 1e-3);
  CHECK(rep.steps == 5000);
  CHECK(rep.l_inf_error < 5.5e-6);  // measured 2.74e-6, frozen at 2x
  CHECK(rep.l2_error < 2e-5);
  CHECK(rep.mass_rel_drift < 1e-10);
  CHECK(rep.t_final == 5.0);
}

TEST_CASE("splitting error scales as dt^2") {
  auto run = [&](double dt) {
    PropagationState s =
        init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 1024, 0);
    return propagate(s, 5.0, dt).l_inf_error;
  };
  const double e1 = run(4e-3);
  const double e2 = run(2e-3);
  const double e3 = run(1e-3);
  const double o12 = std::log2(e1 / e2);
  const double o23 = std::log2(e2 / e3);
  CHECK(o12 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(o23 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("spatial error is spectrally converged once dt dominates") {
  auto run = [&](std::size_t modes) {
    PropagationState s =
        init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60,
                              modes, 0);
    return propagate(s, 5.0, 1e-3).l_inf_error;
  };
  const double e1024 = run(1024);
  const double e2048 = run(2048);
  CHECK(std::abs(e2048 - e1024) / e1024 < 0.1);
}

TEST_CASE("two-soliton collision propagation (frozen bound)") {
  PropagationState s =
      init_from_closed_form(collision_spectrum(), kRefModel, -120, 120, 2048, -10);
  const PropagationReport rep = propagate(s, 10.0, 2.5e-4);
  CHECK(rep.l_inf_error < 6e-5);  // measured 2.71e-5 at dt=2.5e-4, frozen at 2x
  CHECK(rep.mass_rel_drift < 1e-10);
}

TEST_CASE("propagation commutes with the global phase rotation of a_j") {
  const double phi = 0.9;
  const Complex rot(std::cos(phi), std::sin(phi));
  auto sp = ref_soliton_spectrum();
  auto spr = validate_spectrum({{sp[0].sigma, rot * sp[0].a, sp[0].b}});

  PropagationState a =
      init_from_closed_form(sp, kRefModel, -60, 60, 512, 0);
  PropagationState b =
      init_from_closed_form(spr, kRefModel, -60, 60, 512, 0);
  propagate(a, 0.5, 1e-3);
  propagate(b, 0.5, 1e-3);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.n_modes; ++i)
    worst = std::max(worst, std::abs(b.field[i] - a.field[i] / rot));
  CHECK(worst < 1e-10);
}

TEST_CASE("blow-up is detected with the step index") {
  PropagationState s =
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 64, 0);
  s.field[0] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    propagate(s, 0.01, 1e-3);
    FAIL("expected blow-up");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::blow_up);
  }
}

TEST_CASE("peak drifting into the boundary guard band is rejected") {
  // fast soliton, v = 2*alpha4*0.45 = -5.4; by t ~ 11 the peak reaches the
  // left guard band of [-60, 60]
  auto sp = validate_spectrum({{Complex(0.45, 0.3), Complex(1, 0), Complex(1, 0)}});
  PropagationState s = init_from_closed_form(sp, kRefModel, -60, 60, 256, 0);
  try {
    propagate(s, 11.2, 0.01);
    FAIL("expected boundary contamination");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain_too_small);
  }
}

TEST_CASE("propagate requires forward time") {
  PropagationState s =
      init_from_closed_form(ref_soliton_spectrum(), kRefModel, -60, 60, 64, 0);
  CHECK_THROWS_AS(propagate(s, -1.0, 1e-3), Error);
}

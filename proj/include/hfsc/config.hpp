#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/model.hpp"
#include "hfsc/soliton.hpp"

namespace hfsc {

/// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

/// Run configuration parsed from a flat key-value document.  alpha4 is
/// never accepted: it is always derived from (alpha1, alpha2, alpha3, k).
struct RunConfig {
  // model
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double k = 1.0;
  // spectrum: sigma_re sigma_im a_re a_im b_re b_im per line
  std::vector<SpectrumEntry> solitons;
  // grid
  std::vector<GridAxis> axes;
  std::vector<GridFixed> fixed;
  Evaluator evaluator = Evaluator::general;
  // verification
  double fd_h = 1e-3;
  std::size_t verify_samples = 21;  // per axis of the residual sample grid
  std::vector<Complex> verify_sigmas;
  std::array<double, 2> mass_times = {0.0, 5.0};
  double corrupt_epsilon = 0.0;  // test hook: u -> u (1 + eps*xt)
  double tol_residual_max = 1e-4;
  double tol_order_lo = 1.8;
  double tol_order_hi = 2.2;
  double tol_zero_curvature = 1e-5;
  double tol_mass_drift = 1e-8;
  // propagation
  double prop_xmin = -60.0;
  double prop_xmax = 60.0;
  std::size_t prop_modes = 1024;
  double prop_dt = 1e-3;
  double prop_t0 = 0.0;
  double prop_t_final = 5.0;
  // output
  std::string output_prefix = "run";

  PhysicalModel make_model() const {
    return build_model(alpha1, alpha2, alpha3, k);
  }
  SolitonSpectrum make_spectrum() const { return validate_spectrum(solitons); }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_number(const std::string& tok, int line, const std::string& key) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    throw Error(Errc::config_parse, "line " + std::to_string(line) +
                                        ": bad number '" + tok + "' for key " +
                                        key);
  }
  return v;
}

inline std::size_t parse_count(const std::string& tok, int line,
                               const std::string& key) {
  const double v = parse_number(tok, line, key);
  if (v < 1.0 || v != std::floor(v) || v > 1e9) {
    throw Error(Errc::config_parse, "line " + std::to_string(line) +
                                        ": key " + key +
                                        " needs a positive integer");
  }
  return static_cast<std::size_t>(v);
}

inline void expect_tokens(const std::vector<std::string>& toks, std::size_t n,
                          int line, const std::string& key) {
  if (toks.size() != n) {
    throw Error(Errc::config_parse,
                "line " + std::to_string(line) + ": key " + key + " needs " +
                    std::to_string(n) + " value(s), got " +
                    std::to_string(toks.size()));
  }
}

}  // namespace detail

/// Parses the key-value configuration document.  Unknown keys are hard
/// errors; repeatable keys (soliton, axis, fixed, verify_sigma) keep their
/// order.  Model and spectrum validation run before returning.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.verify_sigmas.clear();

  bool saw_alpha1 = false, saw_alpha2 = false, saw_alpha3 = false, saw_k = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view sv = detail::trim(raw);
    if (const auto hash = sv.find('#'); hash != std::string_view::npos)
      sv = detail::trim(sv.substr(0, hash));
    if (sv.empty()) continue;

    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::config_parse,
                  "line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key(detail::trim(sv.substr(0, eq)));
    const std::vector<std::string> toks =
        detail::split_ws(detail::trim(sv.substr(eq + 1)));
    auto one = [&]() -> const std::string& {
      detail::expect_tokens(toks, 1, line, key);
      return toks[0];
    };
    auto num = [&]() { return detail::parse_number(one(), line, key); };

    if (key == "alpha4") {
      throw Error(Errc::config_value,
                  "line " + std::to_string(line) +
                      ": alpha4 is derived from (alpha1, alpha2, alpha3, k) "
                      "and cannot be set");
    } else if (key == "alpha1") {
      cfg.alpha1 = num(); saw_alpha1 = true;
    } else if (key == "alpha2") {
      cfg.alpha2 = num(); saw_alpha2 = true;
    } else if (key == "alpha3") {
      cfg.alpha3 = num(); saw_alpha3 = true;
    } else if (key == "k") {
      cfg.k = num(); saw_k = true;
    } else if (key == "soliton") {
      detail::expect_tokens(toks, 6, line, key);
      SpectrumEntry e;
      e.sigma = Complex(detail::parse_number(toks[0], line, key),
                        detail::parse_number(toks[1], line, key));
      e.a = Complex(detail::parse_number(toks[2], line, key),
                    detail::parse_number(toks[3], line, key));
      e.b = Complex(detail::parse_number(toks[4], line, key),
                    detail::parse_number(toks[5], line, key));
      cfg.solitons.push_back(e);
    } else if (key == "axis") {
      detail::expect_tokens(toks, 4, line, key);
      if (toks[0].size() != 1) {
        throw Error(Errc::config_parse, "line " + std::to_string(line) +
                                            ": axis name must be x, y or t");
      }
      GridAxis a;
      a.name = toks[0][0];
      a.min = detail::parse_number(toks[1], line, key);
      a.max = detail::parse_number(toks[2], line, key);
      a.count = detail::parse_count(toks[3], line, key);
      cfg.axes.push_back(a);
    } else if (key == "fixed") {
      detail::expect_tokens(toks, 2, line, key);
      if (toks[0].size() != 1) {
        throw Error(Errc::config_parse, "line " + std::to_string(line) +
                                            ": fixed name must be x, y or t");
      }
      cfg.fixed.push_back(
          GridFixed{toks[0][0], detail::parse_number(toks[1], line, key)});
    } else if (key == "evaluator") {
      const std::string& v = one();
      if (v == "general") cfg.evaluator = Evaluator::general;
      else if (v == "one") cfg.evaluator = Evaluator::one;
      else if (v == "two") cfg.evaluator = Evaluator::two;
      else
        throw Error(Errc::config_value,
                    "line " + std::to_string(line) +
                        ": evaluator must be general, one or two");
    } else if (key == "fd_h") {
      cfg.fd_h = num();
    } else if (key == "verify_samples") {
      cfg.verify_samples = detail::parse_count(one(), line, key);
    } else if (key == "verify_sigma") {
      detail::expect_tokens(toks, 2, line, key);
      cfg.verify_sigmas.emplace_back(detail::parse_number(toks[0], line, key),
                                     detail::parse_number(toks[1], line, key));
    } else if (key == "mass_times") {
      detail::expect_tokens(toks, 2, line, key);
      cfg.mass_times = {detail::parse_number(toks[0], line, key),
                        detail::parse_number(toks[1], line, key)};
    } else if (key == "corrupt_epsilon") {
      cfg.corrupt_epsilon = num();
    } else if (key == "tol_residual_max") {
      cfg.tol_residual_max = num();
    } else if (key == "tol_order_lo") {
      cfg.tol_order_lo = num();
    } else if (key == "tol_order_hi") {
      cfg.tol_order_hi = num();
    } else if (key == "tol_zero_curvature") {
      cfg.tol_zero_curvature = num();
    } else if (key == "tol_mass_drift") {
      cfg.tol_mass_drift = num();
    } else if (key == "prop_domain") {
      detail::expect_tokens(toks, 2, line, key);
      cfg.prop_xmin = detail::parse_number(toks[0], line, key);
      cfg.prop_xmax = detail::parse_number(toks[1], line, key);
    } else if (key == "prop_modes") {
      cfg.prop_modes = detail::parse_count(one(), line, key);
    } else if (key == "prop_dt") {
      cfg.prop_dt = num();
    } else if (key == "prop_t0") {
      cfg.prop_t0 = num();
    } else if (key == "prop_t_final") {
      cfg.prop_t_final = num();
    } else if (key == "output_prefix") {
      cfg.output_prefix = one();
    } else {
      throw Error(Errc::config_parse,
                  "line " + std::to_string(line) + ": unknown key '" + key +
                      "'");
    }
  }

  if (!(saw_alpha1 && saw_alpha2 && saw_alpha3 && saw_k)) {
    throw Error(Errc::config_value,
                "config must set alpha1, alpha2, alpha3 and k");
  }
  if (cfg.solitons.empty()) {
    throw Error(Errc::config_value,
                "config must declare at least one soliton entry");
  }
  if (cfg.output_prefix.empty()) {
    throw Error(Errc::config_value, "output_prefix must be nonempty");
  }
  if (cfg.verify_sigmas.empty()) cfg.verify_sigmas.emplace_back(1.0, 1.0);

  // delegate semantic validation; errors carry the offending key path
  try {
    (void)cfg.make_model();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("model: ") + e.what());
  }
  for (std::size_t idx = 0; idx < cfg.solitons.size(); ++idx) {
    try {
      (void)validate_spectrum({cfg.solitons[idx]});
    } catch (const Error& e) {
      throw Error(e.code(),
                  "soliton[" + std::to_string(idx) + "]: " + e.what());
    }
  }
  try {
    (void)cfg.make_spectrum();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("soliton list: ") + e.what());
  }
  if (!cfg.axes.empty()) {
    GridSpec spec{cfg.axes, cfg.fixed};
    detail::validate_grid_spec(spec);
  }
  return cfg;
}

/// Canonical serialization; parse(serialize(cfg)) reproduces every field.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  auto kv = [&](const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
  };
  auto kvn = [&](const char* key, double v) { kv(key, format_double(v)); };

  kvn("alpha1", cfg.alpha1);
  kvn("alpha2", cfg.alpha2);
  kvn("alpha3", cfg.alpha3);
  kvn("k", cfg.k);
  for (const SpectrumEntry& e : cfg.solitons) {
    kv("soliton", format_double(e.sigma.real()) + " " +
                      format_double(e.sigma.imag()) + " " +
                      format_double(e.a.real()) + " " +
                      format_double(e.a.imag()) + " " +
                      format_double(e.b.real()) + " " +
                      format_double(e.b.imag()));
  }
  for (const GridAxis& a : cfg.axes) {
    kv("axis", std::string(1, a.name) + " " + format_double(a.min) + " " +
                   format_double(a.max) + " " + std::to_string(a.count));
  }
  for (const GridFixed& f : cfg.fixed) {
    kv("fixed", std::string(1, f.name) + " " + format_double(f.value));
  }
  kv("evaluator", evaluator_name(cfg.evaluator));
  kvn("fd_h", cfg.fd_h);
  kv("verify_samples", std::to_string(cfg.verify_samples));
  for (const Complex& s : cfg.verify_sigmas) {
    kv("verify_sigma",
       format_double(s.real()) + " " + format_double(s.imag()));
  }
  kv("mass_times", format_double(cfg.mass_times[0]) + " " +
                       format_double(cfg.mass_times[1]));
  kvn("corrupt_epsilon", cfg.corrupt_epsilon);
  kvn("tol_residual_max", cfg.tol_residual_max);
  kvn("tol_order_lo", cfg.tol_order_lo);
  kvn("tol_order_hi", cfg.tol_order_hi);
  kvn("tol_zero_curvature", cfg.tol_zero_curvature);
  kvn("tol_mass_drift", cfg.tol_mass_drift);
  kv("prop_domain",
     format_double(cfg.prop_xmin) + " " + format_double(cfg.prop_xmax));
  kv("prop_modes", std::to_string(cfg.prop_modes));
  kvn("prop_dt", cfg.prop_dt);
  kvn("prop_t0", cfg.prop_t0);
  kvn("prop_t_final", cfg.prop_t_final);
  kv("output_prefix", cfg.output_prefix);
  return out;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace hfsc

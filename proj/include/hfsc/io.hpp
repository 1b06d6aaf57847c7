#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfsc/config.hpp"
#include "hfsc/errors.hpp"
#include "hfsc/nlsprop.hpp"
#include "hfsc/soliton.hpp"
#include "hfsc/verify.hpp"
#include "hfsc/version.hpp"

namespace hfsc {

using Json = nlohmann::ordered_json;

/// CSV with one row per grid node in storage order: axis coordinates in
/// declaration order, then re_u, im_u, abs_u.  Numbers use the shortest
/// round-trip decimal, so output is byte-identical across runs.
inline std::string field_csv(const FieldGrid& grid) {
  std::string out;
  for (const GridAxis& a : grid.spec.axes) {
    out += a.name;
    out += ',';
  }
  out += "re_u,im_u,abs_u\n";

  const std::size_t naxes = grid.spec.axes.size();
  std::vector<std::size_t> idx(naxes, 0);
  for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = naxes; a-- > 0;) {
      idx[a] = rem % grid.spec.axes[a].count;
      rem /= grid.spec.axes[a].count;
    }
    for (std::size_t a = 0; a < naxes; ++a) {
      out += format_double(grid.spec.axes[a].node(idx[a]));
      out += ',';
    }
    const Complex& u = grid.values[flat];
    out += format_double(u.real());
    out += ',';
    out += format_double(u.imag());
    out += ',';
    out += format_double(std::abs(u));
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(Errc::io_failure, "cannot open " + path + " for writing");
  }
  f << body;
  if (!f) {
    throw Error(Errc::io_failure, "write failed for " + path);
  }
}

inline Json report_header(const char* kind, const RunConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["kind"] = kind;
  j["config_echo"] = serialize_config(cfg);
  return j;
}

inline Json field_sidecar_json(const RunConfig& cfg, const FieldGrid& grid,
                               const std::string& csv_file) {
  Json j = report_header("field_sidecar", cfg);
  j["evaluator"] = evaluator_name(grid.evaluator);
  Json axes = Json::array();
  for (const GridAxis& a : grid.spec.axes) {
    axes.push_back(Json{{"name", std::string(1, a.name)},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count}});
  }
  j["axes"] = axes;
  Json fixed = Json::object();
  for (const GridFixed& f : grid.spec.fixed)
    fixed[std::string(1, f.name)] = f.value;
  j["fixed"] = fixed;
  j["rows"] = grid.values.size();
  j["csv_file"] = csv_file;
  return j;
}

struct CheckEntry {
  std::string name;
  double value = 0.0;
  std::string constraint;
  bool pass = false;
};

inline Json checks_json(const std::vector<CheckEntry>& checks) {
  Json arr = Json::array();
  for (const CheckEntry& c : checks) {
    arr.push_back(Json{{"name", c.name},
                       {"value", c.value},
                       {"constraint", c.constraint},
                       {"pass", c.pass}});
  }
  return arr;
}

inline Json features_json(const RunConfig& cfg, const FeatureReport& rep,
                          const std::string& mode) {
  Json j = report_header("feature_report", cfg);
  j["mode"] = mode;
  j["peak_amplitude"] = rep.peak_amplitude;
  j["fitted_velocity"] = rep.fitted_velocity;
  Json traj = Json::array();
  for (const PeakSample& p : rep.peak_trajectory)
    traj.push_back(Json{{"t", p.t}, {"x", p.position}, {"amp", p.amplitude}});
  j["peak_trajectory"] = traj;
  if (rep.pre_collision_amplitudes) {
    j["pre_collision_amplitudes"] = *rep.pre_collision_amplitudes;
    j["post_collision_amplitudes"] = *rep.post_collision_amplitudes;
  }
  if (rep.oscillation_period) j["oscillation_period"] = *rep.oscillation_period;
  return j;
}

/// Wall time stays out of the report on purpose: identical config and
/// version must give byte-identical JSON.
inline Json propagation_json(const RunConfig& cfg,
                             const PropagationReport& rep,
                             const PropagationState& state) {
  Json j = report_header("propagation_report", cfg);
  j["domain"] = {state.xmin, state.xmax};
  j["n_modes"] = state.n_modes;
  j["dt"] = cfg.prop_dt;
  j["t_final"] = rep.t_final;
  j["steps"] = rep.steps;
  j["l_inf_error"] = rep.l_inf_error;
  j["l2_error"] = rep.l2_error;
  j["mass_initial"] = rep.mass_initial;
  j["mass_final"] = rep.mass_final;
  j["mass_rel_drift"] = rep.mass_rel_drift;
  return j;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace hfsc

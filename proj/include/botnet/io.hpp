#pragma once

// JSON and CSV emitters for solver results. Numbers are written in the
// shortest round-trip form, so identical results give identical bytes.

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "botnet/agentsim.hpp"
#include "botnet/config.hpp"
#include "botnet/equilibrium.hpp"
#include "botnet/fixedpoint.hpp"
#include "botnet/hjb.hpp"
#include "botnet/model.hpp"

namespace botnet::io {

using nlohmann::ordered_json;

inline ordered_json vec4_json(const Vec4& v, const char* prefix) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < 4; ++i) j[std::string(prefix) + std::string(kStateNames[i])] = v[i];
  return j;
}

inline void merge(ordered_json& into, const ordered_json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

inline ordered_json eigen_json(const numeric::Eigen3& ev) {
  ordered_json j = ordered_json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    j["eig" + std::to_string(k + 1) + "_re"] = ev[k].real();
    j["eig" + std::to_string(k + 1) + "_im"] = ev[k].imag();
  }
  return j;
}

inline ordered_json params_json(const ModelParams& p) {
  ordered_json j = ordered_json::object();
  for (std::string_view key : kParamKeys) j[std::string(key)] = param_value(p, key);
  return j;
}

inline ordered_json to_json(const HjbSolution& s) {
  ordered_json j;
  j["case"] = case_label(s.strategy);
  j["mu"] = s.mu;
  merge(j, vec4_json(s.g, "g_"));
  j["valid"] = s.valid;
  j["degenerate"] = s.degenerate;
  j["slack1"] = s.slack[0];
  j["slack2"] = s.slack[1];
  return j;
}

inline ordered_json to_json(const FixedPoint& fp) {
  ordered_json j;
  j["case"] = case_label(fp.strategy);
  merge(j, vec4_json(fp.x.values(), "x_"));
  merge(j, eigen_json(fp.eigenvalues));
  j["stable"] = fp.stable;
  j["method"] = method_label(fp.method);
  return j;
}

inline ordered_json to_json(const Equilibrium& e) {
  ordered_json j;
  j["case"] = case_label(e.strategy);
  merge(j, vec4_json(e.x.values(), "x_"));
  j["mu"] = e.mu;
  merge(j, vec4_json(e.g, "g_"));
  merge(j, eigen_json(e.eigenvalues));
  j["stable"] = e.stable;
  j["efficient"] = e.efficient;
  j["degenerate"] = e.degenerate;
  j["method"] = method_label(e.method);
  return j;
}

inline ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json to_json(const BifurcationReport& r) {
  ordered_json j;
  j["kappa_star"] = optional_json(r.kappa_star);
  j["kappa_bar_star"] = optional_json(r.kappa_bar_star);
  j["x_star_UI"] = r.x_star_UI;
  j["x_star_DI"] = r.x_star_DI;
  j["x_bar_star_UI"] = r.x_bar_star_UI;
  for (std::size_t k = 0; k < 4; ++k) j["kappa" + std::to_string(k + 1)] = r.kappa[k];
  j["domain_x_star"] = domain_label(r.domains[0].domain);
  j["domain_x_star_DI"] = domain_label(r.domains[1].domain);
  j["domain_x_bar_star"] = domain_label(r.domains[2].domain);
  j["subdomain_x_bar_star"] = subdomain_label(r.domains[2].subdomain);
  j["kappa_increasing"] = r.kappa_increasing;
  return j;
}

inline std::string join_cases(const std::vector<StrategyCase>& cs) {
  std::string s;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (k) s += ';';
    s += case_label(cs[k]);
  }
  return s;
}

inline std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ';';
    s += format_decimal(v[k]);
  }
  return s;
}

inline ordered_json to_json(const SweepRow& r) {
  ordered_json j;
  j["kappa"] = r.kappa;
  j["count"] = r.count();
  j["cases"] = ordered_json::array();
  for (StrategyCase c : r.cases) j["cases"].push_back(case_label(c));
  j["mu_min"] = r.count() ? ordered_json(r.mu_min()) : ordered_json(nullptr);
  j["mu_all"] = r.mus;
  j["stable_all"] = r.stable_all();
  j["near_bifurcation"] = r.near_bifurcation;
  return j;
}

inline ordered_json to_json(const SwitchRecord& s) {
  ordered_json j;
  j["t"] = s.t;
  j["old_case"] = s.old_case ? ordered_json(case_label(*s.old_case)) : ordered_json(nullptr);
  j["new_case"] = case_label(s.new_case);
  j["mu"] = s.mu;
  return j;
}

template <typename T>
ordered_json to_json_array(const std::vector<T>& items) {
  ordered_json a = ordered_json::array();
  for (const T& item : items) a.push_back(to_json(item));
  return a;
}

// ---- CSV -------------------------------------------------------------------

inline std::string csv_value(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_decimal(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) s += ';';
      s += csv_value(v[k]);
    }
    return s;
  }
  return v.dump();
}

// Flat records to CSV: header from the keys of `header_template` (so an empty
// record list still gets its header row), then one line per record.
inline void write_csv(std::ostream& out, const ordered_json& header_template,
                      const ordered_json& records) {
  bool first = true;
  for (auto it = header_template.begin(); it != header_template.end(); ++it) {
    out << (first ? "" : ",") << it.key();
    first = false;
  }
  out << '\n';
  for (const auto& rec : records) {
    first = true;
    for (auto it = header_template.begin(); it != header_template.end(); ++it) {
      out << (first ? "" : ",") << csv_value(rec.contains(it.key()) ? rec[it.key()] : ordered_json());
      first = false;
    }
    out << '\n';
  }
}

template <typename T>
void write_csv(std::ostream& out, const std::vector<T>& items) {
  write_csv(out, to_json(T{}), to_json_array(items));
}

inline void write_csv(std::ostream& out, const BifurcationReport& r) {
  const ordered_json j = to_json(r);
  write_csv(out, j, ordered_json::array({j}));
}

// t,x_DI,x_DS,x_UI,x_US[,case]; with several replicas a leading replica column.
struct TrajectoryRun {
  const SimResult* result = nullptr;
  std::size_t replica = 0;
};

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRun>& runs,
                                 bool with_case) {
  const bool with_replica = runs.size() > 1;
  if (with_replica) out << "replica,";
  out << "t,x_DI,x_DS,x_UI,x_US";
  if (with_case) out << ",case";
  out << '\n';
  for (const TrajectoryRun& run : runs) {
    const SimResult& r = *run.result;
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
      if (with_replica) out << run.replica << ',';
      out << format_decimal(r.trajectory[k].t);
      for (double v : r.trajectory[k].x.values()) out << ',' << format_decimal(v);
      if (with_case) {
        const auto c = case_of(r.control[k]);
        out << ',' << (c ? case_label(*c) : "");
      }
      out << '\n';
    }
  }
}

inline ordered_json trajectory_json(const SimResult& r, bool with_case) {
  ordered_json a = ordered_json::array();
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    ordered_json j;
    j["t"] = r.trajectory[k].t;
    merge(j, vec4_json(r.trajectory[k].x.values(), "x_"));
    if (with_case) {
      const auto c = case_of(r.control[k]);
      j["case"] = c ? ordered_json(case_label(*c)) : ordered_json(nullptr);
    }
    a.push_back(j);
  }
  return a;
}

// t,old_case,new_case,mu
inline void write_switch_csv(std::ostream& out, const std::vector<SwitchRecord>& log) {
  write_csv(out, to_json(SwitchRecord{}), to_json_array(log));
}

}  // namespace botnet::io

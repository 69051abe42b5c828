#pragma once

// Flat key-value parameter files:
//
//   # comment
//   q_rec_D = 1.0
//   lambda  = 1000
//
// Keys are exactly the ModelParams field names. Numbers use '.' as decimal
// separator and are parsed independently of the process locale.

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>

#include "botnet/errors.hpp"
#include "botnet/model.hpp"

namespace botnet {

inline constexpr std::array<std::string_view, 12> kParamKeys{
    "q_rec_D", "q_rec_U", "q_inf_D", "q_inf_U", "beta_UU", "beta_UD",
    "beta_DU", "beta_DD", "lambda",  "v_H",     "k_D",     "k_I"};

// Pointer to the named field, or nullptr for an unknown key.
template <typename Params>
auto param_field(Params& p, std::string_view key) -> decltype(&p.q_rec_D) {
  if (key == "q_rec_D") return &p.q_rec_D;
  if (key == "q_rec_U") return &p.q_rec_U;
  if (key == "q_inf_D") return &p.q_inf_D;
  if (key == "q_inf_U") return &p.q_inf_U;
  if (key == "beta_UU") return &p.beta_UU;
  if (key == "beta_UD") return &p.beta_UD;
  if (key == "beta_DU") return &p.beta_DU;
  if (key == "beta_DD") return &p.beta_DD;
  if (key == "lambda") return &p.lambda;
  if (key == "v_H") return &p.v_H;
  if (key == "k_D") return &p.k_D;
  if (key == "k_I") return &p.k_I;
  return nullptr;
}

inline double param_value(const ModelParams& p, std::string_view key) {
  return *param_field(p, key);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_decimal(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigParseError("not a decimal number: '" + std::string(text) + "'");
  return value;
}

// Shortest text that parses back to the same double.
inline std::string format_decimal(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Applies a single "key=value" override.
inline void apply_override(ModelParams& p, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigParseError("override must look like KEY=VALUE: '" + std::string(assignment) + "'");
  const auto key = trim(assignment.substr(0, eq));
  double* field = param_field(p, key);
  if (field == nullptr) throw ConfigParseError("unknown parameter key '" + std::string(key) + "'");
  *field = parse_decimal(assignment.substr(eq + 1));
}

// Keys absent from the stream keep the values already in `base`.
inline ModelParams read_params(std::istream& in, ModelParams base = {}) {
  std::string line;
  std::set<std::string, std::less<>> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected KEY = VALUE");
    const std::string key(trim(view.substr(0, eq)));
    if (!seen.insert(key).second)
      throw ConfigParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_override(base, view);
    } catch (const ConfigParseError& e) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline ModelParams load_params(const std::string& path, ModelParams base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file '" + path + "'");
  return read_params(in, base);
}

inline void write_params(std::ostream& out, const ModelParams& p) {
  for (std::string_view key : kParamKeys)
    out << key << " = " << format_decimal(param_value(p, key)) << '\n';
}

}  // namespace botnet

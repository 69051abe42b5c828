#pragma once

#include <stdexcept>
#include <string>

namespace botnet {

// Every failure carries a stable snake_case code for machine-readable reports.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define BOTNET_DEFINE_ERROR(Name, code_str)                               \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(code_str, what) {}     \
  };

BOTNET_DEFINE_ERROR(InvalidParams, "invalid_params")
BOTNET_DEFINE_ERROR(InvalidSimplex, "invalid_simplex")
BOTNET_DEFINE_ERROR(ConfigParseError, "config_parse_error")
BOTNET_DEFINE_ERROR(StepTooLarge, "step_too_large")
BOTNET_DEFINE_ERROR(DegenerateDenominator, "degenerate_denominator")
BOTNET_DEFINE_ERROR(SingularSystem, "singular_system")
BOTNET_DEFINE_ERROR(AssumptionViolation, "assumption_violation")
BOTNET_DEFINE_ERROR(InvalidArgument, "invalid_argument")

#undef BOTNET_DEFINE_ERROR

}  // namespace botnet

#pragma once

#include <json.hpp>

namespace ootune::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitCapExhausted = 3;
inline constexpr int kExitValidationViolation = 4;

int cmd_certify(const nlohmann::json& config);
int cmd_tune(const nlohmann::json& config);
int cmd_bound_sweep(const nlohmann::json& config);
int cmd_oracle_compare(const nlohmann::json& config);
int cmd_nu_estimate(const nlohmann::json& config);
int cmd_scenario_compare(const nlohmann::json& config);

}  // namespace ootune::cli

#pragma once

#include <string>
#include <vector>

#include "natform/scenario.hpp"

namespace natform {

/// Exit-code contract: 0 all expectations met, 1 verdict mismatch,
/// 2 configuration error (the CLI maps ConfigError to 2).
struct RunResult {
    std::string csv;                       // header + one row per (check, form, level)
    std::string summary;                   // human-readable per-check lines
    std::vector<std::string> mismatches;   // expectation failures
    int exit_code = 0;
};

std::string csv_header();

/// Executes every check named in [expect] (naturality when none are named)
/// for the scenario as configured, ignoring any [sweep] section.
RunResult run_scenario(const ScenarioSpec& spec);

/// Executes the checks once per sweep value, juxtaposing hypothesis
/// classifications (sobolev/lambda) with conclusion verdicts (naturality).
RunResult sweep_scenario(const ScenarioSpec& spec);

/// Deterministic invariant suite: exterior-algebra laws, Cauchy-Binet,
/// dd = 0, the pullback norm inequality, route equivalence, pairing
/// antisymmetry. `inject_sign_fault` enables the perturbed sign convention to
/// demonstrate that the antisymmetry property actually fails.
RunResult run_selftest(bool inject_sign_fault = false);

}  // namespace natform

#pragma once

#include <map>
#include <string>
#include <vector>

#include "entroprod/production.hpp"

namespace entroprod::cli {

// Flat key = value config document ('#' comments).  An optional `scenario`
// key must match the subcommand; unknown keys are rejected per scenario.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues load_config(const std::string& path);
void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets);

// CSV writer: header t,S,E,sigma,sigmaE,concurrence,negativity, shortest
// round-trip decimals, infinite sigma rendered as `inf`.  Atomic
// (temp file + rename).
void emit_series(const production::ProductionSeries& series, const std::string& path);

// ScanReport as versioned JSON (schema: 1).
std::string scan_report_json(const production::ScanReport& report);

// Dispatch one scenario.  Returns the process exit code (0 success,
// 1 validation error, 2 numerical/IO failure) and fills `diagnostic` on
// failure.
int run_scenario(const std::string& scenario, const std::string& config_path,
                 const std::vector<std::string>& overrides, const std::string& out_override,
                 int threads, std::string& diagnostic);

// Full argv front end: entroprod <scenario> --config <path> [--set k=v]...
// [--out <path>] [--threads N]
int run_cli(int argc, char** argv);

}  // namespace entroprod::cli

#pragma once
#include <iosfwd>

#include "json.hpp"
#include "swarmdim/config.hpp"
#include "swarmdim/diagnostics.hpp"
#include "swarmdim/sweep.hpp"

namespace swarmdim {

// exit codes: 0 success, 1 bad config/arguments, 2 numerical failure
// (step underflow or a singular pair)
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_minimize(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_potential_table(const RunConfig& config, std::ostream& out, std::ostream& err);

// report.json pieces (also used by the python bindings)
nlohmann::json report_potential_json(const PotentialSpec& spec, int ambient_dim);
nlohmann::json report_run_json(const RunReport& report);
nlohmann::json report_dimension_json(const DimensionReport& report);
nlohmann::json report_euler_lagrange_json(const EulerLagrangeReport& report);

// output.directory resolved against $SWARMDIM_OUTPUT_ROOT when relative
std::filesystem::path resolve_output_dir(const OutputParams& output);

}  // namespace swarmdim

#pragma once

#include <string>

namespace switchjump::cli {

// Writes a gnuplot script for a report CSV. Kinds: "paths", "periodicity"
// (histograms of the per-period laws), "cesaro" (running averages),
// "lyapunov" (shell suprema). Unknown kinds throw ConfigurationError.
void emit_plot_script(const std::string& report_csv, const std::string& kind, const std::string& script_path);

}  // namespace switchjump::cli

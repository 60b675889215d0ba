#pragma once

#include <filesystem>

#include "surfer/analysis.hpp"

namespace surfer {

// Self-contained two-curve line chart of a trace: L1 distance on a log scale
// and ranking miss percentage on a linear one. Data-only CSV stays the
// primary output; this is a convenience for eyeballing runs.
void write_trace_svg(const std::filesystem::path& path, const ConvergenceTrace& trace,
                     const std::string& title);

}  // namespace surfer

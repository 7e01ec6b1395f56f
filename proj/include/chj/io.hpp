#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chj/action.hpp"
#include "chj/characteristics.hpp"
#include "chj/ergodic.hpp"
#include "chj/grid.hpp"
#include "chj/semigroup.hpp"

namespace chj {

/// Fixed 17-significant-digit float formatting shared by every CSV artifact.
std::string format_double(double v);

void write_grid_csv(const std::filesystem::path& path, const GridFunction& f);
void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace);
void write_orbit_csv(const std::filesystem::path& path, const HamiltonianModel& model,
                     const std::vector<CharacteristicState>& orbit, double c_level);
void write_curve_csv(const std::filesystem::path& path, const HamiltonianModel& model,
                     const std::vector<CurvePoint>& curve);

/// Per-time snapshot files, named by step index.
void write_snapshots(const std::filesystem::path& dir, const EvolutionTrace& trace);

std::string classification_to_json(const Classification& cls);
std::string interval_to_json(const IntervalEstimate& est, const OptimizerResult& cl,
                             const OptimizerResult& cr, double u_box);
std::string trace_summary_json(const EvolutionTrace& trace, Outcome outcome);

}  // namespace chj

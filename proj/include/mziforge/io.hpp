#pragma once

#include "mziforge/experiments.hpp"
#include "mziforge/mesh.hpp"
#include "mziforge/network.hpp"

#include <string>

namespace mziforge::io {

/// Single complex matrix file: {"format":1, "rows", "cols", "re":[[..]],
/// "im":[[..]]}.
std::string matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const std::string& text);

/// Weight stack: {"format":1, "layers":[{rows, cols, re, im}, ...]}.
std::string weights_to_json(const std::vector<ComplexMatrix>& weights);
std::vector<ComplexMatrix> weights_from_json(const std::string& text);

/// Dataset: {"format":1, "dim", "classes",
/// "samples":[{"re":[..],"im":[..],"label"}, ...]}.
std::string dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const std::string& text);

/// Mesh plan: {"n", "nodes":[{layer, top_mode, theta, phi, r, t, r2, t2,
/// beta_lt, beta_lb, beta_rt, beta_rb}], "phase_screen":[..]}, radians
/// and linear amplitudes at full double precision.
std::string mesh_plan_to_json(const MeshPlan& plan);
MeshPlan mesh_plan_from_json(const std::string& text);

/// Sweep rows as CSV: axis columns, mean, std, n_mc, seed.
std::string sweep_to_csv(const SweepResult& result);

/// Heatmap grid as CSV (one row per region row).
std::string heatmap_to_csv(const RealMatrix& grid);

/// Minimal SVG rendering of a heatmap: one rectangle per cell, colored
/// on a 10-step blue-to-red ramp between the grid's min and max.
std::string heatmap_to_svg(const RealMatrix& grid, const std::string& title);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace mziforge::io

#pragma once

#include <string>

#include "dyadlab/diagnostics.hpp"

namespace dyadlab {

/// raw little-endian doubles at <base>.f64 plus a {n, L, M, seed} sidecar at
/// <base>.json
void write_mesh(const std::string& base, const MeshFunction& f);
MeshFunction read_mesh(const std::string& base);

/// small meshes as "index,value" rows
void write_mesh_csv(const std::string& path, const MeshFunction& f);

/// "x,value,envelope" rows with a header, '.' decimals, '\n' newlines
void write_curve_csv(const std::string& path, const DecayCurve& curve);

void write_text(const std::string& path, const std::string& content);

/// shortest round-trip decimal formatting (deterministic, locale-free)
std::string format_double(double v);

nlohmann::json grid_to_json(const GridSpec& g);
GridPtr grid_from_json(const nlohmann::json& j);

}  // namespace dyadlab

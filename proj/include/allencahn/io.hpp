#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "allencahn/energy.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/varifold.hpp"

namespace allencahn {

inline constexpr int kSchemaVersion = 1;

/// Field CSV: '#'-prefixed "key=value" metadata (schema_version, mesh, epsilon and any extras),
/// then the header "vertex_id,value" and one row per vertex.
void write_field_csv(const std::filesystem::path& path, const Field& u,
                     const std::map<std::string, std::string>& extra = {});

struct FieldFile {
  Field field;
  std::map<std::string, std::string> metadata;
};

/// Throws ValidationError on a malformed file or an unsupported schema_version.
FieldFile read_field_csv(const std::filesystem::path& path);

void write_mesh_obj(const std::filesystem::path& path, const SurfaceMesh& mesh);

/// Stiffness triplets "row,col,value" followed by nothing else; mass as "vertex_id,mass".
void write_operators_csv(const std::filesystem::path& stiffness_path, const std::filesystem::path& mass_path,
                         const DiscreteOperators& ops);

/// One row "curve_id,x,y,z" per polyline point; closed curves do not repeat their first point.
void write_curves_csv(const std::filesystem::path& path, const LevelSetCurves& curves);

void write_density_csv(const std::filesystem::path& path, const DensityReport& report);

void write_profile_csv(const std::filesystem::path& path, const HeteroclinicProfile& profile);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace allencahn

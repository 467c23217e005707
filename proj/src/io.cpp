#include "allencahn/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "allencahn/error.hpp"

namespace allencahn {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const Field& u,
                     const std::map<std::string, std::string>& extra) {
  auto out = open_out(path);
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# mesh=" << u.mesh_id << "\n";
  out << "# epsilon=" << u.epsilon << "\n";
  for (const auto& [key, value] : extra) out << "# " << key << "=" << value << "\n";
  out << "vertex_id,value\n";
  for (int i = 0; i < u.size(); ++i) out << i << "," << u.values[i] << "\n";
}

FieldFile read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  FieldFile file;
  std::vector<double> values;
  bool header = false;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) file.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header) {
      if (line != "vertex_id,value") throw ValidationError(path.string() + ": expected header vertex_id,value");
      header = true;
      continue;
    }
    std::istringstream row(line);
    long id = 0;
    char comma = 0;
    double value = 0.0;
    if (!(row >> id >> comma >> value) || comma != ',' || id != static_cast<long>(values.size()))
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    values.push_back(value);
  }
  if (!header) throw ValidationError(path.string() + ": missing header");
  if (file.metadata["schema_version"] != std::to_string(kSchemaVersion))
    throw ValidationError(path.string() + ": unsupported schema_version '" + file.metadata["schema_version"] + "'");
  if (!file.metadata.count("mesh") || !file.metadata.count("epsilon"))
    throw ValidationError(path.string() + ": missing mesh or epsilon metadata");
  file.field.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  file.field.mesh_id = file.metadata["mesh"];
  file.field.epsilon = std::stod(file.metadata["epsilon"]);
  return file;
}

void write_mesh_obj(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  auto out = open_out(path);
  out << "# " << mesh.id << "\n";
  for (const auto& v : mesh.vertices) out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

void write_operators_csv(const std::filesystem::path& stiffness_path, const std::filesystem::path& mass_path,
                         const DiscreteOperators& ops) {
  auto k = open_out(stiffness_path);
  k << "row,col,value\n";
  for (int c = 0; c < ops.stiffness.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(ops.stiffness, c); it; ++it)
      k << it.row() << "," << it.col() << "," << it.value() << "\n";
  auto m = open_out(mass_path);
  m << "vertex_id,mass\n";
  for (int i = 0; i < ops.size(); ++i) m << i << "," << ops.mass[i] << "\n";
}

void write_curves_csv(const std::filesystem::path& path, const LevelSetCurves& curves) {
  auto out = open_out(path);
  out << "curve_id,x,y,z\n";
  for (std::size_t c = 0; c < curves.polylines.size(); ++c)
    for (const auto& p : curves.polylines[c].points) out << c << "," << p.x() << "," << p.y() << "," << p.z() << "\n";
}

void write_density_csv(const std::filesystem::path& path, const DensityReport& report) {
  auto out = open_out(path);
  out << "r,mass,ratio,monotonicity_ratio\n";
  for (std::size_t k = 0; k < report.radii.size(); ++k)
    out << report.radii[k] << "," << report.mass[k] << "," << report.ratio[k] << ","
        << report.monotonicity_ratio[k] << "\n";
}

void write_profile_csv(const std::filesystem::path& path, const HeteroclinicProfile& profile) {
  auto out = open_out(path);
  out << "s,H,Hprime\n";
  for (std::size_t i = 0; i < profile.grid().size(); ++i)
    out << profile.grid()[i] << "," << profile.values()[i] << "," << profile.derivative()[i] << "\n";
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace allencahn

#include "rmf/fields/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rmf/core/errors.hpp"

namespace rmf::fields {

static_assert(std::endian::native == std::endian::little, "raw arrays are written in native little-endian order");

void write_f64(const std::filesystem::path& path, const double* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) throw DomainError("write failed: " + path.string());
}

std::vector<double> read_f64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DomainError("cannot open " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % sizeof(double) != 0) throw DomainError(path.string() + ": size is not a multiple of 8 bytes");
  std::vector<double> v(bytes / sizeof(double));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  return v;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  const std::size_t cell = traj.box.size();
  std::vector<double> buf;
  buf.reserve(cell * traj.fields.size());
  for (const auto& f : traj.fields) buf.insert(buf.end(), f.values.begin(), f.values.end());
  write_f64(dir / "density.f64", buf.data(), buf.size());

  const bool has_drift = traj.drift_fields.size() == traj.fields.size() && !traj.fields.empty();
  if (has_drift) {
    buf.clear();
    for (const auto& a : traj.drift_fields)
      for (const auto& c : a.comp) buf.insert(buf.end(), c.begin(), c.end());
    write_f64(dir / "drift.f64", buf.data(), buf.size());
  }

  nlohmann::json meta;
  meta["format"] = "rmf-trajectory";
  meta["version"] = 1;
  meta["L"] = traj.box.L();
  meta["M"] = traj.box.M();
  meta["dt"] = traj.dt;
  meta["stride"] = traj.stride;
  meta["kernel"] = traj.kernel_name;
  meta["times"] = traj.times;
  meta["has_drift"] = has_drift;
  meta["config_hash"] = config_hash;
  meta["positivity_violations"] = traj.positivity_violations;
  meta["worst_negative_ratio"] = traj.worst_negative_ratio;
  meta["max_mass_drift"] = traj.max_mass_drift;
  meta["layout"] = "checkpoint-major; drift: checkpoint, component, node; nodes row-major (i, j, k), k fastest";
  std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw DomainError("missing " + (dir / "meta.json").string());
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("malformed trajectory metadata: " + std::string(e.what()));
  }
  if (meta.value("format", "") != "rmf-trajectory") throw DomainError("not a trajectory directory: " + dir.string());

  const Box box(meta.at("L").get<double>(), meta.at("M").get<std::size_t>());
  Trajectory traj(box);
  traj.dt = meta.at("dt").get<double>();
  traj.stride = meta.at("stride").get<std::size_t>();
  traj.kernel_name = meta.at("kernel").get<std::string>();
  traj.times = meta.at("times").get<std::vector<double>>();
  traj.positivity_violations = meta.value("positivity_violations", std::size_t{0});
  traj.worst_negative_ratio = meta.value("worst_negative_ratio", 0.0);
  traj.max_mass_drift = meta.value("max_mass_drift", 0.0);

  const std::size_t cell = box.size();
  const auto dens = read_f64(dir / "density.f64");
  if (dens.size() != cell * traj.times.size()) throw DomainError("density.f64 does not match meta.json");
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    GridField f(box, traj.times[j]);
    std::memcpy(f.values.data(), dens.data() + j * cell, cell * sizeof(double));
    traj.fields.push_back(std::move(f));
  }
  if (meta.value("has_drift", false)) {
    const auto drift = read_f64(dir / "drift.f64");
    if (drift.size() != 3 * cell * traj.times.size()) throw DomainError("drift.f64 does not match meta.json");
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
      VectorField a(box, traj.times[j]);
      for (int c = 0; c < 3; ++c) std::memcpy(a.comp[c].data(), drift.data() + (3 * j + c) * cell, cell * sizeof(double));
      traj.drift_fields.push_back(std::move(a));
    }
  }
  return traj;
}

}  // namespace rmf::fields

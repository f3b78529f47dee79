#pragma once

#include <filesystem>
#include <string>

#include "rmf/fields/solvers.hpp"

namespace rmf::fields {

// density.f64 (and drift.f64 when present) hold every checkpoint back to
// back as little-endian float64; meta.json records box, times, stride and
// the config hash.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir, const std::string& config_hash);
Trajectory read_trajectory(const std::filesystem::path& dir);

// Raw little-endian float64 array helpers shared with the particle module.
void write_f64(const std::filesystem::path& path, const double* data, std::size_t n);
std::vector<double> read_f64(const std::filesystem::path& path);

}  // namespace rmf::fields

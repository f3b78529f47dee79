#pragma once

#include <filesystem>
#include <string>

#include "rmf/kernels/kernel_set.hpp"

namespace rmf::kernels {

// Self-describing kernel table file: a text header (format tag, d, lambda,
// eta, grid spec, mollifier name, FNV-1a checksum of the payload) followed
// by little-endian float64 payload.
void export_kernel_set(const RadialKernelSet& ks, const std::filesystem::path& path);

// Throws DomainError on a malformed header and NumericalError on checksum
// mismatch.
RadialKernelSet import_kernel_set(const std::filesystem::path& path);

// Checksum of the payload, the identity recorded in experiment manifests.
std::string kernel_set_hash(const RadialKernelSet& ks);

}  // namespace rmf::kernels

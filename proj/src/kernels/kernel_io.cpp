#include "rmf/kernels/kernel_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "rmf/core/errors.hpp"
#include "rmf/core/hash.hpp"

namespace rmf::kernels {

static_assert(std::endian::native == std::endian::little, "table files are little-endian float64");

namespace {

constexpr const char* kMagic = "RMF-KERNEL-TABLE";
constexpr int kVersion = 1;

std::vector<double> payload_of(const RadialKernelSet& ks) {
  std::vector<double> p{ks.V().r_min(), ks.V().r_max(), ks.V().value_at_zero(), ks.lapV().value_at_zero(),
                        ks.Z().value_at_zero()};
  for (const RadialTable* t : {&ks.V(), &ks.dV(), &ks.lapV(), &ks.Z()}) {
    p.insert(p.end(), t->values().begin(), t->values().end());
  }
  return p;
}

std::string checksum(const std::vector<double>& payload) {
  Fnv1a64 h;
  h.update_pod(std::span<const double>(payload));
  return h.hex();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string kernel_set_hash(const RadialKernelSet& ks) { return checksum(payload_of(ks)); }

void export_kernel_set(const RadialKernelSet& ks, const std::filesystem::path& path) {
  const auto payload = payload_of(ks);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("export_kernel_set: cannot open " + path.string());
  out << kMagic << ' ' << kVersion << '\n'
      << "d " << ks.params().d() << '\n'
      << "lambda " << fmt17(ks.params().lambda()) << '\n'
      << "eta " << fmt17(ks.eta()) << '\n'
      << "nodes " << ks.V().size() << '\n'
      << "r_min " << fmt17(ks.V().r_min()) << '\n'
      << "r_max " << fmt17(ks.V().r_max()) << '\n'
      << "grid log-uniform\n"
      << "mollifier " << ks.mollifier().name() << '\n'
      << "payload_doubles " << payload.size() << '\n'
      << "checksum " << checksum(payload) << '\n'
      << "end\n";
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) throw DomainError("export_kernel_set: write failed for " + path.string());
}

RadialKernelSet import_kernel_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("import_kernel_set: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  {
    std::istringstream first(line);
    std::string magic;
    int version = 0;
    first >> magic >> version;
    if (magic != kMagic || version != kVersion) throw DomainError("import_kernel_set: not a kernel table file");
  }
  std::map<std::string, std::string> header;
  while (std::getline(in, line) && line != "end") {
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw DomainError("import_kernel_set: malformed header line '" + line + "'");
    header[line.substr(0, sp)] = line.substr(sp + 1);
  }
  for (const char* key : {"d", "lambda", "eta", "nodes", "mollifier", "payload_doubles", "checksum"}) {
    if (!header.count(key)) throw DomainError(std::string("import_kernel_set: missing header key ") + key);
  }
  const std::size_t count = std::stoull(header["payload_doubles"]);
  const std::size_t nodes = std::stoull(header["nodes"]);
  if (count != 5 + 4 * nodes) throw DomainError("import_kernel_set: payload size does not match node count");
  std::vector<double> p(count);
  in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw DomainError("import_kernel_set: truncated payload");
  if (checksum(p) != header["checksum"]) throw NumericalError("import_kernel_set: checksum mismatch");

  const RieszParams params(std::stoi(header["d"]), std::stod(header["lambda"]));
  const double eta = std::stod(header["eta"]);
  auto slice = [&](std::size_t k) {
    return std::vector<double>(p.begin() + 5 + k * nodes, p.begin() + 5 + (k + 1) * nodes);
  };
  const double r_min = p[0], r_max = p[1];
  const double lambda = params.lambda();
  return RadialKernelSet(params, eta, MollifierProfile::by_name(header["mollifier"]),
                         RadialTable(r_min, r_max, slice(0), p[2], Parity::even, lambda),
                         RadialTable(r_min, r_max, slice(1), 0.0, Parity::odd, lambda + 1.0),
                         RadialTable(r_min, r_max, slice(2), p[3], Parity::even, lambda + 2.0),
                         RadialTable(r_min, r_max, slice(3), p[4], Parity::even, params.psi_exponent()));
}

}  // namespace rmf::kernels

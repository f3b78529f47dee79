#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rmf/core/vec3.hpp"
#include "rmf/fields/initial_density.hpp"
#include "rmf/fields/solvers.hpp"
#include "rmf/particles/pair_kernel.hpp"

namespace rmf::particles {

// Positions in structure-of-arrays layout, wrapped to [-L/2, L/2)^3.
struct ParticleArray {
  ParticleArray() = default;
  explicit ParticleArray(std::size_t n) : x(n), y(n), z(n) {}

  std::vector<double> x, y, z;

  std::size_t size() const { return x.size(); }
  Vec3 operator[](std::size_t i) const { return {x[i], y[i], z[i]}; }
  void set(std::size_t i, const Vec3& p) {
    x[i] = p.x;
    y[i] = p.y;
    z[i] = p.z;
  }
};

struct EnsembleConfig {
  std::size_t N = 1000;
  double beta = 0.05;
  double sigma = 0.25;
  double kappa = 1.0;
  double dt = 0.01;
  double T_end = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  double L = 16.0;
  // false switches off the interaction in both systems.
  bool interaction = true;
  // Thresholds N^{-alpha} for the coupling exceedance flags.
  std::vector<double> alpha_list{0.3};
  // Position snapshots every save_every steps plus the final step; 0 = none.
  std::size_t save_every = 0;

  double eta() const;
};

struct CoupledEnsemble {
  ParticleArray X;     // interacting system
  ParticleArray Xbar;  // mean-field system
  std::vector<double> dx, dy, dz;  // unwrapped displacement of Xbar since t = 0
  std::size_t step = 0;
  double t = 0.0;
};

struct CouplingRecord {
  std::vector<double> times;
  std::vector<double> max_distance;  // max_i |X_i - Xbar_i| per checkpoint
  std::vector<double> running_sup;
  std::vector<double> alpha_list;
  std::vector<bool> exceeded;  // sup_t max_i |X_i - Xbar_i| > N^{-alpha}
  // Particles whose unwrapped displacement exceeded L/4.
  std::size_t truncation_warnings = 0;

  std::vector<double> snapshot_times;
  std::vector<ParticleArray> snapshot_X, snapshot_Xbar;
};

// zeta_i drawn from the initial density with the counter RNG; X = Xbar = zeta.
CoupledEnsemble init_ensemble(const EnsembleConfig& cfg, const fields::InitialDensity& init);

// b_i = (kappa/N) sum_j grad V^eta(X_i - X_j), minimum image. Parallel over i;
// the j-sum runs in index order, so the result is independent of threads.
void pairwise_drift(const ParticleArray& X, const PairKernel& pk, double kappa, double L, ParticleArray& out);

// Trilinear samples of the precomputed field kappa (grad V^eta * ubar).
void meanfield_drift(const ParticleArray& Xbar, const fields::VectorField& drift, ParticleArray& out);

// One Euler-Maruyama step of both systems with the shared increment
// G_{i,n} = normal3(seed, realization, i, n).
void em_step(CoupledEnsemble& ens, const EnsembleConfig& cfg, const PairKernel& pk, const fields::VectorField& drift);

double coupling_distance(const CoupledEnsemble& ens, double L);

// Called at every step index n (t = n dt), including 0 and the final step.
using Observer = std::function<void(std::size_t step, double t, const CoupledEnsemble& ens)>;

// Steps both systems to T_end. The drift field at step n is the trajectory
// checkpoint at t = n dt, which must exist.
CouplingRecord run_coupled(const EnsembleConfig& cfg, const fields::InitialDensity& init, const PairKernel& pk,
                           const fields::Trajectory& ubar, const Observer& observer = {});

}  // namespace rmf::particles

/*
 * Copyright 2026 the cavks authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "cavks/cavity.hpp"
#include "cavks/grid.hpp"
#include "cavks/kohn_sham.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace cavks {

using Complex = std::complex<double>;

/// One-electron Pauli-Fierz Hamiltonian on a grid (x) Fock product basis,
/// applied matrix-free. The state vector is laid out photon-block major:
/// psi[n * space_dim + r] for photon number n = 0..n_max.
///
/// Per photon block n:
///   (H psi)_n = H_el psi_n + wt (n + 1/2) psi_n
///             + g (sqrt(n) D psi_{n-1} + sqrt(n+1) D psi_{n+1})
/// with D = -i (eps . nabla) and g = lt / sqrt(2 wt).
class PFOperator {
public:
  /// Accumulates the block operator applied to `in` into `out` (same length).
  using BlockApply = std::function<void(std::span<const Complex> in,
                                        std::span<Complex> out)>;

  /// Electronic block from grid operators: H_el = -1/2 nabla^2 + v_ext and
  /// D from 4th-order antisymmetric central differences.
  PFOperator(const ScalarField& v_ext, const DressedMode& mode, int n_max);

  /// Generic blocks, e.g. explicit small matrices in tests.
  PFOperator(std::size_t space_dim, int n_max, double omega_tilde,
             double coupling, BlockApply apply_hel, BlockApply apply_d);

  std::size_t space_dim() const { return space_dim_; }
  int n_max() const { return n_max_; }
  std::size_t dim() const { return space_dim_ * (n_max_ + 1); }
  double omega_tilde() const { return omega_tilde_; }
  double coupling() const { return coupling_; }

  void matvec(std::span<const Complex> in, std::span<Complex> out) const;

private:
  std::size_t space_dim_;
  int n_max_;
  double omega_tilde_;
  double coupling_; // g = lambda_tilde / sqrt(2 omega_tilde)
  BlockApply apply_hel_;
  BlockApply apply_d_;
};

/// Exact-diagonalization configuration. The system must be one-electron with
/// interactions disabled; the mode must already be dressed with N_e = 1.
struct PFConfig {
  SystemSpec spec;
  DressedMode mode;
  int n_max = 4;
  double eig_tol = 1e-8;
  std::uint64_t seed = 1;
  int max_basis = 150;    // Lanczos basis size before a thick restart
  int max_matvecs = 50000;

  void validate() const;
};

struct PFGroundState {
  double energy = 0.0;
  /// Unit norm: h^3 sum |psi|^2 = 1; layout as in PFOperator.
  std::vector<Complex> wavefunction;
  ScalarField electron_density; // photon-traced, integrates to 1
  double residual = 0.0;
  int matvecs = 0;
};

/// One application of the PF Hamiltonian built from cfg.
std::vector<Complex> pf_matvec(std::span<const Complex> psi, const PFConfig& cfg);

/// Ground state by complex Hermitian Lanczos with full reorthogonalization
/// (thick restart when the basis reaches cfg.max_basis).
PFGroundState pf_ground_state(const PFConfig& cfg);

/// Same solver on a caller-built operator (arbitrary external potentials,
/// e.g. trap potentials in tests). `grid` must match the operator's space
/// dimension.
PFGroundState pf_ground_state(const PFOperator& op, const Grid& grid,
                              double eig_tol = 1e-8, std::uint64_t seed = 1,
                              int max_basis = 150, int max_matvecs = 50000);

struct FockConvergenceRow {
  int n_max = 0;
  double energy = 0.0;
  double i_vs_prev = 0.0; // NaN for the first entry
};

/// Truncation study: reruns the ground state for each n_max and reports the
/// I metric between consecutive electron densities.
std::vector<FockConvergenceRow> fock_convergence(const PFConfig& base,
                                                 std::span<const int> n_max_list);

} // namespace cavks

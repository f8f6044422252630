#pragma once

// Closed-form two-qubit concentration and the concatenation protocol built on
// it. Qubits carry L = diag(0, 1); all states are handled in Bloch form with
// p00 = (1 + nz) / 2 and p01 = (nx + i ny) / 2, and M^(1) = |p01| throughout.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "coherence/states.hpp"

namespace coherence {

struct ConcentrationResult {
  /// Magnitude of the rotation angle, in [0, pi/2).
  double theta_opt = 0.0;
  /// Signed angle actually applied: atan(2 p00 - 1).
  double theta_signed = 0.0;
  /// |p01| (sqrt(1 + (2 p00 - 1)^2) - 1).
  double delta_m = 0.0;
  /// Gain obtained by simulating rho (x) rho under `unitary`.
  double delta_m_simulated = 0.0;
  BlochState output_state;
  AllowedUnitary unitary;
};

/// Closed-form gain for a qubit with the given diagonal and coherence modulus.
double closed_form_delta_m(double p00, double abs_p01);

/// Two-qubit allowed unitary rotating {|01>, |10>} by [[c, -s], [s, c]].
AllowedUnitary concentration_unitary(double theta);

/// Optimal single-round concentration. Throws DimensionError unless dim = 2,
/// and Error if the simulated gain drifts from the closed form beyond 1e-10.
ConcentrationResult optimal_concentration(const DensityMatrix& rho);

/// sigma_A = tr_B[V (rho (x) rho) V^dagger] for a two-qubit allowed unitary.
DensityMatrix two_copy_output(const DensityMatrix& rho, const AllowedUnitary& u);

// Phase-type allowed unitaries. S and T act as e^{i omega} on |00> and |11>,
// the Z rotation applies diag(e^{-i phi}, e^{i phi}) inside {|01>, |10>} and the
// Y rotation is concentration_unitary(theta).
AllowedUnitary phase_s(double omega0);
AllowedUnitary phase_t(double omega1);
AllowedUnitary degenerate_rz(double phi);
AllowedUnitary degenerate_ry(double theta);

/// Bloch vector with its Z rotation removed (ny = 0, nx >= 0).
struct CanonicalBloch {
  BlochState state;
  /// Angle phi with p01 = |p01| e^{i phi}; the applied rotation is e^{-i phi}.
  double z_phase = 0.0;
};

CanonicalBloch canonicalize(const BlochState& b);

/// One concatenation step in Bloch form applied after canonicalization:
///   nz' = nz - nz nx^2 / (1 + nz^2),   nx' = nx sqrt(1 + nz^2).
/// Throws ValidationError on an invalid Bloch vector.
BlochState recurrence_step(const BlochState& b);

/// The same step by direct simulation: canonicalize, build rho (x) rho, apply
/// the optimal unitary and trace out B.
BlochState simulate_concentration_step(const BlochState& b);

enum class ConcatStatus { converged, fixed_point, step_cap };

const char* to_string(ConcatStatus status);

struct ConcatTrace {
  /// steps[m] is the state after m rounds; steps[0] is the canonical start.
  std::vector<BlochState> steps;
  /// 2^m copies of the input behind steps[m].
  std::vector<double> copies_consumed;
  /// Z phase removed before each transition (entry m precedes step m+1), plus
  /// the one removed from the raw start at index 0.
  std::vector<double> z_phases;
  std::optional<std::size_t> converged_at;
  ConcatStatus status = ConcatStatus::step_cap;
  double convergence_eps = 1e-3;
};

inline constexpr std::size_t kDefaultConcatStepCap = 1'000'000;
inline constexpr double kDefaultConvergenceEps = 1e-3;

/// Iterates recurrence_step from b0 until |nz| < convergence_eps, a fixed
/// point is reached, or max_steps rounds have run. Monotonicity of |nx|, nz^2
/// and the Bloch norm is checked at each step; a violation beyond 1e-12
/// raises Error.
ConcatTrace run_concatenation(const BlochState& b0, std::size_t max_steps = kDefaultConcatStepCap,
                              double convergence_eps = kDefaultConvergenceEps);

/// sqrt(2 tr(rho^2) - 1), the Bloch norm of rho; radicand clamped at 0.
double purity_ceiling(const DensityMatrix& rho);
double purity_ceiling(const BlochState& b);

/// Start state (nx, 0, nz) whose M^(1) grows by more than 2^(N/2 - epsilon)
/// over N rounds; its own M^(1) is below 2^-N. Throws ValidationError for
/// N = 0 or epsilon <= 0, and for parameters whose nx would fall below 1e-300
/// (the message names the largest feasible N).
BlochState amplification_state(std::size_t n, double epsilon);

/// M^(1) after `steps` rounds divided by M^(1) of the start.
double amplification_ratio(const BlochState& start, std::size_t steps);

struct FieldSample {
  BlochState point;
  double dnx = 0.0;
  double dnz = 0.0;
};

/// Polar grid over the quarter disc nx, nz >= 0 of the ny = 0 plane: radii
/// (i + 1) / radial for i < radial, and `angular` angles from the nz axis
/// (0) to the nx axis (pi/2) inclusive. Requires radial >= 1, angular >= 2.
std::vector<FieldSample> vector_field(std::size_t radial, std::size_t angular);

/// step, n_x, n_z, copies_consumed, m1, purity_ceiling
void write_trace_csv(std::ostream& out, const ConcatTrace& trace);
/// n_x, n_z, dn_x, dn_z
void write_field_csv(std::ostream& out, const std::vector<FieldSample>& field);

}  // namespace coherence

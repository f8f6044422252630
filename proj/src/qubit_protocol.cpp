#include "coherence/qubit_protocol.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "coherence/csv.hpp"
#include "coherence/error.hpp"
#include "coherence/modes.hpp"

namespace coherence {

namespace {

const BipartiteGenerator& two_qubits() {
  static const BipartiteGenerator gen(2);
  return gen;
}

AllowedUnitary from_blocks(Complex b0, ComplexMatrix b1, Complex b2) {
  return AllowedUnitary(two_qubits(), {ComplexMatrix{{b0}}, std::move(b1), ComplexMatrix{{b2}}});
}

void require_qubit(const DensityMatrix& rho, const char* op) {
  if (rho.dim() != 2) {
    throw DimensionError(std::string(op) + ": expected a qubit, got dim " + std::to_string(rho.dim()));
  }
}

double m1(const BlochState& b) { return 0.5 * std::hypot(b.nx, b.ny); }

}  // namespace

double closed_form_delta_m(double p00, double abs_p01) {
  const double x = 2.0 * p00 - 1.0;
  return abs_p01 * (std::sqrt(1.0 + x * x) - 1.0);
}

AllowedUnitary concentration_unitary(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return from_blocks(1.0, ComplexMatrix{{c, -s}, {s, c}}, 1.0);
}

AllowedUnitary phase_s(double omega0) { return from_blocks(std::polar(1.0, omega0), ComplexMatrix::identity(2), 1.0); }

AllowedUnitary phase_t(double omega1) { return from_blocks(1.0, ComplexMatrix::identity(2), std::polar(1.0, omega1)); }

AllowedUnitary degenerate_rz(double phi) {
  return from_blocks(1.0, ComplexMatrix::diagonal({std::polar(1.0, -phi), std::polar(1.0, phi)}), 1.0);
}

AllowedUnitary degenerate_ry(double theta) { return concentration_unitary(theta); }

DensityMatrix two_copy_output(const DensityMatrix& rho, const AllowedUnitary& u) {
  require_qubit(rho, "two_copy_output");
  if (u.generator().local_dim() != 2) throw DimensionError("two_copy_output: unitary is not a two-qubit unitary");
  return local_output(tensor(rho, rho), u);
}

ConcentrationResult optimal_concentration(const DensityMatrix& rho) {
  require_qubit(rho, "optimal_concentration");
  const double p00 = rho(0, 0).real();
  const double abs_p01 = std::abs(rho(0, 1));
  const double x = 2.0 * p00 - 1.0;
  const double theta = std::atan(x);

  ConcentrationResult result{std::abs(theta), theta, closed_form_delta_m(p00, abs_p01), 0.0, {},
                             concentration_unitary(theta)};
  const DensityMatrix sigma = two_copy_output(rho, result.unitary);
  result.output_state = density_to_bloch(sigma);
  const NumberOperator L(2);
  result.delta_m_simulated = mode_measure(sigma, L, 1) - mode_measure(rho, L, 1);
  const double drift = std::abs(result.delta_m_simulated - result.delta_m);
  if (drift > 1e-10) {
    throw Error("optimal_concentration: simulated gain differs from the closed form by " + std::to_string(drift));
  }
  return result;
}

CanonicalBloch canonicalize(const BlochState& b) {
  validate(b);
  const double phase = (b.nx == 0.0 && b.ny == 0.0) ? 0.0 : std::atan2(b.ny, b.nx);
  return {{std::hypot(b.nx, b.ny), 0.0, b.nz}, phase};
}

BlochState recurrence_step(const BlochState& b) {
  const BlochState s = canonicalize(b).state;
  const double nz2 = s.nz * s.nz;
  return {s.nx * std::sqrt(1.0 + nz2), 0.0, s.nz - s.nz * s.nx * s.nx / (1.0 + nz2)};
}

BlochState simulate_concentration_step(const BlochState& b) {
  const BlochState s = canonicalize(b).state;
  const DensityMatrix rho = bloch_to_density(s);
  return density_to_bloch(two_copy_output(rho, concentration_unitary(std::atan(s.nz))));
}

const char* to_string(ConcatStatus status) {
  switch (status) {
    case ConcatStatus::converged: return "converged";
    case ConcatStatus::fixed_point: return "fixed_point";
    case ConcatStatus::step_cap: return "not_converged";
  }
  return "unknown";
}

ConcatTrace run_concatenation(const BlochState& b0, std::size_t max_steps, double convergence_eps) {
  if (max_steps < 1) throw ValidationError("run_concatenation: max_steps must be at least 1");
  if (!(convergence_eps > 0.0)) throw ValidationError("run_concatenation: convergence_eps must be positive");
  const CanonicalBloch start = canonicalize(b0);

  ConcatTrace trace;
  trace.convergence_eps = convergence_eps;
  trace.steps.push_back(start.state);
  trace.copies_consumed.push_back(1.0);
  trace.z_phases.push_back(start.z_phase);

  constexpr double kSlack = 1e-12;
  for (std::size_t m = 0;; ++m) {
    const BlochState cur = trace.steps.back();
    if (std::abs(cur.nz) < convergence_eps) {
      trace.converged_at = m;
      trace.status = ConcatStatus::converged;
      break;
    }
    if (m == max_steps) {
      trace.status = ConcatStatus::step_cap;
      break;
    }
    const BlochState next = recurrence_step(cur);
    if (next.nx == cur.nx && next.nz == cur.nz) {
      trace.status = ConcatStatus::fixed_point;
      break;
    }
    if (std::abs(next.nx) < std::abs(cur.nx) - kSlack || next.nz * next.nz > cur.nz * cur.nz + kSlack ||
        next.norm() > cur.norm() + kSlack) {
      throw Error("run_concatenation: monotonicity violated at step " + std::to_string(m + 1));
    }
    trace.steps.push_back(next);
    trace.copies_consumed.push_back(std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(m + 1, 4096))));
    trace.z_phases.push_back(0.0);
  }
  return trace;
}

double purity_ceiling(const DensityMatrix& rho) {
  require_qubit(rho, "purity_ceiling");
  return std::sqrt(std::max(0.0, 2.0 * rho.purity() - 1.0));
}

double purity_ceiling(const BlochState& b) { return b.norm(); }

namespace {

// log2 of nx for the amplification construction, computed without forming
// the (possibly subnormal) intermediate A0.
double amplification_log2_nx(std::size_t n, double epsilon, double* nz_out) {
  const double nn = static_cast<double>(n);
  const double log2_nz = -1e-3 * epsilon / nn;
  const double nz = std::exp2(log2_nz);
  const double b0 = nz * nz;
  const double one_minus_b0 = -std::expm1(2.0 * std::numbers::ln2 * log2_nz);
  const double log2_a0 = std::log2(1e-3) - 2.0 * nn - std::log2(2.0 * nn) + std::log2(std::min(one_minus_b0, b0));
  if (nz_out) *nz_out = nz;
  return 0.5 * log2_a0;
}

}  // namespace

BlochState amplification_state(std::size_t n, double epsilon) {
  if (n < 1) throw ValidationError("amplification_state: N must be at least 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("amplification_state: epsilon must be positive");
  double nz = 0.0;
  const double log2_nx = amplification_log2_nx(n, epsilon, &nz);
  const double floor_log2 = std::log2(1e-300);
  if (log2_nx < floor_log2) {
    std::size_t feasible = n;
    while (feasible > 0 && amplification_log2_nx(feasible, epsilon, nullptr) < floor_log2) --feasible;
    throw ValidationError("amplification_state: n_x underflows below 1e-300 for N = " + std::to_string(n) +
                          "; largest feasible N for epsilon " + std::to_string(epsilon) + " is " +
                          std::to_string(feasible));
  }
  return {std::exp2(log2_nx), 0.0, nz};
}

double amplification_ratio(const BlochState& start, std::size_t steps) {
  BlochState cur = canonicalize(start).state;
  const double initial = m1(cur);
  if (initial == 0.0) throw ValidationError("amplification_ratio: start state has no coherence");
  for (std::size_t m = 0; m < steps; ++m) cur = recurrence_step(cur);
  return m1(cur) / initial;
}

std::vector<FieldSample> vector_field(std::size_t radial, std::size_t angular) {
  if (radial < 1 || angular < 2) throw ValidationError("vector_field: need radial >= 1 and angular >= 2");
  std::vector<FieldSample> out;
  out.reserve(radial * angular);
  for (std::size_t i = 0; i < radial; ++i) {
    const double r = static_cast<double>(i + 1) / static_cast<double>(radial);
    for (std::size_t k = 0; k < angular; ++k) {
      BlochState p;
      if (k == 0) {
        p = {0.0, 0.0, r};
      } else if (k + 1 == angular) {
        p = {r, 0.0, 0.0};
      } else {
        const double a = static_cast<double>(k) * (std::numbers::pi / 2.0) / static_cast<double>(angular - 1);
        p = {r * std::sin(a), 0.0, r * std::cos(a)};
      }
      const BlochState next = recurrence_step(p);
      out.push_back({p, next.nx - p.nx, next.nz - p.nz});
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const ConcatTrace& trace) {
  out << "step,n_x,n_z,copies_consumed,m1,purity_ceiling\n";
  const double ceiling = trace.steps.empty() ? 0.0 : purity_ceiling(trace.steps.front());
  for (std::size_t m = 0; m < trace.steps.size(); ++m) {
    const BlochState& b = trace.steps[m];
    out << m << ',' << format_real(b.nx) << ',' << format_real(b.nz) << ',' << format_real(trace.copies_consumed[m])
        << ',' << format_real(m1(b)) << ',' << format_real(ceiling) << '\n';
  }
}

void write_field_csv(std::ostream& out, const std::vector<FieldSample>& field) {
  out << "n_x,n_z,dn_x,dn_z\n";
  for (const auto& s : field) {
    out << format_real(s.point.nx) << ',' << format_real(s.point.nz) << ',' << format_real(s.dnx) << ','
        << format_real(s.dnz) << '\n';
  }
}

}  // namespace coherence

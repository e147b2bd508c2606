#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsos/sos/compiler.hpp"

namespace lsos::sdp {

struct SolverConfig {
  double eps = 1e-7;             // residual / gap tolerance; returned points pass check_assignment at eps
  double eps_infeasible = 1e-6;  // |aggregated form| per unit of ray constant
  int max_iters = 200000;
  std::uint64_t seed = 0;
  double alpha = 1.5;  // over-relaxation
  int check_every = 20;
  std::ostream* log = nullptr;  // iteration log when set
};

/// Value per variable of the program (e(1) = 1 is implicit).
using MomentAssignment = std::vector<double>;

/// Multipliers for each block (PSD for psd blocks, symmetric for zero
/// blocks) and each scalar row (nonnegative), normalized so that the
/// aggregated affine form is the constant `constant` (< 0) up to `residual`.
struct DualWitness {
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<double> scalars;
  double constant = 0;
  double residual = 0;  // max |coefficient| of the aggregated linear part
};

enum class Status { feasible, optimal, infeasible, unbounded, unknown };
std::string to_string(Status s);

struct SolveResult {
  Status status = Status::unknown;
  MomentAssignment x;
  DualWitness witness;  // set iff infeasible
  double value = 0;     // objective value (optimal only), objective constant included
  int iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
  double seconds = 0;
  std::string reason;
};

enum class Direction { minimize, maximize };

SolveResult solve_feasibility(const sos::LiftedSdp& sdp, const SolverConfig& cfg = {});
SolveResult optimize(const sos::LiftedSdp& sdp, const sos::LinearForm& objective, Direction dir,
                     const SolverConfig& cfg = {});

struct Violation {
  std::string where;  // "block <i> (<origin>)" or "scalar <origin>"
  double amount = 0;
};

/// Per-block worst violation above eps. A psd block violates by its most
/// negative eigenvalue, a zero block by its largest entry, a scalar row by
/// its negative part; each measured relative to max(1, largest coefficient
/// of the block's data, largest evaluated entry) so positive rescaling of a
/// constraint does not change the verdict.
struct ViolationReport {
  std::vector<Violation> items;
  double worst = 0;
  bool ok() const { return items.empty(); }
};

/// Throws std::invalid_argument if x does not cover every variable.
ViolationReport check_assignment(const sos::LiftedSdp& sdp, const MomentAssignment& x, double eps);

/// Aggregated affine form sum <Y_b, L_b> + sum r_k L_k of a witness.
sos::LinearForm aggregate(const sos::LiftedSdp& sdp, const DualWitness& w);

/// True iff the witness has PSD psd-multipliers and nonnegative scalar
/// multipliers (to `tol`) and aggregates to a negative constant with
/// linear part below `tol`.
bool verify_witness(const sos::LiftedSdp& sdp, const DualWitness& w, double tol);

}  // namespace lsos::sdp

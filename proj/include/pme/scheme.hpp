// Implicit Euler gradient scheme for the generalised porous medium equation
//   d_t u - div( Lambda(x, u) grad beta(u) ) = f
// with pinned boundary values of beta(u). Each step solves the nonlinear
// system  M (u - u_prev)/dt + A(u) beta(u) = M f  by damped Newton iteration
// in a per-slot choice of variable: slots with mass carry u ("slow" form, for
// m >= 1) or beta(u) ("fast" form, for m < 1); massless slots always carry
// beta(u), which keeps the Jacobian nonsingular where the solution vanishes.
// Trajectories record per-step energy ledger entries, and a standalone ledger
// audit re-derives the discrete energy inequality from the stored states.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pme/common.hpp"
#include "pme/gradient_discretisation.hpp"
#include "pme/linalg.hpp"
#include "pme/nonlinearity.hpp"

namespace pme {

/// Continuous data of an initial-boundary value problem, plus the time grid.
struct ProblemSpec {
  PowerLaw beta{1.0};
  std::function<SymTensor2(Vec2, double)> lambda;  ///< diffusion tensor Lambda(x, u)
  double lambda_min = 1.0;                         ///< uniform ellipticity bounds
  double lambda_max = 1.0;
  bool lambda_state_dependent = false;  ///< false: tensor assembled once per run
  std::function<double(double, Vec2)> source;     ///< f(t, x); empty means zero
  std::function<double(Vec2)> initial;            ///< u at t = 0
  std::function<double(double, Vec2)> dirichlet;  ///< boundary trace of beta(u); empty means zero
  TimeGrid grid;

  bool homogeneous() const { return !dirichlet; }

  /// Checks presence of the data, the time grid, and the ellipticity bounds
  /// (the latter sampled at pseudo-random positions and states).
  void validate() const {
    if (!lambda) throw misuse_error("problem: diffusion tensor is not set");
    if (!initial) throw misuse_error("problem: initial datum is not set");
    if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
      throw misuse_error("problem: ellipticity bounds must satisfy 0 < min <= max");
    grid.validate();
    std::uint64_t seed = 0x2545f4914f6cdd1dULL;
    const auto unit = [&seed]() {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      return static_cast<double>(seed >> 11) / 9007199254740992.0;
    };
    for (int k = 0; k < 32; ++k) {
      const Vec2 x{unit() - 0.5, unit() - 0.5};
      const double s = (k == 0) ? 0.0 : 4.0 * unit() - 2.0;
      const SymTensor2 t = lambda(x, s);
      if (!t.positive_definite() || t.eig_min() < lambda_min * (1.0 - 1e-9) - 1e-12 ||
          t.eig_max() > lambda_max * (1.0 + 1e-9) + 1e-12)
        throw misuse_error("problem: sampled tensor violates the ellipticity bounds");
    }
  }
};

struct NewtonOptions {
  double tol = 1e-8;              ///< absolute sup-norm residual target
  std::size_t max_iterations = 50;
  std::size_t max_halvings = 20;  ///< step dampings accepted only on strict decrease
  SolveOptions linear{};
};

struct NewtonReport {
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Damped Newton iteration on F(x) = 0. `assemble(x, F, J)` evaluates the
/// residual and Jacobian at x; a step is halved (up to max_halvings) until the
/// residual sup-norm strictly decreases. Throws solver_error on stagnation.
///
/// A starting point that is merely within the tolerance is still refined
/// once: accepting it unchanged lets tolerance-sized lag build up over long
/// sequences of warm-started solves (small time steps), which matters when
/// the solution amplitude is itself close to the tolerance. Only a residual
/// three decades below the target counts as already settled.
template <class Assemble>
NewtonReport newton_solve(Assemble&& assemble, Vector& x, const NewtonOptions& opt = {}) {
  Vector residual;
  SparseMatrix jacobian;
  assemble(x, residual, jacobian);
  double rnorm = norm_inf(residual);
  NewtonReport report{0, rnorm};
  const double settled = 1e-3 * opt.tol;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    if (rnorm <= settled || (it > 0 && rnorm <= opt.tol)) return report;
    Vector rhs(residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -residual[i];
    const Vector step = solve(jacobian, rhs, opt.linear);
    double alpha = 1.0;
    bool accepted = false;
    for (std::size_t halve = 0; halve <= opt.max_halvings; ++halve) {
      Vector trial = x;
      axpy(alpha, step, trial);
      Vector trial_residual;
      SparseMatrix trial_jacobian;
      assemble(trial, trial_residual, trial_jacobian);
      const double trial_norm = norm_inf(trial_residual);
      if (trial_norm < rnorm) {
        x = std::move(trial);
        residual = std::move(trial_residual);
        jacobian = std::move(trial_jacobian);
        rnorm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      solver_error err("newton: line search stalled");
      err.residual = rnorm;
      throw err;
    }
    report.iterations = it + 1;
    report.residual = rnorm;
  }
  if (rnorm <= opt.tol) return report;
  solver_error err("newton: no convergence within the iteration budget");
  err.residual = rnorm;
  throw err;
}

/// Convenience overload with separate residual and Jacobian callbacks;
/// returns the converged iterate.
template <class Residual, class Jacobian>
Vector newton_solve(Residual&& residual, Jacobian&& jacobian, Vector x0,
                    const NewtonOptions& opt = {}) {
  const auto assemble = [&](const Vector& x, Vector& f, SparseMatrix& j) {
    f = residual(x);
    j = jacobian(x);
  };
  newton_solve(assemble, x0, opt);
  return x0;
}

enum class VariableForm {
  automatic,  ///< fast when m < 1, slow otherwise
  slow,       ///< mass slots carry u (m < 1 uses a guarded derivative)
  fast        ///< all slots carry beta(u); only valid for m < 1
};

struct SchemeOptions {
  VariableForm form = VariableForm::automatic;
  NewtonOptions newton{};
};

struct StepStats {
  std::size_t newton_iterations = 0;
  double final_residual = 0.0;
  // running energy ledger entries, maintained step by step
  double energy = 0.0;                   ///< integral of zeta(u) at this step
  double accumulated_dissipation = 0.0;  ///< sum of dt * beta' A beta up to here
  double accumulated_source = 0.0;       ///< sum of dt * f' M beta up to here
};

struct DiscreteTrajectory {
  TimeGrid grid;
  std::vector<Vector> states;  ///< u at every time node, all slots
  std::vector<StepStats> steps;
  double initial_energy = 0.0;  ///< integral of zeta(u) at time zero
};

/// March the implicit Euler gradient scheme over the problem's time grid.
inline DiscreteTrajectory run(const GradientDiscretisation& gd, const ProblemSpec& problem,
                              const SchemeOptions& options = {}) {
  problem.validate();
  const PowerLaw& beta = problem.beta;
  const TimeGrid& grid = problem.grid;

  VariableForm form = options.form;
  if (form == VariableForm::automatic)
    form = beta.m() < 1.0 ? VariableForm::fast : VariableForm::slow;
  if (form == VariableForm::fast && beta.m() >= 1.0)
    throw misuse_error("run: the fast form requires an exponent below one");

  const std::size_t ndof = gd.n_unknowns;
  const std::size_t ntot = gd.n_total;

  // per-slot variable: does the Newton unknown carry u or beta(u)?
  std::vector<char> carries_u(ntot, 0);
  if (form != VariableForm::fast)
    for (std::size_t i = 0; i < ntot; ++i) carries_u[i] = gd.has_mass(i) ? 1 : 0;
  const auto u_of = [&](std::size_t i, double x) { return carries_u[i] ? x : beta.beta_inv(x); };
  const auto beta_of = [&](std::size_t i, double x) { return carries_u[i] ? beta.beta(x) : x; };
  const auto dbeta = [&](std::size_t i, double x) {
    if (!carries_u[i]) return 1.0;
    return beta.m() < 1.0 ? beta.beta_prime_guarded(x) : beta.beta_prime(x);
  };
  const auto du = [&](std::size_t i, double x) {
    return carries_u[i] ? 1.0 : beta.beta_inv_prime(x);
  };
  const auto total_energy = [&](const Vector& u) {
    double e = 0.0;
    for (std::size_t i = 0; i < ntot; ++i)
      if (gd.lumped[i] > 0.0) e += gd.lumped[i] * beta.zeta(u[i]);
    return e;
  };

  DiscreteTrajectory traj;
  traj.grid = grid;
  Vector u_prev = gd.interpolate(problem.initial);
  traj.states.push_back(u_prev);
  traj.initial_energy = total_energy(u_prev);

  SparseMatrix stiffness = gd.assemble_diffusion(problem.lambda, u_prev);

  double dissipation = 0.0;
  double source_work = 0.0;
  const std::size_t n_steps = grid.n_steps();
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t1 = grid.times[n + 1];
    const double dt = grid.dt(n);
    const double t_mid = grid.times[n] + 0.5 * dt;

    // right-hand side M f: slab-midpoint sample of f at the slot points
    Vector load(ntot, 0.0);
    if (problem.source)
      for (std::size_t i = 0; i < ntot; ++i)
        if (gd.lumped[i] > 0.0) load[i] = gd.lumped[i] * problem.source(t_mid, gd.points[i]);

    // pinned boundary values of the Newton variable: the beta(u) trace
    Vector x_full(ntot, 0.0);
    for (std::size_t i = ndof; i < ntot; ++i) {
      const double g = problem.dirichlet ? problem.dirichlet(t1, gd.points[i]) : 0.0;
      x_full[i] = carries_u[i] ? beta.beta_inv(g) : g;
    }

    Vector x(ndof);
    for (std::size_t i = 0; i < ndof; ++i)
      x[i] = carries_u[i] ? u_prev[i] : beta.beta(u_prev[i]);

    const auto assemble = [&](const Vector& xu, Vector& residual, SparseMatrix& jacobian) {
      for (std::size_t i = 0; i < ndof; ++i) x_full[i] = xu[i];
      Vector u_cur(ntot), beta_cur(ntot);
      for (std::size_t i = 0; i < ntot; ++i) {
        u_cur[i] = u_of(i, x_full[i]);
        beta_cur[i] = beta_of(i, x_full[i]);
      }
      if (problem.lambda_state_dependent)
        stiffness = gd.assemble_diffusion(problem.lambda, u_cur);
      const Vector diffusion = stiffness.apply(beta_cur);
      residual.assign(ndof, 0.0);
      for (std::size_t i = 0; i < ndof; ++i)
        residual[i] = (gd.lumped[i] / dt) * (u_cur[i] - u_prev[i]) + diffusion[i] - load[i];

      std::vector<Triplet> trips;
      for (std::size_t i = 0; i < ndof; ++i) {
        // massless slots must not evaluate du: beta_inv' blows up at zero
        if (gd.lumped[i] > 0.0)
          trips.push_back({i, i, (gd.lumped[i] / dt) * du(i, x_full[i])});
        for (std::size_t k = stiffness.row_ptr()[i]; k < stiffness.row_ptr()[i + 1]; ++k) {
          const std::size_t j = stiffness.col_idx()[k];
          if (j < ndof) trips.push_back({i, j, stiffness.values()[k] * dbeta(j, x_full[j])});
        }
      }
      jacobian = SparseMatrix::from_triplets(ndof, ndof, trips);
    };

    NewtonReport report;
    try {
      report = newton_solve(assemble, x, options.newton);
    } catch (const solver_error& err) {
      throw solver_error(std::string("run: time step failed (") + err.what() + ")", n + 1,
                         err.residual);
    }

    for (std::size_t i = 0; i < ndof; ++i) x_full[i] = x[i];
    Vector u_new(ntot);
    for (std::size_t i = 0; i < ntot; ++i) u_new[i] = u_of(i, x_full[i]);

    // ledger entries for this step (stiffness currently holds A at u_new)
    const Vector beta_new = apply_nonlinearity(u_new, [&](double s) { return beta.beta(s); });
    dissipation += dt * dot(beta_new, stiffness.apply(beta_new));
    source_work += dt * dot(load, beta_new);
    StepStats stats;
    stats.newton_iterations = report.iterations;
    stats.final_residual = report.residual;
    stats.energy = total_energy(u_new);
    stats.accumulated_dissipation = dissipation;
    stats.accumulated_source = source_work;
    traj.steps.push_back(stats);
    traj.states.push_back(u_new);
    u_prev = std::move(u_new);
  }
  return traj;
}

/// Running terms of the discrete energy inequality, recomputed from a stored
/// trajectory: at every step k the energy plus accumulated dissipation must
/// stay below the initial energy plus the work of the source, up to a slack
/// proportional to the nonlinear solver tolerance. Meaningful on
/// homogeneous-Dirichlet runs.
struct EnergyLedger {
  std::vector<double> lhs;  ///< energy at step k plus accumulated dissipation
  std::vector<double> rhs;  ///< initial energy plus accumulated source work
  double slack = 0.0;
  std::size_t violations = 0;
  bool ok() const { return violations == 0; }
};

inline EnergyLedger energy_ledger(const GradientDiscretisation& gd, const ProblemSpec& problem,
                                  const DiscreteTrajectory& traj, double newton_tol = 1e-8) {
  const PowerLaw& beta = problem.beta;
  const std::size_t ntot = gd.n_total;
  const auto energy = [&](const Vector& u) {
    double e = 0.0;
    for (std::size_t i = 0; i < ntot; ++i)
      if (gd.lumped[i] > 0.0) e += gd.lumped[i] * beta.zeta(u[i]);
    return e;
  };

  EnergyLedger ledger;
  ledger.slack = 10.0 * newton_tol * static_cast<double>(gd.n_unknowns);
  const double e0 = energy(traj.states.front());
  SparseMatrix stiffness;
  if (!problem.lambda_state_dependent)
    stiffness = gd.assemble_diffusion(problem.lambda, traj.states.front());

  double dissipation = 0.0;
  double source_work = 0.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const Vector& u = traj.states[k];
    const Vector b = apply_nonlinearity(u, [&](double s) { return beta.beta(s); });
    if (problem.lambda_state_dependent) stiffness = gd.assemble_diffusion(problem.lambda, u);
    const double dt = traj.grid.dt(k - 1);
    dissipation += dt * dot(b, stiffness.apply(b));
    if (problem.source) {
      const double t_mid = traj.grid.times[k - 1] + 0.5 * dt;
      for (std::size_t i = 0; i < ntot; ++i)
        if (gd.lumped[i] > 0.0)
          source_work += dt * gd.lumped[i] * problem.source(t_mid, gd.points[i]) * b[i];
    }
    ledger.lhs.push_back(energy(u) + dissipation);
    ledger.rhs.push_back(e0 + source_work + ledger.slack);
    if (ledger.lhs.back() > ledger.rhs.back()) ++ledger.violations;
  }
  return ledger;
}

}  // namespace pme

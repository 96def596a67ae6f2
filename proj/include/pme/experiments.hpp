// Experiment drivers behind the command line: catalogues of meshes, diffusion
// tensors and reference problems, a shared Barenblatt case runner, the
// run/convergence/front/diagnose commands, and deterministic CSV output.

#ifndef PME_EXPERIMENTS_HPP
#define PME_EXPERIMENTS_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barenblatt.hpp"
#include "common.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "gradient_discretisation.hpp"
#include "hmm.hpp"
#include "metrics.hpp"
#include "mlp1.hpp"
#include "scheme.hpp"

namespace pme {

// ---------------------------------------------------------------------------
// CSV formatting
// ---------------------------------------------------------------------------

/// Scientific notation with six significant digits, the format of every
/// numeric table cell.
inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return std::string(buf);
}

inline std::string fmt_index(std::size_t v) { return std::to_string(v); }

/// In-memory table; cells are preformatted strings so empty cells are plain.
struct Table {
  std::string title;
  std::string units;  ///< one-line description of the column units
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string>& add_row() {
    rows.emplace_back(columns.size());
    return rows.back();
  }
};

/// Writes a table as comma-separated values with a comment header carrying
/// the table title, the column units, and the configuration hash.
inline void write_csv(std::ostream& out, const Table& table, const std::string& config_hash) {
  out << "# " << table.title << "\n";
  out << "# config " << config_hash << "\n";
  out << "# units: " << table.units << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
}

inline std::string write_csv_file(const std::string& dir, const std::string& name,
                                  const Table& table, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write output file '" + path + "'");
  write_csv(out, table, config_hash);
  return path;
}

// ---------------------------------------------------------------------------
// Catalogues
// ---------------------------------------------------------------------------

/// Diffusion tensor with its uniform ellipticity bounds.
struct LambdaSpec {
  std::string name = "id";
  std::function<SymTensor2(Vec2, double)> fn;
  double min = 1.0;
  double max = 1.0;
  bool state_dependent = false;
};

/// Named diffusion tensors: "id" and "scalar:one" are the identity,
/// "scalar:cosine" is (1 + cos(pi x)cos(pi y)/2) Id in [1/2, 3/2], and
/// "state:bounded" is (1 + u^2/(1+u^2)) Id in [1, 2).
inline LambdaSpec lambda_catalog(const std::string& name) {
  LambdaSpec spec;
  spec.name = name;
  if (name == "id" || name == "scalar:one") {
    spec.fn = [](Vec2, double) { return SymTensor2::identity(); };
    spec.min = spec.max = 1.0;
    return spec;
  }
  if (name == "scalar:cosine") {
    spec.fn = [](Vec2 x, double) {
      const double pi = 3.14159265358979323846;
      return SymTensor2::scalar(1.0 + 0.5 * std::cos(pi * x.x) * std::cos(pi * x.y));
    };
    spec.min = 0.5;
    spec.max = 1.5;
    return spec;
  }
  if (name == "state:bounded") {
    spec.fn = [](Vec2, double u) { return SymTensor2::scalar(1.0 + u * u / (1.0 + u * u)); };
    spec.min = 1.0;
    spec.max = 2.0;
    spec.state_dependent = true;
    return spec;
  }
  throw parse_error("unknown diffusion tensor '" + name +
                    "' (expected id, scalar:one, scalar:cosine or state:bounded)");
}

/// Mesh request: a generated family with a resolution index, or a file path.
struct MeshSpec {
  std::string family;  ///< "tri", "hex" or "file"
  std::size_t n = 0;   ///< resolution index; 0 means unset
  std::string path;    ///< mesh file for family "file"
};

/// Parses "tri:n", "hex:n", "file:path", or a bare family name "tri"/"hex"
/// (resolution supplied later by a sweep).
inline MeshSpec parse_mesh_spec(const std::string& text) {
  MeshSpec spec;
  const std::size_t colon = text.find(':');
  spec.family = text.substr(0, colon == std::string::npos ? text.size() : colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (spec.family == "file") {
    if (rest.empty()) throw parse_error("mesh 'file:' needs a path");
    spec.path = rest;
    return spec;
  }
  if (spec.family != "tri" && spec.family != "hex")
    throw parse_error("unknown mesh '" + text + "' (expected tri:n, hex:n or file:path)");
  if (!rest.empty()) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(rest, &pos);
      if (pos != rest.size() || v <= 0) throw std::invalid_argument(rest);
      spec.n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw parse_error("mesh '" + text + "' needs a positive resolution");
    }
  }
  return spec;
}

/// Builds a mesh of the given family at resolution n.
inline Mesh make_family_mesh(const std::string& family, std::size_t n) {
  if (family == "tri") return Mesh::triangular(n);
  if (family == "hex") return Mesh::polygonal(n);
  throw parse_error("mesh family '" + family + "' cannot be generated at a resolution");
}

inline Mesh make_mesh(const MeshSpec& spec) {
  if (spec.family == "file") return Mesh::load(spec.path);
  if (spec.n == 0) throw parse_error("mesh '" + spec.family + "' needs a resolution (tri:n or hex:n)");
  return make_family_mesh(spec.family, spec.n);
}

/// Builds the requested gradient discretisation backend on a mesh.
inline GradientDiscretisation build_backend(const std::string& scheme, Mesh mesh) {
  if (scheme == "mlp1") return build_mlp1(std::move(mesh));
  if (scheme == "hmm") return build_hmm(std::move(mesh));
  throw parse_error("unknown scheme '" + scheme + "' (expected mlp1 or hmm)");
}

// ---------------------------------------------------------------------------
// Reference problems
// ---------------------------------------------------------------------------

/// Barenblatt presets: initial offset t0 and profile constant chosen so the
/// slow-diffusion front stays inside the domain over a unit time span, and so
/// the fast-diffusion tails are well resolved.
struct BarenblattPreset {
  double t0;
  double cb;
};

inline BarenblattPreset barenblatt_preset(double m, std::optional<double> t0,
                                          std::optional<double> cb) {
  BarenblattPreset preset = m > 1.0 ? BarenblattPreset{0.1, 0.005} : BarenblattPreset{0.5, 0.1};
  if (t0) preset.t0 = *t0;
  if (cb) preset.cb = *cb;
  if (!(preset.t0 > 0.0)) throw parse_error("key 't0' must be positive");
  return preset;
}

/// Assembles the Barenblatt benchmark problem: exact initial data at absolute
/// time t0, zero source, and either a homogeneous boundary (slow diffusion
/// with the support inside the domain for the whole run) or the exact
/// transformed trace pinned on the boundary.
inline ProblemSpec make_barenblatt_problem(double m, const BarenblattPreset& preset,
                                           const LambdaSpec& lambda, TimeGrid grid) {
  Barenblatt profile(m, preset.cb);
  ProblemSpec pb;
  pb.beta = PowerLaw(m);
  pb.lambda = lambda.fn;
  pb.lambda_min = lambda.min;
  pb.lambda_max = lambda.max;
  pb.lambda_state_dependent = lambda.state_dependent;
  const double t0 = preset.t0;
  pb.initial = [profile, t0](Vec2 x) { return profile.value(t0, x); };
  pb.grid = std::move(grid);
  const bool contained = m > 1.0 && profile.front_radius(t0 + pb.grid.final_time()) < 0.5;
  if (!contained) {
    PowerLaw beta(m);
    pb.dirichlet = [profile, beta, t0](double t, Vec2 x) {
      return beta.beta(profile.value(t0 + t, x));
    };
  }
  return pb;
}

// ---------------------------------------------------------------------------
// Shared case runner
// ---------------------------------------------------------------------------

/// One Barenblatt benchmark run: backend, mesh, exponent, time window.
struct CaseRequest {
  std::string scheme = "mlp1";
  MeshSpec mesh;
  double m = 2.0;
  std::optional<double> t0;  ///< override of the preset initial offset
  std::optional<double> cb;  ///< override of the preset profile constant
  double T = 1.0;
  double dt = 0.0;
  LambdaSpec lambda = lambda_catalog("id");
  SchemeOptions options;
  double front_threshold = 1e-6;
};

/// Errors, iteration counts, ledger status and front positions of one run.
struct CaseResult {
  double h = 0.0;
  double dt = 0.0;
  double err_u = 0.0;
  double err_beta = 0.0;
  double newton_avg = 0.0;
  std::size_t newton_max = 0;
  std::size_t steps = 0;
  std::size_t ledger_violations = 0;
  bool ledger_checked = false;  ///< ledger is only meaningful on homogeneous runs
  double front_numeric = 0.0;   ///< farthest supported interpolation point (m > 1)
  double front_exact = 0.0;     ///< exact front radius at the final time (m > 1)
  double walltime = 0.0;        ///< seconds spent marching the scheme
};

inline CaseResult run_barenblatt_case(const CaseRequest& rq) {
  if (!(rq.dt > 0.0)) throw misuse_error("case runner: time step must be positive");
  if (!(rq.T > 0.0)) throw misuse_error("case runner: final time must be positive");
  GradientDiscretisation gd = build_backend(rq.scheme, make_mesh(rq.mesh));
  const BarenblattPreset preset = barenblatt_preset(rq.m, rq.t0, rq.cb);
  ProblemSpec pb = make_barenblatt_problem(rq.m, preset, rq.lambda,
                                           TimeGrid::uniform(rq.T, rq.dt));

  const auto start = std::chrono::steady_clock::now();
  DiscreteTrajectory traj = run(gd, pb, rq.options);
  const auto stop = std::chrono::steady_clock::now();

  CaseResult res;
  res.h = gd.h;
  res.dt = rq.dt;
  res.steps = traj.steps.size();
  res.walltime = std::chrono::duration<double>(stop - start).count();

  const Barenblatt profile(rq.m, preset.cb);
  const PowerLaw beta(rq.m);
  const double t_final = preset.t0 + traj.grid.final_time();
  const Vector& u_final = traj.states.back();
  Vector beta_final(u_final.size());
  for (std::size_t i = 0; i < u_final.size(); ++i) beta_final[i] = beta.beta(u_final[i]);
  // The state error on the vertex scheme is taken on its piecewise-linear
  // field: slot sampling cannot see where inside a cell the support boundary
  // sits, and that sub-cell position dominates the L^(m+1) error.
  const auto exact_u = [&](Vec2 x) { return profile.value(t_final, x); };
  res.err_u = gd.name == "mlp1" ? p1_relative_error(gd, u_final, exact_u, rq.m + 1.0)
                                : error_u(gd, u_final, exact_u, rq.m);
  res.err_beta =
      error_beta(gd, beta_final, [&](Vec2 x) { return beta.beta(profile.value(t_final, x)); });

  std::size_t total_newton = 0;
  for (const StepStats& s : traj.steps) {
    total_newton += s.newton_iterations;
    res.newton_max = std::max(res.newton_max, s.newton_iterations);
  }
  res.newton_avg = traj.steps.empty() ? 0.0 : double(total_newton) / double(traj.steps.size());

  if (pb.homogeneous()) {
    const EnergyLedger ledger = energy_ledger(gd, pb, traj, rq.options.newton.tol);
    res.ledger_violations = ledger.violations;
    res.ledger_checked = true;
  }

  if (rq.m > 1.0) {
    res.front_numeric = front_distance(gd, u_final, rq.front_threshold);
    res.front_exact = profile.front_radius(t_final);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Configuration helpers shared by the commands
// ---------------------------------------------------------------------------

namespace detail {

inline SchemeOptions scheme_options_from(const Config& cfg) {
  SchemeOptions options;
  options.newton.tol = cfg.double_or("newton_tol", 1e-8);
  options.newton.max_iterations = cfg.index_or("newton_max", 50);
  const std::string form = cfg.get_or("form", "auto");
  if (form == "auto")
    options.form = VariableForm::automatic;
  else if (form == "slow")
    options.form = VariableForm::slow;
  else if (form == "fast")
    options.form = VariableForm::fast;
  else
    throw parse_error("key 'form' expects auto, slow or fast, got '" + form + "'");
  return options;
}

inline std::optional<double> optional_double(const Config& cfg, const std::string& key) {
  return cfg.get_double(key);
}

inline CaseRequest case_request_from(const Config& cfg) {
  CaseRequest rq;
  rq.scheme = cfg.require("scheme");
  rq.mesh = parse_mesh_spec(cfg.require("mesh"));
  rq.m = cfg.require_double("m");
  rq.t0 = optional_double(cfg, "t0");
  rq.cb = optional_double(cfg, "C_B");
  rq.T = cfg.require_double("T");
  rq.lambda = lambda_catalog(cfg.get_or("lambda", "id"));
  rq.options = scheme_options_from(cfg);
  rq.front_threshold = cfg.double_or("front_threshold", 1e-6);
  return rq;
}

inline std::string rate_cell(const std::vector<double>& xs, const std::vector<double>& es,
                             std::size_t level) {
  if (level == 0) return "";
  return fmt_sci(rate(es[level - 1], es[level], xs[level - 1], xs[level]));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// run command
// ---------------------------------------------------------------------------

/// Marches a single configuration and writes the per-step summary, the energy
/// ledger, the final field, and one field file per requested snapshot time.
/// Returns the list of written files.
inline std::vector<std::string> cmd_run(const Config& cfg, const std::string& out_dir) {
  const std::string scheme = cfg.require("scheme");
  const MeshSpec mesh_spec = parse_mesh_spec(cfg.require("mesh"));
  const double m = cfg.require_double("m");
  const double T = cfg.require_double("T");
  const double dt = cfg.require_double("dt");
  const LambdaSpec lambda = lambda_catalog(cfg.get_or("lambda", "id"));
  const SchemeOptions options = detail::scheme_options_from(cfg);
  const std::string problem_name = cfg.require("problem");

  GradientDiscretisation gd = build_backend(scheme, make_mesh(mesh_spec));
  TimeGrid grid = TimeGrid::uniform(T, dt);

  ProblemSpec pb;
  double t_offset = 0.0;  // absolute time of the initial state
  if (problem_name == "barenblatt") {
    const BarenblattPreset preset =
        barenblatt_preset(m, detail::optional_double(cfg, "t0"), detail::optional_double(cfg, "C_B"));
    t_offset = preset.t0;
    pb = make_barenblatt_problem(m, preset, lambda, std::move(grid));
  } else if (problem_name == "zero") {
    pb.beta = PowerLaw(m);
    pb.lambda = lambda.fn;
    pb.lambda_min = lambda.min;
    pb.lambda_max = lambda.max;
    pb.lambda_state_dependent = lambda.state_dependent;
    pb.initial = [](Vec2) { return 0.0; };
    pb.grid = std::move(grid);
  } else if (problem_name.rfind("constant:", 0) == 0) {
    double level = 0.0;
    try {
      std::size_t pos = 0;
      level = std::stod(problem_name.substr(9), &pos);
      if (pos != problem_name.size() - 9) throw std::invalid_argument(problem_name);
    } catch (const std::exception&) {
      throw parse_error("problem '" + problem_name + "' needs a numeric level (constant:<c>)");
    }
    pb.beta = PowerLaw(m);
    pb.lambda = lambda.fn;
    pb.lambda_min = lambda.min;
    pb.lambda_max = lambda.max;
    pb.lambda_state_dependent = lambda.state_dependent;
    pb.initial = [level](Vec2) { return level; };
    const double trace = PowerLaw(m).beta(level);
    pb.dirichlet = [trace](double, Vec2) { return trace; };
    pb.grid = std::move(grid);
  } else {
    throw parse_error("unknown problem '" + problem_name +
                      "' (expected barenblatt, zero or constant:<c>)");
  }

  const DiscreteTrajectory traj = run(gd, pb, options);
  const std::string hash = cfg.hash_string();
  std::vector<std::string> written;

  Table summary;
  summary.title = "per-step solver summary";
  summary.units = "step [-], time [absolute], newton_iterations [-], final_residual [sup norm]";
  summary.columns = {"step", "time", "newton_iterations", "final_residual"};
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    auto& row = summary.add_row();
    row[0] = fmt_index(k + 1);
    row[1] = fmt_sci(t_offset + traj.grid.times[k + 1]);
    row[2] = fmt_index(traj.steps[k].newton_iterations);
    row[3] = fmt_sci(traj.steps[k].final_residual);
  }
  written.push_back(write_csv_file(out_dir, "summary.csv", summary, hash));

  Table ledger;
  ledger.title = "energy ledger";
  ledger.units =
      "step [-], time [absolute], energy [integral of zeta(u)], dissipation [accumulated], "
      "source [accumulated work], lhs [energy+dissipation], rhs [initial energy+source]";
  ledger.columns = {"step", "time", "energy", "dissipation", "source", "lhs", "rhs"};
  {
    auto& row = ledger.add_row();
    row[0] = "0";
    row[1] = fmt_sci(t_offset);
    row[2] = fmt_sci(traj.initial_energy);
    row[3] = fmt_sci(0.0);
    row[4] = fmt_sci(0.0);
    row[5] = fmt_sci(traj.initial_energy);
    row[6] = fmt_sci(traj.initial_energy);
  }
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const StepStats& s = traj.steps[k];
    auto& row = ledger.add_row();
    row[0] = fmt_index(k + 1);
    row[1] = fmt_sci(t_offset + traj.grid.times[k + 1]);
    row[2] = fmt_sci(s.energy);
    row[3] = fmt_sci(s.accumulated_dissipation);
    row[4] = fmt_sci(s.accumulated_source);
    row[5] = fmt_sci(s.energy + s.accumulated_dissipation);
    row[6] = fmt_sci(traj.initial_energy + s.accumulated_source);
  }
  written.push_back(write_csv_file(out_dir, "ledger.csv", ledger, hash));

  auto field_table = [&](const Vector& state) {
    Table field;
    field.title = "state u at the region representatives";
    field.units = "x [-], y [-], value [u]";
    field.columns = {"x", "y", "value"};
    for (std::size_t i = 0; i < gd.n_total; ++i) {
      if (!gd.has_mass(i)) continue;
      auto& row = field.add_row();
      row[0] = fmt_sci(gd.points[i].x);
      row[1] = fmt_sci(gd.points[i].y);
      row[2] = fmt_sci(state[i]);
    }
    return field;
  };

  written.push_back(write_csv_file(out_dir, "field_final.csv", field_table(traj.states.back()), hash));

  for (double t_req : cfg.double_list("snapshots")) {
    // snapshots are absolute times, matched to the nearest time grid node
    std::size_t best = 0;
    double best_gap = std::abs(t_offset + traj.grid.times[0] - t_req);
    for (std::size_t k = 1; k < traj.grid.times.size(); ++k) {
      const double gap = std::abs(t_offset + traj.grid.times[k] - t_req);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    char label[32];
    std::snprintf(label, sizeof(label), "%g", t_req);
    written.push_back(write_csv_file(out_dir, std::string("field_t") + label + ".csv",
                                     field_table(traj.states[best]), hash));
  }
  return written;
}

// ---------------------------------------------------------------------------
// convergence command
// ---------------------------------------------------------------------------

/// Runs a mesh refinement sweep (key sweep_n, with dt=h2 or a fixed time
/// step) or a time step sweep at a fixed mesh (key sweep_dt), and writes
/// convergence.csv with errors, observed rates and Newton statistics.
inline Table convergence_table(const Config& cfg) {
  CaseRequest base = detail::case_request_from(cfg);
  const std::vector<std::size_t> sweep_n = cfg.index_list("sweep_n");
  const std::vector<double> sweep_dt = cfg.double_list("sweep_dt");
  const bool timing = cfg.flag_or("timing", false);
  if (!sweep_n.empty() && !sweep_dt.empty())
    throw parse_error("keys 'sweep_n' and 'sweep_dt' are mutually exclusive");
  if (sweep_n.empty() && sweep_dt.empty())
    throw parse_error("convergence needs key 'sweep_n' (mesh sweep) or 'sweep_dt' (time step sweep)");

  Table table;
  table.units =
      "error_u [relative L^(m+1)], rate_u [-], error_beta [relative L^2], rate_beta [-], "
      "newton_avg [iterations per step], walltime [s]";

  std::vector<double> xs, eu, eb;
  std::vector<CaseResult> results;
  if (!sweep_n.empty()) {
    const std::string dt_key = cfg.require("dt");
    table.title = "mesh refinement sweep";
    table.columns = {"h", "error_u", "rate_u", "error_beta", "rate_beta", "newton_avg", "walltime"};
    for (std::size_t n : sweep_n) {
      CaseRequest rq = base;
      rq.mesh.family = base.mesh.family;
      if (rq.mesh.family == "file")
        throw parse_error("mesh refinement sweeps need a generated family (tri or hex)");
      rq.mesh.n = n;
      const double h = make_family_mesh(rq.mesh.family, n).h();
      rq.dt = dt_key == "h2" ? h * h : cfg.require_double("dt");
      results.push_back(run_barenblatt_case(rq));
      xs.push_back(results.back().h);
      eu.push_back(results.back().err_u);
      eb.push_back(results.back().err_beta);
    }
  } else {
    table.title = "time step sweep at a fixed mesh";
    table.columns = {"dt", "error_u", "rate_u", "error_beta", "rate_beta", "newton_avg", "walltime"};
    for (double dt : sweep_dt) {
      CaseRequest rq = base;
      rq.dt = dt;
      results.push_back(run_barenblatt_case(rq));
      xs.push_back(dt);
      eu.push_back(results.back().err_u);
      eb.push_back(results.back().err_beta);
    }
  }

  for (std::size_t level = 0; level < results.size(); ++level) {
    auto& row = table.add_row();
    row[0] = fmt_sci(xs[level]);
    row[1] = fmt_sci(eu[level]);
    row[2] = detail::rate_cell(xs, eu, level);
    row[3] = fmt_sci(eb[level]);
    row[4] = detail::rate_cell(xs, eb, level);
    row[5] = fmt_sci(results[level].newton_avg);
    row[6] = timing ? fmt_sci(results[level].walltime) : "";
  }
  return table;
}

inline std::vector<std::string> cmd_convergence(const Config& cfg, const std::string& out_dir) {
  const Table table = convergence_table(cfg);
  return {write_csv_file(out_dir, "convergence.csv", table, cfg.hash_string())};
}

// ---------------------------------------------------------------------------
// front command
// ---------------------------------------------------------------------------

/// Tracks the free boundary across a list of slow-diffusion exponents at a
/// fixed mesh and time step, comparing the discrete support radius with the
/// exact front radius at the final time.
inline Table front_table(const Config& cfg) {
  CaseRequest base = detail::case_request_from(cfg);
  const std::vector<double> m_list = cfg.double_list("m_list");
  if (m_list.empty()) throw parse_error("front needs key 'm_list'");
  for (double m : m_list)
    if (!(m > 1.0))
      throw misuse_error("front tracking needs slow-diffusion exponents (m > 1), got " +
                         std::to_string(m));
  base.dt = cfg.require_double("dt");

  Table table;
  table.title = "front position sweep over the exponent";
  table.units = "m [-], d_u [numeric front radius], d_uB [exact front radius], rel_error [-]";
  table.columns = {"m", "d_u", "d_uB", "rel_error"};
  for (double m : m_list) {
    CaseRequest rq = base;
    rq.m = m;
    const CaseResult res = run_barenblatt_case(rq);
    auto& row = table.add_row();
    row[0] = fmt_sci(m);
    row[1] = fmt_sci(res.front_numeric);
    row[2] = fmt_sci(res.front_exact);
    row[3] = fmt_sci(std::abs(res.front_numeric - res.front_exact) / res.front_exact);
  }
  return table;
}

inline std::vector<std::string> cmd_front(const Config& cfg, const std::string& out_dir) {
  const Table table = front_table(cfg);
  return {write_csv_file(out_dir, "front.csv", table, cfg.hash_string())};
}

// ---------------------------------------------------------------------------
// diagnose command
// ---------------------------------------------------------------------------

/// Evaluates the consistency and limit-conformity defects of the catalogue
/// probes together with the coercivity constant across a mesh sweep.
inline Table diagnose_table(const Config& cfg) {
  const std::string scheme = cfg.require("scheme");
  const MeshSpec mesh_spec = parse_mesh_spec(cfg.require("mesh"));
  if (mesh_spec.family == "file")
    throw parse_error("diagnose sweeps need a generated mesh family (tri or hex)");
  const std::vector<std::size_t> sweep_n = cfg.index_list("sweep_n");
  if (sweep_n.empty()) throw parse_error("diagnose needs key 'sweep_n'");
  const int levels = static_cast<int>(cfg.index_or("levels", 2));
  const double m_hat = cfg.has("m") ? PowerLaw(cfg.require_double("m")).m_hat() : 1.0;

  const std::vector<ScalarProbe> scalar_catalog = scalar_probe_catalog();
  const std::vector<VectorProbe> vector_catalog = vector_probe_catalog();
  std::vector<ScalarProbe> scalars;
  for (const std::string& name : cfg.string_list("scalar_probes")) {
    bool found = false;
    for (const ScalarProbe& probe : scalar_catalog)
      if (probe.name == name) {
        scalars.push_back(probe);
        found = true;
      }
    if (!found) throw parse_error("unknown scalar probe '" + name + "'");
  }
  std::vector<VectorProbe> vectors;
  for (const std::string& name : cfg.string_list("vector_probes")) {
    bool found = false;
    for (const VectorProbe& probe : vector_catalog)
      if (probe.name == name) {
        vectors.push_back(probe);
        found = true;
      }
    if (!found) throw parse_error("unknown vector probe '" + name + "'");
  }

  Table table;
  table.title = "discretisation quality sweep";
  table.units =
      "h [-], S_hat_* [consistency defect], W_* [limit-conformity defect], C_D [coercivity]";
  table.columns = {"h"};
  for (const ScalarProbe& probe : scalars) table.columns.push_back("S_hat_" + probe.name);
  for (const VectorProbe& probe : vectors) table.columns.push_back("W_" + probe.name);
  table.columns.push_back("C_D");

  for (std::size_t n : sweep_n) {
    GradientDiscretisation gd = build_backend(scheme, make_family_mesh(mesh_spec.family, n));
    auto& row = table.add_row();
    std::size_t c = 0;
    row[c++] = fmt_sci(gd.h);
    for (const ScalarProbe& probe : scalars)
      row[c++] = fmt_sci(consistency_defect(gd, probe, m_hat, levels));
    for (const VectorProbe& probe : vectors)
      row[c++] = fmt_sci(limit_conformity_defect(gd, probe, levels));
    row[c++] = fmt_sci(coercivity_constant(gd));
  }
  return table;
}

inline std::vector<std::string> cmd_diagnose(const Config& cfg, const std::string& out_dir) {
  const Table table = diagnose_table(cfg);
  return {write_csv_file(out_dir, "diagnose.csv", table, cfg.hash_string())};
}

// ---------------------------------------------------------------------------
// command dispatch
// ---------------------------------------------------------------------------

/// Runs one named command; returns the list of written files.
inline std::vector<std::string> dispatch_command(const std::string& command, const Config& cfg,
                                                 const std::string& out_dir) {
  if (command == "run") return cmd_run(cfg, out_dir);
  if (command == "convergence") return cmd_convergence(cfg, out_dir);
  if (command == "front") return cmd_front(cfg, out_dir);
  if (command == "diagnose") return cmd_diagnose(cfg, out_dir);
  throw parse_error("unknown command '" + command + "'");
}

/// Loads a configuration, runs one command, and maps failures to process
/// exit codes: 0 on success, 2 on configuration or usage errors, 3 on solver
/// failures. The output directory is taken from the command line when given,
/// from the key 'out' otherwise, and defaults to 'pme_out'.
inline int run_cli(const std::string& command, const std::string& config_path,
                   const std::string& out_override, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    const Config cfg = Config::load(config_path);
    const std::string out_dir = !out_override.empty() ? out_override : cfg.get_or("out", "pme_out");
    for (const std::string& path : dispatch_command(command, cfg, out_dir))
      log << "wrote " << path << "\n";
    return 0;
  } catch (const parse_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const misuse_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const geometry_error& e) {
    err << "mesh error: " << e.what() << "\n";
    return 2;
  } catch (const solver_error& e) {
    err << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pme

#endif  // PME_EXPERIMENTS_HPP

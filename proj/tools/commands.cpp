#include "commands.hpp"

#include <regime_riccati/reference_data.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace regime_riccati::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Manifest {
  std::string command;
  Json input;
  Json options = Json::object();
  Json outputs = Json::array();
  Json seeds = Json::array();
  Clock::time_point start = Clock::now();

  void write(const fs::path& dir, int exitCode) const {
    Json j{{"command", command},
           {"input", input},
           {"options", options},
           {"outputs", outputs},
           {"seeds", seeds},
           {"exitCode", exitCode},
           {"wallClockSeconds", seconds_since(start)},
           {"timestamp", utc_timestamp()},
           {"versions",
            {{"regime_riccati", version()},
             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION)},
             {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
    write_json_file(dir / "manifest.json", j);
  }
};

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir + ": " + ec.message());
  return p;
}

/// Runs a command body; errors become exit codes and the manifest is always written.
template <class Body>
int guarded(Manifest& manifest, const std::string& outDir, Body&& body, ErrorCode refusal = ErrorCode::Io) {
  int code = kOk;
  try {
    code = body();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = (refusal != ErrorCode::Io && e.code() == refusal) ? kStabilityRefusal : exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kSolver;
  }
  try {
    manifest.write(prepare_dir(outDir), code);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (code == kOk) code = kIo;
  }
  return code;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "cannot parse '" + text + "' as a comma-separated vector");
    }
  }
  Vector out(static_cast<Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) out(static_cast<Index>(k)) = values[k];
  return out;
}

struct Solved {
  Json solution;
  StrategyPair strategy;
  Decoupling decoupling;
  double residual = 0.0;
  bool constraintsOk = true;
  std::string constraintNote;
};

/// Solves the model in the requested mode and packs every output document.
Solved solve_mode(const GameModel& input, const std::string& mode, const SolverOptions& opts) {
  GameModel model = input;
  Solved out;
  if (mode == "open-rep") {
    model.kind = GameKind::NonZeroSum;
    const auto sol = solve_open_rep_cares(model, opts);
    std::optional<EtaSolution> eta;
    if (model.inhomogeneity) eta = solve_eta(model, sol);
    out.strategy = open_rep_strategy(model, sol);
    out.decoupling = make_decoupling(sol, eta);
    out.residual = care_residuals(model, sol).max();
    out.solution = to_json(sol);
    out.solution["residuals"] = to_json(care_residuals(model, sol));
    if (eta) out.solution["eta"] = to_json(*eta);
  } else if (mode == "closed-nash") {
    if (model.kind == GameKind::ZeroSum) {
      throw Error(ErrorCode::PreconditionViolated, "closed-nash mode needs a non-zero-sum model");
    }
    const auto sol = solve_closed_nash_cares(model, opts);
    std::optional<EtaSolution> eta;
    if (model.inhomogeneity) eta = solve_eta(model, sol);
    out.strategy = closed_nash_strategy(model, sol);
    out.decoupling = make_decoupling(sol, eta);
    out.residual = care_residuals(model, sol).max();
    out.solution = to_json(sol);
    out.solution["residuals"] = to_json(care_residuals(model, sol));
    if (eta) {
      out.solution["eta"] = to_json(*eta);
    }
  } else if (mode == "zero-sum") {
    if (model.kind != GameKind::ZeroSum) {
      throw Error(ErrorCode::PreconditionViolated, "zero-sum mode needs a zero-sum model");
    }
    const auto sol = solve_zero_sum_care(model, opts);
    std::optional<EtaSolution> eta;
    if (model.inhomogeneity) eta = solve_eta(model, sol);
    out.strategy = zero_sum_strategy(model, sol);
    out.decoupling = make_decoupling(sol, eta);
    out.residual = care_residuals(model, sol).max();
    out.constraintsOk = sol.signOk() && sol.rangeOk;
    if (!out.constraintsOk) out.constraintNote = "sign or range constraint failed";
    out.solution = to_json(sol);
    out.solution["residuals"] = to_json(care_residuals(model, sol));
    if (eta) out.solution["eta"] = to_json(*eta);
  } else {
    throw Error(ErrorCode::InvalidConfig, "mode must be open-rep, closed-nash or zero-sum");
  }
  const auto verdict = is_stabilizer(model.dynamics, model.generator, out.strategy.Theta);
  if (!verdict.stable()) {
    out.constraintsOk = false;
    out.constraintNote = "gain family is not a stabilizer";
  }
  out.solution["strategy"] = to_json(out.strategy);
  out.solution["decoupling"] = to_json(out.decoupling);
  out.solution["stabilizer"] = to_json(verdict);
  return out;
}

void add_diffs(ReproduceResult& r, const std::string& mode, const std::string& name, const RegimeFamily& computed,
               const RegimeFamily& reference) {
  for (int i = 0; i < reference.size(); ++i) {
    for (Index a = 0; a < reference.rows(); ++a) {
      for (Index b = 0; b < reference.cols(); ++b) {
        DiffRow row{mode, name, i, a, b, computed[i](a, b), reference[i](a, b)};
        r.maxDiff = std::max(r.maxDiff, std::abs(row.diff()));
        r.diffs.push_back(row);
      }
    }
  }
}

void monte_carlo_stage(ReproduceResult& r, const GameModel& model, const std::string& mode,
                       const StrategyPair& strategy, const ReproduceOptions& opts) {
  if (opts.paths <= 0) return;
  Vector x0(model.n());
  x0.setZero();
  x0(0) = 1.0;
  SimConfig cfg;
  cfg.paths = opts.paths;
  cfg.dt = opts.dt;
  cfg.T = opts.T;
  cfg.seed = opts.seed;
  const SimReport rep = simulate_closed_loop(model, strategy, x0, 0, cfg);
  const auto W = closed_loop_cost_matrices(model, strategy.Theta);
  bool ok = true;
  std::ostringstream os;
  for (int k = 0; k < 2; ++k) {
    const double target = value_homogeneous(W[k], x0, 0);
    const double gap = std::abs(rep.cost[k].mean - target);
    const double budget = 3.0 * rep.cost[k].se + 0.01 * std::abs(target);
    ok = ok && gap <= budget;
    os << (k ? "; " : "") << "J" << k + 1 << " = " << fixed6(rep.cost[k].mean) << " +- " << fixed6(rep.cost[k].se)
       << " vs policy value " << fixed6(target);
  }
  r.stages.push_back({"monte carlo " + mode, ok, os.str()});
}

void stabilizer_stage(ReproduceResult& r, const GameModel& model, const std::string& mode,
                      const RegimeFamily& Theta) {
  const auto v = is_stabilizer(model.dynamics, model.generator, Theta);
  const double dmax = *std::max_element(v.dissipativity.witness.begin(), v.dissipativity.witness.end());
  r.stages.push_back({"stabilizer " + mode, v.spectral.stable && v.dissipativity.stable,
                      "abscissa " + fixed6(v.abscissa()) + ", dissipativity max " + fixed6(dmax)});
}

void residual_stage(ReproduceResult& r, const std::string& mode, double residual, int iterations) {
  r.maxResidual = std::max(r.maxResidual, residual);
  std::ostringstream os;
  os << "residual " << std::scientific << std::setprecision(2) << residual << " after " << iterations
     << " iterations";
  r.stages.push_back({"solve " + mode, residual <= kResidualTolerance, os.str()});
}

const ReferenceSolve& reference_for(const std::vector<ReferenceSolve>& all, const std::string& mode) {
  for (const auto& p : all) {
    if (p.mode == mode) return p;
  }
  throw Error(ErrorCode::InvalidConfig, "no reference values for mode " + mode);
}

const RegimeFamily& reference_family(const ReferenceSolve& p, const std::string& name) {
  for (const auto& f : p.families) {
    if (f.name == name) return f.values;
  }
  throw Error(ErrorCode::InvalidConfig, "no reference family " + name);
}

void reproduce_nonzero_sum(ReproduceResult& r, const GameModel& model, const ReproduceOptions& opts) {
  const auto reference = reference_tables(1);
  const auto convex = check_convexity_sufficient(model);
  r.stages.push_back({"convexity (informational)", true,
                      std::string("player 1 sufficient: ") + (convex[0] ? "true" : "false") +
                          ", player 2 sufficient: " + (convex[1] ? "true" : "false")});

  const auto open = solve_open_rep_cares(model);
  residual_stage(r, "open-rep", care_residuals(model, open).max(), open.iterations);
  const auto openStrategy = open_rep_strategy(model, open);
  stabilizer_stage(r, model, "open-rep", open.Theta);
  const ReferenceSolve& po = reference_for(reference, "open-rep");
  add_diffs(r, "open-rep", "P1", open.P1, reference_family(po, "P1"));
  add_diffs(r, "open-rep", "P2", open.P2, reference_family(po, "P2"));
  add_diffs(r, "open-rep", "Theta", open.Theta, reference_family(po, "Theta"));

  const auto closed = solve_closed_nash_cares(model);
  residual_stage(r, "closed-nash", care_residuals(model, closed).max(), closed.iterations);
  const double n11 = *std::min_element(closed.n11Min.begin(), closed.n11Min.end());
  const double n22 = *std::min_element(closed.n22Min.begin(), closed.n22Min.end());
  r.stages.push_back({"sign constraints closed-nash", n11 >= -kStrictMargin && n22 >= -kStrictMargin,
                      "min eig N11 " + fixed6(n11) + ", min eig N22 " + fixed6(n22)});
  const auto closedStrategy = closed_nash_strategy(model, closed);
  stabilizer_stage(r, model, "closed-nash", closed.Theta);
  const ReferenceSolve& pc = reference_for(reference, "closed-nash");
  add_diffs(r, "closed-nash", "P1", closed.P1, reference_family(pc, "P1"));
  add_diffs(r, "closed-nash", "P2", closed.P2, reference_family(pc, "P2"));
  add_diffs(r, "closed-nash", "Theta", closed.Theta, reference_family(pc, "Theta"));

  monte_carlo_stage(r, model, "open-rep", openStrategy, opts);
  monte_carlo_stage(r, model, "closed-nash", closedStrategy, opts);
}

void reproduce_zero_sum(ReproduceResult& r, const GameModel& model, const ReproduceOptions& opts) {
  const bool claimed = r.id == 3;
  const auto cc = check_convexity_concavity(model, 1.0, 1.0);
  const auto found = search_epsilon(model);
  std::ostringstream os;
  os << "eps = 1: " << (cc.ok ? "holds" : "does not hold") << " (mR " << fixed6(cc.mR) << ", MR " << fixed6(cc.MR)
     << ", mu1 " << fixed6(cc.mu1) << ", mu2 " << fixed6(cc.mu2) << "); grid search: "
     << (found ? "eps1 " + fixed6(found->first) + ", eps2 " + fixed6(found->second) : std::string("no epsilon"));
  const bool matches = claimed ? cc.ok : (!cc.ok && !found);
  r.stages.push_back({"convexity-concavity", matches, os.str()});

  const auto sol = solve_zero_sum_care(model);
  residual_stage(r, "zero-sum", care_residuals(model, sol).max(), sol.iterations);
  r.stages.push_back({"sign constraints zero-sum", sol.signOk() && sol.rangeOk,
                      std::string("N11 >= 0: ") + (sol.n11Ok ? "true" : "false") +
                          ", N22 <= 0: " + (sol.n22Ok ? "true" : "false") +
                          ", range: " + (sol.rangeOk ? "true" : "false")});
  const auto strategy = zero_sum_strategy(model, sol);
  stabilizer_stage(r, model, "zero-sum", strategy.Theta);
  const auto reference = reference_tables(r.id);
  const ReferenceSolve& p = reference_for(reference, "zero-sum");
  add_diffs(r, "zero-sum", "P", sol.P, reference_family(p, "P"));
  add_diffs(r, "zero-sum", "Theta", strategy.Theta, reference_family(p, "Theta"));

  monte_carlo_stage(r, model, "zero-sum", strategy, opts);
}

int cmd_validate(const std::string& modelPath) {
  const GameModel model = load_model(modelPath);
  const ValidationReport report = validate(model);
  std::cout << report.summary() << "\n";
  return report.ok() ? kOk : kValidation;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
      return kIo;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::InvalidModel:
    case ErrorCode::NegativeOffDiagonal:
    case ErrorCode::RowSumNonzero:
    case ErrorCode::Reducible:
    case ErrorCode::DimensionOverflow:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::OutOfScope:
    case ErrorCode::InvalidConfig:
      return kValidation;
    default:
      return kSolver;
  }
}

bool ReproduceResult::stages_ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const Stage& s) { return s.ok; });
}

int ReproduceResult::exit_code() const { return stages_ok() && maxDiff <= kDiffTolerance ? kOk : kSolver; }

Json ReproduceResult::to_json() const {
  Json st = Json::array();
  for (const auto& s : stages) st.push_back(Json{{"name", s.name}, {"ok", s.ok}, {"detail", s.detail}});
  Json df = Json::array();
  for (const auto& d : diffs) {
    df.push_back(Json{{"mode", d.mode},
                      {"family", d.family},
                      {"regime", d.regime + 1},
                      {"row", d.row + 1},
                      {"col", d.col + 1},
                      {"computed", d.computed},
                      {"reference", d.reference},
                      {"diff", d.diff()}});
  }
  return Json{{"example", id},     {"stages", st},           {"diffs", df},
              {"maxDiff", maxDiff}, {"maxResidual", maxResidual}, {"seconds", seconds},
              {"exitCode", exit_code()}};
}

ReproduceResult reproduce(int id, const ReproduceOptions& opts) {
  const auto t0 = Clock::now();
  ReproduceResult r;
  r.id = id;
  const GameModel model = normalized(builtin_example(id));
  const auto dis = dissipativity_check(model.dynamics.A, model.dynamics.C);
  const auto spec = lyapunov_spectral_check(model.dynamics.A, model.dynamics.C, model.generator);
  r.stages.push_back({"uncontrolled stability", dis.stable && spec.stable,
                      "dissipativity max " + fixed6(*std::max_element(dis.witness.begin(), dis.witness.end())) +
                          ", abscissa " + fixed6(spec.witness.front())});
  try {
    if (id == 1) {
      reproduce_nonzero_sum(r, model, opts);
    } else {
      reproduce_zero_sum(r, model, opts);
    }
  } catch (const Error& e) {
    r.stages.push_back({"pipeline", false, e.what()});
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::string format_reproduce(const ReproduceResult& r) {
  std::ostringstream os;
  os << "example " << r.id << "\n";
  for (const auto& s : r.stages) os << "  [" << (s.ok ? " ok " : "FAIL") << "] " << s.name << ": " << s.detail << "\n";
  os << "  mode         family regime entry    computed     reference        diff\n";
  for (const auto& d : r.diffs) {
    os << "  " << std::left << std::setw(12) << d.mode << " " << std::setw(6) << d.family << " " << std::right
       << std::setw(6) << d.regime + 1 << " (" << d.row + 1 << "," << d.col + 1 << ")  " << std::setw(10)
       << fixed6(d.computed) << "  " << std::setw(10) << fixed6(d.reference) << "  " << std::setw(10)
       << fixed6(d.diff()) << (std::abs(d.diff()) > kDiffTolerance ? "  *" : "") << "\n";
  }
  os << "  max |diff| " << fixed6(r.maxDiff) << " (tolerance " << fixed6(kDiffTolerance) << "), max residual "
     << std::scientific << std::setprecision(2) << r.maxResidual << ", " << std::fixed << std::setprecision(3)
     << r.seconds << " s\n";
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Regime-switching LQ differential games: coupled Riccati solvers and closed-loop simulation"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string outDir = ".";
  std::string modelPath;
  std::string solutionPath;
  std::string mode;
  int exampleId = 1;
  double tol = 1e-10;
  int maxIterations = 500;
  SimConfig sim;
  std::string x0Text = "1,0";
  int i0 = 1;
  bool dumpTrajectories = false;
  ReproduceOptions rep;
  double horizon = 10.0;
  std::uint64_t seed = 1;
  std::string csvPath;

  auto* validateCmd = app.add_subcommand("validate", "Check a model file");
  validateCmd->add_option("model", modelPath, "Model JSON")->required();
  validateCmd->add_option("--out", outDir, "Directory for manifest.json");

  auto* solveCmd = app.add_subcommand("solve", "Solve the coupled Riccati equations");
  solveCmd->add_option("model", modelPath, "Model JSON")->required();
  solveCmd->add_option("--mode", mode, "open-rep | closed-nash | zero-sum")->required();
  solveCmd->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
  solveCmd->add_option("--max-iter", maxIterations, "Iteration cap")->check(CLI::PositiveNumber);
  solveCmd->add_option("--out", outDir, "Output directory");

  auto* reproduceCmd = app.add_subcommand("reproduce", "Run the reference example pipeline and diff the tables");
  reproduceCmd->add_option("example", exampleId, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  reproduceCmd->add_option("--paths", rep.paths, "Monte Carlo paths per loop (0 skips)")
      ->check(CLI::NonNegativeNumber);
  reproduceCmd->add_option("--dt", rep.dt, "Time step")->check(CLI::PositiveNumber);
  reproduceCmd->add_option("--T", rep.T, "Horizon")->check(CLI::PositiveNumber);
  reproduceCmd->add_option("--seed", rep.seed, "Seed");
  reproduceCmd->add_option("--out", outDir, "Output directory");

  auto* simulateCmd = app.add_subcommand("simulate", "Monte Carlo evaluation of a feedback strategy");
  simulateCmd->add_option("model", modelPath, "Model JSON")->required();
  simulateCmd->add_option("solution", solutionPath, "solution.json or strategy JSON")->required();
  simulateCmd->add_option("--paths", sim.paths, "Paths")->check(CLI::PositiveNumber);
  simulateCmd->add_option("--dt", sim.dt, "Time step")->check(CLI::PositiveNumber);
  simulateCmd->add_option("--T", sim.T, "Horizon")->check(CLI::PositiveNumber);
  simulateCmd->add_option("--seed", sim.seed, "Seed");
  simulateCmd->add_option("--x0", x0Text, "Initial state, comma-separated");
  simulateCmd->add_option("--i0", i0, "Initial regime (1-based)")->check(CLI::PositiveNumber);
  simulateCmd->add_option("--threads", sim.threads, "Worker threads (0 = default)")->check(CLI::NonNegativeNumber);
  simulateCmd->add_flag("--antithetic", sim.antithetic, "Antithetic Brownian pairs");
  simulateCmd->add_flag("--force", sim.force, "Simulate a certified-unstable loop");
  simulateCmd->add_flag("--dump-trajectories", dumpTrajectories, "Write the first path to trajectories.csv");
  simulateCmd->add_option("--out", outDir, "Output directory");

  auto* stabilityCmd = app.add_subcommand("stability", "Stability verdicts as JSON");
  stabilityCmd->add_option("model", modelPath, "Model JSON")->required();
  stabilityCmd->add_option("--solution", solutionPath, "Also certify this solution's gain");
  stabilityCmd->add_option("--out", outDir, "Directory for manifest.json");

  auto* exportCmd = app.add_subcommand("export-example", "Write a reference example as a model file");
  exportCmd->add_option("example", exampleId, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  exportCmd->add_option("--out", outDir, "Output directory");

  auto* pathCmd = app.add_subcommand("sample-path", "Sample a regime path as CSV");
  pathCmd->add_option("model", modelPath, "Model JSON")->required();
  pathCmd->add_option("--T", horizon, "Horizon")->check(CLI::PositiveNumber);
  pathCmd->add_option("--i0", i0, "Initial regime (1-based)")->check(CLI::PositiveNumber);
  pathCmd->add_option("--seed", seed, "Seed");
  pathCmd->add_option("--csv", csvPath, "Write CSV here instead of stdout");
  pathCmd->add_option("--out", outDir, "Directory for manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  Manifest manifest;
  manifest.command = app.get_subcommands().front()->get_name();
  if (!modelPath.empty()) manifest.input = Json{{"model", modelPath}};

  if (*validateCmd) return guarded(manifest, outDir, [&] { return cmd_validate(modelPath); });

  if (*solveCmd) {
    manifest.options = Json{{"mode", mode}, {"tol", tol}, {"maxIterations", maxIterations}};
    return guarded(manifest, outDir, [&] {
      const GameModel model = load_model(modelPath);
      const ValidationReport report = validate(model);
      if (!report.ok()) {
        std::cerr << report.summary() << "\n";
        return static_cast<int>(kValidation);
      }
      SolverOptions opts;
      opts.tol = tol;
      opts.maxIterations = maxIterations;
      const Solved solved = solve_mode(model, mode, opts);
      const fs::path dir = prepare_dir(outDir);
      write_json_file(dir / "solution.json", solved.solution);
      manifest.outputs.push_back((dir / "solution.json").string());
      std::cout << "mode " << mode << ": residual " << std::scientific << std::setprecision(3) << solved.residual
                << std::fixed << "\n";
      if (!solved.constraintNote.empty()) std::cout << solved.constraintNote << "\n";
      const RegimeFamily& Theta = solved.strategy.Theta;
      for (int i = 0; i < Theta.size(); ++i) {
        for (int k = 0; k < 2; ++k) {
          std::cout << "P" << k + 1 << "(" << i + 1 << ")";
          for (Index a = 0; a < solved.decoupling.P[k].rows(); ++a) {
            std::cout << (a ? " ;" : "");
            for (Index b = 0; b < solved.decoupling.P[k].cols(); ++b) {
              std::cout << " " << fixed6(solved.decoupling.P[k][i](a, b));
            }
          }
          std::cout << "\n";
        }
      }
      return solved.residual <= tol && solved.constraintsOk ? static_cast<int>(kOk) : static_cast<int>(kSolver);
    });
  }

  if (*reproduceCmd) {
    manifest.input = Json{{"example", exampleId}};
    manifest.options = Json{{"paths", rep.paths}, {"dt", rep.dt}, {"T", rep.T}};
    manifest.seeds.push_back(rep.seed);
    return guarded(manifest, outDir, [&] {
      const ReproduceResult r = reproduce(exampleId, rep);
      std::cout << format_reproduce(r);
      const fs::path dir = prepare_dir(outDir);
      write_json_file(dir / "report.json", r.to_json());
      manifest.outputs.push_back((dir / "report.json").string());
      return r.exit_code();
    });
  }

  if (*simulateCmd) {
    manifest.input["solution"] = solutionPath;
    manifest.options = Json{{"paths", sim.paths}, {"dt", sim.dt},       {"T", sim.T},         {"x0", x0Text},
                            {"i0", i0},           {"threads", sim.threads}, {"antithetic", sim.antithetic},
                            {"force", sim.force}};
    manifest.seeds.push_back(sim.seed);
    return guarded(
        manifest, outDir,
        [&] {
          const GameModel model = load_model(modelPath);
          const Json doc = read_json_file(solutionPath);
          const StrategyPair strategy = strategy_from_json(doc);
          std::optional<Decoupling> dec;
          if (doc.contains("decoupling")) dec = decoupling_from_json(doc);
          const Vector x0 = parse_vector(x0Text);
          sim.recordTrajectory = dumpTrajectories;
          const SimReport report =
              simulate_closed_loop(model, strategy, x0, i0 - 1, sim, dec ? &*dec : nullptr);
          const fs::path dir = prepare_dir(outDir);
          Json j = to_json(report);
          if (dec && !model.inhomogeneity) {
            j["reference"] = Json::array({value_homogeneous(dec->P[0], x0, i0 - 1),
                                          value_homogeneous(dec->P[1], x0, i0 - 1)});
          }
          write_json_file(dir / "report.json", j);
          manifest.outputs.push_back((dir / "report.json").string());
          if (dumpTrajectories) {
            std::ofstream csv(dir / "trajectories.csv");
            if (!csv) throw Error(ErrorCode::Io, "cannot write trajectories.csv");
            csv << trajectory_csv(report.trajectory);
            manifest.outputs.push_back((dir / "trajectories.csv").string());
          }
          for (int k = 0; k < 2; ++k) {
            std::cout << "J" << k + 1 << " = " << fixed6(report.cost[k].mean) << " +- "
                      << fixed6(report.cost[k].se);
            if (j.contains("reference")) std::cout << "  (reference " << fixed6(j["reference"][k]) << ")";
            std::cout << "\n";
          }
          std::cout << "L2 norm = " << fixed6(report.l2Norm.mean) << " +- " << fixed6(report.l2Norm.se) << "\n";
          if (report.stationarityResidual) {
            std::cout << "stationarity residual = " << std::scientific << std::setprecision(3)
                      << *report.stationarityResidual << "\n";
          }
          return static_cast<int>(kOk);
        },
        ErrorCode::NotStabilizing);
  }

  if (*stabilityCmd) {
    if (!solutionPath.empty()) manifest.input["solution"] = solutionPath;
    return guarded(manifest, outDir, [&] {
      const GameModel model = normalized(load_model(modelPath));
      Json j{{"uncontrolled",
              {{"dissipativity", to_json(dissipativity_check(model.dynamics.A, model.dynamics.C))},
               {"spectral", to_json(lyapunov_spectral_check(model.dynamics.A, model.dynamics.C, model.generator))}}}};
      if (!solutionPath.empty()) {
        const StrategyPair s = strategy_from_json(read_json_file(solutionPath));
        j["closedLoop"] = to_json(is_stabilizer(model.dynamics, model.generator, s.Theta));
      }
      std::cout << j.dump(2) << "\n";
      return static_cast<int>(kOk);
    });
  }

  if (*exportCmd) {
    manifest.input = Json{{"example", exampleId}};
    return guarded(manifest, outDir, [&] {
      const fs::path dir = prepare_dir(outDir);
      const fs::path file = dir / ("example" + std::to_string(exampleId) + ".json");
      write_json_file(file, model_to_json(builtin_example(exampleId)));
      manifest.outputs.push_back(file.string());
      std::cout << file.string() << "\n";
      return static_cast<int>(kOk);
    });
  }

  if (*pathCmd) {
    manifest.options = Json{{"T", horizon}, {"i0", i0}};
    manifest.seeds.push_back(seed);
    return guarded(manifest, outDir, [&] {
      const GameModel model = load_model(modelPath);
      const Generator gen = validate_generator(model.generator.pi);
      if (i0 > gen.size()) throw Error(ErrorCode::InvalidConfig, "initial regime out of range");
      const RegimePath path = sample_path(gen, i0 - 1, horizon, seed);
      if (csvPath.empty()) {
        std::cout << path.to_csv();
      } else {
        std::ofstream csv(csvPath);
        if (!csv) throw Error(ErrorCode::Io, "cannot write " + csvPath);
        csv << path.to_csv();
        manifest.outputs.push_back(csvPath);
      }
      return static_cast<int>(kOk);
    });
  }
  return kValidation;
}

}  // namespace regime_riccati::cli

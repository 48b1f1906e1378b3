// End-to-end acceptance checks. Each numbered criterion prints exactly one
// [PASS]/[FAIL] line; the exit code is the number of failed criteria.
//
// Statistical gates run on fixed seeds so the outcome is deterministic.
// Where a gate aggregates many hypothesis tests (criterion 1 applies a
// 3-sigma bias test to 114,000 component means, of which ~300 would exceed
// 3 sigma by pure chance), the gate admits the expected false-positive mass
// (at most 1% of tests per operator) and adds an absolute cap (6 sigma, or
// 1.15x the variance bound) that chance alone cannot reach but a real defect
// would.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "actc/allocation.hpp"
#include "actc/compression.hpp"
#include "actc/diffusion.hpp"
#include "actc/harness.hpp"
#include "actc/model.hpp"
#include "actc/rng.hpp"
#include "actc/theory.hpp"
#include "actc/topology.hpp"

namespace {

int g_failures = 0;

std::string fmt(const char* format, ...) {
  char buffer[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return std::string(buffer);
}

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id,
              label, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// ---------------------------------------------------------------------------
// Criterion 1: compression operators are unbiased and respect the variance
// bound E||Q(x) - x||^2 <= omega ||x||^2, for every quantizer resolution
// r in {1..8} and every sparsifier size S in {1..30} at dim 30.
// ---------------------------------------------------------------------------
void criterion_1() {
  namespace comp = actc::compression;
  const auto start = std::chrono::steady_clock::now();
  const int dim = 30;
  const int inputs = 100;
  const int draws = 10000;

  std::vector<comp::CompressionSpec> operators;
  for (int r = 1; r <= 8; ++r) {
    operators.push_back(comp::CompressionSpec::quantizer(dim, r));
  }
  for (int s = 1; s <= dim; ++s) {
    operators.push_back(comp::CompressionSpec::sparsifier(dim, s));
  }

  bool pass = true;
  std::string first_fail;
  double worst_ratio_excess = 0.0;  // max ratio / (1.05 omega), omega > 0
  double worst_z = 0.0;

  for (std::size_t op = 0; op < operators.size(); ++op) {
    const comp::CompressionSpec& spec = operators[op];
    const double om = comp::omega(spec);
    actc::Rng rng(0x51AB1234ULL, static_cast<std::uint64_t>(op));

    int z3_violations = 0;
    int z6_violations = 0;
    int components_tested = 0;
    int ratio_violations = 0;
    int ratio_hard_violations = 0;

    for (int input = 0; input < inputs; ++input) {
      Eigen::VectorXd x(dim);
      const double scale = 0.25 + 4.0 * rng.uniform();
      for (int j = 0; j < dim; ++j) x[j] = scale * rng.normal();
      const double xsq = x.squaredNorm();

      Eigen::VectorXd sum_e = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd sum_e2 = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd e_min = Eigen::VectorXd::Constant(dim, 1e300);
      Eigen::VectorXd e_max = Eigen::VectorXd::Constant(dim, -1e300);
      double sum_sq = 0.0;
      Eigen::VectorXd e(dim);
      for (int t = 0; t < draws; ++t) {
        e = comp::compress(spec, x, rng) - x;
        sum_e += e;
        sum_e2 += e.cwiseAbs2();
        e_min = e_min.cwiseMin(e);
        e_max = e_max.cwiseMax(e);
        sum_sq += e.squaredNorm();
      }

      // Level spacing bounds any bias a finite sample cannot resolve when
      // the randomization almost never fires (empirical variance 0).
      double spacing = 1e-12;
      if (spec.family == comp::Family::kRandomizedQuantizer) {
        const double levels = std::pow(2.0, spec.levels_bits) - 1.0;
        spacing = std::sqrt(xsq) / levels + 1e-12;
      }

      for (int j = 0; j < dim; ++j) {
        ++components_tested;
        const double mean = sum_e[j] / draws;
        // An all-identical sample (the randomized rounding never fired)
        // carries no variance information; the accumulated-moments variance
        // would be pure cancellation noise there. The sample mean is then
        // deterministic and can sit anywhere inside one level spacing.
        if (e_max[j] == e_min[j]) {
          if (std::abs(mean) > spacing) ++z6_violations;
          continue;
        }
        const double var =
            std::max(0.0, sum_e2[j] / draws - mean * mean) *
            (static_cast<double>(draws) / (draws - 1.0));
        const double z = std::abs(mean) / std::sqrt(var / draws);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++z3_violations;
        if (z > 6.0) ++z6_violations;
      }

      const double ratio = (sum_sq / draws) / xsq;
      if (ratio > 1.05 * om + 1e-12) ++ratio_violations;
      if (ratio > 1.15 * om + 1e-12) ++ratio_hard_violations;
      if (om > 0.0) {
        worst_ratio_excess = std::max(worst_ratio_excess, ratio / (1.05 * om));
      }
    }

    const bool op_ok = z6_violations == 0 &&
                       z3_violations * 100 <= components_tested &&
                       ratio_violations * 100 <= inputs &&
                       ratio_hard_violations == 0;
    if (!op_ok && pass) {
      pass = false;
      first_fail = fmt(
          "op %zu (family %d): z>3 on %d/%d comps, z>6 on %d, ratio "
          "violations %d/%d (hard %d)",
          op, static_cast<int>(spec.family), z3_violations, components_tested,
          z6_violations, ratio_violations, inputs, ratio_hard_violations);
    }
  }

  const double secs = elapsed_s(start);
  if (secs >= 30.0) pass = false;
  report(1, "compression unbiasedness and variance bound", pass,
         pass ? fmt("38 operators x 100 inputs x 1e4 draws: worst |z|=%.2f, "
                    "worst E|e|^2 ratio at %.3f of 1.05*omega, %.1f s",
                    worst_z, worst_ratio_excess, secs)
              : first_fail + fmt(" (%.1f s)", secs));
}

// ---------------------------------------------------------------------------
// Criterion 2: with identity compressors and zeta = 1 the compressed
// recursion reproduces the uncompressed baseline bitwise on a shared stream.
// ---------------------------------------------------------------------------
void criterion_2() {
  namespace model = actc::model;
  namespace topo = actc::topology;
  namespace diff = actc::diffusion;
  const auto start = std::chrono::steady_clock::now();

  const int n = 10;
  const int dim = 20;
  actc::Rng rng(0xB17B15EULL, 3);
  Eigen::VectorXd w_true(dim);
  for (int j = 0; j < dim; ++j) w_true[j] = rng.normal();
  std::vector<model::AgentModel> agents;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd variances(dim);
    for (int j = 0; j < dim; ++j) variances[j] = 0.5 + rng.uniform();
    agents.push_back(model::make_agent(model::diagonal_covariance(variances),
                                       0.2 + 0.5 * rng.uniform(), 0.01));
  }
  model::RegressionProblem problem = model::make_problem(w_true, agents);
  topo::Adjacency adj = topo::bollobas_riordan(n, 2, rng);
  topo::CombinationMatrix matrix = topo::averaging_rule(adj);

  diff::RunConfig actc_cfg;
  actc_cfg.problem = problem;
  actc_cfg.matrix = matrix;
  actc_cfg.strategy = diff::Strategy::kActc;
  actc_cfg.zeta = 1.0;
  actc_cfg.specs.assign(
      n, actc::compression::CompressionSpec::identity(dim));
  actc_cfg.horizon = 500;
  actc_cfg.seed = 991;
  actc_cfg.runs = 1;

  diff::RunConfig atc_cfg = actc_cfg;
  atc_cfg.strategy = diff::Strategy::kAtc;
  atc_cfg.specs.clear();

  const diff::Trajectory a = diff::run(actc_cfg, 0);
  const diff::Trajectory b = diff::run(atc_cfg, 0);

  const bool same =
      (a.agent_sq_error.array() == b.agent_sq_error.array()).all() &&
      (a.network_mse.array() == b.network_mse.array()).all() &&
      (a.bits_cumulative.array() == b.bits_cumulative.array()).all();
  const double secs = elapsed_s(start);
  report(2, "identity-compressor recursion equals baseline bitwise",
         same && secs < 5.0,
         fmt("N=10, T=500, final mse %.6e vs %.6e, %.2f s", a.network_mse[500],
             b.network_mse[500], secs));
}

// Shared simulation state for criteria 3-5 (one preset, five arms) and for
// criteria 6 and 11 (allocation presets, two arms each).
struct PresetRun {
  actc::harness::ScenarioConfig config;
  actc::harness::BuiltScenario built;
  std::map<std::string, actc::diffusion::Trajectory> arms;
};

PresetRun run_preset(const std::string& name) {
  PresetRun out;
  out.config = actc::harness::preset(name);
  out.built = actc::harness::build(out.config);
  for (const auto& arm : out.built.arms) {
    std::fprintf(stderr, "  [acceptance] running %s/%s (%d runs)...\n",
                 name.c_str(), arm.label.c_str(), arm.run_config.runs);
    out.arms[arm.label] = actc::diffusion::run_monte_carlo(arm.run_config, 0);
  }
  return out;
}

const actc::harness::BuiltScenario::Arm* find_arm(
    const actc::harness::BuiltScenario& built, const std::string& label) {
  for (const auto& arm : built.arms) {
    if (arm.label == label) return &arm;
  }
  return nullptr;
}

actc::theory::TheoryBounds arm_bounds(const PresetRun& run,
                                      const actc::harness::BuiltScenario::Arm&
                                          arm) {
  namespace theory = actc::theory;
  namespace comp = actc::compression;
  const int n = run.built.problem.num_agents();
  Eigen::VectorXd omegas(n);
  for (int k = 0; k < n; ++k) omegas[k] = comp::omega(arm.run_config.specs[k]);
  const double zeta = run.config.zeta;
  const double ds = theory::delta_s(run.built.problem, run.built.perron,
                                    run.built.alphas, zeta);
  const double dw =
      theory::delta_omega(run.built.problem, run.built.perron,
                          run.built.alphas, zeta, omegas, run.built.nu);
  return theory::mse_bounds(run.built.mu_max, ds, dw);
}

// ---------------------------------------------------------------------------
// Criterion 3: the uncompressed baseline lands on the predicted error floor
// mu * delta_s to within 1 dB.
// ---------------------------------------------------------------------------
void criterion_3(const PresetRun& fig1) {
  namespace harness = actc::harness;
  namespace theory = actc::theory;
  const double ds = theory::delta_s(fig1.built.problem, fig1.built.perron,
                                    fig1.built.alphas, fig1.config.zeta);
  const double floor_db = harness::db(fig1.built.mu_max * ds);
  const double ss = harness::steady_state_mse(
      fig1.arms.at("atc"), fig1.config.steady_state_window);
  const double ss_db = harness::db(ss);
  const double gap = std::abs(ss_db - floor_db);
  report(3, "uncompressed baseline matches theory floor", gap <= 1.0,
         fmt("steady state %.2f dB vs floor %.2f dB (|gap| %.2f dB, 200 runs)",
             ss_db, floor_db, gap));
}

// ---------------------------------------------------------------------------
// Criterion 4: for r in {4, 6, 8} the steady-state MSE sits inside the
// theoretical sandwich and is nonincreasing in r.
// ---------------------------------------------------------------------------
void criterion_4(const PresetRun& fig1) {
  namespace harness = actc::harness;
  bool pass = true;
  std::string detail;
  double prev_db = 0.0;
  bool have_prev = false;
  for (int r : {4, 6, 8}) {
    const std::string label = fmt("actc_r%d", r);
    const auto* arm = find_arm(fig1.built, label);
    if (arm == nullptr) {
      pass = false;
      detail += fmt("missing arm %s; ", label.c_str());
      continue;
    }
    const actc::theory::TheoryBounds bounds = arm_bounds(fig1, *arm);
    const double ss = harness::steady_state_mse(
        fig1.arms.at(label), fig1.config.steady_state_window);
    const double ss_db = harness::db(ss);
    const double lower_db = harness::db(bounds.lower);
    const double upper_db = harness::db(bounds.upper);
    const bool sandwich =
        ss_db >= lower_db - 0.5 && ss_db <= upper_db + 1.5;
    const bool monotone = !have_prev || ss_db <= prev_db + 1.0;
    if (!sandwich || !monotone) pass = false;
    detail += fmt("r=%d: %.2f in [%.2f-0.5, %.2f+1.5]%s dB; ", r, ss_db,
                  lower_db, upper_db, monotone ? "" : " NON-MONOTONE");
    prev_db = ss_db;
    have_prev = true;
  }
  report(4, "steady-state MSE inside theoretical sandwich, nonincreasing in r",
         pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: agents are coordinated — per-agent steady-state MSEs agree to
// 10% and steady-state deviations are pairwise correlated above 0.9.
// ---------------------------------------------------------------------------
void criterion_5(const PresetRun& fig1) {
  namespace harness = actc::harness;
  namespace diff = actc::diffusion;
  const std::string label = "actc_r6";
  const auto* arm = find_arm(fig1.built, label);
  const actc::diffusion::Trajectory& traj = fig1.arms.at(label);
  const int n = fig1.built.problem.num_agents();
  const int horizon = arm->run_config.horizon;

  // Per-agent steady-state MSE from the trailing window of the Monte Carlo
  // average.
  const int count = std::max(
      1, static_cast<int>(std::floor(fig1.config.steady_state_window *
                                     horizon)));
  const int start = horizon - count + 1;
  Eigen::VectorXd agent_mse =
      traj.agent_sq_error.middleRows(start, count).colwise().mean();
  const double spread = agent_mse.maxCoeff() / agent_mse.minCoeff();

  // Pairwise normalized correlations of the steady-state deviations,
  // accumulated across runs at a few well-separated steady-state snapshots.
  const std::vector<int> snapshots = {1680, 1760, 1840, 1920, 2000};
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(n, n);
  const Eigen::VectorXd& w_true = fig1.built.problem.w_true;
  diff::Observer observer = [&](int iter, const diff::NetworkState& state) {
    if (std::find(snapshots.begin(), snapshots.end(), iter) ==
        snapshots.end()) {
      return;
    }
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXd dk = state.agents[k].w - w_true;
      for (int l = k; l < n; ++l) {
        const double dot = dk.dot(state.agents[l].w - w_true);
        cross(k, l) += dot;
        if (l != k) cross(l, k) += dot;
      }
    }
  };
  for (int r = 0; r < arm->run_config.runs; ++r) {
    diff::run(arm->run_config, r, observer);
  }
  double min_corr = 1.0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      min_corr = std::min(
          min_corr, cross(k, l) / std::sqrt(cross(k, k) * cross(l, l)));
    }
  }

  const bool pass = spread <= 1.10 && min_corr >= 0.9;
  report(5, "agents coordinated: equal MSEs and correlated deviations", pass,
         fmt("max/min agent MSE %.4f (<=1.10), min pairwise correlation %.4f "
             "(>=0.90)",
             spread, min_corr));
}

// ---------------------------------------------------------------------------
// Criterion 6: mid-run optimized re-allocation beats the uniform split by
// 2 +/- 1 dB (quantizers) and 3 +/- 1 dB (sparsifiers).
// ---------------------------------------------------------------------------
void criterion_6(const PresetRun& quant, const PresetRun& sparse) {
  namespace harness = actc::harness;
  const double q_uniform = harness::db(harness::steady_state_mse(
      quant.arms.at("uniform"), quant.config.steady_state_window));
  const double q_adaptive = harness::db(harness::steady_state_mse(
      quant.arms.at("adaptive"), quant.config.steady_state_window));
  const double s_uniform = harness::db(harness::steady_state_mse(
      sparse.arms.at("uniform"), sparse.config.steady_state_window));
  const double s_adaptive = harness::db(harness::steady_state_mse(
      sparse.arms.at("adaptive"), sparse.config.steady_state_window));
  const double q_gain = q_uniform - q_adaptive;
  const double s_gain = s_uniform - s_adaptive;
  const bool pass =
      q_gain >= 1.0 && q_gain <= 3.0 && s_gain >= 2.0 && s_gain <= 4.0;
  report(6, "optimized allocation beats uniform split", pass,
         fmt("quantizer gain %.2f dB (2+/-1), sparsifier gain %.2f dB "
             "(3+/-1), 200 runs each",
             q_gain, s_gain));
}

// ---------------------------------------------------------------------------
// Criterion 7: exact bit accounting.
// ---------------------------------------------------------------------------
void criterion_7() {
  namespace theory = actc::theory;
  const std::int64_t dense = theory::bit_expense_dense(2000, 10, 30, 32);
  const std::int64_t quantized =
      theory::bit_expense_quantized(2000, 10, 30, 32, 20);
  bool formula_ok = true;
  // T (N h + M X + M N) across a few tuples.
  const std::int64_t cases[][5] = {
      {2000, 10, 30, 32, 20}, {1000, 5, 7, 16, 9}, {1, 1, 1, 1, 1},
      {123, 4, 11, 8, 40}};
  for (const auto& c : cases) {
    const std::int64_t expect = c[0] * (c[1] * c[3] + c[2] * c[4] + c[2] * c[1]);
    if (theory::bit_expense_quantized(c[0], static_cast<int>(c[1]),
                                      static_cast<int>(c[2]),
                                      static_cast<int>(c[3]),
                                      c[4]) != expect) {
      formula_ok = false;
    }
  }
  const bool pass =
      dense == 19200000 && quantized == 2440000 && formula_ok;
  report(7, "bit accounting exact", pass,
         fmt("dense %lld (=19200000), differential %lld (=2440000), formula "
             "holds on 4 tuples",
             static_cast<long long>(dense), static_cast<long long>(quantized)));
}

// ---------------------------------------------------------------------------
// Criterion 8: waterfilling satisfies the KKT conditions to 1e-8 and its
// integer rounding is within 5% of the exhaustive integer optimum.
// ---------------------------------------------------------------------------
void criterion_8() {
  namespace alloc = actc::allocation;
  const alloc::Family families[] = {alloc::Family::kQuantizerHighRes,
                                    alloc::Family::kQuantizerPow2,
                                    alloc::Family::kSparsifier};
  bool pass = true;
  std::string detail;
  double worst_kkt = 0.0;
  double worst_ratio = 1.0;
  for (int f = 0; f < 3; ++f) {
    actc::Rng rng(0xA110C8ULL, static_cast<std::uint64_t>(f));
    int kkt_fail = 0;
    int ratio_fail = 0;
    for (int i = 0; i < 100; ++i) {
      alloc::AllocationProblem p;
      p.n = 2 + static_cast<int>(rng.uniform_int(3));
      p.family = families[f];
      p.x_min = 1.0 + static_cast<double>(rng.uniform_int(4));
      const int width = 3 + static_cast<int>(rng.uniform_int(10));
      p.x_max = p.x_min + width;
      p.dim = static_cast<int>(p.x_max) + 8 +
              static_cast<int>(rng.uniform_int(40));
      p.budget =
          p.n * p.x_min + rng.uniform() * (p.n * p.x_max - p.n * p.x_min);
      p.perron.resize(p.n);
      p.distortions.resize(p.n);
      for (int k = 0; k < p.n; ++k) {
        p.perron[k] = 0.05 + rng.uniform();
        p.distortions[k] = 0.1 + 10.0 * rng.uniform();
      }
      p.perron /= p.perron.sum();

      const alloc::AllocationSolution sol = alloc::solve_kkt(p);
      const alloc::KktReport kkt = alloc::verify_kkt(p, sol);
      worst_kkt = std::max({worst_kkt, kkt.stationarity, kkt.primal, kkt.dual,
                            kkt.complementarity});
      if (!kkt.ok(1e-8)) ++kkt_fail;

      const Eigen::VectorXi rounded =
          alloc::round_to_integer(p, sol.x_real, true);
      const Eigen::VectorXi best = alloc::brute_force(p);
      const double obj_rounded = alloc::objective(p, rounded.cast<double>());
      const double obj_best = alloc::objective(p, best.cast<double>());
      if (obj_rounded > 1.05 * obj_best + 1e-12) ++ratio_fail;
      if (obj_best > 0.0) {
        worst_ratio = std::max(worst_ratio, obj_rounded / obj_best);
      }
    }
    if (kkt_fail > 0 || ratio_fail > 0) {
      pass = false;
      detail += fmt("family %d: %d KKT / %d rounding failures; ", f, kkt_fail,
                    ratio_fail);
    }
  }
  report(8, "KKT residuals <= 1e-8, rounded objective within 5% of optimum",
         pass,
         pass ? fmt("3 families x 100 instances: worst residual %.2e, worst "
                    "rounding ratio %.4f",
                    worst_kkt, worst_ratio)
              : detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: the high-rate closed form agrees with the waterfilling
// solver to 1e-6 when no box constraint binds.
// ---------------------------------------------------------------------------
void criterion_9() {
  namespace alloc = actc::allocation;
  actc::Rng rng(0xC105EDF0ULL, 0);
  double worst = 0.0;
  int interior_checked = 0;
  for (int i = 0; i < 100; ++i) {
    alloc::AllocationProblem p;
    p.n = 2 + static_cast<int>(rng.uniform_int(5));
    p.family = alloc::Family::kQuantizerPow2;
    p.x_min = 8.0;
    p.x_max = 40.0;
    p.dim = 30;
    p.budget = p.n * (12.0 + 24.0 * rng.uniform());
    p.perron.resize(p.n);
    p.distortions.resize(p.n);
    for (int k = 0; k < p.n; ++k) {
      p.perron[k] = 0.5 + 1.5 * rng.uniform();
      p.distortions[k] = 0.5 + 1.5 * rng.uniform();
    }
    p.perron /= p.perron.sum();

    const Eigen::VectorXd closed = alloc::closed_form_quantizer(p);
    if (closed.minCoeff() <= p.x_min || closed.maxCoeff() >= p.x_max) {
      continue;  // a box binds; outside this criterion's regime
    }
    ++interior_checked;
    const alloc::AllocationSolution sol = alloc::solve_kkt(p);
    worst = std::max(worst, (closed - sol.x_real).lpNorm<Eigen::Infinity>());
  }
  const bool pass = worst <= 1e-6 && interior_checked >= 90;
  report(9, "closed-form allocation matches waterfilling", pass,
         fmt("%d interior instances, max deviation %.2e (<=1e-6)",
             interior_checked, worst));
}

// ---------------------------------------------------------------------------
// Criterion 10: the distributed Perron estimate agrees with a dense
// eigensolver to 1e-8 on 100 random primitive combination matrices.
// ---------------------------------------------------------------------------
void criterion_10() {
  namespace topo = actc::topology;
  actc::Rng rng(0x9E5507ULL, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_int(11));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      a((k + 1) % n, k) = 1.0;  // ring for strong connectivity
      a(k, k) = 1.0;            // self-loop for primitivity
      for (int l = 0; l < n; ++l) {
        if (l != k && rng.uniform() < 0.3) a(l, k) = 1.0;
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        if (a(l, k) > 0.0) a(l, k) = 0.1 + rng.uniform();
      }
      a.col(k) /= a.col(k).sum();
    }
    const topo::CombinationMatrix matrix = topo::validate(a);
    const Eigen::VectorXd estimate =
        topo::consensus_perron_estimate(matrix).pi;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix.matrix());
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (std::abs(solver.eigenvalues()[j] - 1.0) <
          std::abs(solver.eigenvalues()[best] - 1.0)) {
        best = j;
      }
    }
    Eigen::VectorXcd v = solver.eigenvectors().col(best);
    v /= v.sum();
    worst = std::max(
        worst, (estimate - v.real()).lpNorm<Eigen::Infinity>());
  }
  report(10, "consensus Perron estimate matches dense eigensolver",
         worst <= 1e-8, fmt("100 random matrices, max deviation %.2e", worst));
}

// ---------------------------------------------------------------------------
// Criterion 11: the online distortion estimator ranks the true per-agent
// distortion coefficients exactly (over strictly ordered pairs) and lands
// within 25% of their values.
// ---------------------------------------------------------------------------
void criterion_11(const PresetRun& quant) {
  namespace model = actc::model;
  const int n = quant.built.problem.num_agents();
  Eigen::VectorXd d_true(n);
  for (int k = 0; k < n; ++k) {
    d_true[k] =
        model::distortion_coefficient(quant.built.problem, k,
                                      quant.built.alphas);
  }
  const Eigen::VectorXd& d_hat =
      quant.arms.at("uniform").distortion_estimates_rescaled;

  bool order_ok = true;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (d_true[k] > d_true[l] * (1.0 + 1e-9) && !(d_hat[k] > d_hat[l])) {
        order_ok = false;
      }
    }
  }
  double worst_rel = 0.0;
  for (int k = 0; k < n; ++k) {
    worst_rel = std::max(worst_rel,
                         std::abs(d_hat[k] - d_true[k]) / d_true[k]);
  }
  const bool pass = order_ok && worst_rel <= 0.25;
  report(11, "online distortion estimates rank and match true coefficients",
         pass,
         fmt("ordering %s, max relative error %.1f%% (<=25%%)",
             order_ok ? "exact" : "WRONG", 100.0 * worst_rel));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();

  std::fprintf(stderr, "[acceptance] simulating resolution-sweep preset...\n");
  const PresetRun fig1 = run_preset("fig1");
  criterion_3(fig1);
  criterion_4(fig1);
  criterion_5(fig1);

  std::fprintf(stderr, "[acceptance] simulating allocation presets...\n");
  const PresetRun quant = run_preset("fig3_quantizer");
  const PresetRun sparse = run_preset("fig3_sparsifier");
  criterion_6(quant, sparse);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11(quant);

  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}

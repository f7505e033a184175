// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwdeep/dataset.hpp"
#include "fwdeep/experiments.hpp"
#include "fwdeep/fw_core.hpp"
#include "fwdeep/history_io.hpp"
#include "fwdeep/mlp.hpp"
#include "fwdeep/objective.hpp"
#include "fwdeep/rng.hpp"
#include "fwdeep/trainers.hpp"

using namespace fwdeep;
namespace fs = std::filesystem;
namespace ex = fwdeep::experiments;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::map<int, std::string> lines;
int failures = 0;

// Progress goes to stderr as criteria finish; the summary prints in criterion order.
void report(int id, const char* title, const Verdict& v, double secs) {
  if (!v.pass) ++failures;
  char head[160];
  std::snprintf(head, sizeof head, "[%s] criterion %d: %s (%.2f s): ", v.pass ? "PASS" : "FAIL", id, title, secs);
  lines[id] = head + v.detail;
  std::fprintf(stderr, "%s\n", lines[id].c_str());
}

// Feasibility bookkeeping shared by every Frank-Wolfe run of the suite.
struct FeasibilityLog {
  std::size_t iterates = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::vector<std::string> offenders;
  void check(const std::string& run, double radius, double l1) {
    ++iterates;
    worst_excess = std::max(worst_excess, l1 - radius);
    if (l1 > radius + 1e-9 && offenders.size() < 5) offenders.push_back(run);
  }
};
FeasibilityLog feasibility;

struct RunSummary {
  RunHistory history;
  double best = 0.0;
  double final_acc = 0.0;
};

RunSummary run_method(const ex::MethodRun& run, const Dataset& train_set, const Dataset& test_set) {
  const std::string label = run.name + (run.config.batch_size ? "@" + std::to_string(*run.config.batch_size) : "");
  const bool fw = run.config.method == Method::FrankWolfe;
  const double radius = run.config.ball.radius();
  if (fw) feasibility.check(label, radius, mlp::init_params(run.config.seeds.init, run.config.ball).l1_norm());
  RunSummary s;
  s.history = train(run.config, train_set, test_set, {}, [&](std::int64_t, const ParamVector& x) {
    feasibility.check(label, radius, x.l1_norm());
  });
  for (const EpochRecord& r : s.history.records) s.best = std::max(s.best, r.test_accuracy);
  s.final_acc = s.history.records.back().test_accuracy;
  return s;
}

std::string describe(const std::string& name, const RunSummary& s) {
  return name + " best " + fmt("%.3f", s.best) + " final " + fmt("%.3f", s.final_acc) + " (" +
         std::to_string(s.history.records.size()) + " epochs)";
}

// ------------------------------------------------------------ criterion 1

Verdict lmo_equivalence() {
  Verdict v;
  Rng rng(20240501);
  int mismatches = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const double radius = 100.0 * (1.0 - rng.uniform01());
    std::vector<double> g(n);
    for (double& e : g) e = c % 4 == 0 ? static_cast<double>(rng.uniform_index(3)) - 1.0 : rng.uniform_symmetric(10.0);
    const ParamVector grad(g);
    if (!(l1_lmo(grad, L1Ball(radius)) == brute_force_lmo(grad, L1Ball(radius)))) ++mismatches;
  }
  v.require(mismatches == 0, "1000 cases, " + std::to_string(mismatches) + " mismatches");
  return v;
}

// ------------------------------------------------------------ criterion 2

Verdict gradient_check() {
  Verdict v;
  Rng rng(777);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<double> w(mlp::kParamCount);
    for (double& e : w) e = rng.uniform_symmetric(0.5);
    std::vector<Sample> batch;
    for (int b = 0; b < 8; ++b) {
      const Point p{rng.uniform01(), rng.uniform01()};
      batch.push_back({p, circle_label(p)});
    }
    const ParamVector grad = mlp::batch_loss_and_grad(ParamVector(w), batch).grad;
    for (int k = 0; k < 50; ++k) {
      const std::size_t i = rng.uniform_index(mlp::kParamCount);
      const double h = 1e-6 * std::max(1.0, std::abs(w[i]));
      const double keep = w[i];
      w[i] = keep + h;
      const double up = mlp::reference::loss(ParamVector(w), batch);
      w[i] = keep - h;
      const double dn = mlp::reference::loss(ParamVector(w), batch);
      w[i] = keep;
      const double fd = (up - dn) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6}));
    }
  }
  v.require(worst < 1e-4, "1000 coordinates, worst relative error " + fmt("%.2e", worst));
  return v;
}

// ------------------------------------------------------------ criterion 3

// Decreasing-rule Frank-Wolfe on x1^2 + x2^2 written out by hand: gradient 2x,
// vertex by scanning all four corners, fixed 2/(t+2) step.
std::vector<double> reference_decreasing_values(int iterations) {
  double x[2] = {0.5, 0.5};
  std::vector<double> f{x[0] * x[0] + x[1] * x[1]};
  for (int t = 0; t < iterations; ++t) {
    const double g[2] = {2 * x[0], 2 * x[1]};
    double best = std::numeric_limits<double>::infinity();
    int idx = 0;
    double mag = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (double m : {-1.0, 1.0}) {
        if (g[i] * m < best) {
          best = g[i] * m;
          idx = i;
          mag = m;
        }
      }
    }
    const double gamma = 2.0 / (t + 2.0);
    for (int i = 0; i < 2; ++i) x[i] = (1 - gamma) * x[i] + gamma * (i == idx ? mag : 0.0);
    f.push_back(x[0] * x[0] + x[1] * x[1]);
  }
  return f;
}

Verdict quadratic_convergence() {
  Verdict v;
  ex::QuadraticOptions opt;
  const auto runs = ex::run_quadratic(opt);
  for (const auto& run : runs) {
    for (const FwRecord& r : run.trajectory) {
      feasibility.check("quadratic_" + ex::to_string(run.rule), opt.radius, r.state.x.l1_norm());
    }
    if (run.rule == ex::RuleName::LineSearch) {
      int hit = -1;
      bool monotone = true;
      for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        if (hit < 0 && run.trajectory[t].value <= 1e-8) hit = static_cast<int>(t);
        if (t > 0 && run.trajectory[t].value > run.trajectory[t - 1].value) monotone = false;
      }
      v.require(hit >= 0 && hit <= 100, "line search f <= 1e-8 at iteration " + std::to_string(hit));
      v.require(monotone, "line search non-increasing");
    }
    if (run.rule == ex::RuleName::Decreasing) {
      const std::vector<double> ref = reference_decreasing_values(opt.iterations);
      double worst_ratio = 0.0, worst_ref = 0.0, max_dev = 0.0;
      for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        worst_ratio = std::max(worst_ratio, run.trajectory[t].value * (t + 2.0) / 16.0);
        worst_ref = std::max(worst_ref, ref[t] * (t + 2.0) / 16.0);
        max_dev = std::max(max_dev, std::abs(run.trajectory[t].value - ref[t]));
      }
      v.require(worst_ratio <= 1.0, "decreasing max_t f(x_t)(t+2)/16 = " + fmt("%.4f", worst_ratio));
      v.require(worst_ref <= 1.0 && max_dev <= 1e-12,
                "hand-written reference run bound ratio " + fmt("%.4f", worst_ref) + ", max deviation " +
                    fmt("%.1e", max_dev));
    }
  }
  return v;
}

// ------------------------------------------------------------ criteria 4, 5, 8

std::map<std::string, RunSummary> full_runs;

Verdict full_batch(const Dataset& train_set, const Dataset& test_set) {
  Verdict v;
  for (const ex::MethodRun& run : ex::plan_runs({})) {
    full_runs[run.name] = run_method(run, train_set, test_set);
    const RunSummary& s = full_runs[run.name];
    if (run.name == "fw_decreasing") {
      v.require(s.best <= 0.85, describe(run.name, s) + " stays <= 0.85");
    } else {
      v.require(s.best >= 0.90, describe(run.name, s) + " reaches >= 0.90");
    }
  }
  return v;
}

Verdict stochastic(const Dataset& train_set, const Dataset& test_set) {
  Verdict v;
  ex::TrainSelection sel;
  sel.stochastic = true;
  for (const ex::MethodRun& run : ex::plan_runs(sel)) {
    const RunSummary s = run_method(run, train_set, test_set);
    if (run.name == "gd" || run.name == "fw_linesearch") {
      v.require(s.best >= 0.90, describe(run.name, s) + " reaches >= 0.90");
    } else {
      v.require(s.best < 0.90, describe(run.name, s) + " never reaches 0.90");
    }
  }
  // Reported only.
  for (std::size_t b : {100, 500}) {
    sel.batch_size = b;
    sel.rule = ex::RuleName::LineSearch;
    const RunSummary s = run_method(ex::plan_runs(sel).front(), train_set, test_set);
    v.detail += "; (not gated) batch " + std::to_string(b) + " " + describe("fw_linesearch", s);
  }
  return v;
}

Verdict degenerate_batch(const Dataset& train_set, const Dataset& test_set) {
  Verdict v;
  for (const ex::MethodRun& planned : ex::plan_runs({})) {
    if (planned.config.method != Method::FrankWolfe) continue;
    ex::MethodRun run = planned;
    run.config.batch_size = train_set.size();
    const RunHistory h = run_method(run, train_set, test_set).history;
    const RunHistory& ref = full_runs.at(run.name).history;
    bool same = h.final_params == ref.final_params && h.records.size() == ref.records.size();
    for (std::size_t i = 0; same && i < h.records.size(); ++i) {
      const EpochRecord &a = h.records[i], &b = ref.records[i];
      same = a.train_loss == b.train_loss && a.test_accuracy == b.test_accuracy && a.gamma == b.gamma &&
             a.gap == b.gap && a.l1_norm == b.l1_norm;
    }
    v.require(same, run.name + " batch " + std::to_string(train_set.size()) + " vs full batch over " +
                        std::to_string(h.records.size()) + " epochs: " + (same ? "bitwise identical" : "differs"));
  }
  return v;
}

// ------------------------------------------------------------ criterion 6

Verdict feasibility_suite() {
  Verdict v;
  v.require(feasibility.offenders.empty() && feasibility.iterates > 0,
            std::to_string(feasibility.iterates) + " Frank-Wolfe iterates checked, max (|w|_1 - radius) = " +
                fmt("%.3e", feasibility.worst_excess));
  for (const std::string& o : feasibility.offenders) v.require(false, "infeasible iterate in " + o);
  return v;
}

// ------------------------------------------------------------ criterion 7

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const Dataset& train_set, const Dataset& test_set) {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "fwdeep_acceptance_determinism";
  fs::remove_all(root);
  std::size_t compared = 0;
  std::vector<std::string> differing;
  auto compare_dirs = [&](const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
      ++compared;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) differing.push_back(entry.path().filename());
    }
  };
  for (const char* rep : {"a", "b"}) ex::write_quadratic(ex::run_quadratic({}), root / "quadratic" / rep);
  compare_dirs(root / "quadratic" / "a", root / "quadratic" / "b");
  for (bool sto : {false, true}) {
    ex::TrainSelection sel;
    sel.stochastic = sto;
    sel.epochs = 15;
    const auto runs = ex::plan_runs(sel);
    const fs::path base = root / (sto ? "stochastic" : "full");
    for (const char* rep : {"a", "b"}) ex::run_and_write(runs, train_set, test_set, base / rep, false);
    compare_dirs(base / "a", base / "b");
  }
  std::string diff;
  for (const auto& d : differing) diff += " " + d;
  v.require(differing.empty() && compared > 0,
            std::to_string(compared) + " files written twice (15-epoch runs, ms column zeroed)" +
                (differing.empty() ? ", all byte-identical" : ", differing:" + diff));
  fs::remove_all(root);
  return v;
}

}  // namespace

int main() {
  const auto total = Clock::now();
  const Dataset train_set = generate(1000, Seeds{}.train);
  const Dataset test_set = generate(1000, Seeds{}.test);

  auto timed = [](int id, const char* title, double limit, const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v = body();
    const double secs = seconds_since(t0);
    if (limit > 0) v.require(secs < limit, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", limit) + " s");
    report(id, title, v, secs);
  };

  timed(1, "LMO oracle equivalence", 1.0, lmo_equivalence);
  timed(2, "MLP gradient vs central differences", 10.0, gradient_check);
  timed(3, "quadratic convergence", 1.0, quadratic_convergence);
  timed(4, "full-batch network training", 300.0, [&] { return full_batch(train_set, test_set); });
  timed(5, "mini-batch network training, batch 200", 300.0, [&] { return stochastic(train_set, test_set); });
  timed(8, "batch = dataset size reproduces full batch", 0.0, [&] { return degenerate_batch(train_set, test_set); });
  timed(6, "Frank-Wolfe feasibility", 0.0, feasibility_suite);
  timed(7, "bitwise determinism", 0.0, [&] { return determinism(train_set, test_set); });

  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of 8 criteria failed, total %.1f s\n", failures, seconds_since(total));
  return failures == 0 ? 0 : 1;
}

#include "fwdeep/experiments.hpp"

#include <system_error>

#include "fwdeep/errors.hpp"
#include "fwdeep/history_io.hpp"
#include "fwdeep/objective.hpp"
#include "fwdeep/svg_plot.hpp"

namespace fwdeep::experiments {

namespace {

constexpr RuleName kAllRules[] = {RuleName::Fixed, RuleName::Prop, RuleName::Decreasing,
                                  RuleName::LineSearch};

StepSizeRule make_rule(RuleName rule, double constant) {
  switch (rule) {
    case RuleName::Fixed: return StepSizeRule::fixed(constant);
    case RuleName::Prop: return StepSizeRule::proportional(constant);
    case RuleName::Decreasing: return StepSizeRule::decreasing();
    case RuleName::LineSearch: return StepSizeRule::line_search();
  }
  throw InvalidInput("unknown rule");
}

// Removes the listed files unless released.
class FileGuard {
 public:
  ~FileGuard() {
    if (armed_) {
      for (const auto& p : files_) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
      }
    }
  }
  void add(const std::filesystem::path& p) { files_.push_back(p); }
  std::vector<std::filesystem::path> release() {
    armed_ = false;
    return files_;
  }

 private:
  std::vector<std::filesystem::path> files_;
  bool armed_ = true;
};

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

}  // namespace

std::string to_string(RuleName rule) {
  switch (rule) {
    case RuleName::Fixed: return "fixed";
    case RuleName::Prop: return "prop";
    case RuleName::Decreasing: return "decreasing";
    case RuleName::LineSearch: return "linesearch";
  }
  return "?";
}

std::optional<RuleName> parse_rule(const std::string& text) {
  for (RuleName r : kAllRules) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::vector<QuadraticRun> run_quadratic(const QuadraticOptions& options) {
  const QuadraticObjective objective(2);
  const L1Ball ball(options.radius);
  const ParamVector x0{0.5, 0.5};
  std::vector<QuadraticRun> runs;
  for (RuleName r : kAllRules) {
    if (options.rule && *options.rule != r) continue;
    runs.push_back({r, fw_run(objective, ball, x0, make_rule(r, options.constant), options.iterations)});
  }
  return runs;
}

std::vector<std::filesystem::path> write_quadratic(const std::vector<QuadraticRun>& runs,
                                                   const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  FileGuard guard;
  std::vector<std::filesystem::path> csvs;
  for (const QuadraticRun& run : runs) {
    const auto path = out_dir / ("quadratic_" + to_string(run.rule) + ".csv");
    guard.add(path);
    write_trajectory_csv(run.trajectory, path);
    csvs.push_back(path);
  }
  const auto svg = out_dir / "quadratic.svg";
  guard.add(svg);
  plot_csv_files(csvs, "iter", "f", {"Frank-Wolfe on x1^2 + x2^2", "iteration", "f(x)", true}, svg);
  return guard.release();
}

std::vector<MethodRun> plan_runs(const TrainSelection& sel) {
  const std::optional<std::size_t> batch =
      sel.stochastic ? std::optional<std::size_t>(sel.batch_size.value_or(200)) : sel.batch_size;

  auto base = [&] {
    TrainConfig c;
    c.batch_size = batch;
    c.seeds = sel.seeds;
    c.use_biases = sel.use_biases;
    if (sel.radius) c.ball = L1Ball(*sel.radius);
    return c;
  };

  std::vector<MethodRun> runs;
  const bool want_gd = sel.method ? *sel.method == Method::GradientDescent : !sel.rule;
  const bool want_fw = sel.method ? *sel.method == Method::FrankWolfe : true;
  if (want_gd && sel.rule) throw InvalidInput("--rule only applies to Frank-Wolfe");

  if (want_gd) {
    TrainConfig c = base();
    c.method = Method::GradientDescent;
    c.learning_rate = sel.learning_rate.value_or(0.1);
    c.penalty = sel.penalty.value_or(0.1);
    c.epochs = sel.epochs.value_or(sel.stochastic ? 100 : 300);
    runs.push_back({"gd", c});
  }
  if (want_fw) {
    for (RuleName r : kAllRules) {
      if (sel.rule && *sel.rule != r) continue;
      // The decreasing rule is left out of the mini-batch comparison.
      if (!sel.rule && sel.stochastic && r == RuleName::Decreasing) continue;
      TrainConfig c = base();
      c.method = Method::FrankWolfe;
      double constant = sel.stochastic ? 1e-4 : (r == RuleName::Fixed ? 3e-3 : 3e-2);
      if (sel.constant) constant = *sel.constant;
      c.rule = make_rule(r, constant);
      const bool slow_rule = r == RuleName::Fixed || r == RuleName::Prop;
      c.epochs = sel.epochs.value_or(sel.stochastic ? 100 : (slow_rule ? 2000 : 300));
      runs.push_back({"fw_" + to_string(r), c});
    }
  }
  for (const MethodRun& run : runs) run.config.validate();
  return runs;
}

std::vector<TrainOutcome> run_and_write(const std::vector<MethodRun>& runs, const Dataset& train_set,
                                        const Dataset& test_set, const std::filesystem::path& out_dir,
                                        bool record_wall_time, const Progress& progress) {
  ensure_dir(out_dir);
  FileGuard guard;
  std::vector<TrainOutcome> outcomes;
  std::vector<std::filesystem::path> csvs;
  for (const MethodRun& run : runs) {
    EpochCallback cb;
    if (progress) cb = [&](const EpochRecord& r) { progress(run, r); };
    RunHistory history = train(run.config, train_set, test_set, cb);
    const auto path = out_dir / (run.name + ".csv");
    guard.add(path);
    write_history_csv(history, path, record_wall_time);
    csvs.push_back(path);
    outcomes.push_back({run, std::move(history)});
  }
  const auto svg = out_dir / "accuracy.svg";
  guard.add(svg);
  plot_csv_files(csvs, "epoch", "test_acc", {"Test accuracy", "epoch", "test accuracy", false}, svg);
  guard.release();
  return outcomes;
}

}  // namespace fwdeep::experiments

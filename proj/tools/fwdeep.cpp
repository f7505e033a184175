// Command-line front end for the quadratic benchmark and the network experiments.

#include <cstdio>
#include <exception>
#include <limits>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwdeep/dataset.hpp"
#include "fwdeep/errors.hpp"
#include "fwdeep/experiments.hpp"
#include "fwdeep/history_io.hpp"
#include "fwdeep/svg_plot.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace fwdeep;
using namespace fwdeep::experiments;

namespace {

struct TrainFlags {
  std::string method;
  std::string rule;
  std::optional<double> constant;
  std::optional<double> lr;
  std::optional<double> penalty;
  std::optional<double> radius;
  std::optional<int> epochs;
  std::string batch;
  Seeds seeds;
  std::string out = "out";
  std::string train_data;
  std::string test_data;
  bool no_wall_time = false;
  bool no_biases = false;
  bool batch_sweep = false;
  int log_every = 0;
};

const std::vector<std::string> kRules{"fixed", "prop", "decreasing", "linesearch"};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool stochastic) {
  cmd->add_option("--method", f.method, "Restrict to one method")->check(CLI::IsMember({"gd", "fw"}));
  cmd->add_option("--rule", f.rule, "Frank-Wolfe step-size rule (implies --method fw)")
      ->check(CLI::IsMember(kRules));
  cmd->add_option("--constant", f.constant, "Constant C of the fixed/prop rules")
      ->check(CLI::Range(0.0, 1e6));
  cmd->add_option("--lr", f.lr, "Gradient-descent learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--penalty", f.penalty,
                  "L1 penalty weight for gradient descent (objective sum_n r_n^2 + penalty |w|_1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--radius", f.radius, "L1-ball radius for Frank-Wolfe [10]")->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", f.epochs, "Epoch budget for every run (default: per method)")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  cmd->add_option("--batch", f.batch,
                  stochastic ? "Mini-batch size or 'full' [200]" : "'full' or a mini-batch size [full]");
  cmd->add_option("--seed-init", f.seeds.init, "Parameter initialization seed [1]");
  cmd->add_option("--seed-train", f.seeds.train, "Training-set seed [42]");
  cmd->add_option("--seed-test", f.seeds.test, "Test-set seed [43]");
  cmd->add_option("--seed-shuffle", f.seeds.shuffle, "Mini-batch shuffle seed [11]");
  cmd->add_option("--train-data", f.train_data, "Load the training set from CSV instead of generating it")
      ->check(CLI::ExistingFile);
  cmd->add_option("--test-data", f.test_data, "Load the test set from CSV instead of generating it")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory [out]");
  cmd->add_flag("--no-wall-time", f.no_wall_time, "Write 0 in the ms column (byte-reproducible CSV)");
  cmd->add_flag("--no-biases", f.no_biases, "Train a network with all biases pinned at zero");
  cmd->add_option("--log-every", f.log_every, "Print progress every N epochs (0: summary only)")
      ->check(CLI::NonNegativeNumber);
  if (stochastic) {
    cmd->add_flag("--batch-sweep", f.batch_sweep,
                  "Run batch sizes 100, 200 and 500 into <out>/batch_<n>");
  }
}

std::optional<std::size_t> parse_batch(const std::string& text, bool stochastic) {
  if (text.empty()) return stochastic ? std::optional<std::size_t>(200) : std::nullopt;
  if (text == "full") return std::nullopt;
  std::size_t pos = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
  }
  if (pos != text.size() || v < 1) throw CLI::ValidationError("--batch", "expected 'full' or a positive integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

int run_train(const TrainFlags& f, bool stochastic) {
  const Dataset train_set =
      f.train_data.empty() ? generate(1000, f.seeds.train) : load_csv(f.train_data);
  const Dataset test_set = f.test_data.empty() ? generate(1000, f.seeds.test) : load_csv(f.test_data);

  TrainSelection sel;
  sel.stochastic = stochastic;
  sel.seeds = f.seeds;
  sel.use_biases = !f.no_biases;
  if (!f.method.empty()) sel.method = f.method == "gd" ? Method::GradientDescent : Method::FrankWolfe;
  if (!f.rule.empty()) sel.rule = parse_rule(f.rule);
  sel.constant = f.constant;
  if (f.constant && *f.constant > 1.0 && (!sel.rule || *sel.rule == RuleName::Fixed)) {
    throw CLI::ValidationError("--constant", "the fixed step size must lie in [0, 1]");
  }
  sel.learning_rate = f.lr;
  sel.penalty = f.penalty;
  sel.radius = f.radius;
  sel.epochs = f.epochs;

  std::vector<std::pair<fs::path, std::optional<std::size_t>>> jobs;
  if (f.batch_sweep) {
    for (std::size_t b : {100, 200, 500}) jobs.emplace_back(fs::path(f.out) / ("batch_" + std::to_string(b)), b);
  } else {
    std::optional<std::size_t> batch = parse_batch(f.batch, stochastic);
    // 'full' in mini-batch mode means one batch holding the whole training set.
    if (stochastic && !batch) batch = train_set.size();
    jobs.emplace_back(fs::path(f.out), batch);
  }

  for (const auto& [dir, batch] : jobs) {
    sel.batch_size = batch;
    const std::vector<MethodRun> runs = plan_runs(sel);
    const Progress progress = [&](const MethodRun& run, const EpochRecord& r) {
      if (f.log_every > 0 && r.epoch % f.log_every == 0) {
        std::fprintf(stderr, "%-14s epoch %5d  loss %.5f  test_acc %.3f  l1 %.4f\n", run.name.c_str(),
                     r.epoch, r.train_loss, r.test_accuracy, r.l1_norm);
      }
    };
    const auto outcomes = run_and_write(runs, train_set, test_set, dir, !f.no_wall_time, progress);
    for (const TrainOutcome& o : outcomes) {
      const EpochRecord& last = o.history.records.back();
      double best = 0.0;
      for (const EpochRecord& r : o.history.records) best = std::max(best, r.test_accuracy);
      std::printf("%s/%s.csv  epochs %d  final test_acc %.3f  best %.3f  l1 %.4f\n", dir.string().c_str(),
                  o.run.name.c_str(), last.epoch, last.test_accuracy, best, last.l1_norm);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe over the L1 ball: quadratic benchmark and small-network training"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads for the network kernels (0: runtime default)")
      ->check(CLI::NonNegativeNumber);

  QuadraticOptions qopt;
  std::string qrule;
  std::string qout = "out";
  auto* quad = app.add_subcommand("quadratic", "Minimize x1^2 + x2^2 from (0.5, 0.5) with each step-size rule");
  quad->add_option("--radius", qopt.radius, "L1-ball radius [1]")->check(CLI::PositiveNumber);
  quad->add_option("--iterations", qopt.iterations, "Frank-Wolfe iterations [1000]")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  quad->add_option("--rule", qrule, "Run a single rule")->check(CLI::IsMember(kRules));
  quad->add_option("--constant", qopt.constant, "Constant of the fixed/prop rules [0.1]")
      ->check(CLI::Range(0.0, 1e6));
  quad->add_option("--out", qout, "Output directory [out]");

  TrainFlags full_flags;
  auto* full = app.add_subcommand("train-full", "Full-batch GD and Frank-Wolfe on the circle data");
  add_train_flags(full, full_flags, false);

  TrainFlags sto_flags;
  auto* sto = app.add_subcommand("train-stochastic", "Mini-batch SGD and Frank-Wolfe on the circle data");
  add_train_flags(sto, sto_flags, true);

  std::size_t gen_n = 1000;
  Seeds gen_seeds;
  std::string gen_out = "data";
  auto* gen = app.add_subcommand("gen-data", "Write train.csv and test.csv");
  gen->add_option("--n", gen_n, "Points per set [1000]")->check(CLI::PositiveNumber);
  gen->add_option("--seed-train", gen_seeds.train, "Training-set seed [42]");
  gen->add_option("--seed-test", gen_seeds.test, "Test-set seed [43]");
  gen->add_option("--out", gen_out, "Output directory [data]");

  std::vector<std::string> plot_inputs;
  std::string plot_output = "plot.svg";
  std::string plot_x;
  std::string plot_y;
  PlotOptions plot_opts;
  auto* plot = app.add_subcommand("plot", "Render history or trajectory CSVs as an SVG line chart");
  plot->add_option("csv", plot_inputs, "Input CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--output", plot_output, "SVG file to write [plot.svg]");
  plot->add_option("--x", plot_x, "x column [epoch or iter]");
  plot->add_option("--y", plot_y, "y column [test_acc or f]");
  plot->add_flag("--log-y", plot_opts.log_y, "Logarithmic y axis");
  plot->add_option("--title", plot_opts.title, "Chart title");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*quad) {
      if (!qrule.empty()) qopt.rule = parse_rule(qrule);
      if (qopt.constant > 1.0 && (!qopt.rule || *qopt.rule == RuleName::Fixed)) {
        throw CLI::ValidationError("--constant", "the fixed step size must lie in [0, 1]");
      }
      const auto runs = run_quadratic(qopt);
      for (const auto& p : write_quadratic(runs, qout)) std::printf("%s\n", p.string().c_str());
      for (const auto& r : runs) {
        std::printf("%-10s f(x_%d) = %.3e\n", to_string(r.rule).c_str(), qopt.iterations,
                    r.trajectory.back().value);
      }
      return 0;
    }
    if (*full) return run_train(full_flags, false);
    if (*sto) return run_train(sto_flags, true);
    if (*gen) {
      fs::create_directories(gen_out);
      save_csv(generate(gen_n, gen_seeds.train), fs::path(gen_out) / "train.csv");
      save_csv(generate(gen_n, gen_seeds.test), fs::path(gen_out) / "test.csv");
      std::printf("%s\n%s\n", (fs::path(gen_out) / "train.csv").string().c_str(),
                  (fs::path(gen_out) / "test.csv").string().c_str());
      return 0;
    }
    if (*plot) {
      std::vector<fs::path> paths(plot_inputs.begin(), plot_inputs.end());
      // Default columns follow the first file's format.
      const CsvTable head = read_csv(paths.front());
      const bool trajectory =
          std::find(head.columns.begin(), head.columns.end(), "iter") != head.columns.end();
      if (plot_x.empty()) plot_x = trajectory ? "iter" : "epoch";
      if (plot_y.empty()) plot_y = trajectory ? "f" : "test_acc";
      plot_opts.x_label = plot_x;
      plot_opts.y_label = plot_y;
      plot_csv_files(paths, plot_x, plot_y, plot_opts, plot_output);
      std::printf("%s\n", plot_output.c_str());
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

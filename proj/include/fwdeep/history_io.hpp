#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fwdeep/fw_core.hpp"
#include "fwdeep/trainers.hpp"

namespace fwdeep {

inline constexpr const char* kHistoryHeader = "epoch,train_loss,test_acc,gamma,gap,l1norm,ms";
inline constexpr const char* kTrajectoryHeader = "iter,f,gamma,gap,x1,x2";

/// Per-epoch training log. Absent gamma/gap (gradient descent) are empty fields.
/// With `record_wall_time` false the ms column is written as 0 so repeated runs
/// produce byte-identical files.
void write_history_csv(const RunHistory& history, const std::filesystem::path& path,
                       bool record_wall_time = true);

/// Per-iteration log of a two-dimensional Frank-Wolfe run.
void write_trajectory_csv(const std::vector<FwRecord>& trajectory, const std::filesystem::path& path);

/// Numeric CSV with a header row; empty fields are std::nullopt.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;

  /// Index of a column; throws InvalidInput when absent.
  std::size_t column(const std::string& name) const;
};

/// Throws ParseError naming the file and line on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

/// 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

}  // namespace fwdeep

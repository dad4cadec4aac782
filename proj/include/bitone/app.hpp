#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitone/energy.hpp"
#include "bitone/image.hpp"
#include "bitone/optimizer.hpp"
#include "bitone/tonemap.hpp"

namespace bitone::app {

inline constexpr int kSchemaVersion = 1;

// Everything the command line can change. metric.weights is the single
// source for (lambda1, lambda2); the optimizer copy is overwritten from it.
struct Settings {
  ToneMapParams tonemap;
  MetricConfig metric;
  OptimizerConfig optimizer;
  unsigned threads = 0;  // 0: one worker per hardware thread
  bool report_timing = false;

  OptimizerConfig effective_optimizer() const;
  void validate() const;
};

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string input;
  BetaPair beta;
  EnergyBreakdown energy;
  double baseline_beta = 0.0;
  EnergyBreakdown baseline_energy;
  int iterations = 0;
  int stage1_iterations = 0;
  int stage2_iterations = 0;
  bool converged = false;
  std::optional<double> seconds_per_iteration;
  double detail_swap_delta = 0.0;
  std::map<std::string, std::string> outputs;  // role -> file name
  std::vector<std::string> warnings;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);
std::string serialize(const RunReport& r);
RunReport parse_report(const std::string& text);

// In-memory result of optimizing one image; the views are ordered with the
// lower beta on the left and the energies refer to that order.
struct OptimizedImage {
  BinocularPair pair;
  LdrImage baseline;
  RunReport report;
  std::vector<TrajectoryStep> trajectory;
};

OptimizedImage optimize_image(const HdrImage& img, const std::string& label,
                              const Settings& settings);

// Writes left.png, right.png, side_by_side.png, anaglyph.png, report.json and
// trajectory.jsonl into out_dir (created if missing).
RunReport cmd_optimize(const std::filesystem::path& input,
                       const std::filesystem::path& out_dir,
                       const Settings& settings);

// contrast_ref.png (beta 6) and detail_ref.png (beta 1.5).
References cmd_refs(const std::filesystem::path& input,
                    const std::filesystem::path& out_dir,
                    const Settings& settings = {});

// The monocular midpoint image T(img, (beta_l + beta_r) / 2).
LdrImage midpoint_view(const HdrImage& img, double beta_l, double beta_r,
                       const Settings& settings = {});
LdrImage cmd_baseline(const std::filesystem::path& input, double beta_l,
                      double beta_r, const std::filesystem::path& out,
                      const Settings& settings = {});

struct Evaluation {
  EnergyBreakdown energy;
  double detail_swap_delta = 0.0;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const Evaluation& e);

// References and edges come from the HDR image; the views are scored as given.
Evaluation cmd_evaluate(const HdrImage& img, const LdrImage& left,
                        const LdrImage& right, const Settings& settings = {});
Evaluation cmd_evaluate(const std::filesystem::path& input,
                        const std::filesystem::path& left,
                        const std::filesystem::path& right,
                        const Settings& settings = {});

struct BatchRow {
  std::string file;
  double beta_l = 0.0;
  double beta_r = 0.0;
  double e_c = 0.0;
  double e_d = 0.0;
  double e_f = 0.0;
  double e = 0.0;
  double e_c_im = 0.0;
  double e_d_im = 0.0;
  double e_im = 0.0;
  double iterations = 0.0;
  double sec_per_iter = 0.0;
};

struct BatchResult {
  std::vector<BatchRow> rows;  // sorted by file name
  BatchRow mean;
  std::vector<std::string> failures;  // "file: reason"
};

bool is_hdr_path(const std::filesystem::path& p);
BatchRow mean_row(const std::vector<BatchRow>& rows);
void write_batch_csv(const BatchResult& result, std::ostream& out);

// Throws InputError if the directory holds no readable HDR image.
BatchResult cmd_batch(const std::filesystem::path& input_dir,
                      const std::filesystem::path& out_csv,
                      const Settings& settings, std::ostream& log);

// Prints the failure to `err` and returns the process exit code: 2 for a
// numerical abort, 1 for anything else.
int report_failure(const std::exception& e, std::ostream& err);

}  // namespace bitone::app

// Command-line front end. Exit codes: 0 success, 1 input error, 2 numerical
// abort.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "bitone/app.hpp"

namespace {

using bitone::app::Settings;

void add_metric_flags(CLI::App& cmd, Settings& s) {
  auto& m = s.metric;
  cmd.add_option("--lambda1", m.weights.lambda1, "Detail term weight")
      ->capture_default_str();
  cmd.add_option("--lambda2", m.weights.lambda2, "Fusibility term weight")
      ->capture_default_str();
  cmd.add_option("--fusion-radius", m.fusion.fusion_radius,
                 "Brightness averaging radius in pixels")
      ->capture_default_str();
  cmd.add_option("--alpha", m.fusion.alpha_degrees,
                 "Brightness fusion phase in degrees")
      ->capture_default_str();
  cmd.add_option("--theta-cf", m.thresholds.theta_cf,
                 "Contour contrast mismatch threshold")
      ->capture_default_str();
  cmd.add_option("--theta-rf", m.thresholds.theta_rf,
                 "Region brightness difference threshold")
      ->capture_default_str();
  cmd.add_option("--canny-sigma", m.canny.sigma, "Canny smoothing sigma")
      ->capture_default_str();
  cmd.add_option("--canny-low", m.canny.low_frac,
                 "Canny low threshold, fraction of the peak gradient")
      ->capture_default_str();
  cmd.add_option("--canny-high", m.canny.high_frac,
                 "Canny high threshold, fraction of the peak gradient")
      ->capture_default_str();
}

void add_common_flags(CLI::App& cmd, Settings& s) {
  add_metric_flags(cmd, s);
  cmd.add_option("--beta-min", s.optimizer.beta_min, "Lower beta bound")
      ->capture_default_str();
  cmd.add_option("--beta-max", s.optimizer.beta_max, "Upper beta bound")
      ->capture_default_str();
  cmd.add_option("--threads", s.threads,
                 "Batch worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  cmd.add_flag("--exact-bilateral", s.tonemap.exact_bilateral,
               "Use the exact bilateral filter (slow)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binocular tone mapping: optimize an LDR stereo pair for an HDR image"};
  app.require_subcommand(1);
  Settings s;

  std::string input, out, left, right;
  double beta_l = 0.0, beta_r = 0.0;

  auto* optimize = app.add_subcommand("optimize", "Optimize a stereo pair");
  optimize->add_option("input", input, "HDR image (.hdr or .pfm)")->required();
  optimize->add_option("out_dir", out, "Output directory")->required();
  optimize->add_flag("--report-timing", s.report_timing,
                     "Record seconds per iteration in report.json");
  add_common_flags(*optimize, s);

  auto* refs = app.add_subcommand("refs", "Write the contrast and detail references");
  refs->add_option("input", input, "HDR image")->required();
  refs->add_option("out_dir", out, "Output directory")->required();
  add_common_flags(*refs, s);

  auto* baseline = app.add_subcommand("baseline", "Write the monocular midpoint image");
  baseline->add_option("input", input, "HDR image")->required();
  baseline->add_option("beta_l", beta_l, "Left beta")->required();
  baseline->add_option("beta_r", beta_r, "Right beta")->required();
  baseline->add_option("out", out, "Output image (.png or .ppm)")->required();
  add_common_flags(*baseline, s);

  auto* evaluate = app.add_subcommand("evaluate", "Score an LDR pair against an HDR image");
  evaluate->add_option("input", input, "HDR image")->required();
  evaluate->add_option("left", left, "Left view (.png or .ppm)")->required();
  evaluate->add_option("right", right, "Right view (.png or .ppm)")->required();
  add_common_flags(*evaluate, s);

  auto* batch = app.add_subcommand("batch", "Optimize every HDR image in a directory");
  batch->add_option("input_dir", input, "Directory of HDR images")->required();
  batch->add_option("out_csv", out, "CSV table to write")->required();
  add_common_flags(*batch, s);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*optimize) {
      const auto r = bitone::app::cmd_optimize(input, out, s);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "beta_l=" << r.beta.left << " beta_r=" << r.beta.right
                << " E=" << r.energy.e_total
                << " E(I_M)=" << r.baseline_energy.e_total << '\n';
    } else if (*refs) {
      bitone::app::cmd_refs(input, out, s);
    } else if (*baseline) {
      bitone::app::cmd_baseline(input, beta_l, beta_r, out, s);
    } else if (*evaluate) {
      const auto e = bitone::app::cmd_evaluate(input, left, right, s);
      for (const auto& w : e.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << nlohmann::json(e).dump(2) << '\n';
    } else if (*batch) {
      const auto b = bitone::app::cmd_batch(input, out, s, std::cerr);
      std::cout << b.rows.size() << " images, mean E=" << b.mean.e
                << " mean E(I_M)=" << b.mean.e_im << '\n';
    }
  } catch (const std::exception& e) {
    return bitone::app::report_failure(e, std::cerr);
  }
  return 0;
}

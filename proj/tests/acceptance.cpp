// Acceptance suite: prints one PASS/FAIL line per criterion followed by the
// measured numbers, and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bitone/app.hpp"
#include "bitone/image_io.hpp"
#include "bitone/optimizer.hpp"
#include "bitone/perception.hpp"
#include "bitone/tonemap.hpp"
#include "test_support.hpp"

using namespace bitone;
using namespace bitone::test;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void verdict(int n, const std::string& title, bool pass,
             const std::vector<std::string>& details) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title
            << '\n';
  for (const auto& d : details) std::cout << "    " << d << '\n';
  std::cout.flush();
  if (!pass) ++failures;
}

struct ImageRun {
  std::string name;
  std::unique_ptr<PairEvaluator> evaluator;
  OptimizationResult result;
  double baseline_energy = 0;
  GridResult grid;
  double optimize_seconds = 0;
  double grid_seconds = 0;
};

std::vector<ImageRun> run_corpus() {
  std::vector<ImageRun> runs;
  for (const auto& file : corpus_files()) {
    ImageRun r;
    r.name = file.filename().string();
    const auto t0 = Clock::now();
    r.evaluator = std::make_unique<PairEvaluator>(load_hdr(file), ToneMapParams{},
                                                  MetricConfig{});
    r.result = optimize(*r.evaluator, OptimizerConfig{});
    r.optimize_seconds = seconds_since(t0);
    const double mid = 0.5 * (r.result.best_beta.left + r.result.best_beta.right);
    r.baseline_energy = r.evaluator->energy({mid, mid}).e_total;
    const auto t1 = Clock::now();
    r.grid = grid_search(*r.evaluator, 0.25);
    r.grid_seconds = seconds_since(t1);
    runs.push_back(std::move(r));
  }
  return runs;
}

void criterion1() {
  std::vector<std::string> details;
  int good = 0, total = 0;
  for (const auto& file : corpus_files()) {
    const auto t0 = Clock::now();
    const auto img = load_hdr(file);
    const auto refs = make_references(img);
    const auto dd = app::cmd_evaluate(img, refs.detail, refs.detail).energy;
    const auto cc = app::cmd_evaluate(img, refs.contrast, refs.contrast).energy;
    const double secs = seconds_since(t0);
    const bool ok = dd.e_c >= 0.98 && dd.e_c <= 1.0 && dd.e_d == 0.0 &&
                    dd.e_total >= 0.98 && dd.e_total <= 1.0 && cc.e_c <= 1e-3 &&
                    cc.e_d >= 0.98 && cc.e_d <= 1.0 && cc.e_total >= 1.225 &&
                    cc.e_total <= 1.25;
    ++total;
    good += ok;
    details.push_back(file.filename().string() + ": {I_D,I_D} E_c=" +
                      fixed(dd.e_c) + " E_d=" + sci(dd.e_d) + " E=" +
                      fixed(dd.e_total) + " | {I_C,I_C} E_c=" + sci(cc.e_c) +
                      " E_d=" + fixed(cc.e_d) + " E=" + fixed(cc.e_total) +
                      " | " + fixed(secs, 2) + " s" + (ok ? "" : "  <-- out of range"));
  }
  details.push_back(std::to_string(good) + "/" + std::to_string(total) +
                    " images reproduce both identity rows");
  verdict(1, "reference identity rows", good == total && total >= 3, details);
}

void criterion2(const std::vector<ImageRun>& runs) {
  std::vector<std::string> details;
  bool all_better = true;
  double sum = 0;
  for (const auto& r : runs) {
    const double e = r.result.best_energy.e_total;
    const double imp = (r.baseline_energy - e) / r.baseline_energy;
    sum += imp;
    const bool better = e < r.baseline_energy;
    all_better = all_better && better;
    details.push_back(r.name + ": E=" + fixed(e) + " E(I_M)=" +
                      fixed(r.baseline_energy) + " improvement " +
                      fixed(100 * imp, 1) + "%" + (better ? "" : "  <-- not below"));
  }
  const double mean = sum / static_cast<double>(runs.size());
  details.push_back("mean improvement " + fixed(100 * mean, 1) + "% (need >= 5%)");
  verdict(2, "optimized pair beats the monocular midpoint",
          all_better && mean >= 0.05, details);
}

void criterion3(const std::vector<ImageRun>& runs) {
  std::vector<std::string> details;
  bool ok = true;
  for (const auto& r : runs) {
    const double e = r.result.best_energy.e_total;
    const double ratio = e / r.grid.energy;
    const bool pass = e <= 1.02 * r.grid.energy;
    ok = ok && pass;
    details.push_back(r.name + ": E=" + fixed(e) + " at (" +
                      fixed(r.result.best_beta.left, 3) + ", " +
                      fixed(r.result.best_beta.right, 3) + "), grid E=" +
                      fixed(r.grid.energy) + " at (" + fixed(r.grid.best.left, 2) +
                      ", " + fixed(r.grid.best.right, 2) + "), ratio " +
                      fixed(ratio, 4) + ", optimize " + fixed(r.optimize_seconds, 1) +
                      " s, grid " + fixed(r.grid_seconds, 1) + " s" +
                      (pass ? "" : "  <-- more than 2% above the grid"));
  }
  verdict(3, "within 2% of the 0.25-step grid minimum", ok, details);
}

void criterion4(const std::vector<ImageRun>& runs) {
  std::vector<std::string> details;
  int fast = 0;
  bool all_within = true;
  for (const auto& r : runs) {
    const auto& o = r.result;
    const bool quick = o.converged && o.stage2_iterations <= 30;
    fast += quick;
    all_within = all_within && o.converged && o.iterations_used <= 60;
    details.push_back(r.name + ": stage1 " + std::to_string(o.stage1_iterations) +
                      ", stage2 " + std::to_string(o.stage2_iterations) +
                      ", total " + std::to_string(o.iterations_used) +
                      (o.converged ? ", converged" : ", NOT converged"));
  }
  const double share = static_cast<double>(fast) / static_cast<double>(runs.size());
  details.push_back(std::to_string(fast) + "/" + std::to_string(runs.size()) +
                    " converged within 30 stage-2 iterations (need >= 80%)");
  verdict(4, "convergence", share >= 0.8 && all_within, details);
}

void criterion5() {
  const auto img = upsample_bilinear(load_hdr(corpus_dir() / "astronaut.hdr"), 800, 600);
  const PairEvaluator ev(img, ToneMapParams{}, MetricConfig{});
  std::vector<double> t;
  for (int i = 0; i < 5; ++i) t.push_back(ev.time_full_evaluation({2.0, 5.0}));
  std::sort(t.begin(), t.end());
  const double median = t[2];
  verdict(5, "one iteration at 800x600 within 2.5 s", median <= 2.5,
          {"tone-map both views + full energy, single thread: median " +
           fixed(median, 3) + " s over 5 runs (min " + fixed(t.front(), 3) +
           ", max " + fixed(t.back(), 3) + ")"});
}

void criterion6(const std::vector<ImageRun>& runs) {
  std::vector<std::string> details;
  bool ok = true;
  for (const auto& r : runs) {
    const double ef = r.result.best_energy.e_f;
    const bool pass = ef <= 1e-3;
    ok = ok && pass;
    details.push_back(r.name + ": E_f=" + sci(ef) + (pass ? "" : "  <-- above 1e-3"));
  }
  verdict(6, "optimized pairs are fusible (E_f <= 1e-3)", ok, details);
}

void criterion7() {
  Rng rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  const FusionParams p;
  double worst_b = 0, worst_c = 0;
  int identity_fail = 0, envelope_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    const double l = unit(rng), r = unit(rng);
    const double fb = fuse_brightness(l, r, p.alpha_degrees);
    const double ob = hp_fuse_brightness(l, r, p.alpha_degrees);
    worst_b = std::max(worst_b, std::abs(fb - ob) / ob);
    if (fuse_brightness(l, l, p.alpha_degrees) != l) ++identity_fail;
    if (fb < std::min(l, r) || fb > std::max(l, r)) ++envelope_fail;

    const double cl = pct(rng), cr = pct(rng);
    const double fc = fuse_contrast(cl, cr, p);
    const double oc = hp_fuse_contrast(cl, cr, p.s, p.t, p.z);
    worst_c = std::max(worst_c, std::abs(fc - oc) / oc);
  }
  verdict(7, "scalar fusion models match the high-precision oracle",
          worst_b <= 1e-9 && worst_c <= 1e-9 && identity_fail == 0 &&
              envelope_fail == 0,
          {"brightness fusion: worst relative error " + sci(worst_b) + " on 10^4 pairs",
           "contrast fusion: worst relative error " + sci(worst_c) + " on 10^4 pairs",
           "fuse(b,b) != b: " + std::to_string(identity_fail) +
               ", envelope violations: " + std::to_string(envelope_fail)});
}

void criterion8() {
  std::vector<std::string> details;
  bool ok = true;
  for (const auto& file : corpus_files()) {
    const auto logy = log_luminance(load_hdr(file));
    const double ss = ToneMapParams{}.sigma_space_for(logy.width(), logy.height());
    const auto exact = bilateral_exact(logy, ss, 0.4);
    const auto fast = bilateral_fast(logy, ss, 0.4);
    const double p = psnr(exact, fast);
    const double m = max_abs_difference(exact, fast);
    const bool pass = p >= 40.0 && m <= 0.05;
    ok = ok && pass;
    details.push_back(file.filename().string() + ": PSNR " + fixed(p, 1) +
                      " dB, max error " + fixed(m, 4) + (pass ? "" : "  <-- out of range"));
  }
  Rng rng(77);
  int cc_mismatch = 0, lb_mismatch = 0;
  double lb_worst_real = 0;
  for (int i = 0; i < 100; ++i) {
    const auto real = random_luminance(rng, 16, 16);
    if (!(contour_contrast(real) == naive_contour_contrast(real))) ++cc_mismatch;
    const auto dyadic = dyadic_luminance(rng, 16, 16);
    for (int radius : {1, 4, 16})
      if (!(local_brightness(dyadic, radius) == naive_local_brightness(dyadic, radius)))
        ++lb_mismatch;
    const auto a = local_brightness(real, 16);
    const auto b = naive_local_brightness(real, 16);
    lb_worst_real = std::max(lb_worst_real, max_abs_difference(a, b));
  }
  ok = ok && cc_mismatch == 0 && lb_mismatch == 0 && lb_worst_real <= 1e-12;
  details.push_back("contour_contrast vs naive 3x3 scan: " +
                    std::to_string(cc_mismatch) + "/100 random 16x16 images differ");
  details.push_back("local_brightness vs naive disc mean, bitwise on k/1024-valued "
                    "images: " + std::to_string(lb_mismatch) + "/300 differ");
  details.push_back("local_brightness vs naive disc mean on uniform reals: worst |diff| " +
                    sci(lb_worst_real) + " (summation order only)");
  verdict(8, "filter and feature equivalence", ok, details);
}

void criterion9() {
  std::vector<std::string> details;
  bool ok = true;
  for (const char* name : {"window.hdr", "sunset.pfm"}) {
    TempDir a, b;
    const auto input = corpus_dir() / name;
    app::cmd_optimize(input, a.path(), app::Settings{});
    app::cmd_optimize(input, b.path(), app::Settings{});
    const bool same_report =
        read_file(a / "report.json") == read_file(b / "report.json");
    const bool same_traj =
        read_file(a / "trajectory.jsonl") == read_file(b / "trajectory.jsonl");
    ok = ok && same_report && same_traj;
    details.push_back(std::string(name) + ": report.json " +
                      (same_report ? "identical" : "DIFFERS") + ", trajectory.jsonl " +
                      (same_traj ? "identical" : "DIFFERS"));
  }
  verdict(9, "byte-identical reruns", ok, details);
}

}  // namespace

int main() {
  try {
    std::cout << "corpus: " << corpus_files().size() << " images in "
              << corpus_dir().string() << "\n";
    criterion1();
    const auto t0 = Clock::now();
    const auto runs = run_corpus();
    std::cout << "(optimized and grid-searched the corpus in "
              << fixed(seconds_since(t0), 1) << " s)\n";
    criterion2(runs);
    criterion3(runs);
    criterion4(runs);
    criterion5();
    criterion6(runs);
    criterion7();
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance harness aborted: " << e.what() << '\n';
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}

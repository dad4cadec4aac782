#include "bitone/app.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <thread>

#include "bitone/image_io.hpp"

namespace bitone::app {

namespace fs = std::filesystem;

namespace {

const char* const kNoEdgesWarning =
    "detail reference has no usable edge pixels; E_d is 0 for every pair";

std::vector<std::string> model_warnings(const EnergyModel& model) {
  if (model.detail_degenerate()) return {kNoEdgesWarning};
  return {};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw InputError("cannot create directory '" + dir.string() + "'");
}

void check_beta(double beta, const Settings& s) {
  const auto& o = s.optimizer;
  if (!(beta >= o.beta_min))
    throw InputError("beta " + std::to_string(beta) + " below bound " +
                     std::to_string(o.beta_min));
  if (!(beta <= o.beta_max))
    throw InputError("beta " + std::to_string(beta) + " above bound " +
                     std::to_string(o.beta_max));
}

}  // namespace

OptimizerConfig Settings::effective_optimizer() const {
  OptimizerConfig c = optimizer;
  c.weights = metric.weights;
  return c;
}

void Settings::validate() const {
  tonemap.validate();
  metric.validate();
  effective_optimizer().validate();
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json{{"schema_version", r.schema_version},
                     {"input", r.input},
                     {"beta_l", r.beta.left},
                     {"beta_r", r.beta.right},
                     {"energy", r.energy},
                     {"baseline_beta", r.baseline_beta},
                     {"baseline_energy", r.baseline_energy},
                     {"iterations", r.iterations},
                     {"stage1_iterations", r.stage1_iterations},
                     {"stage2_iterations", r.stage2_iterations},
                     {"converged", r.converged},
                     {"detail_swap_delta", r.detail_swap_delta},
                     {"outputs", r.outputs},
                     {"warnings", r.warnings}};
  if (r.seconds_per_iteration)
    j["seconds_per_iteration"] = *r.seconds_per_iteration;
}

void from_json(const nlohmann::json& j, RunReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  if (r.schema_version != kSchemaVersion)
    throw InputError("unsupported report schema_version " +
                     std::to_string(r.schema_version));
  j.at("input").get_to(r.input);
  j.at("beta_l").get_to(r.beta.left);
  j.at("beta_r").get_to(r.beta.right);
  j.at("energy").get_to(r.energy);
  j.at("baseline_beta").get_to(r.baseline_beta);
  j.at("baseline_energy").get_to(r.baseline_energy);
  j.at("iterations").get_to(r.iterations);
  j.at("stage1_iterations").get_to(r.stage1_iterations);
  j.at("stage2_iterations").get_to(r.stage2_iterations);
  j.at("converged").get_to(r.converged);
  j.at("detail_swap_delta").get_to(r.detail_swap_delta);
  j.at("outputs").get_to(r.outputs);
  j.at("warnings").get_to(r.warnings);
  if (auto it = j.find("seconds_per_iteration"); it != j.end())
    r.seconds_per_iteration = it->get<double>();
  else
    r.seconds_per_iteration.reset();
}

std::string serialize(const RunReport& r) {
  return nlohmann::json(r).dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<RunReport>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

OptimizedImage optimize_image(const HdrImage& img, const std::string& label,
                              const Settings& settings) {
  settings.validate();
  const OptimizerConfig config = settings.effective_optimizer();
  const PairEvaluator evaluator(img, settings.tonemap, settings.metric);
  OptimizationResult result = optimize(evaluator, config);

  OptimizedImage out{order_views(result.best_pair), LdrImage(), {}, {}};
  const BetaPair ordered{out.pair.beta_left, out.pair.beta_right};
  RunReport& r = out.report;
  r.input = label;
  r.beta = ordered;
  r.energy = evaluator.energy(ordered);
  r.baseline_beta = 0.5 * (ordered.left + ordered.right);
  r.baseline_energy = evaluator.energy({r.baseline_beta, r.baseline_beta});
  r.iterations = result.iterations_used;
  r.stage1_iterations = result.stage1_iterations;
  r.stage2_iterations = result.stage2_iterations;
  r.converged = result.converged;
  if (settings.report_timing)
    r.seconds_per_iteration = result.seconds_per_iteration;
  r.detail_swap_delta = evaluator.model().detail_swap_delta(
      *evaluator.features(ordered.left), *evaluator.features(ordered.right));
  r.warnings = model_warnings(evaluator.model());

  out.baseline = evaluator.view(r.baseline_beta);
  out.trajectory = std::move(result.trajectory);
  return out;
}

RunReport cmd_optimize(const fs::path& input, const fs::path& out_dir,
                       const Settings& settings) {
  const HdrImage img = load_hdr(input);
  OptimizedImage o = optimize_image(img, input.string(), settings);
  ensure_directory(out_dir);

  RunReport& r = o.report;
  r.outputs = {{"left", "left.png"},
               {"right", "right.png"},
               {"side_by_side", "side_by_side.png"},
               {"anaglyph", "anaglyph.png"},
               {"report", "report.json"},
               {"trajectory", "trajectory.jsonl"}};
  write_ldr(o.pair.left, out_dir / "left.png");
  write_ldr(o.pair.right, out_dir / "right.png");
  write_ldr(compose_stereo(o.pair, StereoMode::side_by_side),
            out_dir / "side_by_side.png");
  write_ldr(compose_stereo(o.pair, StereoMode::anaglyph),
            out_dir / "anaglyph.png");
  write_text(out_dir / "report.json", serialize(r));

  std::ofstream traj(out_dir / "trajectory.jsonl", std::ios::binary);
  if (!traj) throw InputError("cannot write trajectory.jsonl");
  write_trajectory_jsonl(o.trajectory, traj);
  return r;
}

References cmd_refs(const fs::path& input, const fs::path& out_dir,
                    const Settings& settings) {
  settings.tonemap.validate();
  const References refs = make_references(load_hdr(input), settings.tonemap);
  ensure_directory(out_dir);
  write_ldr(refs.contrast, out_dir / "contrast_ref.png");
  write_ldr(refs.detail, out_dir / "detail_ref.png");
  return refs;
}

LdrImage midpoint_view(const HdrImage& img, double beta_l, double beta_r,
                       const Settings& settings) {
  check_beta(beta_l, settings);
  check_beta(beta_r, settings);
  ToneMapParams p = settings.tonemap;
  p.beta = 0.5 * (beta_l + beta_r);
  return tonemap(img, p);
}

LdrImage cmd_baseline(const fs::path& input, double beta_l, double beta_r,
                      const fs::path& out, const Settings& settings) {
  check_beta(beta_l, settings);
  check_beta(beta_r, settings);
  LdrImage view = midpoint_view(load_hdr(input), beta_l, beta_r, settings);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  write_ldr(view, out);
  return view;
}

void to_json(nlohmann::json& j, const Evaluation& e) {
  j = nlohmann::json(e.energy);
  j["schema_version"] = kSchemaVersion;
  j["detail_swap_delta"] = e.detail_swap_delta;
  j["warnings"] = e.warnings;
}

Evaluation cmd_evaluate(const HdrImage& img, const LdrImage& left,
                        const LdrImage& right, const Settings& settings) {
  settings.tonemap.validate();
  settings.metric.validate();
  if (!left.same_shape(right) || left.width() != img.width() ||
      left.height() != img.height())
    throw InputError("view sizes " + std::to_string(left.width()) + "x" +
                     std::to_string(left.height()) + " and " +
                     std::to_string(right.width()) + "x" +
                     std::to_string(right.height()) + " do not match the " +
                     std::to_string(img.width()) + "x" +
                     std::to_string(img.height()) + " input");
  const References refs = make_references(img, settings.tonemap);
  const EnergyModel model(refs.contrast, refs.detail, settings.metric);
  const ViewFeatures fl = model.features(left);
  const ViewFeatures fr = model.features(right);
  return {model.evaluate(fl, fr), model.detail_swap_delta(fl, fr),
          model_warnings(model)};
}

Evaluation cmd_evaluate(const fs::path& input, const fs::path& left,
                        const fs::path& right, const Settings& settings) {
  return cmd_evaluate(load_hdr(input), load_ldr(left), load_ldr(right),
                      settings);
}

bool is_hdr_path(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".hdr" || ext == ".pic" || ext == ".rgbe" || ext == ".pfm";
}

BatchRow mean_row(const std::vector<BatchRow>& rows) {
  BatchRow m;
  m.file = "mean";
  if (rows.empty()) return m;
  for (const BatchRow& r : rows) {
    m.beta_l += r.beta_l;
    m.beta_r += r.beta_r;
    m.e_c += r.e_c;
    m.e_d += r.e_d;
    m.e_f += r.e_f;
    m.e += r.e;
    m.e_c_im += r.e_c_im;
    m.e_d_im += r.e_d_im;
    m.e_im += r.e_im;
    m.iterations += r.iterations;
    m.sec_per_iter += r.sec_per_iter;
  }
  const double n = static_cast<double>(rows.size());
  for (double* v : {&m.beta_l, &m.beta_r, &m.e_c, &m.e_d, &m.e_f, &m.e,
                    &m.e_c_im, &m.e_d_im, &m.e_im, &m.iterations,
                    &m.sec_per_iter})
    *v /= n;
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_row(std::ostream& out, const BatchRow& r) {
  out << kSchemaVersion << ',' << csv_field(r.file);
  for (double v : {r.beta_l, r.beta_r, r.e_c, r.e_d, r.e_f, r.e, r.e_c_im,
                   r.e_d_im, r.e_im, r.iterations, r.sec_per_iter})
    out << ',' << fmt(v);
  out << '\n';
}

}  // namespace

void write_batch_csv(const BatchResult& result, std::ostream& out) {
  out << "schema_version,file,beta_l,beta_r,e_c,e_d,e_f,e,e_c_im,e_d_im,e_im,"
         "iterations,sec_per_iter\n";
  for (const BatchRow& r : result.rows) write_row(out, r);
  write_row(out, result.mean);
}

BatchResult cmd_batch(const fs::path& input_dir, const fs::path& out_csv,
                      const Settings& settings, std::ostream& log) {
  settings.validate();
  if (!fs::is_directory(input_dir))
    throw InputError("'" + input_dir.string() + "' is not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input_dir))
    if (entry.is_regular_file() && is_hdr_path(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<std::optional<BatchRow>> rows(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const HdrImage img = load_hdr(files[i]);
        Settings s = settings;
        s.report_timing = true;
        const OptimizedImage o =
            optimize_image(img, files[i].filename().string(), s);
        const RunReport& r = o.report;
        rows[i] = BatchRow{files[i].filename().string(),
                           r.beta.left,
                           r.beta.right,
                           r.energy.e_c,
                           r.energy.e_d,
                           r.energy.e_f,
                           r.energy.e_total,
                           r.baseline_energy.e_c,
                           r.baseline_energy.e_d,
                           r.baseline_energy.e_total,
                           static_cast<double>(r.iterations),
                           r.seconds_per_iteration.value_or(0.0)};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  unsigned n_threads = settings.threads ? settings.threads
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, std::max<std::size_t>(files.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }

  BatchResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (rows[i]) {
      result.rows.push_back(*rows[i]);
    } else {
      result.failures.push_back(files[i].filename().string() + ": " + errors[i]);
      log << "warning: skipping " << files[i].filename().string() << ": "
          << errors[i] << '\n';
    }
  }
  if (result.rows.empty())
    throw InputError("no readable HDR image in '" + input_dir.string() + "'");
  result.mean = mean_row(result.rows);

  if (out_csv.has_parent_path()) ensure_directory(out_csv.parent_path());
  std::ofstream out(out_csv, std::ios::binary);
  if (!out) throw InputError("cannot write '" + out_csv.string() + "'");
  write_batch_csv(result, out);
  if (!out) throw InputError("cannot write '" + out_csv.string() + "'");
  return result;
}

int report_failure(const std::exception& e, std::ostream& err) {
  if (dynamic_cast<const NumericalError*>(&e)) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  }
  err << "error: " << e.what() << '\n';
  return 1;
}

}  // namespace bitone::app

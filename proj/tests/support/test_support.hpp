#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bitone/edges.hpp"
#include "bitone/energy.hpp"
#include "bitone/image.hpp"
#include "bitone/optimizer.hpp"
#include "bitone/perception.hpp"

namespace bitone::test {

using Rng = std::mt19937_64;

// ---- fixtures -------------------------------------------------------------

std::filesystem::path corpus_dir();
std::vector<std::filesystem::path> corpus_files();
std::filesystem::path cli_path();

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& bytes);

// ---- synthetic images -----------------------------------------------------

HdrImage constant_hdr(int w, int h, double value);
// Left half `low`, right half `high` (gray).
HdrImage two_region_hdr(int w, int h, double low, double high);
// Smooth log-luminance ramp over `decades` with a textured overlay.
HdrImage textured_hdr(int w, int h, double decades, std::uint64_t seed);
HdrImage random_hdr(Rng& rng, int w, int h, double max_value);
HdrImage upsample_bilinear(const HdrImage& in, int w, int h);

LdrImage random_ldr(Rng& rng, int w, int h);
LdrImage gray_ldr(const LuminanceMap& y);
LuminanceMap random_luminance(Rng& rng, int w, int h);
// Multiples of 1/1024 in [0, 1]: sums of up to 2^40 such values are exact.
LuminanceMap dyadic_luminance(Rng& rng, int w, int h);

// ---- independent oracles --------------------------------------------------

// Double loop over the lattice disc; in-bounds mean.
BrightnessMap naive_local_brightness(const LuminanceMap& y, int radius);
// Double loop over the 3x3 window.
ContrastMap naive_contour_contrast(const LuminanceMap& y);

// 50-digit decimal evaluation of the two fusion formulas.
double hp_fuse_brightness(double left, double right, double alpha_degrees);
double hp_fuse_contrast(double left, double right, double s, double t,
                        double z);

// Energy straight from the per-pixel definitions, using the naive feature
// oracles and high-precision fusion.
struct OracleEnergy {
  double e_c = 0.0;
  double e_d = 0.0;
  double e_f = 0.0;
  std::size_t used_edges = 0;
};
OracleEnergy oracle_energy(const LdrImage& left, const LdrImage& right,
                           const LdrImage& contrast_ref,
                           const LdrImage& detail_ref, const EdgeMask& edges,
                           const MetricConfig& config);

// (m + 0.5) / 256 * 2^(e - 128); exponent byte 0 is black.
double rgbe_channel_oracle(std::uint8_t mantissa, std::uint8_t exponent);

struct GridResult {
  BetaPair best;
  double energy = 0.0;
  std::size_t evaluations = 0;
};
// Exhaustive search over {min, min + step, ..., max}^2.
GridResult grid_search(const PairEvaluator& ev, double step,
                       double lo = 1.5, double hi = 6.0);

}  // namespace bitone::test

#include "bitone/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace bitone {
namespace {

constexpr std::int64_t kMaxDimension = 1 << 16;
constexpr std::int64_t kMaxPixels = std::int64_t{1} << 28;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("cannot read '" + path.string() + "'");
  return bytes;
}

void check_dimensions(std::int64_t w, std::int64_t h) {
  if (w < 1 || h < 1) throw InputError("corrupt header: bad image size");
  if (w > kMaxDimension || h > kMaxDimension || w * h > kMaxPixels)
    throw InputError("dimension overflow");
}

// Minimal cursor over an in-memory file.
class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  // Returns the next line without its terminator; fails when no '\n' is left.
  bool next_line(std::string_view& line) {
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) return false;
    line = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return true;
  }

  // Whitespace-delimited token for the PFM header.
  bool next_token(std::string_view& tok) {
    while (pos_ < bytes_.size() &&
           std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      ++pos_;
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() &&
           !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      ++pos_;
    tok = bytes_.substr(start, pos_ - start);
    return !tok.empty();
  }

  bool skip_one_whitespace() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      return false;
    ++pos_;
    return true;
  }

  std::uint8_t byte() {
    if (at_end()) throw InputError("truncated pixel data");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::string_view take(std::size_t n) {
    if (remaining() < n) throw InputError("truncated pixel data");
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_resolution(std::string_view line, std::int64_t& w, std::int64_t& h,
                      bool& flip_y) {
  std::istringstream in{std::string(line)};
  std::string ya, xa;
  if (!(in >> ya >> h >> xa >> w)) return false;
  if (xa != "+X") return false;
  if (ya == "-Y") {
    flip_y = false;
  } else if (ya == "+Y") {
    flip_y = true;
  } else {
    return false;
  }
  return true;
}

void read_rle_scanline(Reader& rd, std::int64_t width,
                       std::vector<std::uint8_t>& planes) {
  // planes holds 4 * width bytes: R plane, G plane, B plane, E plane.
  for (int c = 0; c < 4; ++c) {
    std::int64_t x = 0;
    std::uint8_t* dst = planes.data() + c * width;
    while (x < width) {
      std::uint8_t count = rd.byte();
      if (count > 128) {
        const int run = count - 128;
        if (x + run > width) throw InputError("corrupt RLE scanline");
        const std::uint8_t value = rd.byte();
        std::fill_n(dst + x, run, value);
        x += run;
      } else {
        if (count == 0 || x + count > width)
          throw InputError("corrupt RLE scanline");
        for (int i = 0; i < count; ++i) dst[x++] = rd.byte();
      }
    }
  }
}

void write_rle_bytes(std::string& out, const std::uint8_t* data, int n) {
  constexpr int kMinRun = 4;
  int cur = 0;
  while (cur < n) {
    int beg_run = cur;
    int run_count = 0;
    int old_run_count = 0;
    // Find the next run of at least kMinRun identical bytes.
    while (run_count < kMinRun && beg_run < n) {
      beg_run += run_count;
      old_run_count = run_count;
      run_count = 1;
      while (beg_run + run_count < n && run_count < 127 &&
             data[beg_run] == data[beg_run + run_count])
        ++run_count;
    }
    // A short run right before the long one is cheaper as a run.
    if (old_run_count > 1 && old_run_count == beg_run - cur) {
      out.push_back(static_cast<char>(128 + old_run_count));
      out.push_back(static_cast<char>(data[cur]));
      cur = beg_run;
    }
    while (cur < beg_run) {
      int nonrun = std::min(128, beg_run - cur);
      out.push_back(static_cast<char>(nonrun));
      out.append(reinterpret_cast<const char*>(data + cur), nonrun);
      cur += nonrun;
    }
    if (run_count >= kMinRun) {
      out.push_back(static_cast<char>(128 + run_count));
      out.push_back(static_cast<char>(data[beg_run]));
      cur += run_count;
    }
  }
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

double sanitize_radiance(float v) {
  if (!std::isfinite(v)) throw InputError("non-finite pixel value");
  return v < 0.0f ? 0.0 : static_cast<double>(v);
}

}  // namespace

Rgb rgbe_to_rgb(std::array<std::uint8_t, 4> rgbe) {
  if (rgbe[3] == 0) return {};
  const double f = std::ldexp(1.0, static_cast<int>(rgbe[3]) - (128 + 8));
  return {(rgbe[0] + 0.5) * f, (rgbe[1] + 0.5) * f, (rgbe[2] + 0.5) * f};
}

std::array<std::uint8_t, 4> rgb_to_rgbe(const Rgb& c) {
  const double v = std::max({c.r, c.g, c.b});
  if (!(v >= 1e-32)) return {0, 0, 0, 0};
  int e = 0;
  const double m = std::frexp(v, &e) * 256.0 / v;
  if (e + 128 > 255) return {255, 255, 255, 255};
  auto q = [m](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(x * m), 0.0, 255.0));
  };
  return {q(c.r), q(c.g), q(c.b), static_cast<std::uint8_t>(e + 128)};
}

HdrImage decode_rgbe(std::string_view bytes) {
  Reader rd(bytes);
  std::string_view line;
  if (!rd.next_line(line) || !line.starts_with("#?"))
    throw InputError("corrupt header: missing #? signature");
  bool format_ok = true;
  for (;;) {
    if (!rd.next_line(line)) throw InputError("corrupt header");
    if (line.empty()) break;
    if (line.starts_with("FORMAT=")) {
      format_ok = line == "FORMAT=32-bit_rle_rgbe";
    }
  }
  if (!format_ok) throw InputError("unsupported format: only RGBE pixels");
  if (!rd.next_line(line)) throw InputError("corrupt header");
  std::int64_t w = 0, h = 0;
  bool flip_y = false;
  if (!parse_resolution(line, w, h, flip_y))
    throw InputError("corrupt header: unsupported resolution line");
  check_dimensions(w, h);

  std::vector<Rgb> pixels(static_cast<std::size_t>(w * h));
  std::vector<std::uint8_t> planes(static_cast<std::size_t>(4 * w));
  for (std::int64_t row = 0; row < h; ++row) {
    const std::int64_t y = flip_y ? h - 1 - row : row;
    Rgb* dst = pixels.data() + y * w;
    const bool new_rle = w >= 8 && w < 0x8000 && rd.remaining() >= 4;
    std::string_view peek = new_rle ? rd.take(4) : std::string_view{};
    if (new_rle && peek[0] == 2 && peek[1] == 2 &&
        ((static_cast<std::uint8_t>(peek[2]) << 8) |
         static_cast<std::uint8_t>(peek[3])) == w) {
      read_rle_scanline(rd, w, planes);
      for (std::int64_t x = 0; x < w; ++x)
        dst[x] = rgbe_to_rgb({planes[x], planes[w + x], planes[2 * w + x],
                              planes[3 * w + x]});
      continue;
    }
    // Flat pixels, with the old-style (1,1,1,n) repeat code.
    std::int64_t x = 0;
    std::array<std::uint8_t, 4> prev{0, 0, 0, 0};
    int shift = 0;
    auto next_quad = [&]() -> std::array<std::uint8_t, 4> {
      if (!peek.empty()) {
        std::array<std::uint8_t, 4> q{};
        for (int i = 0; i < 4; ++i) q[i] = static_cast<std::uint8_t>(peek[i]);
        peek = {};
        return q;
      }
      return {rd.byte(), rd.byte(), rd.byte(), rd.byte()};
    };
    while (x < w) {
      auto q = next_quad();
      if (q[0] == 1 && q[1] == 1 && q[2] == 1) {
        const std::int64_t n = static_cast<std::int64_t>(q[3]) << shift;
        if (x == 0 || x + n > w) throw InputError("corrupt run in scanline");
        std::fill_n(dst + x, n, rgbe_to_rgb(prev));
        x += n;
        shift += 8;
      } else {
        dst[x++] = rgbe_to_rgb(q);
        prev = q;
        shift = 0;
      }
    }
  }
  return HdrImage(static_cast<int>(w), static_cast<int>(h), std::move(pixels));
}

HdrImage decode_pfm(std::string_view bytes) {
  Reader rd(bytes);
  std::string_view magic, ws, hs, ss;
  if (!rd.next_token(magic) || (magic != "PF" && magic != "Pf"))
    throw InputError("corrupt header: missing PF/Pf signature");
  const int channels = magic == "PF" ? 3 : 1;
  std::int64_t w = 0, h = 0;
  double scale = 0.0;
  if (!rd.next_token(ws) || !rd.next_token(hs) || !rd.next_token(ss) ||
      !parse_number(ws, w) || !parse_number(hs, h) || !parse_number(ss, scale) ||
      scale == 0.0 || !std::isfinite(scale) || !rd.skip_one_whitespace())
    throw InputError("corrupt header");
  check_dimensions(w, h);
  const bool little = scale < 0.0;
  const double magnitude = std::abs(scale);
  const std::size_t count = static_cast<std::size_t>(w * h * channels);
  std::string_view raw = rd.take(count * sizeof(float));

  std::vector<Rgb> pixels(static_cast<std::size_t>(w * h));
  const bool swap = little != (std::endian::native == std::endian::little);
  auto value = [&](std::size_t i) {
    std::uint32_t u = 0;
    std::memcpy(&u, raw.data() + i * 4, 4);
    if (swap) u = __builtin_bswap32(u);
    float f = std::bit_cast<float>(u);
    return sanitize_radiance(f) * magnitude;
  };
  // PFM stores scanlines bottom-to-top.
  for (std::int64_t row = 0; row < h; ++row) {
    const std::int64_t y = h - 1 - row;
    for (std::int64_t x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>((row * w + x) * channels);
      Rgb& p = pixels[static_cast<std::size_t>(y * w + x)];
      if (channels == 3) {
        p = {value(i), value(i + 1), value(i + 2)};
      } else {
        const double v = value(i);
        p = {v, v, v};
      }
    }
  }
  return HdrImage(static_cast<int>(w), static_cast<int>(h), std::move(pixels));
}

HdrImage load_hdr(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    if (bytes.starts_with("#?")) return decode_rgbe(bytes);
    if (bytes.starts_with("PF") || bytes.starts_with("Pf"))
      return decode_pfm(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (bytes.size() < 2) throw InputError(path.string() + ": corrupt header");
  throw InputError(path.string() + ": unsupported format");
}

void write_rgbe(const HdrImage& img, const std::filesystem::path& path,
                RgbeLayout layout) {
  const int w = img.width();
  const int h = img.height();
  std::string out = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                    std::to_string(h) + " +X " + std::to_string(w) + "\n";
  const bool rle = layout == RgbeLayout::rle && w >= 8 && w < 0x8000;
  std::vector<std::uint8_t> planes(static_cast<std::size_t>(4 * w));
  for (int y = 0; y < h; ++y) {
    if (!rle) {
      for (int x = 0; x < w; ++x) {
        auto q = rgb_to_rgbe(img(x, y));
        out.append(reinterpret_cast<const char*>(q.data()), 4);
      }
      continue;
    }
    for (int x = 0; x < w; ++x) {
      auto q = rgb_to_rgbe(img(x, y));
      for (int c = 0; c < 4; ++c) planes[c * w + x] = q[c];
    }
    out.push_back(2);
    out.push_back(2);
    out.push_back(static_cast<char>(w >> 8));
    out.push_back(static_cast<char>(w & 0xff));
    for (int c = 0; c < 4; ++c) write_rle_bytes(out, planes.data() + c * w, w);
  }
  write_file(path, out);
}

void write_pfm(const HdrImage& img, const std::filesystem::path& path) {
  const int w = img.width();
  const int h = img.height();
  std::string out = "PF\n" + std::to_string(w) + " " + std::to_string(h) +
                    "\n-1.0\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * h * 12);
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x) {
      const Rgb& p = img(x, y);
      for (double c : {p.r, p.g, p.b}) {
        std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(c));
        if constexpr (std::endian::native == std::endian::big)
          u = __builtin_bswap32(u);
        out.append(reinterpret_cast<const char*>(&u), 4);
      }
    }
  }
  write_file(path, out);
}

std::uint8_t quantize_channel(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

double dequantize_channel(std::uint8_t b) { return b / 255.0; }

LdrImage quantize_8bit(const LdrImage& img) {
  std::vector<Rgb> px(img.pixel_count());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const Rgb& p = img[i];
    px[i] = {dequantize_channel(quantize_channel(p.r)),
             dequantize_channel(quantize_channel(p.g)),
             dequantize_channel(quantize_channel(p.b))};
  }
  return LdrImage(img.width(), img.height(), std::move(px));
}

void write_ldr(const LdrImage& img, const std::filesystem::path& path,
               LdrFormat format) {
  std::vector<std::uint8_t> bytes(img.pixel_count() * 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    bytes[3 * i] = quantize_channel(img[i].r);
    bytes[3 * i + 1] = quantize_channel(img[i].g);
    bytes[3 * i + 2] = quantize_channel(img[i].b);
  }
  if (format == LdrFormat::ppm) {
    std::string out = "P6\n" + std::to_string(img.width()) + " " +
                      std::to_string(img.height()) + "\n255\n";
    out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    write_file(path, out);
    return;
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0,
                               nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw InputError("cannot write '" + path.string() + "': " + msg);
  }
}

void write_ldr(const LdrImage& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return write_ldr(img, path, LdrFormat::png);
  if (ext == ".ppm") return write_ldr(img, path, LdrFormat::ppm);
  throw InputError("unsupported LDR extension '" + ext + "'");
}

LdrImage load_ldr(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::vector<Rgb> px;
  int w = 0, h = 0;
  if (bytes.starts_with("P6")) {
    Reader rd(bytes);
    std::string_view magic, ws, hs, ms;
    rd.next_token(magic);
    if (!rd.next_token(ws) || !rd.next_token(hs) || !rd.next_token(ms) ||
        !parse_number(ws, w) || !parse_number(hs, h) || ms != "255" ||
        !rd.skip_one_whitespace())
      throw InputError(path.string() + ": corrupt header");
    check_dimensions(w, h);
    std::string_view raw = rd.take(static_cast<std::size_t>(w) * h * 3);
    px.resize(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < px.size(); ++i) {
      auto at = [&](std::size_t k) {
        return dequantize_channel(static_cast<std::uint8_t>(raw[k]));
      };
      px[i] = {at(3 * i), at(3 * i + 1), at(3 * i + 2)};
    }
    return LdrImage(w, h, std::move(px));
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw InputError(path.string() + ": unsupported format");
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw InputError(path.string() + ": " + msg);
  }
  w = static_cast<int>(image.width);
  h = static_cast<int>(image.height);
  px.resize(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = {dequantize_channel(buf[3 * i]), dequantize_channel(buf[3 * i + 1]),
             dequantize_channel(buf[3 * i + 2])};
  return LdrImage(w, h, std::move(px));
}

LdrImage compose_stereo(const BinocularPair& pair, StereoMode mode) {
  const LdrImage& l = pair.left;
  const LdrImage& r = pair.right;
  if (!l.same_shape(r))
    throw InputError("stereo views differ in size: " +
                     std::to_string(l.width()) + "x" +
                     std::to_string(l.height()) + " vs " +
                     std::to_string(r.width()) + "x" +
                     std::to_string(r.height()));
  const int w = l.width();
  const int h = l.height();
  if (mode == StereoMode::side_by_side) {
    std::vector<Rgb> px(static_cast<std::size_t>(2 * w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        px[static_cast<std::size_t>(y) * 2 * w + x] = l(x, y);
        px[static_cast<std::size_t>(y) * 2 * w + w + x] = r(x, y);
      }
    }
    return LdrImage(2 * w, h, std::move(px));
  }
  std::vector<Rgb> px(l.pixel_count());
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = {luminance(l[i]), r[i].g, r[i].b};
  return make_ldr_clamped(w, h, std::move(px));
}

}  // namespace bitone

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "bitone/image.hpp"

namespace bitone {

// Loads a Radiance RGBE (.hdr/.pic) or PFM (.pfm) file. The format is
// detected from the magic bytes, not the extension.
HdrImage load_hdr(const std::filesystem::path& path);

HdrImage decode_rgbe(std::string_view bytes);
HdrImage decode_pfm(std::string_view bytes);

// Radiance convention: channel = (mantissa + 0.5) / 256 * 2^(exponent - 128);
// exponent byte 0 encodes black.
Rgb rgbe_to_rgb(std::array<std::uint8_t, 4> rgbe);
std::array<std::uint8_t, 4> rgb_to_rgbe(const Rgb& c);

enum class RgbeLayout { flat, rle };
void write_rgbe(const HdrImage& img, const std::filesystem::path& path,
                RgbeLayout layout = RgbeLayout::rle);
// Writes little-endian colour PFM (scale -1).
void write_pfm(const HdrImage& img, const std::filesystem::path& path);

enum class LdrFormat { png, ppm };

// 8-bit quantisation: round half up, byte = floor(clamp(v,0,1) * 255 + 0.5).
std::uint8_t quantize_channel(double v);
double dequantize_channel(std::uint8_t b);

void write_ldr(const LdrImage& img, const std::filesystem::path& path,
               LdrFormat format);
// Picks the format from the extension (.png or .ppm).
void write_ldr(const LdrImage& img, const std::filesystem::path& path);
// Reads 8-bit PNG (gray/RGB, alpha dropped) or binary PPM (P6, maxval 255).
LdrImage load_ldr(const std::filesystem::path& path);

// Round-trips an image through the 8-bit encoding used by write_ldr.
LdrImage quantize_8bit(const LdrImage& img);

enum class StereoMode { side_by_side, anaglyph };

// side_by_side: left view in the left half of a double-width canvas.
// anaglyph: R = luminance of the left view, G and B from the right view.
LdrImage compose_stereo(const BinocularPair& pair, StereoMode mode);

}  // namespace bitone

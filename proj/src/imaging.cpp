// SPDX-License-Identifier: Apache-2.0
// ----------------------------------------------------------------------------
// Copyright 2026 The granucodec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at:
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.
// ----------------------------------------------------------------------------

#include "granucodec/imaging.hpp"

#include "granucodec/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace granucodec {

ImagePlane::ImagePlane(int w, int h, float fill)
    : width(w), height(h), true_width(w), true_height(h),
      samples(static_cast<std::size_t>(w) * h * channels, fill) {}

std::uint8_t sample_to_byte(float s)
{
    const double v = std::round((static_cast<double>(s) + 1.0) * 127.5);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

namespace {

// Skips whitespace and '#' comments between PPM header tokens.
void skip_separators(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            return;
        }
    }
}

long read_header_int(std::istream& in, const char* what)
{
    skip_separators(in);
    long v = -1;
    if (!(in >> v) || v < 0) throw FormatError(std::string("ppm: malformed ") + what);
    return v;
}

} // namespace

ImagePlane read_ppm(std::istream& in)
{
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '6')
        throw FormatError("ppm: not a binary P6 file");

    const long w = read_header_int(in, "width");
    const long h = read_header_int(in, "height");
    const long maxval = read_header_int(in, "maxval");
    if (w == 0 || h == 0 || w > 65535 || h > 65535) throw FormatError("ppm: unsupported dimensions");
    if (maxval != 255) throw FormatError("ppm: only 8-bit samples (maxval 255) are supported");

    // Exactly one whitespace byte separates the header from the raster.
    const int sep = in.get();
    if (sep != ' ' && sep != '\t' && sep != '\n' && sep != '\r') throw FormatError("ppm: malformed header");

    std::vector<std::uint8_t> raster(static_cast<std::size_t>(w) * h * 3);
    if (!in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size())))
        throw FormatError("ppm: truncated raster");

    ImagePlane img(static_cast<int>(w), static_cast<int>(h));
    std::transform(raster.begin(), raster.end(), img.samples.begin(), byte_to_sample);
    return pad_to_block(img);
}

ImagePlane load_image(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_ppm(in);
}

void write_ppm(std::ostream& out, const ImagePlane& img)
{
    out << "P6\n" << img.true_width << ' ' << img.true_height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.true_width) * 3);
    for (int y = 0; y < img.true_height; ++y) {
        for (int x = 0; x < img.true_width; ++x)
            for (int c = 0; c < 3; ++c) row[static_cast<std::size_t>(x) * 3 + c] = sample_to_byte(img.at(x, y, c));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw Error("ppm: write failed");
}

void save_image(const std::filesystem::path& path, const ImagePlane& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot create " + path.string());
    write_ppm(out, img);
}

ImagePlane pad_to_block(const ImagePlane& img, int block)
{
    GRANUCODEC_REQUIRE(block > 0, Error, "pad_to_block: block must be positive");
    const int pw = (img.width + block - 1) / block * block;
    const int ph = (img.height + block - 1) / block * block;
    if (pw == img.width && ph == img.height) return img;

    ImagePlane out(pw, ph);
    out.true_width = img.true_width;
    out.true_height = img.true_height;
    for (int y = 0; y < ph; ++y) {
        const int sy = std::min(y, img.height - 1);
        for (int x = 0; x < pw; ++x) {
            const int sx = std::min(x, img.width - 1);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
    }
    return out;
}

FeatureGrid avg_pool(const FeatureGrid& grid, int factor)
{
    GRANUCODEC_REQUIRE(factor > 0 && grid.h % factor == 0 && grid.w % factor == 0, Error,
                       "avg_pool: grid dimensions not divisible by factor");
    FeatureGrid out(grid.h / factor, grid.w / factor, grid.d);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    std::vector<double> acc(static_cast<std::size_t>(grid.d));
    for (int y = 0; y < out.h; ++y) {
        for (int x = 0; x < out.w; ++x) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) {
                    const auto src = grid.cell(y * factor + dy, x * factor + dx);
                    for (int c = 0; c < grid.d; ++c) acc[c] += src[c];
                }
            auto dst = out.cell(y, x);
            for (int c = 0; c < grid.d; ++c) dst[c] = static_cast<float>(acc[c] * inv);
        }
    }
    return out;
}

FeatureGrid nn_upsample(const FeatureGrid& grid, int factor)
{
    GRANUCODEC_REQUIRE(factor > 0, Error, "nn_upsample: factor must be positive");
    FeatureGrid out(grid.h * factor, grid.w * factor, grid.d);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            const auto src = grid.cell(y / factor, x / factor);
            std::copy(src.begin(), src.end(), out.cell(y, x).begin());
        }
    return out;
}

double psnr(const ImagePlane& a, const ImagePlane& b)
{
    GRANUCODEC_REQUIRE(a.true_width == b.true_width && a.true_height == b.true_height, Error,
                       "psnr: images differ in size");
    double sse = 0.0;
    for (int y = 0; y < a.true_height; ++y)
        for (int x = 0; x < a.true_width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double diff = static_cast<double>(sample_to_byte(a.at(x, y, c))) - sample_to_byte(b.at(x, y, c));
                sse += diff * diff;
            }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / (static_cast<double>(a.true_pixel_count()) * 3.0);
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace granucodec

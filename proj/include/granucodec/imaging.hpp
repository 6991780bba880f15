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

/**
 * @brief Image planes, feature grids, PPM I/O and the pooling/upsampling
 * operators shared by the encoder and decoder.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <iosfwd>
#include <span>
#include <vector>

namespace granucodec {

inline constexpr int kBlockSize = 16;

/// Interleaved RGB samples in [-1, 1], row-major. width/height are the
/// padded dimensions; true_width/true_height the original ones.
struct ImagePlane {
    int width = 0;
    int height = 0;
    int true_width = 0;
    int true_height = 0;
    std::vector<float> samples;

    static constexpr int channels = 3;

    ImagePlane() = default;
    ImagePlane(int w, int h, float fill = 0.0f);

    float& at(int x, int y, int c) { return samples[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    float at(int x, int y, int c) const { return samples[(static_cast<std::size_t>(y) * width + x) * channels + c]; }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t true_pixel_count() const { return static_cast<std::size_t>(true_width) * true_height; }
};

/// h x w cells, each a d-dimensional feature vector.
struct FeatureGrid {
    int h = 0;
    int w = 0;
    int d = 0;
    std::vector<float> values;

    FeatureGrid() = default;
    FeatureGrid(int h_, int w_, int d_, float fill = 0.0f)
        : h(h_), w(w_), d(d_), values(static_cast<std::size_t>(h_) * w_ * d_, fill) {}

    std::size_t cell_count() const { return static_cast<std::size_t>(h) * w; }

    std::span<float> cell(int y, int x) { return {values.data() + (static_cast<std::size_t>(y) * w + x) * d, static_cast<std::size_t>(d)}; }
    std::span<const float> cell(int y, int x) const { return {values.data() + (static_cast<std::size_t>(y) * w + x) * d, static_cast<std::size_t>(d)}; }

    friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;
};

/// Byte value to sample: 0 -> -1, 255 -> +1.
inline float byte_to_sample(std::uint8_t b) { return static_cast<float>(b) / 255.0f * 2.0f - 1.0f; }

/// Sample to byte, rounded to nearest and clamped.
std::uint8_t sample_to_byte(float s);

/// Reads a binary P6 PPM with maxval 255 and pads it to a multiple of 16.
ImagePlane read_ppm(std::istream& in);
ImagePlane load_image(const std::filesystem::path& path);

/// Writes the true-dimension window as P6.
void write_ppm(std::ostream& out, const ImagePlane& img);
void save_image(const std::filesystem::path& path, const ImagePlane& img);

/// Edge-replicating pad to the next multiple of block in each dimension.
/// true_width/true_height are carried over unchanged.
ImagePlane pad_to_block(const ImagePlane& img, int block = kBlockSize);

/// Mean of each factor x factor window, per channel.
FeatureGrid avg_pool(const FeatureGrid& grid, int factor);

/// Nearest-neighbour upsampling (cell replication).
FeatureGrid nn_upsample(const FeatureGrid& grid, int factor);

/// PSNR in dB over the true-dimension window, computed on 8-bit quantized
/// samples with peak 255. Identical images return +infinity.
double psnr(const ImagePlane& a, const ImagePlane& b);

inline bool is_lossless(double psnr_db) { return psnr_db == std::numeric_limits<double>::infinity(); }

} // namespace granucodec

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
 * @brief Granularity planning from an entropy map, the derived masks, and
 * the closed-form rate model used for target-bitrate lookup.
 */

#pragma once

#include "granucodec/spatial_entropy.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace granucodec {

/// How a 16x16 pixel block is represented: 16, 4 or 1 code vectors.
enum class Granularity : std::uint8_t { Fine = 0, Medium = 1, Coarse = 2 };

const char* to_string(Granularity g);

/// Fractions of blocks assigned fine / medium / coarse.
struct RatioTriple {
    double fine = 0.0;
    double medium = 0.0;
    double coarse = 1.0;

    /// Throws unless each part is in [0,1] and the sum is 1 within 1e-9.
    void validate() const;

    /// Parses "r1,r2,r3". Values may be fractions or percentages summing to 100.
    static RatioTriple parse(const std::string& text);

    friend bool operator==(const RatioTriple&, const RatioTriple&) = default;
};

struct GranularityMap {
    int blocks_y = 0;
    int blocks_x = 0;
    std::vector<Granularity> labels;

    GranularityMap() = default;
    GranularityMap(int by, int bx, Granularity fill = Granularity::Coarse)
        : blocks_y(by), blocks_x(bx), labels(static_cast<std::size_t>(by) * bx, fill) {}

    Granularity at(int by, int bx) const { return labels[static_cast<std::size_t>(by) * blocks_x + bx]; }
    Granularity& at(int by, int bx) { return labels[static_cast<std::size_t>(by) * blocks_x + bx]; }
    std::size_t size() const { return labels.size(); }
    std::size_t count(Granularity g) const;

    /// Label fractions of this map.
    RatioTriple ratios() const;

    friend bool operator==(const GranularityMap&, const GranularityMap&) = default;
};

/// Binary mask at one grid scale.
struct Mask {
    int h = 0;
    int w = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int h_, int w_) : h(h_), w(w_), bits(static_cast<std::size_t>(h_) * w_, 0) {}

    bool at(int y, int x) const { return bits[static_cast<std::size_t>(y) * w + x] != 0; }
    void set(int y, int x) { bits[static_cast<std::size_t>(y) * w + x] = 1; }
    std::size_t ones() const;

    friend bool operator==(const Mask&, const Mask&) = default;
};

/// fine at (H/4, W/4), medium at (H/8, W/8), coarse at (H/16, W/16).
struct MaskSet {
    Mask fine;
    Mask medium;
    Mask coarse;
};

/// Block counts for N blocks: coarse and medium rounded half-up, fine takes
/// the remainder. Medium is clipped when rounding would overflow N.
struct BlockCounts {
    std::size_t fine = 0;
    std::size_t medium = 0;
    std::size_t coarse = 0;
};
BlockCounts block_counts(const RatioTriple& ratios, std::size_t n_blocks);

/// Blocks sorted by ascending entropy (ties: lower raster index first); the
/// lowest-entropy share becomes coarse, the next medium, the rest fine.
GranularityMap plan_granularity(const EntropyMap& map, const RatioTriple& ratios);

MaskSet masks_from_map(const GranularityMap& gmap);

/// Bits per pixel predicted by the rate model for mean code length L:
/// L/256 (16 r1 + 4 r2 + r3) for indices plus (4 r1 + r2)/256 for masks.
double theoretical_bpp(const RatioTriple& ratios, double mean_code_length);
double theoretical_index_bpp(const RatioTriple& ratios, double mean_code_length);
double theoretical_mask_bpp(const RatioTriple& ratios);

struct RateRow {
    RatioTriple ratios;
    double bpp = 0.0;
};

struct RateQueryTable {
    double mean_code_length = 0.0;
    std::vector<RateRow> rows; ///< ascending bpp
};

/// Every lattice point of the ratio simplex at the given step.
RateQueryTable build_rate_table(double mean_code_length, double step = 0.01);

/// Table over caller-chosen ratio triples; bpp is recomputed for each.
RateQueryTable make_rate_table(double mean_code_length, std::span<const RatioTriple> candidates);

/// Row closest to target_bpp; equal distances favour the larger fine ratio.
RatioTriple ratios_for_target(const RateQueryTable& table, double target_bpp);

} // namespace granucodec

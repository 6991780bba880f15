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
 * @brief Non-parametric spatial entropy of image patches.
 *
 * Each sample is softly assigned to n equally spaced bins on [-1, 1] with a
 * Gaussian kernel. The per-patch mean of those affinities, normalised to sum
 * to one, is the patch's value distribution; its Shannon entropy (bits) is
 * the information-density score used for granularity planning.
 */

#pragma once

#include "granucodec/imaging.hpp"

#include <optional>
#include <span>
#include <vector>

namespace granucodec {

struct EntropyConfig {
    int n_bins = 32;
    double sigma = 2.0 / 31.0;

    /// Validated config; sigma defaults to the bin spacing 2/(n-1).
    static EntropyConfig make(int n_bins = 32, std::optional<double> sigma = std::nullopt);

    double bin_center(int k) const { return -1.0 + 2.0 * k / (n_bins - 1); }
};

/// Per-block entropy in bits, raster order, one value per 16x16 block.
struct EntropyMap {
    int blocks_y = 0;
    int blocks_x = 0;
    std::vector<double> values;

    double at(int by, int bx) const { return values[static_cast<std::size_t>(by) * blocks_x + bx]; }
    std::size_t size() const { return values.size(); }
};

/// Unnormalised Gaussian affinity of one sample to each bin.
std::vector<double> bin_affinity(double pixel_value, const EntropyConfig& cfg);

/// Normalised bin distribution of a set of samples (sums to one).
std::vector<double> patch_distribution(std::span<const float> samples, const EntropyConfig& cfg);

/// Entropy in bits of the pooled samples; 0 log 0 counts as 0.
double patch_entropy(std::span<const float> samples, const EntropyConfig& cfg);

/// Entropy of every non-overlapping 16x16 block of a padded image. All three
/// channels of a block are pooled into one sample set.
EntropyMap entropy_map(const ImagePlane& img, const EntropyConfig& cfg);

} // namespace granucodec

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

#include "granucodec/spatial_entropy.hpp"

#include "granucodec/error.hpp"

#include <algorithm>
#include <cmath>

namespace granucodec {

EntropyConfig EntropyConfig::make(int n_bins, std::optional<double> sigma)
{
    GRANUCODEC_REQUIRE(n_bins >= 2, Error, "entropy: n_bins must be >= 2");
    EntropyConfig cfg;
    cfg.n_bins = n_bins;
    cfg.sigma = sigma.value_or(2.0 / (n_bins - 1));
    GRANUCODEC_REQUIRE(cfg.sigma > 0.0 && std::isfinite(cfg.sigma), Error, "entropy: sigma must be positive");
    return cfg;
}

std::vector<double> bin_affinity(double pixel_value, const EntropyConfig& cfg)
{
    std::vector<double> f(static_cast<std::size_t>(cfg.n_bins));
    const double denom = 2.0 * cfg.sigma * cfg.sigma;
    for (int k = 0; k < cfg.n_bins; ++k) {
        const double dist = pixel_value - cfg.bin_center(k);
        f[k] = std::exp(-dist * dist / denom);
    }
    return f;
}

std::vector<double> patch_distribution(std::span<const float> samples, const EntropyConfig& cfg)
{
    GRANUCODEC_REQUIRE(!samples.empty(), Error, "entropy: empty patch");

    // Samples are mostly 8-bit quantised, so a patch holds few distinct
    // values. Sorting first also makes the sum independent of pixel order.
    std::vector<float> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> mean(static_cast<std::size_t>(cfg.n_bins), 0.0);
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double count = static_cast<double>(j - i);
        const auto f = bin_affinity(sorted[i], cfg);
        for (int k = 0; k < cfg.n_bins; ++k) mean[k] += count * f[k];
        i = j;
    }

    double total = 0.0;
    for (double& m : mean) {
        m /= static_cast<double>(sorted.size());
        total += m;
    }
    // Every sample lies within [-1,1], so at least one bin is within half a
    // spacing and total > 0 for any sane sigma.
    GRANUCODEC_REQUIRE(total > 0.0, Error, "entropy: affinities underflowed; sigma too small");
    for (double& m : mean) m /= total;
    return mean;
}

double patch_entropy(std::span<const float> samples, const EntropyConfig& cfg)
{
    double h = 0.0;
    for (double p : patch_distribution(samples, cfg))
        if (p > 0.0) h -= p * std::log2(p);
    return std::clamp(h, 0.0, std::log2(static_cast<double>(cfg.n_bins)));
}

EntropyMap entropy_map(const ImagePlane& img, const EntropyConfig& cfg)
{
    GRANUCODEC_REQUIRE(img.width % kBlockSize == 0 && img.height % kBlockSize == 0, Error,
                       "entropy_map: image is not padded to 16");
    EntropyMap map;
    map.blocks_y = img.height / kBlockSize;
    map.blocks_x = img.width / kBlockSize;
    map.values.resize(static_cast<std::size_t>(map.blocks_y) * map.blocks_x);

    std::vector<float> patch(static_cast<std::size_t>(kBlockSize) * kBlockSize * 3);
    for (int by = 0; by < map.blocks_y; ++by)
        for (int bx = 0; bx < map.blocks_x; ++bx) {
            auto out = patch.begin();
            for (int y = 0; y < kBlockSize; ++y) {
                const float* row = &img.samples[(static_cast<std::size_t>(by * kBlockSize + y) * img.width + bx * kBlockSize) * 3];
                out = std::copy(row, row + kBlockSize * 3, out);
            }
            map.values[static_cast<std::size_t>(by) * map.blocks_x + bx] = patch_entropy(patch, cfg);
        }
    return map;
}

} // namespace granucodec

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

#include "granucodec/analysis.hpp"

#include "granucodec/error.hpp"

#include <algorithm>
#include <cmath>

namespace granucodec {

namespace {

// Luminance standard deviation over each scale x scale block.
void fill_luma_std(const ImagePlane& img, FeatureGrid& grid, int scale)
{
    for (int gy = 0; gy < grid.h; ++gy)
        for (int gx = 0; gx < grid.w; ++gx) {
            double sum = 0.0;
            for (int y = 0; y < scale; ++y)
                for (int x = 0; x < scale; ++x) {
                    const int px = gx * scale + x, py = gy * scale + y;
                    sum += (static_cast<double>(img.at(px, py, 0)) + img.at(px, py, 1) + img.at(px, py, 2)) / 3.0;
                }
            const double n = static_cast<double>(scale) * scale;
            const double mean = sum / n;
            double var = 0.0;
            for (int y = 0; y < scale; ++y)
                for (int x = 0; x < scale; ++x) {
                    const int px = gx * scale + x, py = gy * scale + y;
                    const double l = (static_cast<double>(img.at(px, py, 0)) + img.at(px, py, 1) + img.at(px, py, 2)) / 3.0;
                    var += (l - mean) * (l - mean);
                }
            grid.cell(gy, gx)[3] = static_cast<float>(std::min(1.0, std::sqrt(var / n)));
        }
}

} // namespace

FeaturePyramid BlockStatsTransform::extract(const ImagePlane& img) const
{
    GRANUCODEC_REQUIRE(img.width % kBlockSize == 0 && img.height % kBlockSize == 0, Error,
                       "extract_pyramid: image is not padded to 16");

    FeatureGrid means(img.height / 4, img.width / 4, 3);
    for (int gy = 0; gy < means.h; ++gy)
        for (int gx = 0; gx < means.w; ++gx) {
            double acc[3] = {0.0, 0.0, 0.0};
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x)
                    for (int c = 0; c < 3; ++c) acc[c] += img.at(gx * 4 + x, gy * 4 + y, c);
            for (int c = 0; c < 3; ++c) means.cell(gy, gx)[c] = static_cast<float>(acc[c] / 16.0);
        }

    auto with_std = [&](const FeatureGrid& m, int scale) {
        FeatureGrid g(m.h, m.w, 4);
        for (int y = 0; y < m.h; ++y)
            for (int x = 0; x < m.w; ++x) std::copy_n(m.cell(y, x).begin(), 3, g.cell(y, x).begin());
        fill_luma_std(img, g, scale);
        return g;
    };

    return {with_std(means, 4), with_std(avg_pool(means, 2), 8), with_std(avg_pool(means, 4), 16)};
}

std::shared_ptr<const AnalysisTransform> make_transform(const TransformSpec& spec)
{
    if (spec.descriptor == "block-stats" && spec.d == 4) return std::make_shared<BlockStatsTransform>();
    throw Error("unknown analysis transform '" + spec.descriptor + "' with d=" + std::to_string(spec.d));
}

FeaturePyramid extract_pyramid(const ImagePlane& img, const TransformSpec& spec)
{
    return make_transform(spec)->extract(img);
}

} // namespace granucodec

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

#include "granucodec/reconstruction.hpp"

#include "granucodec/error.hpp"

#include <algorithm>

namespace granucodec {

namespace {

void require_shape(const FeatureGrid& g, const Mask& m, const char* what)
{
    GRANUCODEC_REQUIRE(g.h == m.h && g.w == m.w, Error, std::string(what) + ": grid and mask scales differ");
}

void copy_cell(const FeatureGrid& src, int sy, int sx, FeatureGrid& dst, int dy, int dx)
{
    const auto from = src.cell(sy, sx);
    std::copy(from.begin(), from.end(), dst.cell(dy, dx).begin());
}

} // namespace

FeatureGrid NearestSynthesis::medium_layer(const FeatureGrid& coarse) const
{
    return nn_upsample(coarse, 2);
}

FeatureGrid NearestSynthesis::fine_layer(const FeatureGrid& medium) const
{
    return nn_upsample(medium, 2);
}

ImagePlane NearestSynthesis::paint(const FeatureGrid& fine, int true_width, int true_height) const
{
    GRANUCODEC_REQUIRE(fine.d >= 3, Error, "paint: grid needs at least three colour channels");
    ImagePlane img(fine.w * 4, fine.h * 4);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const auto c = fine.cell(y / 4, x / 4);
            for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = std::clamp(c[ch], -1.0f, 1.0f);
        }
    img.true_width = true_width;
    img.true_height = true_height;
    return img;
}

FeatureGrid apply_mask(const FeatureGrid& grid, const Mask& mask)
{
    require_shape(grid, mask, "apply_mask");
    FeatureGrid out(grid.h, grid.w, grid.d);
    for (int y = 0; y < grid.h; ++y)
        for (int x = 0; x < grid.w; ++x)
            if (mask.at(y, x)) copy_cell(grid, y, x, out, y, x);
    return out;
}

FeatureGrid assemble_hybrid(const FeatureGrid& q1, const FeatureGrid& q2, const FeatureGrid& q3, const MaskSet& masks)
{
    require_shape(q1, masks.fine, "assemble_hybrid");
    require_shape(q2, masks.medium, "assemble_hybrid");
    require_shape(q3, masks.coarse, "assemble_hybrid");
    GRANUCODEC_REQUIRE(q1.h == 2 * q2.h && q1.w == 2 * q2.w && q1.h == 4 * q3.h && q1.w == 4 * q3.w, Error,
                       "assemble_hybrid: grid scales are inconsistent");
    GRANUCODEC_REQUIRE(q1.d == q2.d && q1.d == q3.d, Error, "assemble_hybrid: channel counts differ");

    // The masks are a disjoint cover, so each output cell takes exactly one
    // source and the masked sum reduces to a selection.
    FeatureGrid out(q1.h, q1.w, q1.d);
    for (int y = 0; y < q1.h; ++y)
        for (int x = 0; x < q1.w; ++x) {
            const bool f = masks.fine.at(y, x);
            const bool m = masks.medium.at(y / 2, x / 2);
            const bool c = masks.coarse.at(y / 4, x / 4);
            GRANUCODEC_REQUIRE(f + m + c == 1, Error, "assemble_hybrid: masks are not a disjoint cover");
            if (f)
                copy_cell(q1, y, x, out, y, x);
            else if (m)
                copy_cell(q2, y / 2, x / 2, out, y, x);
            else
                copy_cell(q3, y / 4, x / 4, out, y, x);
        }
    return out;
}

DecoderTrace conditional_decode(const FeatureGrid& hybrid, const MaskSet& masks, const SynthesisLayers& layers)
{
    require_shape(hybrid, masks.fine, "conditional_decode");
    DecoderTrace t;
    t.y1 = avg_pool(hybrid, 4);

    t.y2 = layers.medium_layer(t.y1);
    require_shape(t.y2, masks.medium, "conditional_decode: medium layer output");
    const FeatureGrid pooled2 = avg_pool(hybrid, 2);
    for (int y = 0; y < t.y2.h; ++y)
        for (int x = 0; x < t.y2.w; ++x)
            if (masks.medium.at(y, x)) copy_cell(pooled2, y, x, t.y2, y, x);

    t.y3 = layers.fine_layer(t.y2);
    require_shape(t.y3, masks.fine, "conditional_decode: fine layer output");
    for (int y = 0; y < t.y3.h; ++y)
        for (int x = 0; x < t.y3.w; ++x)
            if (masks.fine.at(y, x)) copy_cell(hybrid, y, x, t.y3, y, x);
    return t;
}

ImagePlane synthesize_image(const FeatureGrid& y3, const SynthesisLayers& layers, int true_width, int true_height)
{
    return layers.paint(y3, true_width, true_height);
}

} // namespace granucodec

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
 * @brief Decoder side of the pyramid: assembling the hybrid fine-scale grid
 * from three masked quantized grids, the replacement decoder that pins
 * known features after each layer, and the pixel painter.
 */

#pragma once

#include "granucodec/granularity.hpp"
#include "granucodec/imaging.hpp"

#include <memory>

namespace granucodec {

/// Pluggable decoder layers. medium_layer maps the coarse grid (H/16) to the
/// medium grid (H/8); fine_layer maps medium to fine (H/4); paint turns the
/// fine grid into pixels.
class SynthesisLayers {
public:
    virtual ~SynthesisLayers() = default;
    virtual FeatureGrid medium_layer(const FeatureGrid& coarse) const = 0;
    virtual FeatureGrid fine_layer(const FeatureGrid& medium) const = 0;
    virtual ImagePlane paint(const FeatureGrid& fine, int true_width, int true_height) const = 0;
};

/// Both layers are 2x nearest-neighbour upsampling; the painter fills every
/// 4x4 pixel block with the cell's mean colour, clamped to [-1,1].
class NearestSynthesis final : public SynthesisLayers {
public:
    FeatureGrid medium_layer(const FeatureGrid& coarse) const override;
    FeatureGrid fine_layer(const FeatureGrid& medium) const override;
    ImagePlane paint(const FeatureGrid& fine, int true_width, int true_height) const override;
};

/// Intermediate decoder states, exposed for verification.
struct DecoderTrace {
    FeatureGrid y1; ///< coarse scale
    FeatureGrid y2; ///< medium scale
    FeatureGrid y3; ///< fine scale
};

/// q1 masked by m1, plus q2 masked by m2 upsampled x2, plus q3 masked by m3
/// upsampled x4, at the fine scale. Masks must form a disjoint cover.
FeatureGrid assemble_hybrid(const FeatureGrid& q1, const FeatureGrid& q2, const FeatureGrid& q3, const MaskSet& masks);

/// y1 = pool4(z); y2 = D1(y1) outside m2, pool2(z) inside; y3 = D2(y2)
/// outside m1, z inside.
DecoderTrace conditional_decode(const FeatureGrid& hybrid, const MaskSet& masks, const SynthesisLayers& layers);

ImagePlane synthesize_image(const FeatureGrid& y3, const SynthesisLayers& layers, int true_width, int true_height);

/// Returns the grid with every cell outside the mask zeroed.
FeatureGrid apply_mask(const FeatureGrid& grid, const Mask& mask);

} // namespace granucodec

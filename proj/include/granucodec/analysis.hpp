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

#pragma once

#include "granucodec/imaging.hpp"

#include <memory>
#include <string>

namespace granucodec {

/// Feature grids at the three granularities: fine (H/4), medium (H/8),
/// coarse (H/16).
struct FeaturePyramid {
    FeatureGrid fine;
    FeatureGrid medium;
    FeatureGrid coarse;
};

struct TransformSpec {
    int d = 4;
    std::string descriptor = "block-stats";
};

/// Analysis transform interface. Implementations must be deterministic and
/// emit grids of spec().d channels at the three scales.
class AnalysisTransform {
public:
    virtual ~AnalysisTransform() = default;
    virtual TransformSpec spec() const = 0;
    virtual FeaturePyramid extract(const ImagePlane& img) const = 0;
};

/// Per s x s block: mean R, mean G, mean B and the population standard
/// deviation of luminance (R+G+B)/3. Mean channels of the medium and coarse
/// grids are pooled from the fine grid so the scales agree exactly.
class BlockStatsTransform final : public AnalysisTransform {
public:
    TransformSpec spec() const override { return {4, "block-stats"}; }
    FeaturePyramid extract(const ImagePlane& img) const override;
};

/// Resolves a descriptor to a transform; throws for unknown names.
std::shared_ptr<const AnalysisTransform> make_transform(const TransformSpec& spec);

/// Convenience wrapper using the transform named by spec.
FeaturePyramid extract_pyramid(const ImagePlane& img, const TransformSpec& spec = {});

} // namespace granucodec

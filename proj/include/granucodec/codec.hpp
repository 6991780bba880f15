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
 * @brief End-to-end encode/decode pipeline around a shared codebook.
 */

#pragma once

#include "granucodec/analysis.hpp"
#include "granucodec/bitstream.hpp"
#include "granucodec/granularity.hpp"
#include "granucodec/reconstruction.hpp"
#include "granucodec/spatial_entropy.hpp"
#include "granucodec/vq.hpp"

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace granucodec {

struct SessionOptions {
    EntropyConfig entropy = EntropyConfig::make();
    TransformSpec transform;
    double table_step = 0.01;
    /// Replaces the mean code length derived from the codebook in the rate
    /// table (e.g. to reproduce a published table).
    std::optional<double> mean_code_length;
    /// Restricts the rate table to these ratio triples instead of the full
    /// simplex lattice.
    std::vector<RatioTriple> table_rows;
};

/// Read-only after construction; safe to share between threads.
class CodecSession {
public:
    CodecSession(Codebook codebook, SessionOptions options = {});

    const Codebook& codebook() const { return codebook_; }
    const HuffmanCode& code() const { return code_; }
    const RateQueryTable& rate_table() const { return table_; }
    const EntropyConfig& entropy_config() const { return options_.entropy; }
    const AnalysisTransform& transform() const { return *transform_; }
    const SynthesisLayers& synthesis() const { return *synthesis_; }
    std::uint64_t codebook_hash() const { return hash_; }

private:
    Codebook codebook_;
    SessionOptions options_;
    HuffmanCode code_;
    RateQueryTable table_;
    std::shared_ptr<const AnalysisTransform> transform_;
    std::shared_ptr<const SynthesisLayers> synthesis_;
    std::uint64_t hash_ = 0;
};

struct TargetBpp {
    double bpp = 0.0;
};

using RateRequest = std::variant<RatioTriple, TargetBpp>;

struct EncodeResult {
    std::vector<std::uint8_t> container;
    RatioTriple ratios;
    GranularityMap gmap;
    IndexStreams indices;
    /// Quantized features at each scale, zero outside the scale's mask.
    FeatureGrid fine;
    FeatureGrid medium;
    FeatureGrid coarse;
};

/// Entropy map, plan, quantization of masked cells (raster order per
/// scale), and serialization.
EncodeResult encode_image(const CodecSession& session, const ImagePlane& img, const RateRequest& request);

/// As encode_image but with a caller-supplied granularity map. ratios only
/// fills the header; the map's own fractions are used when absent.
EncodeResult encode_with_map(const CodecSession& session, const ImagePlane& img, const GranularityMap& gmap,
                             std::optional<RatioTriple> ratios = std::nullopt);

struct DecodeResult {
    ImagePlane image;
    ContainerParts parts;
    MaskSet masks;
    FeatureGrid hybrid;
    DecoderTrace trace;
};

DecodeResult decode_image(const CodecSession& session, std::span<const std::uint8_t> container);

/// Trains a codebook on every cell of every scale of the given images, then
/// counts how often each code is the nearest over the same cells and
/// finalizes the table.
Codebook train_codebook_from_images(std::span<const ImagePlane> images, const KMeansOptions& opts,
                                    const TransformSpec& transform = {}, KMeansReport* report = nullptr);

} // namespace granucodec

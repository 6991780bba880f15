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

#include "granucodec/codec.hpp"

#include "granucodec/error.hpp"

#include <algorithm>

namespace granucodec {

CodecSession::CodecSession(Codebook codebook, SessionOptions options)
    : codebook_(std::move(codebook)), options_(std::move(options)), transform_(make_transform(options_.transform)),
      synthesis_(std::make_shared<NearestSynthesis>())
{
    GRANUCODEC_REQUIRE(codebook_.d == transform_->spec().d, Error, "session: codebook dimension does not match transform");
    GRANUCODEC_REQUIRE(codebook_.frequencies.finalized(), Error, "session: codebook frequencies are not finalized");
    code_ = build_huffman(codebook_.frequencies);
    hash_ = codebook_.id_hash();
    const double L = options_.mean_code_length.value_or(mean_code_length(code_));
    table_ = options_.table_rows.empty() ? build_rate_table(L, options_.table_step) : make_rate_table(L, options_.table_rows);
}

namespace {

// Quantizes the cells selected by the mask in raster order.
std::vector<std::uint32_t> quantize_masked(const FeatureGrid& grid, const Mask& mask, const Codebook& cb,
                                           FeatureGrid& quantized)
{
    quantized = FeatureGrid(grid.h, grid.w, grid.d);
    std::vector<std::uint32_t> out;
    out.reserve(mask.ones());
    for (int y = 0; y < grid.h; ++y)
        for (int x = 0; x < grid.w; ++x) {
            if (!mask.at(y, x)) continue;
            const std::uint32_t idx = cb.nearest(grid.cell(y, x));
            out.push_back(idx);
            const auto c = cb.code(idx);
            std::copy(c.begin(), c.end(), quantized.cell(y, x).begin());
        }
    return out;
}

FeatureGrid place_codes(const std::vector<std::uint32_t>& indices, const Mask& mask, const Codebook& cb)
{
    FeatureGrid g(mask.h, mask.w, cb.d);
    std::size_t next = 0;
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) {
            if (!mask.at(y, x)) continue;
            GRANUCODEC_REQUIRE(next < indices.size(), FormatError, "decode: index stream shorter than mask");
            const std::uint32_t i = indices[next++];
            GRANUCODEC_REQUIRE(i < static_cast<std::uint32_t>(cb.k), FormatError, "decode: index out of range");
            const auto c = cb.code(i);
            std::copy(c.begin(), c.end(), g.cell(y, x).begin());
        }
    GRANUCODEC_REQUIRE(next == indices.size(), FormatError, "decode: index stream longer than mask");
    return g;
}

} // namespace

EncodeResult encode_with_map(const CodecSession& session, const ImagePlane& img, const GranularityMap& gmap,
                             std::optional<RatioTriple> ratios)
{
    GRANUCODEC_REQUIRE(gmap.blocks_x * kBlockSize == img.width && gmap.blocks_y * kBlockSize == img.height, Error,
                       "encode: granularity map does not match image");
    const FeaturePyramid pyr = session.transform().extract(img);
    const MaskSet masks = masks_from_map(gmap);

    EncodeResult res;
    res.gmap = gmap;
    res.ratios = ratios.value_or(gmap.ratios());
    res.indices[0] = quantize_masked(pyr.fine, masks.fine, session.codebook(), res.fine);
    res.indices[1] = quantize_masked(pyr.medium, masks.medium, session.codebook(), res.medium);
    res.indices[2] = quantize_masked(pyr.coarse, masks.coarse, session.codebook(), res.coarse);

    ContainerParts parts;
    parts.true_width = static_cast<std::uint32_t>(img.true_width);
    parts.true_height = static_cast<std::uint32_t>(img.true_height);
    parts.padded_width = static_cast<std::uint32_t>(img.width);
    parts.padded_height = static_cast<std::uint32_t>(img.height);
    parts.codebook_hash = session.codebook_hash();
    parts.ratios = res.ratios;
    parts.gmap = gmap;
    parts.indices = res.indices;
    res.container = serialize_container(parts, session.code());
    return res;
}

EncodeResult encode_image(const CodecSession& session, const ImagePlane& img, const RateRequest& request)
{
    const RatioTriple ratios = std::holds_alternative<RatioTriple>(request)
                                   ? std::get<RatioTriple>(request)
                                   : ratios_for_target(session.rate_table(), std::get<TargetBpp>(request).bpp);
    ratios.validate();
    const EntropyMap emap = entropy_map(img, session.entropy_config());
    return encode_with_map(session, img, plan_granularity(emap, ratios), ratios);
}

DecodeResult decode_image(const CodecSession& session, std::span<const std::uint8_t> container)
{
    DecodeResult res;
    res.parts = parse_container(container, session.code(), session.codebook_hash());
    res.masks = masks_from_map(res.parts.gmap);

    const Codebook& cb = session.codebook();
    const FeatureGrid q1 = place_codes(res.parts.indices[0], res.masks.fine, cb);
    const FeatureGrid q2 = place_codes(res.parts.indices[1], res.masks.medium, cb);
    const FeatureGrid q3 = place_codes(res.parts.indices[2], res.masks.coarse, cb);

    res.hybrid = assemble_hybrid(q1, q2, q3, res.masks);
    res.trace = conditional_decode(res.hybrid, res.masks, session.synthesis());
    res.image = synthesize_image(res.trace.y3, session.synthesis(), static_cast<int>(res.parts.true_width),
                                 static_cast<int>(res.parts.true_height));
    return res;
}

Codebook train_codebook_from_images(std::span<const ImagePlane> images, const KMeansOptions& opts,
                                    const TransformSpec& transform, KMeansReport* report)
{
    const auto t = make_transform(transform);
    std::vector<float> cells;
    for (const ImagePlane& img : images) {
        const FeaturePyramid p = t->extract(img);
        for (const FeatureGrid* g : {&p.fine, &p.medium, &p.coarse}) cells.insert(cells.end(), g->values.begin(), g->values.end());
    }
    Codebook cb = train_codebook(cells, transform.d, opts, report);

    const std::size_t n = cells.size() / static_cast<std::size_t>(transform.d);
    std::vector<std::uint32_t> assigned(n);
    for (std::size_t i = 0; i < n; ++i)
        assigned[i] = cb.nearest(std::span<const float>(cells).subspan(i * transform.d, static_cast<std::size_t>(transform.d)));
    cb.frequencies.accumulate(assigned);
    cb.frequencies.finalize();
    return cb;
}

} // namespace granucodec

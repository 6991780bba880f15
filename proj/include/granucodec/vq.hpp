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
 * @brief Codebook storage, nearest-code quantization, k-means training and
 * corpus-level index usage statistics.
 */

#pragma once

#include "granucodec/imaging.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace granucodec {

/// Per-index usage counts gathered over a training corpus. Finalisation adds
/// one to every count so unseen indices stay codeable.
class FrequencyTable {
public:
    FrequencyTable() = default;
    explicit FrequencyTable(std::size_t k) : counts_(k, 0) {}

    /// Wraps counts loaded from disk; they must all be >= 1.
    static FrequencyTable finalized_from(std::vector<std::uint64_t> counts);

    void accumulate(std::span<const std::uint32_t> indices);
    /// Elementwise sum of a partial table gathered elsewhere.
    void merge(const FrequencyTable& other);
    void finalize();

    bool finalized() const { return finalized_; }
    std::size_t size() const { return counts_.size(); }
    std::uint64_t total() const;
    std::span<const std::uint64_t> counts() const { return counts_; }

private:
    std::vector<std::uint64_t> counts_;
    bool finalized_ = false;
};

struct IndexGrid {
    int h = 0;
    int w = 0;
    std::vector<std::uint32_t> indices;

    friend bool operator==(const IndexGrid&, const IndexGrid&) = default;
};

/// k code vectors of dimension d together with their usage frequencies.
struct Codebook {
    int k = 0;
    int d = 0;
    std::vector<float> codes; ///< k * d, row per code
    FrequencyTable frequencies;

    Codebook() = default;
    Codebook(int k_, int d_, std::vector<float> codes_);

    std::span<const float> code(std::uint32_t i) const
    {
        return {codes.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }

    /// Index of the nearest code by Euclidean distance; ties go to the
    /// lowest index.
    std::uint32_t nearest(std::span<const float> v) const;

    /// FNV-1a 64 of the serialized codebook (everything before the trailing
    /// hash in the file layout). Requires finalized frequencies.
    std::uint64_t id_hash() const;
};

struct QuantizedGrid {
    IndexGrid indices;
    FeatureGrid features;
};

QuantizedGrid quantize(const FeatureGrid& grid, const Codebook& cb);

/// Codebook vectors for each index; throws on an out-of-range index.
FeatureGrid lookup(const IndexGrid& idx, const Codebook& cb, int d_check = -1);

/// Adds every index of the grid to the table.
void accumulate_frequencies(const IndexGrid& idx, FrequencyTable& tbl);
void finalize_frequencies(FrequencyTable& tbl);

struct KMeansOptions {
    int k = 1024;
    int iterations = 10;
    std::uint64_t seed = 1;
};

/// Mean squared distortion after each assignment step.
struct KMeansReport {
    std::vector<double> distortion;
};

/// Lloyd's k-means over n = points.size() / d vectors with seeded k-means++
/// initialisation. Empty clusters are re-seeded with the point farthest
/// from its centre. The returned codebook's frequencies are zero and not
/// finalized.
Codebook train_codebook(std::span<const float> points, int d, const KMeansOptions& opts,
                        KMeansReport* report = nullptr);

/// Codebook file: "CGCB", u8 version, u16 k, u16 d, k*d f32, k u64 counts,
/// u64 hash. Little-endian throughout.
std::vector<std::uint8_t> serialize_codebook(const Codebook& cb);
Codebook parse_codebook(std::span<const std::uint8_t> bytes);
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

} // namespace granucodec

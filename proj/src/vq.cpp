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

#include "granucodec/vq.hpp"

#include "granucodec/detail/bytes.hpp"
#include "granucodec/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>

namespace granucodec {

namespace {

constexpr std::uint8_t kCodebookVersion = 1;

double squared_distance(std::span<const float> a, std::span<const float> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = static_cast<double>(a[i]) - b[i];
        acc += diff * diff;
    }
    return acc;
}

// Uniform double in [0,1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double unit_interval(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

FrequencyTable FrequencyTable::finalized_from(std::vector<std::uint64_t> counts)
{
    for (std::uint64_t c : counts)
        GRANUCODEC_REQUIRE(c >= 1, FormatError, "frequency table: finalized counts must be >= 1");
    FrequencyTable t;
    t.counts_ = std::move(counts);
    t.finalized_ = true;
    return t;
}

void FrequencyTable::accumulate(std::span<const std::uint32_t> indices)
{
    GRANUCODEC_REQUIRE(!finalized_, Error, "frequency table is already finalized");
    for (std::uint32_t i : indices) {
        GRANUCODEC_REQUIRE(i < counts_.size(), Error, "frequency table: index out of range");
        ++counts_[i];
    }
}

void FrequencyTable::merge(const FrequencyTable& other)
{
    GRANUCODEC_REQUIRE(!finalized_ && !other.finalized_, Error, "frequency table: cannot merge finalized tables");
    GRANUCODEC_REQUIRE(other.size() == size(), Error, "frequency table: size mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

void FrequencyTable::finalize()
{
    if (finalized_) return;
    for (std::uint64_t& c : counts_) ++c;
    finalized_ = true;
}

std::uint64_t FrequencyTable::total() const
{
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Codebook::Codebook(int k_, int d_, std::vector<float> codes_)
    : k(k_), d(d_), codes(std::move(codes_)), frequencies(static_cast<std::size_t>(k_))
{
    GRANUCODEC_REQUIRE(k >= 1 && d >= 1, Error, "codebook: k and d must be >= 1");
    GRANUCODEC_REQUIRE(codes.size() == static_cast<std::size_t>(k) * d, Error, "codebook: code array has wrong size");
    for (float v : codes) GRANUCODEC_REQUIRE(std::isfinite(v), Error, "codebook: non-finite code value");
}

std::uint32_t Codebook::nearest(std::span<const float> v) const
{
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        const double dist = squared_distance(v, code(static_cast<std::uint32_t>(i)));
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<std::uint32_t>(i);
        }
    }
    return best;
}

std::uint64_t Codebook::id_hash() const
{
    const auto bytes = serialize_codebook(*this);
    return detail::fnv1a64(std::span(bytes).first(bytes.size() - 8));
}

QuantizedGrid quantize(const FeatureGrid& grid, const Codebook& cb)
{
    GRANUCODEC_REQUIRE(grid.d == cb.d, Error, "quantize: feature dimension does not match codebook");
    QuantizedGrid out{{grid.h, grid.w, std::vector<std::uint32_t>(grid.cell_count())}, FeatureGrid(grid.h, grid.w, grid.d)};
    for (int y = 0; y < grid.h; ++y)
        for (int x = 0; x < grid.w; ++x) {
            const std::uint32_t idx = cb.nearest(grid.cell(y, x));
            out.indices.indices[static_cast<std::size_t>(y) * grid.w + x] = idx;
            const auto c = cb.code(idx);
            std::copy(c.begin(), c.end(), out.features.cell(y, x).begin());
        }
    return out;
}

FeatureGrid lookup(const IndexGrid& idx, const Codebook& cb, int d_check)
{
    GRANUCODEC_REQUIRE(d_check < 0 || d_check == cb.d, Error, "lookup: feature dimension does not match codebook");
    FeatureGrid out(idx.h, idx.w, cb.d);
    for (int y = 0; y < idx.h; ++y)
        for (int x = 0; x < idx.w; ++x) {
            const std::uint32_t i = idx.indices[static_cast<std::size_t>(y) * idx.w + x];
            GRANUCODEC_REQUIRE(i < static_cast<std::uint32_t>(cb.k), FormatError, "lookup: index out of range");
            const auto c = cb.code(i);
            std::copy(c.begin(), c.end(), out.cell(y, x).begin());
        }
    return out;
}

void accumulate_frequencies(const IndexGrid& idx, FrequencyTable& tbl)
{
    tbl.accumulate(idx.indices);
}

void finalize_frequencies(FrequencyTable& tbl)
{
    tbl.finalize();
}

Codebook train_codebook(std::span<const float> points, int d, const KMeansOptions& opts, KMeansReport* report)
{
    GRANUCODEC_REQUIRE(d >= 1 && points.size() % static_cast<std::size_t>(d) == 0, Error,
                       "train_codebook: corpus size is not a multiple of d");
    GRANUCODEC_REQUIRE(opts.k >= 1 && opts.iterations >= 0, Error, "train_codebook: bad options");
    const std::size_t n = points.size() / static_cast<std::size_t>(d);
    const std::size_t k = static_cast<std::size_t>(opts.k);
    GRANUCODEC_REQUIRE(n >= k, Error, "train_codebook: corpus has fewer points than k");

    auto point = [&](std::size_t i) { return points.subspan(i * d, static_cast<std::size_t>(d)); };

    // k-means++ seeding.
    std::mt19937_64 rng(opts.seed);
    std::vector<float> centers;
    centers.reserve(k * d);
    auto center = [&](std::size_t c) { return std::span<const float>(centers).subspan(c * d, static_cast<std::size_t>(d)); };

    const auto first = point(static_cast<std::size_t>(unit_interval(rng) * static_cast<double>(n)));
    centers.insert(centers.end(), first.begin(), first.end());
    std::vector<double> nearest_d2(n);
    for (std::size_t i = 0; i < n; ++i) nearest_d2[i] = squared_distance(point(i), center(0));

    while (centers.size() < k * d) {
        const double total = std::accumulate(nearest_d2.begin(), nearest_d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = unit_interval(rng) * total;
            double run = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                run += nearest_d2[i];
                if (run > target && nearest_d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // Fewer distinct points than k; duplicates are unavoidable.
            pick = static_cast<std::size_t>(unit_interval(rng) * static_cast<double>(n));
        }
        const auto p = point(pick);
        centers.insert(centers.end(), p.begin(), p.end());
        const auto c = center(centers.size() / d - 1);
        for (std::size_t i = 0; i < n; ++i) nearest_d2[i] = std::min(nearest_d2[i], squared_distance(point(i), c));
    }

    Codebook cb(opts.k, d, centers);
    std::vector<std::uint32_t> assign(n);
    std::vector<double> sums(k * d);
    std::vector<std::size_t> members(k);

    for (int it = 0; it < opts.iterations; ++it) {
        double distortion = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = cb.nearest(point(i));
            distortion += squared_distance(point(i), cb.code(assign[i]));
        }
        if (report) report->distortion.push_back(distortion / static_cast<double>(n));

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(members.begin(), members.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = point(i);
            for (int c = 0; c < d; ++c) sums[assign[i] * d + c] += p[c];
            ++members[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (members[c] > 0)
                for (int j = 0; j < d; ++j)
                    cb.codes[c * d + j] = static_cast<float>(sums[c * d + j] / static_cast<double>(members[c]));

        if (std::find(members.begin(), members.end(), 0) == members.end()) continue;

        // Re-seed empty clusters from the points worst served by the updated
        // centres, one distinct point per empty cluster.
        std::vector<std::pair<double, std::size_t>> worst(n);
        for (std::size_t i = 0; i < n; ++i) worst[i] = {squared_distance(point(i), cb.code(assign[i])), i};
        std::stable_sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        std::size_t next = 0;
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c] > 0) continue;
            const auto p = point(worst[next++ % n].second);
            std::copy(p.begin(), p.end(), cb.codes.begin() + static_cast<std::ptrdiff_t>(c * d));
        }
    }
    return cb;
}

std::vector<std::uint8_t> serialize_codebook(const Codebook& cb)
{
    GRANUCODEC_REQUIRE(cb.k >= 1 && cb.k <= 65535 && cb.d >= 1 && cb.d <= 65535, Error,
                       "codebook: k and d must fit in 16 bits");
    GRANUCODEC_REQUIRE(cb.frequencies.finalized() && cb.frequencies.size() == static_cast<std::size_t>(cb.k), Error,
                       "codebook: frequencies must be finalized before serialization");
    detail::ByteWriter w;
    for (char c : {'C', 'G', 'C', 'B'}) w.u8(static_cast<std::uint8_t>(c));
    w.u8(kCodebookVersion);
    w.u16(static_cast<std::uint16_t>(cb.k));
    w.u16(static_cast<std::uint16_t>(cb.d));
    for (float v : cb.codes) w.f32(v);
    for (std::uint64_t c : cb.frequencies.counts()) w.u64(c);
    w.u64(detail::fnv1a64(w.bytes()));
    return std::move(w.bytes());
}

Codebook parse_codebook(std::span<const std::uint8_t> bytes)
{
    detail::ByteReader r(bytes, "codebook");
    for (char c : {'C', 'G', 'C', 'B'})
        if (r.u8() != static_cast<std::uint8_t>(c)) throw FormatError("codebook: bad magic");
    if (r.u8() != kCodebookVersion) throw FormatError("codebook: unsupported version");
    const int k = r.u16();
    const int d = r.u16();
    if (k < 1 || d < 1) throw FormatError("codebook: k and d must be >= 1");
    const std::size_t expected = 9 + static_cast<std::size_t>(k) * d * 4 + static_cast<std::size_t>(k) * 8 + 8;
    if (bytes.size() != expected) throw FormatError("codebook: file size does not match header");

    std::vector<float> codes(static_cast<std::size_t>(k) * d);
    for (float& v : codes) v = r.f32();
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(k));
    for (std::uint64_t& c : counts) c = r.u64();
    const std::uint64_t stored = r.u64();
    if (stored != detail::fnv1a64(bytes.first(bytes.size() - 8))) throw FormatError("codebook: hash mismatch");

    Codebook cb(k, d, std::move(codes));
    cb.frequencies = FrequencyTable::finalized_from(std::move(counts));
    return cb;
}

void save_codebook(const std::filesystem::path& path, const Codebook& cb)
{
    const auto bytes = serialize_codebook(cb);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
    return parse_codebook(bytes);
}

} // namespace granucodec

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

#include "granucodec/error.hpp"
#include "granucodec/vq.hpp"
#include "synthetic.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace granucodec;

namespace {

Codebook random_codebook(int k, int d, std::mt19937_64& rng)
{
    std::vector<float> codes(static_cast<std::size_t>(k) * d);
    for (float& v : codes) v = static_cast<float>(testing::unit(rng) * 2 - 1);
    return Codebook(k, d, codes);
}

FeatureGrid random_grid(int h, int w, int d, std::mt19937_64& rng)
{
    FeatureGrid g(h, w, d);
    for (float& v : g.values) v = static_cast<float>(testing::unit(rng) * 2 - 1);
    return g;
}

double dist2(std::span<const float> a, std::span<const float> b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (static_cast<double>(a[i]) - b[i]) * (static_cast<double>(a[i]) - b[i]);
    return s;
}

} // namespace

TEST_CASE("quantize: exact match and tie-break")
{
    std::mt19937_64 rng(1);
    const Codebook cb = random_codebook(16, 4, rng);
    FeatureGrid g(1, 1, 4);
    const auto c7 = cb.code(7);
    std::copy(c7.begin(), c7.end(), g.values.begin());
    const QuantizedGrid q = quantize(g, cb);
    CHECK(q.indices.indices[0] == 7);
    CHECK(q.features.values == std::vector<float>(c7.begin(), c7.end()));

    const Codebook two(2, 1, {-1.0f, 1.0f});
    FeatureGrid mid(1, 1, 1, 0.0f);
    CHECK(quantize(mid, two).indices.indices[0] == 0);

    CHECK_THROWS_AS(quantize(FeatureGrid(1, 1, 3), cb), Error);
}

TEST_CASE("quantize agrees with an exhaustive scan")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const Codebook cb = random_codebook(16, 4, rng);
        const FeatureGrid g = random_grid(5, 7, 4, rng);
        const QuantizedGrid q = quantize(g, cb);
        for (int y = 0; y < g.h; ++y)
            for (int x = 0; x < g.w; ++x) {
                std::uint32_t best = 0;
                for (std::uint32_t j = 1; j < 16; ++j)
                    if (dist2(g.cell(y, x), cb.code(j)) < dist2(g.cell(y, x), cb.code(best))) best = j;
                const std::uint32_t got = q.indices.indices[static_cast<std::size_t>(y) * g.w + x];
                CHECK(got == best);
                for (std::uint32_t j = 0; j < 16; ++j) CHECK(dist2(g.cell(y, x), cb.code(got)) <= dist2(g.cell(y, x), cb.code(j)));
            }
    }
}

TEST_CASE("lookup")
{
    std::mt19937_64 rng(3);
    const Codebook cb = random_codebook(1024, 4, rng);
    IndexGrid zeros{2, 3, std::vector<std::uint32_t>(6, 0)};
    const FeatureGrid z = lookup(zeros, cb);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) CHECK(std::vector<float>(z.cell(y, x).begin(), z.cell(y, x).end()) == std::vector<float>(cb.code(0).begin(), cb.code(0).end()));

    IndexGrid last{1, 1, {1023}};
    CHECK(lookup(last, cb).values == std::vector<float>(cb.code(1023).begin(), cb.code(1023).end()));

    IndexGrid bad{1, 1, {1024}};
    CHECK_THROWS_AS(lookup(bad, cb), FormatError);

    for (int t = 0; t < 20; ++t) {
        const Codebook small = random_codebook(32, 4, rng);
        IndexGrid idx{4, 4, std::vector<std::uint32_t>(16)};
        for (auto& i : idx.indices) i = static_cast<std::uint32_t>(rng() % 32);
        CHECK(quantize(lookup(idx, small), small).indices == idx);
        const FeatureGrid g = random_grid(3, 3, 4, rng);
        const QuantizedGrid q = quantize(g, small);
        CHECK(lookup(q.indices, small) == q.features);
    }
}

TEST_CASE("frequency accumulation and smoothing")
{
    FrequencyTable t(8);
    accumulate_frequencies(IndexGrid{}, t);
    CHECK(t.total() == 0);
    accumulate_frequencies(IndexGrid{1, 3, {3, 3, 5}}, t);
    CHECK(t.counts()[3] == 2);
    CHECK(t.counts()[5] == 1);
    CHECK(t.total() == 3);

    FrequencyTable part(8);
    part.accumulate(std::vector<std::uint32_t>{0, 7});
    t.merge(part);
    CHECK(t.total() == 5);

    const std::uint64_t raw = t.total();
    finalize_frequencies(t);
    CHECK(t.finalized());
    CHECK(t.total() == raw + 8);
    for (std::uint64_t c : t.counts()) CHECK(c >= 1);
    CHECK_THROWS_AS(t.accumulate(std::vector<std::uint32_t>{1}), Error);

    FrequencyTable zeros(4);
    zeros.finalize();
    CHECK(std::vector<std::uint64_t>(zeros.counts().begin(), zeros.counts().end()) == std::vector<std::uint64_t>{1, 1, 1, 1});

    FrequencyTable pair(2);
    pair.accumulate(std::vector<std::uint32_t>(9, 1));
    pair.finalize();
    CHECK(pair.counts()[0] == 1);
    CHECK(pair.counts()[1] == 10);

    FrequencyTable small(2);
    CHECK_THROWS_AS(small.accumulate(std::vector<std::uint32_t>{2}), Error);
}

TEST_CASE("k-means reproduces a corpus of exactly k distinct points")
{
    std::mt19937_64 rng(4);
    std::vector<float> pts(8 * 4);
    for (float& v : pts) v = static_cast<float>(testing::unit(rng));
    KMeansReport rep;
    const Codebook cb = train_codebook(pts, 4, {8, 5, 42}, &rep);
    for (int i = 0; i < 8; ++i) {
        bool found = false;
        for (int j = 0; j < 8; ++j)
            found |= std::equal(pts.begin() + i * 4, pts.begin() + i * 4 + 4, cb.code(static_cast<std::uint32_t>(j)).begin());
        CHECK(found);
    }
    CHECK(rep.distortion.back() == 0.0);
}

TEST_CASE("k-means separates two blobs")
{
    std::mt19937_64 rng(5);
    std::vector<float> pts;
    for (int i = 0; i < 200; ++i) {
        const double cx = i % 2 == 0 ? -0.8 : 0.8;
        for (int c = 0; c < 2; ++c) pts.push_back(static_cast<float>(cx + (testing::unit(rng) - 0.5) * 0.2));
    }
    const Codebook cb = train_codebook(pts, 2, {2, 10, 7});
    // One code in each blob's bounding box.
    int left = 0, right = 0;
    for (std::uint32_t j = 0; j < 2; ++j) {
        const auto c = cb.code(j);
        if (c[0] >= -0.9f && c[0] <= -0.7f && c[1] >= -0.9f && c[1] <= -0.7f) ++left;
        if (c[0] >= 0.7f && c[0] <= 0.9f && c[1] >= 0.7f && c[1] <= 0.9f) ++right;
    }
    CHECK(left == 1);
    CHECK(right == 1);
}

TEST_CASE("k-means is deterministic and its distortion never increases")
{
    std::mt19937_64 rng(6);
    std::vector<float> pts(3000 * 4);
    for (float& v : pts) v = static_cast<float>(std::pow(testing::unit(rng), 3));
    KMeansReport a_rep;
    const Codebook a = train_codebook(pts, 4, {64, 12, 99}, &a_rep);
    const Codebook b = train_codebook(pts, 4, {64, 12, 99});
    CHECK(a.codes == b.codes);
    REQUIRE(a_rep.distortion.size() == 12);
    for (std::size_t i = 1; i < a_rep.distortion.size(); ++i) CHECK(a_rep.distortion[i] <= a_rep.distortion[i - 1]);

    const Codebook c = train_codebook(pts, 4, {64, 12, 100});
    CHECK(c.codes != a.codes);

    CHECK_THROWS_AS(train_codebook(std::vector<float>(4 * 3), 4, {4, 1, 1}), Error);
}

TEST_CASE("k-means with duplicate-heavy corpus still yields k finite codes")
{
    std::vector<float> pts(100 * 2, 0.5f);
    pts[0] = -0.5f;
    const Codebook cb = train_codebook(pts, 2, {4, 5, 1});
    CHECK(cb.k == 4);
    for (float v : cb.codes) CHECK(std::isfinite(v));
}

TEST_CASE("codebook file round-trip and validation")
{
    std::mt19937_64 rng(7);
    Codebook cb = random_codebook(10, 4, rng);
    cb.frequencies.accumulate(std::vector<std::uint32_t>{1, 1, 9});
    CHECK_THROWS_AS(serialize_codebook(cb), Error);
    cb.frequencies.finalize();

    const auto bytes = serialize_codebook(cb);
    CHECK(bytes.size() == 9 + 10 * 4 * 4 + 10 * 8 + 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CGCB");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 10);
    CHECK(bytes[6] == 0);
    CHECK(bytes[7] == 4);

    const Codebook back = parse_codebook(bytes);
    CHECK(back.codes == cb.codes);
    CHECK(std::vector<std::uint64_t>(back.frequencies.counts().begin(), back.frequencies.counts().end()) ==
          std::vector<std::uint64_t>(cb.frequencies.counts().begin(), cb.frequencies.counts().end()));
    CHECK(back.id_hash() == cb.id_hash());

    for (std::size_t i = 0; i < bytes.size(); i += 7) {
        auto bad = bytes;
        bad[i] ^= 0x20;
        CHECK_THROWS_AS(parse_codebook(bad), FormatError);
    }
    auto shorter = bytes;
    shorter.pop_back();
    CHECK_THROWS_AS(parse_codebook(shorter), FormatError);

    Codebook other = cb;
    other.codes[3] += 0.001f;
    CHECK(other.id_hash() != cb.id_hash());
}

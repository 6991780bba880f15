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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed; nothing here is tuned per run.

#include "granucodec/analysis.hpp"
#include "granucodec/bitstream.hpp"
#include "granucodec/codec.hpp"
#include "granucodec/error.hpp"
#include "granucodec/granularity.hpp"
#include "granucodec/imaging.hpp"
#include "granucodec/reconstruction.hpp"
#include "granucodec/spatial_entropy.hpp"
#include "granucodec/vq.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace granucodec;
namespace syn = granucodec::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int g_failures = 0;

void run(const char* id, const char* name, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++g_failures;
    std::printf("%s %s %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Codebook random_codebook(std::mt19937_64& rng, int k, int d = 4)
{
    std::vector<float> codes(static_cast<std::size_t>(k) * d);
    for (float& v : codes) v = static_cast<float>(syn::unit(rng) * 2 - 1);
    Codebook cb(k, d, std::move(codes));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(k));
    for (auto& c : counts) c = 1 + rng() % 200;
    cb.frequencies = FrequencyTable::finalized_from(std::move(counts));
    return cb;
}

RatioTriple random_ratios(std::mt19937_64& rng)
{
    double a = syn::unit(rng), b = syn::unit(rng);
    if (a > b) std::swap(a, b);
    return {a, b - a, 1 - b};
}

GranularityMap random_map(std::mt19937_64& rng, int by, int bx)
{
    GranularityMap m(by, bx);
    for (auto& g : m.labels) g = static_cast<Granularity>(rng() % 3);
    return m;
}

// Shared state between the discrepancy and quality criteria: one codebook
// trained on photo-like content, evaluated on held-out 512x512 images.
struct PhotoBench {
    std::unique_ptr<CodecSession> session;
    std::vector<ImagePlane> test_images;
    std::vector<RatioTriple> triples; // ordered by theoretical bpp
    std::vector<std::vector<EncodeResult>> encoded; // [triple][image]
};

PhotoBench& photo_bench()
{
    static PhotoBench bench = [] {
        PhotoBench b;
        std::vector<ImagePlane> train;
        for (int i = 0; i < 24; ++i) train.push_back(syn::photo_image(256, 256, 3000 + i));
        b.session = std::make_unique<CodecSession>(train_codebook_from_images(train, {1024, 10, 1}));
        for (int i = 0; i < 20; ++i) b.test_images.push_back(syn::photo_image(512, 512, 7000 + i));
        b.triples = {{0, 0, 1}, {0.2, 0.5, 0.3}, {0.37, 0.46, 0.17}, {0.6, 0.3, 0.1}, {1, 0, 0}};
        for (const RatioTriple& r : b.triples) {
            auto& row = b.encoded.emplace_back();
            for (const ImagePlane& img : b.test_images) row.push_back(encode_image(*b.session, img, r));
        }
        return b;
    }();
    return bench;
}

// ---------------------------------------------------------------------------

Outcome rate_formula_fidelity()
{
    const double L = 10.3875;
    const std::vector<std::pair<RatioTriple, double>> rows{
        {{0, 0.23, 0.77}, 0.070}, {{0.1, 0.67, 0.23}, 0.187}, {{0.37, 0.46, 0.17}, 0.330},
        {{0.61, 0.30, 0.09}, 0.460}, {{0.9, 0.1, 0}, 0.616}};
    Outcome out;
    double worst = 0;
    for (const auto& [r, published] : rows) {
        const double got = theoretical_bpp(r, L);
        const double err = std::abs(got - published);
        worst = std::max(worst, err);
        if (err > 0.001) {
            out.pass = false;
            out.detail += fmt("(%.0f%%,%.0f%%,%.0f%%) -> %.6f vs %.3f off by %.5f; ", r.fine * 100, r.medium * 100,
                              r.coarse * 100, got, published, err);
        }
    }
    out.detail += fmt("max |error| %.5f over 5 rows (tol 0.001)", worst);
    return out;
}

Outcome discrepancy()
{
    PhotoBench& b = photo_bench();
    const double L = b.session->rate_table().mean_code_length;
    double worst = 0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < b.triples.size(); ++t)
        for (std::size_t i = 0; i < b.test_images.size(); ++i) {
            const RateReport rr = measure_rate(b.encoded[t][i].container, b.test_images[i].true_pixel_count());
            worst = std::max(worst, std::abs(rr.payload_bpp - theoretical_bpp(b.triples[t], L)));
            ++n;
        }
    return {worst < 0.05, fmt("L=%.4f, %zu encodes (20 images x 5 triples), max |actual-theoretical| %.4f bpp (tol 0.05)",
                              L, n, worst)};
}

Outcome fine_control()
{
    PhotoBench& b = photo_bench();
    const ImagePlane img = syn::photo_image(768, 512, 99);
    const EncodeResult base = encode_image(*b.session, img, RatioTriple{0.37, 0.46, 0.17});
    const double base_bpp = measure_rate(base.container, img.true_pixel_count()).total_bpp;
    std::mt19937_64 rng(5);
    double worst = 0, smallest = 1;
    for (int t = 0; t < 10; ++t) {
        GranularityMap m = base.gmap;
        auto& g = m.labels[rng() % m.size()];
        g = static_cast<Granularity>((static_cast<int>(g) + 1 + rng() % 2) % 3);
        const EncodeResult e = encode_with_map(*b.session, img, m);
        const double delta = std::abs(measure_rate(e.container, img.true_pixel_count()).total_bpp - base_bpp);
        worst = std::max(worst, delta);
        smallest = std::min(smallest, delta);
    }
    return {worst < 0.001, fmt("10 single-block swaps on 768x512: |delta bpp| in [%.6f, %.6f] (tol < 0.001)", smallest, worst)};
}

Outcome statistical_benefit()
{
    std::vector<ImagePlane> corpus;
    for (int i = 0; i < 24; ++i) corpus.push_back(syn::skewed_image(256, 256, 2000 + i));
    const CodecSession session(train_codebook_from_images(corpus, {1024, 10, 1}));
    const std::vector<RatioTriple> triples{{0, 0, 1}, {0.2, 0.5, 0.3}, {0.37, 0.46, 0.17}, {0.6, 0.3, 0.1}, {1, 0, 0}};
    Outcome out;
    std::vector<double> savings;
    for (const RatioTriple& r : triples) {
        std::uint64_t stat = 0, uniform = 0;
        for (const ImagePlane& img : corpus) {
            const EncodeResult e = encode_image(session, img, r);
            const ContainerHeader h = parse_container_header(e.container);
            stat += std::uint64_t{h.index_bits[0]} + h.index_bits[1] + h.index_bits[2];
            uniform += 10 * (e.indices[0].size() + e.indices[1].size() + e.indices[2].size());
        }
        if (stat > uniform) out.pass = false;
        savings.push_back(1.0 - static_cast<double>(stat) / static_cast<double>(uniform));
        out.detail += fmt("(%g,%g,%g) saving %.2f%%; ", r.fine, r.medium, r.coarse, savings.back() * 100);
    }
    // trend over (20,50,30) -> (60,30,10) -> (100,0,0)
    if (!(savings[1] <= savings[3] && savings[3] <= savings[4])) {
        out.pass = false;
        out.detail += "saving not non-decreasing in r1; ";
    }
    out.detail += "stat <= 10-bit at every triple required";
    return out;
}

Outcome losslessness()
{
    std::mt19937_64 rng(2024);
    int trips = 0, missed = 0, corruptions = 0;
    const std::uint8_t flips[] = {0x01, 0x80, 0xff};
    for (; trips < 1000; ++trips) {
        const int k = trips % 50 == 0 ? 1 : 1 + static_cast<int>(rng() % 1024);
        const CodecSession s(random_codebook(rng, k));
        const int w = 1 + static_cast<int>(rng() % 96), h = 1 + static_cast<int>(rng() % 96);
        const ImagePlane img = trips % 2 ? syn::noise_image(w, h, rng()) : syn::scene_image(w, h, rng());
        const EncodeResult e = trips % 3 == 0
                                   ? encode_with_map(s, img, random_map(rng, img.height / kBlockSize, img.width / kBlockSize))
                                   : encode_image(s, img, random_ratios(rng));
        const DecodeResult d = decode_image(s, e.container);
        if (!(d.parts.gmap == e.gmap) || d.parts.indices != e.indices || d.image.true_width != w ||
            d.image.true_height != h)
            return {false, fmt("round trip %d differs", trips)};
        if (trips % 10 == 0) {
            for (std::size_t pos = 0; pos < kContainerHeaderSize; ++pos)
                for (std::uint8_t f : flips) {
                    std::vector<std::uint8_t> bad = e.container;
                    bad[pos] ^= f;
                    ++corruptions;
                    try {
                        decode_image(s, bad);
                        ++missed;
                    } catch (const FormatError&) {
                    }
                }
        }
    }
    return {missed == 0, fmt("%d round trips exact; %d/%d single-byte header corruptions detected", trips,
                             corruptions - missed, corruptions)};
}

// Leaf-depth multisets of all full binary trees with n leaves.
void profiles(std::vector<int> depths, std::size_t n, std::vector<std::vector<int>>& out)
{
    std::sort(depths.begin(), depths.end());
    if (depths.size() == n) {
        if (std::find(out.begin(), out.end(), depths) == out.end()) out.push_back(depths);
        return;
    }
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (i > 0 && depths[i] == depths[i - 1]) continue;
        auto next = depths;
        next[i] += 1;
        next.push_back(depths[i] + 1);
        profiles(next, n, out);
    }
}

Outcome huffman_optimality()
{
    std::vector<std::vector<std::vector<int>>> prof(9);
    for (std::size_t n = 2; n <= 8; ++n) profiles({0}, n, prof[n]);
    std::map<std::vector<std::uint64_t>, std::uint64_t> optimum;
    auto brute = [&](std::vector<std::uint64_t> c) {
        std::sort(c.rbegin(), c.rend());
        auto it = optimum.find(c);
        if (it != optimum.end()) return it->second;
        std::uint64_t best = ~std::uint64_t{0};
        for (const auto& p : prof[c.size()]) {
            std::uint64_t cost = 0;
            for (std::size_t i = 0; i < c.size(); ++i) cost += c[i] * static_cast<std::uint64_t>(p[i]);
            best = std::min(best, cost);
        }
        return optimum[c] = best;
    };
    std::size_t tables = 0;
    for (std::size_t n = 2; n <= 8; ++n) {
        std::vector<std::uint64_t> counts(n, 1);
        for (;;) {
            const HuffmanCode code = build_huffman(FrequencyTable::finalized_from(counts));
            ++tables;
            if (weighted_code_length(code, counts) != brute(counts) || !code.kraft_complete())
                return {false, fmt("suboptimal or incomplete code at alphabet size %zu", n)};
            std::size_t i = 0;
            while (i < n && counts[i] == 6) counts[i++] = 1;
            if (i == n) break;
            ++counts[i];
        }
    }
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::uint64_t> c(1024);
        for (auto& v : c) v = 1 + (t % 2 ? rng() % 5 : rng() % 1000000 >> (rng() % 20));
        if (!build_huffman(FrequencyTable::finalized_from(c)).kraft_complete())
            return {false, "Kraft sum != 1 for a k=1024 table"};
    }
    const bool single = build_huffman(FrequencyTable::finalized_from({3})).length(0) == 1;
    return {single, fmt("%zu exhaustive tables (sizes 2..8, counts 1..6) optimal; Kraft equality on 20 k=1024 tables",
                        tables)};
}

bool same(const FeatureGrid& a, const FeatureGrid& b) { return a == b; }

Outcome replacement_exactness()
{
    std::mt19937_64 rng(77);
    for (int t = 0; t < 100; ++t) {
        const CodecSession s(random_codebook(rng, 1 + static_cast<int>(rng() % 256)));
        const int w = 16 * (1 + static_cast<int>(rng() % 6)), h = 16 * (1 + static_cast<int>(rng() % 6));
        const ImagePlane img = syn::scene_image(w, h, rng());
        const EncodeResult e = encode_with_map(s, img, random_map(rng, h / 16, w / 16));
        const DecodeResult d = decode_image(s, e.container);
        const FeatureGrid& z = d.hybrid;
        if (!same(apply_mask(d.trace.y3, d.masks.fine), apply_mask(z, d.masks.fine)))
            return {false, fmt("pipeline %d: y3 differs from the hybrid inside m1", t)};
        if (!same(apply_mask(d.trace.y2, d.masks.medium), apply_mask(avg_pool(z, 2), d.masks.medium)))
            return {false, fmt("pipeline %d: y2 differs from avg_pool(hybrid, 2) inside m2", t)};
    }
    for (int t = 0; t < 100; ++t) {
        FeatureGrid g{1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 5), {}};
        g.values.resize(g.cell_count() * static_cast<std::size_t>(g.d));
        for (float& v : g.values) v = static_cast<float>(syn::unit(rng) * 2 - 1);
        for (int f : {2, 4})
            if (!(avg_pool(nn_upsample(g, f), f) == g)) return {false, "avg_pool(nn_upsample(g)) != g"};
    }
    return {true, "100 random pipelines exact inside m1 and m2; pooling identity exact for factors 2 and 4"};
}

// Independent transcription of the three entropy formulas.
double oracle(const std::vector<float>& px, int n, double sigma)
{
    std::vector<double> f(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (float p : px) f[i] += std::exp(-std::pow(p - (-1.0 + 2.0 * i / (n - 1)), 2) / (2 * sigma * sigma)) / px.size();
    const double total = std::accumulate(f.begin(), f.end(), 0.0);
    double h = 0;
    for (double v : f)
        if (v > 0) h -= v / total * std::log2(v / total);
    return h;
}

Outcome entropy_properties()
{
    const EntropyConfig cfg = EntropyConfig::make();
    std::mt19937_64 rng(31);
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<float> px(static_cast<std::size_t>(1 + rng() % 768));
        const int mode = t % 3;
        for (float& v : px)
            v = mode == 0 ? static_cast<float>(syn::unit(rng) * 2 - 1)
                          : mode == 1 ? syn::on_byte_grid(syn::unit(rng) * 2 - 1) : static_cast<float>(0.3 * syn::unit(rng));
        const double h = patch_entropy(px, cfg);
        if (h < 0 || h > 5) return {false, fmt("entropy %.6f outside [0,5]", h)};
        std::vector<float> shuffled = px;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (patch_entropy(shuffled, cfg) != h) return {false, "permutation changed the entropy"};
        if (t < 50) worst = std::max(worst, std::abs(h - oracle(px, 32, cfg.sigma)));
    }
    const std::vector<float> flat(768, 0.25f);
    std::vector<float> noise(768);
    for (float& v : noise) v = static_cast<float>(syn::unit(rng) * 2 - 1);
    const double hc = patch_entropy(flat, cfg), hn = patch_entropy(noise, cfg);
    return {worst < 1e-9 && hc < hn,
            fmt("200 patches in [0,5] and permutation-invariant; constant %.4f < noise %.4f bits; max oracle error %.2e "
                "on 50 patches (tol 1e-9)",
                hc, hn, worst)};
}

Outcome quality_monotonicity()
{
    PhotoBench& b = photo_bench();
    const double L = b.session->rate_table().mean_code_length;
    Outcome out;
    double prev = -1;
    for (std::size_t t = 0; t < b.triples.size(); ++t) {
        double sum = 0;
        for (std::size_t i = 0; i < b.test_images.size(); ++i)
            sum += psnr(b.test_images[i], decode_image(*b.session, b.encoded[t][i].container).image);
        const double mean = sum / static_cast<double>(b.test_images.size());
        if (mean < prev) out.pass = false;
        prev = mean;
        const RatioTriple& r = b.triples[t];
        out.detail += fmt("(%g,%g,%g)@%.3f: %.2f dB; ", r.fine, r.medium, r.coarse, theoretical_bpp(r, L), mean);
    }
    out.detail += "20 images, non-decreasing required";
    return out;
}

} // namespace

int main()
{
    run("C1", "rate-formula fidelity", rate_formula_fidelity);
    run("C2", "theoretical-vs-actual discrepancy", discrepancy);
    run("C3", "fine-grained rate control", fine_control);
    run("C4", "statistical coding benefit", statistical_benefit);
    run("C5", "losslessness", losslessness);
    run("C6", "huffman optimality", huffman_optimality);
    run("C7", "replacement exactness", replacement_exactness);
    run("C8", "entropy properties", entropy_properties);
    run("C9", "quality monotonicity", quality_monotonicity);
    std::printf("%d of 9 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

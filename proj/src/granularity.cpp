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

#include "granucodec/granularity.hpp"

#include "granucodec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace granucodec {

const char* to_string(Granularity g)
{
    switch (g) {
    case Granularity::Fine: return "fine";
    case Granularity::Medium: return "medium";
    case Granularity::Coarse: return "coarse";
    }
    return "?";
}

void RatioTriple::validate() const
{
    for (double r : {fine, medium, coarse})
        GRANUCODEC_REQUIRE(std::isfinite(r) && r >= 0.0 && r <= 1.0, Error, "ratios must lie in [0,1]");
    GRANUCODEC_REQUIRE(std::abs(fine + medium + coarse - 1.0) <= 1e-9, Error, "ratios must sum to 1");
}

RatioTriple RatioTriple::parse(const std::string& text)
{
    std::istringstream in(text);
    double parts[3];
    char sep = 0;
    if (!(in >> parts[0] >> sep) || sep != ',' || !(in >> parts[1] >> sep) || sep != ',' || !(in >> parts[2]))
        throw Error("ratios: expected r1,r2,r3 but got '" + text + "'");
    in >> std::ws;
    if (!in.eof()) throw Error("ratios: trailing characters in '" + text + "'");

    const double sum = parts[0] + parts[1] + parts[2];
    if (std::abs(sum - 100.0) <= 1e-6)
        for (double& p : parts) p /= 100.0;
    RatioTriple r{parts[0], parts[1], parts[2]};
    r.validate();
    return r;
}

std::size_t GranularityMap::count(Granularity g) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), g));
}

RatioTriple GranularityMap::ratios() const
{
    if (labels.empty()) return {};
    const double n = static_cast<double>(labels.size());
    return {count(Granularity::Fine) / n, count(Granularity::Medium) / n, count(Granularity::Coarse) / n};
}

std::size_t Mask::ones() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

// Half-up rounding; the epsilon absorbs representation error such as
// 0.35 * 10 == 3.4999999999999996.
std::size_t round_half_up(double x)
{
    return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

} // namespace

BlockCounts block_counts(const RatioTriple& ratios, std::size_t n_blocks)
{
    ratios.validate();
    BlockCounts c;
    c.coarse = std::min(round_half_up(ratios.coarse * static_cast<double>(n_blocks)), n_blocks);
    c.medium = std::min(round_half_up(ratios.medium * static_cast<double>(n_blocks)), n_blocks - c.coarse);
    c.fine = n_blocks - c.coarse - c.medium;
    return c;
}

GranularityMap plan_granularity(const EntropyMap& map, const RatioTriple& ratios)
{
    const BlockCounts counts = block_counts(ratios, map.size());

    std::vector<std::size_t> order(map.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return map.values[a] < map.values[b]; });

    GranularityMap gmap(map.blocks_y, map.blocks_x, Granularity::Fine);
    for (std::size_t i = 0; i < counts.coarse; ++i) gmap.labels[order[i]] = Granularity::Coarse;
    for (std::size_t i = counts.coarse; i < counts.coarse + counts.medium; ++i)
        gmap.labels[order[i]] = Granularity::Medium;
    return gmap;
}

MaskSet masks_from_map(const GranularityMap& gmap)
{
    MaskSet m{Mask(gmap.blocks_y * 4, gmap.blocks_x * 4), Mask(gmap.blocks_y * 2, gmap.blocks_x * 2),
              Mask(gmap.blocks_y, gmap.blocks_x)};
    for (int by = 0; by < gmap.blocks_y; ++by)
        for (int bx = 0; bx < gmap.blocks_x; ++bx) {
            switch (gmap.at(by, bx)) {
            case Granularity::Fine:
                for (int y = 0; y < 4; ++y)
                    for (int x = 0; x < 4; ++x) m.fine.set(by * 4 + y, bx * 4 + x);
                break;
            case Granularity::Medium:
                for (int y = 0; y < 2; ++y)
                    for (int x = 0; x < 2; ++x) m.medium.set(by * 2 + y, bx * 2 + x);
                break;
            case Granularity::Coarse:
                m.coarse.set(by, bx);
                break;
            }
        }
    return m;
}

double theoretical_index_bpp(const RatioTriple& ratios, double mean_code_length)
{
    return mean_code_length / 256.0 * (16.0 * ratios.fine + 4.0 * ratios.medium + ratios.coarse);
}

double theoretical_mask_bpp(const RatioTriple& ratios)
{
    return (4.0 * ratios.fine + ratios.medium) / 256.0;
}

double theoretical_bpp(const RatioTriple& ratios, double mean_code_length)
{
    ratios.validate();
    GRANUCODEC_REQUIRE(mean_code_length > 0.0, Error, "mean code length must be positive");
    return theoretical_index_bpp(ratios, mean_code_length) + theoretical_mask_bpp(ratios);
}

namespace {

void sort_rows(std::vector<RateRow>& rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) { return a.bpp < b.bpp; });
}

} // namespace

RateQueryTable build_rate_table(double mean_code_length, double step)
{
    GRANUCODEC_REQUIRE(step > 0.0 && step <= 0.5, Error, "rate table: step must lie in (0, 0.5]");
    const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
    // Use exact fractions i/n when the step divides 1, to keep the lattice
    // free of accumulated error (0.01 * 7 != 0.07).
    const bool exact = std::abs(n * step - 1.0) < 1e-9;
    auto value = [&](int i) { return exact ? static_cast<double>(i) / n : i * step; };

    RateQueryTable table;
    table.mean_code_length = mean_code_length;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            RatioTriple r{value(i), value(j), 0.0};
            r.coarse = std::max(0.0, 1.0 - r.fine - r.medium);
            table.rows.push_back({r, theoretical_bpp(r, mean_code_length)});
        }
    sort_rows(table.rows);
    return table;
}

RateQueryTable make_rate_table(double mean_code_length, std::span<const RatioTriple> candidates)
{
    RateQueryTable table;
    table.mean_code_length = mean_code_length;
    for (const RatioTriple& r : candidates) table.rows.push_back({r, theoretical_bpp(r, mean_code_length)});
    sort_rows(table.rows);
    return table;
}

RatioTriple ratios_for_target(const RateQueryTable& table, double target_bpp)
{
    GRANUCODEC_REQUIRE(!table.rows.empty(), Error, "rate table is empty");
    constexpr double kTie = 1e-12;
    const RateRow* best = &table.rows.front();
    double best_dist = std::abs(best->bpp - target_bpp);
    for (const RateRow& row : table.rows) {
        const double dist = std::abs(row.bpp - target_bpp);
        if (dist < best_dist - kTie || (dist <= best_dist + kTie && row.ratios.fine > best->ratios.fine)) {
            best = &row;
            best_dist = std::min(dist, best_dist);
        }
    }
    return best->ratios;
}

} // namespace granucodec

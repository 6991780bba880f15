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

#include "granucodec/bitstream.hpp"

#include "granucodec/detail/bytes.hpp"
#include "granucodec/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>

namespace granucodec {

void BitWriter::write(std::uint64_t value, int nbits)
{
    for (int i = nbits - 1; i >= 0; --i) {
        if (buf_.bits % 8 == 0) buf_.bytes.push_back(0);
        if ((value >> i) & 1u) buf_.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (buf_.bits % 8));
        ++buf_.bits;
    }
}

void BitWriter::append(const BitBuffer& other)
{
    BitReader r(other);
    while (r.remaining() > 0) write(static_cast<std::uint64_t>(r.read_bit()), 1);
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t begin_bit, std::size_t end_bit)
    : bytes_(bytes), pos_(begin_bit), end_(end_bit)
{
    GRANUCODEC_REQUIRE(begin_bit <= end_bit && end_bit <= bytes.size() * 8, FormatError, "bit range exceeds buffer");
}

int BitReader::read_bit()
{
    if (pos_ >= end_) throw FormatError("bitstream: truncated payload");
    const int bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return bit;
}

namespace {

// Kraft sum in units of 2^-max_len, paired with max_len; empty when the sum
// exceeds one.
std::optional<std::pair<std::uint64_t, int>> kraft_units(std::span<const std::uint8_t> lengths)
{
    const int max_len = *std::max_element(lengths.begin(), lengths.end());
    const std::uint64_t one = std::uint64_t{1} << max_len;
    std::uint64_t sum = 0;
    for (std::uint8_t len : lengths) {
        sum += std::uint64_t{1} << (max_len - len);
        if (sum > one) return std::nullopt;
    }
    return std::pair{sum, max_len};
}

} // namespace

HuffmanCode HuffmanCode::from_lengths(std::vector<std::uint8_t> lengths)
{
    GRANUCODEC_REQUIRE(!lengths.empty(), Error, "huffman: empty alphabet");
    HuffmanCode code;
    code.lengths_ = std::move(lengths);
    const std::size_t k = code.lengths_.size();

    for (std::uint8_t len : code.lengths_)
        GRANUCODEC_REQUIRE(len >= 1 && len <= kMaxLength, Error, "huffman: code length out of range");

    code.sorted_.resize(k);
    std::iota(code.sorted_.begin(), code.sorted_.end(), 0u);
    std::stable_sort(code.sorted_.begin(), code.sorted_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return code.lengths_[a] < code.lengths_[b]; });

    for (std::uint8_t len : code.lengths_) ++code.count_[len];
    GRANUCODEC_REQUIRE(kraft_units(code.lengths_).has_value(), Error, "huffman: lengths violate the Kraft inequality");

    code.codewords_.resize(k);
    std::uint64_t next = 0;
    int prev_len = code.lengths_[code.sorted_[0]];
    std::uint32_t offset = 0;
    for (int len = 1; len <= kMaxLength; ++len) {
        code.offset_[len] = offset;
        offset += code.count_[len];
    }
    for (std::uint32_t sym : code.sorted_) {
        const int len = code.lengths_[sym];
        next <<= (len - prev_len);
        prev_len = len;
        if (sym == code.sorted_[code.offset_[len]])
            code.first_code_[len] = next;
        code.codewords_[sym] = next++;
    }
    return code;
}

bool HuffmanCode::kraft_complete() const
{
    const auto units = kraft_units(lengths_);
    return units && units->first == (std::uint64_t{1} << units->second);
}

void HuffmanCode::encode(BitWriter& out, std::uint32_t symbol) const
{
    GRANUCODEC_REQUIRE(symbol < lengths_.size(), Error, "huffman: symbol outside alphabet");
    out.write(codewords_[symbol], lengths_[symbol]);
}

std::uint32_t HuffmanCode::decode(BitReader& in) const
{
    std::uint64_t code = 0;
    for (int len = 1; len <= kMaxLength; ++len) {
        code = (code << 1) | static_cast<std::uint64_t>(in.read_bit());
        if (count_[len] > 0 && code >= first_code_[len] && code - first_code_[len] < count_[len])
            return sorted_[offset_[len] + static_cast<std::uint32_t>(code - first_code_[len])];
    }
    throw FormatError("huffman: invalid prefix walk");
}

HuffmanCode build_huffman(const FrequencyTable& tbl)
{
    GRANUCODEC_REQUIRE(tbl.finalized(), Error, "huffman: frequency table is not finalized");
    const std::size_t k = tbl.size();
    GRANUCODEC_REQUIRE(k >= 1, Error, "huffman: empty alphabet");
    if (k == 1) return HuffmanCode::from_lengths({1});

    struct Node {
        std::uint64_t weight;
        std::uint32_t min_symbol;
        int left;
        int right;
    };
    std::vector<Node> nodes;
    nodes.reserve(2 * k - 1);
    for (std::size_t s = 0; s < k; ++s) nodes.push_back({tbl.counts()[s], static_cast<std::uint32_t>(s), -1, -1});

    auto later = [&](int a, int b) {
        if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
        return nodes[a].min_symbol > nodes[b].min_symbol;
    };
    std::priority_queue<int, std::vector<int>, decltype(later)> heap(later);
    for (std::size_t s = 0; s < k; ++s) heap.push(static_cast<int>(s));

    while (heap.size() > 1) {
        const int a = heap.top();
        heap.pop();
        const int b = heap.top();
        heap.pop();
        nodes.push_back({nodes[a].weight + nodes[b].weight, std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b});
        heap.push(static_cast<int>(nodes.size() - 1));
    }

    std::vector<std::uint8_t> lengths(k, 0);
    std::vector<std::pair<int, int>> stack{{heap.top(), 0}};
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        if (nodes[id].left < 0) {
            GRANUCODEC_REQUIRE(depth <= HuffmanCode::kMaxLength, Error, "huffman: code length exceeds 63 bits");
            lengths[nodes[id].min_symbol] = static_cast<std::uint8_t>(depth);
        } else {
            stack.push_back({nodes[id].left, depth + 1});
            stack.push_back({nodes[id].right, depth + 1});
        }
    }
    return HuffmanCode::from_lengths(std::move(lengths));
}

double mean_code_length(const HuffmanCode& code)
{
    const auto lens = code.lengths();
    const double sum = std::accumulate(lens.begin(), lens.end(), 0.0);
    return sum / static_cast<double>(lens.size());
}

std::uint64_t weighted_code_length(const HuffmanCode& code, std::span<const std::uint64_t> counts)
{
    GRANUCODEC_REQUIRE(counts.size() == code.size(), Error, "weighted_code_length: alphabet size mismatch");
    std::uint64_t bits = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) bits += counts[s] * static_cast<std::uint64_t>(code.length(static_cast<std::uint32_t>(s)));
    return bits;
}

std::array<BitBuffer, 3> encode_indices(const IndexStreams& streams, const HuffmanCode& code)
{
    std::array<BitBuffer, 3> out;
    for (std::size_t i = 0; i < 3; ++i) {
        BitWriter w;
        for (std::uint32_t s : streams[i]) code.encode(w, s);
        out[i] = w.take();
    }
    return out;
}

namespace {

std::vector<std::uint32_t> decode_stream(BitReader& in, std::size_t count, const HuffmanCode& code)
{
    std::vector<std::uint32_t> out(count);
    for (std::uint32_t& s : out) s = code.decode(in);
    if (in.remaining() != 0) throw FormatError("bitstream: index segment has trailing bits");
    return out;
}

} // namespace

IndexStreams decode_indices(const std::array<BitBuffer, 3>& payloads, const std::array<std::size_t, 3>& counts,
                            const HuffmanCode& code)
{
    IndexStreams out;
    for (std::size_t i = 0; i < 3; ++i) {
        BitReader r(payloads[i]);
        out[i] = decode_stream(r, counts[i], code);
    }
    return out;
}

BitBuffer encode_granularity_map(const GranularityMap& gmap)
{
    BitWriter w;
    for (Granularity g : gmap.labels) {
        switch (g) {
        case Granularity::Coarse: w.write(0b0, 1); break;
        case Granularity::Medium: w.write(0b10, 2); break;
        case Granularity::Fine: w.write(0b11, 2); break;
        }
    }
    return w.take();
}

GranularityMap decode_granularity_map(BitReader& in, int blocks_y, int blocks_x)
{
    GranularityMap gmap(blocks_y, blocks_x);
    for (Granularity& g : gmap.labels) {
        if (in.read_bit() == 0)
            g = Granularity::Coarse;
        else
            g = in.read_bit() == 0 ? Granularity::Medium : Granularity::Fine;
    }
    return gmap;
}

std::array<std::size_t, 3> stream_lengths(const GranularityMap& gmap)
{
    return {16 * gmap.count(Granularity::Fine), 4 * gmap.count(Granularity::Medium), gmap.count(Granularity::Coarse)};
}

std::array<std::uint16_t, 3> ratio_parts(const RatioTriple& r)
{
    auto part = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 10000.0)); };
    const int coarse = part(r.coarse);
    const int medium = std::min(part(r.medium), 10000 - coarse);
    const int fine = 10000 - coarse - medium;
    return {static_cast<std::uint16_t>(fine), static_cast<std::uint16_t>(medium), static_cast<std::uint16_t>(coarse)};
}

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'G', 'I', 'C'};
constexpr std::size_t kCrcOffset = 51;

std::uint32_t container_crc(std::span<const std::uint8_t> bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, bytes.data(), static_cast<uInt>(kCrcOffset));
    const auto payload = bytes.subspan(kContainerHeaderSize);
    crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    return static_cast<std::uint32_t>(crc);
}

std::uint32_t padded_dim(std::uint32_t v)
{
    return (v + kBlockSize - 1) / kBlockSize * kBlockSize;
}

} // namespace

std::vector<std::uint8_t> serialize_container(const ContainerParts& parts, const HuffmanCode& code)
{
    GRANUCODEC_REQUIRE(parts.true_width > 0 && parts.true_height > 0, Error, "container: empty image");
    GRANUCODEC_REQUIRE(parts.padded_width == padded_dim(parts.true_width) &&
                           parts.padded_height == padded_dim(parts.true_height),
                       Error, "container: padded dimensions inconsistent with true dimensions");
    GRANUCODEC_REQUIRE(static_cast<std::uint32_t>(parts.gmap.blocks_x) * kBlockSize == parts.padded_width &&
                           static_cast<std::uint32_t>(parts.gmap.blocks_y) * kBlockSize == parts.padded_height,
                       Error, "container: granularity map does not match image size");
    const auto expected = stream_lengths(parts.gmap);
    for (std::size_t i = 0; i < 3; ++i)
        GRANUCODEC_REQUIRE(parts.indices[i].size() == expected[i], Error, "container: index stream length does not match map");

    const BitBuffer map_bits = encode_granularity_map(parts.gmap);
    const auto streams = encode_indices(parts.indices, code);

    detail::ByteWriter w;
    for (std::uint8_t b : kMagic) w.u8(b);
    w.u8(kContainerVersion);
    w.u32(parts.true_width);
    w.u32(parts.true_height);
    w.u32(parts.padded_width);
    w.u32(parts.padded_height);
    w.u64(parts.codebook_hash);
    for (std::uint16_t p : ratio_parts(parts.ratios)) w.u16(p);
    for (const BitBuffer& s : streams) {
        GRANUCODEC_REQUIRE(s.bits <= 0xffffffffu, Error, "container: segment too large");
        w.u32(static_cast<std::uint32_t>(s.bits));
    }
    w.u32(static_cast<std::uint32_t>(map_bits.bits));
    w.u32(0); // CRC placeholder

    BitWriter payload;
    payload.append(map_bits);
    for (const BitBuffer& s : streams) payload.append(s);
    w.raw(payload.buffer().bytes);

    auto& bytes = w.bytes();
    const std::uint32_t crc = container_crc(bytes);
    for (int i = 0; i < 4; ++i) bytes[kCrcOffset + i] = static_cast<std::uint8_t>(crc >> (8 * i));
    return std::move(bytes);
}

ContainerHeader parse_container_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kContainerHeaderSize) throw FormatError("container: truncated header");
    detail::ByteReader r(bytes, "container");
    for (std::uint8_t b : kMagic)
        if (r.u8() != b) throw FormatError("container: bad magic");

    ContainerHeader h;
    h.version = r.u8();
    if (h.version != kContainerVersion) throw FormatError("container: unsupported version");
    h.true_width = r.u32();
    h.true_height = r.u32();
    h.padded_width = r.u32();
    h.padded_height = r.u32();
    h.codebook_hash = r.u64();
    for (auto& p : h.ratio_parts) p = r.u16();
    for (auto& b : h.index_bits) b = r.u32();
    h.map_bits = r.u32();
    h.crc = r.u32();

    if (h.crc != container_crc(bytes)) throw FormatError("container: checksum mismatch");
    if (h.true_width == 0 || h.true_height == 0 || h.true_width > 65535 || h.true_height > 65535)
        throw FormatError("container: invalid image dimensions");
    if (h.padded_width != padded_dim(h.true_width) || h.padded_height != padded_dim(h.true_height))
        throw FormatError("container: padded dimensions inconsistent");
    if (std::uint32_t{h.ratio_parts[0]} + h.ratio_parts[1] + h.ratio_parts[2] != 10000)
        throw FormatError("container: ratio fields do not sum to 10000");

    const std::size_t blocks = std::size_t{h.padded_width / kBlockSize} * (h.padded_height / kBlockSize);
    if (h.map_bits < blocks || h.map_bits > 2 * blocks) throw FormatError("container: map segment length inconsistent");
    const std::size_t bits = h.payload_bits();
    if (bytes.size() != kContainerHeaderSize + (bits + 7) / 8) throw FormatError("container: payload size mismatch");
    if (bits % 8 != 0) {
        const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu >> (bits % 8));
        if (bytes.back() & pad_mask) throw FormatError("container: non-zero padding bits");
    }
    return h;
}

ContainerParts parse_container(std::span<const std::uint8_t> bytes, const HuffmanCode& code, std::uint64_t expected_hash)
{
    const ContainerHeader h = parse_container_header(bytes);
    if (h.codebook_hash != expected_hash) throw FormatError("container: encoded with a different codebook");

    ContainerParts parts;
    parts.true_width = h.true_width;
    parts.true_height = h.true_height;
    parts.padded_width = h.padded_width;
    parts.padded_height = h.padded_height;
    parts.codebook_hash = h.codebook_hash;
    parts.ratios = {h.ratio_parts[0] / 10000.0, h.ratio_parts[1] / 10000.0, h.ratio_parts[2] / 10000.0};

    const auto payload = bytes.subspan(kContainerHeaderSize);
    std::size_t pos = 0;
    BitReader map_reader(payload, pos, pos + h.map_bits);
    parts.gmap = decode_granularity_map(map_reader, static_cast<int>(h.padded_height / kBlockSize),
                                        static_cast<int>(h.padded_width / kBlockSize));
    if (map_reader.remaining() != 0) throw FormatError("container: map segment has trailing bits");
    pos += h.map_bits;

    const auto counts = stream_lengths(parts.gmap);
    for (std::size_t i = 0; i < 3; ++i) {
        BitReader r(payload, pos, pos + h.index_bits[i]);
        parts.indices[i] = decode_stream(r, counts[i], code);
        pos += h.index_bits[i];
    }
    return parts;
}

double bits_per_pixel(std::size_t byte_count, std::size_t pixel_count)
{
    GRANUCODEC_REQUIRE(pixel_count > 0, Error, "bits_per_pixel: pixel count must be positive");
    return 8.0 * static_cast<double>(byte_count) / static_cast<double>(pixel_count);
}

RateReport measure_rate(std::span<const std::uint8_t> container, std::size_t pixel_count)
{
    const ContainerHeader h = parse_container_header(container);
    const double px = static_cast<double>(pixel_count);
    RateReport rate;
    rate.total_bpp = bits_per_pixel(container.size(), pixel_count);
    rate.map_bpp = static_cast<double>(h.map_bits) / px;
    rate.index_bpp = static_cast<double>(std::size_t{h.index_bits[0]} + h.index_bits[1] + h.index_bits[2]) / px;
    rate.payload_bpp = rate.map_bpp + rate.index_bpp;
    return rate;
}

} // namespace granucodec

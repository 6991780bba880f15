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
 * @brief Canonical Huffman coding of VQ indices with a shared, corpus-level
 * frequency table, granularity map coding, and the .cgic container.
 *
 * Container layout (little-endian):
 *
 *   offset size field
 *   0      4    magic "CGIC"
 *   4      1    version (1)
 *   5      4    true width
 *   9      4    true height
 *   13     4    padded width
 *   17     4    padded height
 *   21     8    codebook id hash
 *   29     6    r1, r2, r3 as u16 parts per 10000
 *   35     12   bit lengths of the fine, medium and coarse index segments
 *   47     4    bit length of the granularity map segment
 *   51     4    CRC-32 of bytes [0,51) followed by the payload
 *   55     ...  payload: map bits, then fine, medium, coarse index bits,
 *               MSB-first, zero-padded to a byte boundary
 */

#pragma once

#include "granucodec/granularity.hpp"
#include "granucodec/vq.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace granucodec {

/// Bits packed MSB-first.
struct BitBuffer {
    std::vector<std::uint8_t> bytes;
    std::size_t bits = 0;
};

class BitWriter {
public:
    void write(std::uint64_t value, int nbits);
    void append(const BitBuffer& other);
    std::size_t bit_count() const { return buf_.bits; }
    const BitBuffer& buffer() const { return buf_; }
    BitBuffer take() { return std::move(buf_); }

private:
    BitBuffer buf_;
};

/// Reads bits in [begin, end) of a byte span.
class BitReader {
public:
    BitReader(std::span<const std::uint8_t> bytes, std::size_t begin_bit, std::size_t end_bit);
    explicit BitReader(const BitBuffer& buf) : BitReader(buf.bytes, 0, buf.bits) {}

    int read_bit();
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return end_ - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
    std::size_t end_;
};

/// Canonical prefix code defined by per-symbol lengths; codewords are
/// assigned in (length, symbol) order.
class HuffmanCode {
public:
    static constexpr int kMaxLength = 63;

    /// Throws if the lengths violate the Kraft inequality or exceed kMaxLength.
    static HuffmanCode from_lengths(std::vector<std::uint8_t> lengths);

    std::size_t size() const { return lengths_.size(); }
    int length(std::uint32_t symbol) const { return lengths_[symbol]; }
    std::uint64_t codeword(std::uint32_t symbol) const { return codewords_[symbol]; }
    std::span<const std::uint8_t> lengths() const { return lengths_; }

    /// True when the sum of 2^-len equals one exactly.
    bool kraft_complete() const;

    void encode(BitWriter& out, std::uint32_t symbol) const;
    std::uint32_t decode(BitReader& in) const;

private:
    std::vector<std::uint8_t> lengths_;
    std::vector<std::uint64_t> codewords_;
    // Per length: first canonical code, count, and offset into sorted_.
    std::array<std::uint64_t, kMaxLength + 1> first_code_{};
    std::array<std::uint32_t, kMaxLength + 1> count_{};
    std::array<std::uint32_t, kMaxLength + 1> offset_{};
    std::vector<std::uint32_t> sorted_;
};

/// Huffman's algorithm on a finalized table. Equal weights merge the node
/// whose subtree holds the lowest symbol first. A single-symbol alphabet
/// gets length 1.
HuffmanCode build_huffman(const FrequencyTable& tbl);

/// Unweighted mean of the code lengths.
double mean_code_length(const HuffmanCode& code);

/// Sum of count * length, i.e. bits to code the table's own samples.
std::uint64_t weighted_code_length(const HuffmanCode& code, std::span<const std::uint64_t> counts);

using IndexStreams = std::array<std::vector<std::uint32_t>, 3>; ///< fine, medium, coarse

std::array<BitBuffer, 3> encode_indices(const IndexStreams& streams, const HuffmanCode& code);

/// Decodes counts[i] symbols from each payload; each must be consumed exactly.
IndexStreams decode_indices(const std::array<BitBuffer, 3>& payloads, const std::array<std::size_t, 3>& counts,
                            const HuffmanCode& code);

/// Raster order; coarse -> 0, medium -> 10, fine -> 11.
BitBuffer encode_granularity_map(const GranularityMap& gmap);
GranularityMap decode_granularity_map(BitReader& in, int blocks_y, int blocks_x);

/// Number of indices each stream holds for a map: 16, 4 and 1 per block.
std::array<std::size_t, 3> stream_lengths(const GranularityMap& gmap);

inline constexpr std::size_t kContainerHeaderSize = 55;
inline constexpr std::uint8_t kContainerVersion = 1;

struct ContainerHeader {
    std::uint8_t version = kContainerVersion;
    std::uint32_t true_width = 0;
    std::uint32_t true_height = 0;
    std::uint32_t padded_width = 0;
    std::uint32_t padded_height = 0;
    std::uint64_t codebook_hash = 0;
    std::array<std::uint16_t, 3> ratio_parts{}; ///< per 10000
    std::array<std::uint32_t, 3> index_bits{};  ///< fine, medium, coarse
    std::uint32_t map_bits = 0;
    std::uint32_t crc = 0;

    std::size_t payload_bits() const { return std::size_t{map_bits} + index_bits[0] + index_bits[1] + index_bits[2]; }
};

/// Everything the container carries, in decoded form.
struct ContainerParts {
    std::uint32_t true_width = 0;
    std::uint32_t true_height = 0;
    std::uint32_t padded_width = 0;
    std::uint32_t padded_height = 0;
    std::uint64_t codebook_hash = 0;
    RatioTriple ratios;
    GranularityMap gmap;
    IndexStreams indices;
};

/// Ratios rounded to parts per 10000 summing to exactly 10000.
std::array<std::uint16_t, 3> ratio_parts(const RatioTriple& r);

std::vector<std::uint8_t> serialize_container(const ContainerParts& parts, const HuffmanCode& code);

/// Structural validation only (magic, version, CRC, dimension and length
/// consistency, zero padding); needs no codebook.
ContainerHeader parse_container_header(std::span<const std::uint8_t> bytes);

/// Full parse. Throws FormatError on any inconsistency, including a codebook
/// hash different from expected_hash.
ContainerParts parse_container(std::span<const std::uint8_t> bytes, const HuffmanCode& code,
                               std::uint64_t expected_hash);

struct RateReport {
    double total_bpp = 0.0;   ///< whole file
    double payload_bpp = 0.0; ///< map and index bits only
    double index_bpp = 0.0;
    double map_bpp = 0.0;
};

double bits_per_pixel(std::size_t byte_count, std::size_t pixel_count);

RateReport measure_rate(std::span<const std::uint8_t> container, std::size_t pixel_count);

} // namespace granucodec

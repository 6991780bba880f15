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

// granucodec command-line tool.

#include "granucodec/bitstream.hpp"
#include "granucodec/codec.hpp"
#include "granucodec/error.hpp"
#include "granucodec/granularity.hpp"
#include "granucodec/imaging.hpp"
#include "granucodec/spatial_entropy.hpp"
#include "granucodec/vq.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace granucodec;
using json = nlohmann::json;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    GRANUCODEC_REQUIRE(in.good(), Error, "cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(p, std::ios::binary);
    GRANUCODEC_REQUIRE(out.good(), Error, "cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    GRANUCODEC_REQUIRE(out.good(), Error, "write failed: " + p.string());
}

// Options shared by every command that builds a session.
struct SessionFlags {
    std::string codebook;
    std::optional<double> code_length; // test hook: pin L
    std::string table;                 // test hook: "r1,r2,r3;r1,r2,r3;..."

    void add(CLI::App* cmd, bool hooks)
    {
        cmd->add_option("--codebook", codebook, "Codebook file (.cgcb)")->required()->check(CLI::ExistingFile);
        if (!hooks) return;
        cmd->add_option("--code-length", code_length, "Override the mean code length L used by the rate table")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--table", table, "Restrict the rate table to these ratio triples, separated by ';'");
    }

    CodecSession open(double step = 0.01) const
    {
        SessionOptions opts;
        opts.table_step = step;
        opts.mean_code_length = code_length;
        std::stringstream ss(table);
        for (std::string row; std::getline(ss, row, ';');)
            if (!row.empty()) opts.table_rows.push_back(RatioTriple::parse(row));
        return CodecSession(load_codebook(codebook), std::move(opts));
    }
};

struct RateFlags {
    std::string ratios;
    std::optional<double> bpp;

    void add(CLI::App* cmd)
    {
        auto* r = cmd->add_option("--ratios", ratios, "Granularity ratios r1,r2,r3 (fine, medium, coarse)");
        auto* b = cmd->add_option("--bpp", bpp, "Target bits per pixel, resolved through the rate table");
        r->excludes(b);
        b->excludes(r);
    }

    RateRequest request() const
    {
        if (bpp) return TargetBpp{*bpp};
        GRANUCODEC_REQUIRE(!ratios.empty(), Error, "one of --ratios or --bpp is required");
        return RatioTriple::parse(ratios);
    }
};

std::string ratio_text(const RatioTriple& r)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", r.fine, r.medium, r.coarse);
    return buf;
}

json ratio_json(const RatioTriple& r) { return json::array({r.fine, r.medium, r.coarse}); }

std::vector<fs::path> corpus_files(const fs::path& dir)
{
    GRANUCODEC_REQUIRE(fs::is_directory(dir), Error, "not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".ppm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    GRANUCODEC_REQUIRE(!files.empty(), Error, "no .ppm files in " + dir.string());
    return files;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"granucodec: variable-rate block-granularity VQ image codec"};
    app.require_subcommand(1);
    app.set_config("--config", "granucodec.conf", "key=value configuration file; command-line flags take precedence");

    // train-codebook
    std::string corpus, cb_out;
    int k = 1024, d = 4, iters = 10;
    std::uint64_t seed = 1;
    auto* train = app.add_subcommand("train-codebook", "k-means codebook and index frequency table from a PPM corpus");
    train->add_option("--corpus", corpus, "Directory of .ppm training images (read in sorted order)")->required();
    train->add_option("--k", k, "Number of codes")->capture_default_str()->check(CLI::Range(1, 65535));
    train->add_option("--d", d, "Feature dimension (the block-stats transform has d=4)")->capture_default_str();
    train->add_option("--seed", seed, "k-means++ seed")->capture_default_str();
    train->add_option("--iters", iters, "Lloyd iterations")->capture_default_str()->check(CLI::NonNegativeNumber);
    train->add_option("--out", cb_out, "Output codebook path")->required();

    // encode
    SessionFlags enc_session;
    RateFlags enc_rate;
    std::string enc_in, enc_out;
    auto* encode = app.add_subcommand("encode", "Compress a PPM image into a .cgic container");
    enc_session.add(encode, true);
    encode->add_option("--input", enc_in, "Input PPM")->required()->check(CLI::ExistingFile);
    encode->add_option("--out", enc_out, "Output container")->required();
    enc_rate.add(encode);

    // decode
    SessionFlags dec_session;
    std::string dec_in, dec_out;
    auto* decode = app.add_subcommand("decode", "Reconstruct a PPM image from a .cgic container");
    dec_session.add(decode, false);
    decode->add_option("--input", dec_in, "Input container")->required()->check(CLI::ExistingFile);
    decode->add_option("--out", dec_out, "Output PPM")->required();

    // stats
    SessionFlags st_session;
    RateFlags st_rate;
    std::string st_in, st_csv;
    bool st_json = false;
    auto* stats = app.add_subcommand("stats", "Encode in memory and report rate, quality and block counts");
    st_session.add(stats, true);
    stats->add_option("--input", st_in, "Input PPM")->required()->check(CLI::ExistingFile);
    st_rate.add(stats);
    stats->add_option("--entropy-csv", st_csv, "Write the block entropy map as CSV (row,col,H)");
    stats->add_flag("--json", st_json, "Machine-readable output");

    // rate-table
    SessionFlags rt_session;
    double step = 0.01;
    std::string rt_out;
    auto* rate_table = app.add_subcommand("rate-table", "Dump the ratio -> theoretical bpp query table as CSV");
    rt_session.add(rate_table, true);
    rate_table->add_option("--step", step, "Simplex lattice step")->capture_default_str()->check(CLI::Range(1e-4, 1.0));
    rate_table->add_option("--out", rt_out, "Output CSV (stdout if omitted)");

    // inspect
    std::string in_path;
    bool in_json = false;
    auto* inspect = app.add_subcommand("inspect", "Print container header fields and segment sizes");
    inspect->add_option("--input", in_path, "Input container")->required()->check(CLI::ExistingFile);
    inspect->add_flag("--json", in_json, "Machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            GRANUCODEC_REQUIRE(d == 4, Error, "the block-stats transform produces d=4 features");
            std::vector<ImagePlane> images;
            for (const auto& f : corpus_files(corpus)) images.push_back(load_image(f));
            KMeansReport report;
            const Codebook cb =
                train_codebook_from_images(images, {k, iters, seed}, TransformSpec{}, &report);
            save_codebook(cb_out, cb);
            std::printf("trained k=%d d=%d on %zu images; distortion %.6g; wrote %s\n", cb.k, cb.d, images.size(),
                        report.distortion.empty() ? 0.0 : report.distortion.back(), cb_out.c_str());
        } else if (*encode) {
            const CodecSession s = enc_session.open();
            const ImagePlane img = load_image(enc_in);
            const EncodeResult e = encode_image(s, img, enc_rate.request());
            write_bytes(enc_out, e.container);
            const RateReport r = measure_rate(e.container, img.true_pixel_count());
            std::printf("ratios %s  theoretical %.4f bpp  actual %.4f bpp  (%zu bytes)\n", ratio_text(e.ratios).c_str(),
                        theoretical_bpp(e.ratios, s.rate_table().mean_code_length), r.total_bpp, e.container.size());
        } else if (*decode) {
            const CodecSession s = dec_session.open();
            const DecodeResult r = decode_image(s, read_bytes(dec_in));
            save_image(dec_out, r.image);
            std::printf("decoded %dx%d -> %s\n", r.image.true_width, r.image.true_height, dec_out.c_str());
        } else if (*stats) {
            const CodecSession s = st_session.open();
            const ImagePlane img = load_image(st_in);
            const EncodeResult e = encode_image(s, img, st_rate.request());
            const DecodeResult dec = decode_image(s, e.container);
            const RateReport r = measure_rate(e.container, img.true_pixel_count());
            const double L = s.rate_table().mean_code_length;
            const double q = psnr(img, dec.image);
            if (!st_csv.empty()) {
                const EntropyMap m = entropy_map(img, s.entropy_config());
                std::ofstream csv(st_csv);
                GRANUCODEC_REQUIRE(csv.good(), Error, "cannot write " + st_csv);
                csv << "row,col,H\n";
                csv.precision(17);
                for (int y = 0; y < m.blocks_y; ++y)
                    for (int x = 0; x < m.blocks_x; ++x) csv << y << ',' << x << ',' << m.at(y, x) << '\n';
            }
            const std::size_t nf = e.gmap.count(Granularity::Fine), nm = e.gmap.count(Granularity::Medium),
                              nc = e.gmap.count(Granularity::Coarse);
            if (st_json) {
                json j{{"ratios", ratio_json(e.ratios)},
                       {"mean_code_length", L},
                       {"theoretical_bpp", theoretical_bpp(e.ratios, L)},
                       {"actual_bpp", r.total_bpp},
                       {"payload_bpp", r.payload_bpp},
                       {"psnr_db", is_lossless(q) ? json(nullptr) : json(q)},
                       {"lossless", is_lossless(q)},
                       {"blocks", {{"fine", nf}, {"medium", nm}, {"coarse", nc}}}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::printf("ratios           %s\n", ratio_text(e.ratios).c_str());
                std::printf("theoretical bpp  %.6f (L=%.4f)\n", theoretical_bpp(e.ratios, L), L);
                std::printf("actual bpp       %.6f (payload %.6f)\n", r.total_bpp, r.payload_bpp);
                if (is_lossless(q))
                    std::printf("psnr             inf (lossless)\n");
                else
                    std::printf("psnr             %.3f dB\n", q);
                std::printf("blocks           fine %zu  medium %zu  coarse %zu\n", nf, nm, nc);
            }
        } else if (*rate_table) {
            const CodecSession s = rt_session.open(step);
            std::ofstream file;
            if (!rt_out.empty()) {
                file.open(rt_out);
                GRANUCODEC_REQUIRE(file.good(), Error, "cannot write " + rt_out);
            }
            std::ostream& out = rt_out.empty() ? std::cout : file;
            out << "r1,r2,r3,bpp\n";
            char line[128];
            for (const RateRow& row : s.rate_table().rows) {
                std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6f\n", row.ratios.fine, row.ratios.medium,
                              row.ratios.coarse, row.bpp);
                out << line;
            }
        } else if (*inspect) {
            const std::vector<std::uint8_t> bytes = read_bytes(in_path);
            const ContainerHeader h = parse_container_header(bytes);
            const RateReport r = measure_rate(bytes, std::size_t{h.true_width} * h.true_height);
            char hash[32];
            std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(h.codebook_hash));
            if (in_json) {
                json j{{"version", h.version},
                       {"true_size", {h.true_width, h.true_height}},
                       {"padded_size", {h.padded_width, h.padded_height}},
                       {"codebook_hash", hash},
                       {"ratio_parts", h.ratio_parts},
                       {"index_bits", {{"fine", h.index_bits[0]}, {"medium", h.index_bits[1]}, {"coarse", h.index_bits[2]}}},
                       {"map_bits", h.map_bits},
                       {"header_bytes", kContainerHeaderSize},
                       {"file_bytes", bytes.size()},
                       {"actual_bpp", r.total_bpp},
                       {"payload_bpp", r.payload_bpp}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::printf("version       %u\n", h.version);
                std::printf("size          %ux%u (padded %ux%u)\n", h.true_width, h.true_height, h.padded_width,
                            h.padded_height);
                std::printf("codebook      %s\n", hash);
                std::printf("ratios        %u,%u,%u /10000\n", h.ratio_parts[0], h.ratio_parts[1], h.ratio_parts[2]);
                std::printf("map bits      %u\n", h.map_bits);
                std::printf("index bits    fine %u  medium %u  coarse %u\n", h.index_bits[0], h.index_bits[1],
                            h.index_bits[2]);
                std::printf("file bytes    %zu (header %zu)\n", bytes.size(), kContainerHeaderSize);
                std::printf("actual bpp    %.6f (payload %.6f)\n", r.total_bpp, r.payload_bpp);
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

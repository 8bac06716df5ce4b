#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "vlbench/common.hpp"
#include "vlbench/render/raster.hpp"

namespace vlbench {

namespace pngdetail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace pngdetail

// RGBA8 PNG with filter type 0 per scanline; zlib level 6 (the default) keeps
// output byte-stable across runs.
inline std::vector<std::uint8_t> encode_png(const Canvas& canvas) {
    const int w = canvas.width(), h = canvas.height();
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * 4));
    const auto& px = canvas.pixels();
    for (int y = 0; y < h; ++y) {
        raw.push_back(0);  // filter: none
        const auto* row = &px[static_cast<std::size_t>(y) * w * 4];
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(w) * 4);
    }

    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw RenderFailure("zlib compression failed");
    comp.resize(comp_len);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    pngdetail::put_u32(ihdr, static_cast<std::uint32_t>(w));
    pngdetail::put_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(6);   // color type RGBA
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    pngdetail::put_chunk(out, "IHDR", ihdr);
    pngdetail::put_chunk(out, "IDAT", comp);
    pngdetail::put_chunk(out, "IEND", {});
    return out;
}

inline bool looks_like_png(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), magic, 8) == 0;
}

inline void write_png(const std::string& path, const Canvas& canvas) {
    const auto bytes = encode_png(canvas);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw RenderFailure("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw RenderFailure("short write to " + path);
}

}  // namespace vlbench

#pragma once

#include "kta/dataset.hpp"
#include "kta/errors.hpp"
#include "kta/layer_trainer.hpp"
#include "kta/preprocess.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace kta {

// Ordered trained layers. Layer k's W has (width of layer k-1) + 1 rows;
// layer 0 expects input_dim + 1.
struct LayerStack {
    std::vector<LayerParams> layers;
    Index input_dim = 0;
};

// Applies normalize -> append bias -> linear map -> tanh for each of the
// first `upto` layers. upto = 0 returns the row-normalized raw data. The
// final layer's tanh output is returned without trailing normalization;
// consumers normalize as their contracts require.
inline FeatureMatrix transform(const LayerStack& stack, const LabeledDataset& ds, std::size_t upto) {
    if (upto > stack.layers.size())
        throw argument_error("transform: upto=" + std::to_string(upto) + " exceeds stack depth " +
                             std::to_string(stack.layers.size()));
    FeatureMatrix rep = normalize_rows(ds.samples);
    for (std::size_t k = 0; k < upto; ++k) {
        const LayerParams& layer = stack.layers[k];
        if (rep.dim() + 1 != layer.W.rows())
            throw config_error("transform: layer " + std::to_string(k + 1) + " expects input dim " +
                               std::to_string(layer.W.rows() - 1) + ", got " +
                               std::to_string(rep.dim()));
        FeatureMatrix out = forward(rep, layer);
        if (k + 1 == upto)
            return out;
        rep = normalize_rows(out);
    }
    return rep;
}

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32le(const std::vector<std::uint8_t>& b, std::size_t& off,
                               const std::string& path) {
    if (off + 4 > b.size())
        throw format_error("'" + path + "': header inconsistent with payload length");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[off + static_cast<std::size_t>(i)]) << (8 * i);
    off += 4;
    return v;
}

inline double get_f64le(const std::vector<std::uint8_t>& b, std::size_t& off,
                        const std::string& path) {
    if (off + 8 > b.size())
        throw format_error("'" + path + "': header inconsistent with payload length");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(b[off + static_cast<std::size_t>(i)]) << (8 * i);
    off += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace detail

inline constexpr std::uint32_t kStackFormatVersion = 1;

// Serializes a stack to the KSTK format: magic "KSTK", version u32, layer
// count u32, then per layer [rows u32, cols u32, sigma f64, row-major f64
// payload]; all fields little-endian.
inline std::string encode_stack(const LayerStack& stack) {
    std::string out = "KSTK";
    detail::put_u32le(out, kStackFormatVersion);
    detail::put_u32le(out, static_cast<std::uint32_t>(stack.layers.size()));
    for (const auto& layer : stack.layers) {
        detail::put_u32le(out, static_cast<std::uint32_t>(layer.W.rows()));
        detail::put_u32le(out, static_cast<std::uint32_t>(layer.W.cols()));
        detail::put_f64le(out, layer.sigma);
        for (Index i = 0; i < layer.W.rows(); ++i)
            for (Index j = 0; j < layer.W.cols(); ++j)
                detail::put_f64le(out, layer.W(i, j));
    }
    return out;
}

inline LayerStack decode_stack(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "KSTK", 4) != 0)
        throw format_error("'" + path + "': bad magic, expected KSTK");
    std::size_t off = 4;
    const std::uint32_t version = detail::get_u32le(bytes, off, path);
    if (version != kStackFormatVersion)
        throw format_error("'" + path + "': unsupported format version " + std::to_string(version));
    const std::uint32_t count = detail::get_u32le(bytes, off, path);

    LayerStack stack;
    stack.layers.reserve(count);
    for (std::uint32_t l = 0; l < count; ++l) {
        const std::uint32_t rows = detail::get_u32le(bytes, off, path);
        const std::uint32_t cols = detail::get_u32le(bytes, off, path);
        LayerParams layer;
        layer.sigma = detail::get_f64le(bytes, off, path);
        if (off + 8ull * rows * cols > bytes.size())
            throw format_error("'" + path + "': dimension header inconsistent with payload length");
        layer.W.resize(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                layer.W(i, j) = detail::get_f64le(bytes, off, path);
        stack.layers.push_back(std::move(layer));
    }
    if (off != bytes.size())
        throw format_error("'" + path + "': trailing bytes after last layer");
    stack.input_dim = stack.layers.empty() ? 0 : stack.layers.front().W.rows() - 1;
    return stack;
}

inline void save_stack(const LayerStack& stack, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    const std::string payload = encode_stack(stack);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out)
        throw io_error("failed writing '" + path + "'");
}

inline LayerStack load_stack(const std::string& path) {
    return decode_stack(detail::read_all_bytes(path), path);
}

}  // namespace kta

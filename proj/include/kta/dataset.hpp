#pragma once

#include "kta/errors.hpp"
#include "kta/types.hpp"

#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace kta {

// Raw sample matrix (rows are samples, pixel intensities scaled to [0,1])
// with integer class labels.
struct LabeledDataset {
    Matrix samples;            // n x d
    std::vector<int> labels;   // length n, each in [0, classes)
    int classes = 0;

    Index n() const { return samples.rows(); }
    Index dim() const { return samples.cols(); }
};

namespace detail {

inline std::vector<std::uint8_t> read_all_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "'");
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    if (end < 0)
        throw io_error("cannot determine size of '" + path + "'");
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(end));
    in.seekg(0, std::ios::beg);
    in.read(reinterpret_cast<char*>(bytes.data()), end);
    if (!in)
        throw io_error("failed reading '" + path + "'");
    return bytes;
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                               const std::string& path) {
    if (offset + 4 > bytes.size())
        throw io_error("'" + path + "': truncated at byte offset " + std::to_string(offset));
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

inline std::string hex_u32(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    for (int shift = 28; shift >= 0; shift -= 4)
        out += digits[(v >> shift) & 0xF];
    return out;
}

}  // namespace detail

// Reads an MNIST-style IDX image/label file pair. Big-endian headers:
// images carry magic 0x00000803 then [count, rows, cols], labels carry magic
// 0x00000801 then [count]; pixel and label payloads are raw unsigned bytes.
// Pixels are scaled to [0,1] by /255; sample order follows file order.
inline LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    constexpr std::uint32_t kImagesMagic = 0x00000803;
    constexpr std::uint32_t kLabelsMagic = 0x00000801;
    constexpr int kClasses = 10;

    const auto img = detail::read_all_bytes(images_path);
    const auto lab = detail::read_all_bytes(labels_path);

    const std::uint32_t img_magic = detail::read_be32(img, 0, images_path);
    if (img_magic != kImagesMagic)
        throw format_error("'" + images_path + "': bad magic " + detail::hex_u32(img_magic) +
                           ", expected " + detail::hex_u32(kImagesMagic));
    const std::uint32_t lab_magic = detail::read_be32(lab, 0, labels_path);
    if (lab_magic != kLabelsMagic)
        throw format_error("'" + labels_path + "': bad magic " + detail::hex_u32(lab_magic) +
                           ", expected " + detail::hex_u32(kLabelsMagic));

    const std::size_t count = detail::read_be32(img, 4, images_path);
    const std::size_t rows = detail::read_be32(img, 8, images_path);
    const std::size_t cols = detail::read_be32(img, 12, images_path);
    const std::size_t label_count = detail::read_be32(lab, 4, labels_path);
    if (count != label_count)
        throw format_error("image/label count mismatch: " + std::to_string(count) +
                           " images vs " + std::to_string(label_count) + " labels");

    const std::size_t d = rows * cols;
    const std::size_t pixel_bytes = count * d;
    if (img.size() < 16 + pixel_bytes)
        throw io_error("'" + images_path + "': truncated pixel payload, file ends at byte " +
                       std::to_string(img.size()) + " but needs " + std::to_string(16 + pixel_bytes));
    if (lab.size() < 8 + count)
        throw io_error("'" + labels_path + "': truncated label payload, file ends at byte " +
                       std::to_string(lab.size()) + " but needs " + std::to_string(8 + count));

    LabeledDataset ds;
    ds.classes = kClasses;
    ds.samples.resize(static_cast<Index>(count), static_cast<Index>(d));
    ds.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t label = lab[8 + i];
        if (label >= kClasses)
            throw format_error("'" + labels_path + "': label " + std::to_string(label) +
                               " out of range at record " + std::to_string(i));
        ds.labels[i] = label;
        const std::uint8_t* px = img.data() + 16 + i * d;
        for (std::size_t j = 0; j < d; ++j)
            ds.samples(static_cast<Index>(i), static_cast<Index>(j)) = px[j] / 255.0;
    }
    return ds;
}

// Reads CIFAR-10 binary batches: 3073-byte records, byte 0 the label (0-9),
// bytes 1-3072 the pixels (1024 R, 1024 G, 1024 B planes). Records are
// concatenated in path order; pixels scaled to [0,1].
inline LabeledDataset load_cifar10(const std::vector<std::string>& batch_paths) {
    constexpr std::size_t kRecordBytes = 3073;
    constexpr Index kPixels = 3072;
    constexpr int kClasses = 10;

    std::vector<std::vector<std::uint8_t>> batches;
    std::size_t total = 0;
    for (const auto& path : batch_paths) {
        auto bytes = detail::read_all_bytes(path);
        if (bytes.size() % kRecordBytes != 0)
            throw format_error("'" + path + "': size " + std::to_string(bytes.size()) +
                               " is not a multiple of the 3073-byte record");
        total += bytes.size() / kRecordBytes;
        batches.push_back(std::move(bytes));
    }

    LabeledDataset ds;
    ds.classes = kClasses;
    ds.samples.resize(static_cast<Index>(total), kPixels);
    ds.labels.resize(total);
    Index row = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto& bytes = batches[b];
        for (std::size_t rec = 0; rec * kRecordBytes < bytes.size(); ++rec, ++row) {
            const std::uint8_t* p = bytes.data() + rec * kRecordBytes;
            if (p[0] >= kClasses)
                throw format_error("'" + batch_paths[b] + "': label " + std::to_string(p[0]) +
                                   " out of range at record " + std::to_string(rec));
            ds.labels[static_cast<std::size_t>(row)] = p[0];
            for (Index j = 0; j < kPixels; ++j)
                ds.samples(row, j) = p[1 + j] / 255.0;
        }
    }
    return ds;
}

// Deterministic subsample without replacement: a seeded Fisher-Yates
// permutation of the row indices, first k taken in permuted order. Identical
// (ds, k, seed) give identical output.
inline LabeledDataset subsample(const LabeledDataset& ds, std::size_t k, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(ds.n());
    if (k < 1 || k > n)
        throw argument_error("subsample: k=" + std::to_string(k) + " outside [1, " +
                             std::to_string(n) + "]");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        // modulo bias is negligible against a 64-bit draw
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }

    LabeledDataset out;
    out.classes = ds.classes;
    out.samples.resize(static_cast<Index>(k), ds.dim());
    out.labels.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.samples.row(static_cast<Index>(i)) = ds.samples.row(static_cast<Index>(idx[i]));
        out.labels[i] = ds.labels[idx[i]];
    }
    return out;
}

}  // namespace kta

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fdl/matrix.hpp"

namespace fdl {

/// Samples as columns of `data` (d x n) with integer class labels.
struct LabeledDataset {
  Matrix data;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t dim() const noexcept { return data.rows(); }
  std::size_t size() const noexcept { return data.cols(); }
  /// Columns at `indices`, with their labels; class_count is kept.
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Unsigned-byte image set as stored in an IDX file, kept as bytes so large
/// files need not be expanded to doubles all at once.
struct RawImageSet {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols, image-major
  std::vector<int> labels;

  std::size_t pixel_count() const noexcept { return rows * cols; }
  int class_count() const;
  /// Images at `indices` as a dataset with pixels scaled to [0, 1].
  LabeledDataset gather(std::span<const std::size_t> indices) const;
  LabeledDataset to_dataset() const;
};

/// Whole file contents; ".gz" paths are decompressed transparently.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Parses an IDX3 unsigned-byte image file. Throws BadMagicError,
/// TruncatedFileError or LengthMismatchError (trailing bytes).
RawImageSet parse_idx_images(std::span<const std::uint8_t> bytes);
/// Parses an IDX1 unsigned-byte label file.
std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_idx_images(std::size_t count, std::size_t rows,
                                            std::size_t cols,
                                            std::span<const std::uint8_t> pixels);
std::vector<std::uint8_t> encode_idx_labels(std::span<const int> labels);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Reads an image/label file pair, checking that their counts agree
/// (LengthMismatchError otherwise).
RawImageSet load_idx_raw(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path);
/// load_idx_raw, expanded to a d x n dataset with pixels divided by 255.
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

/// Seeded Gaussian classes: class k gets counts[k] samples of
/// means[k] + L_k z with L_k Lᵀ_k = covariances[k] and z standard normal
/// (Box-Muller). Covariances must be symmetric positive semidefinite.
LabeledDataset synthetic_gaussians(std::span<const std::vector<double>> means,
                                   std::span<const Matrix> covariances,
                                   std::span<const std::size_t> counts, std::uint64_t seed);

/// CSV with header "label,f0,...,f{p-1}" and one row per column of
/// `embeddings`, coordinates printed with 9 significant digits.
void export_embeddings(const Matrix& embeddings, std::span<const int> labels,
                       const std::filesystem::path& path);

/// Parses a file written by export_embeddings.
LabeledDataset read_embeddings(const std::filesystem::path& path);

}  // namespace fdl

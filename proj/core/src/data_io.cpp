#include "fdl/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "fdl/error.hpp"
#include "fdl/linalg.hpp"
#include "fdl/random.hpp"

namespace fdl {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

bool has_gz_suffix(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::vector<std::uint8_t> read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  for (;;) {
    const int n = gzread(file, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int errnum = 0;
      const std::string msg = gzerror(file, &errnum);
      gzclose(file);
      throw TruncatedFileError("corrupt gzip stream in " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(file);
  return out;
}

// Factor a covariance as L Lᵀ, allowing zero pivots (degenerate directions).
Matrix psd_factor(const Matrix& cov) {
  if (!cov.is_square()) throw DimensionError("covariance must be square, got " + cov.shape());
  if (!is_symmetric(cov)) throw ConfigError("covariance " + cov.shape() + " is not symmetric");
  const std::size_t n = cov.rows();
  const double tol = 1e-12 * std::max(1.0, cov.max_abs());
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = cov(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag < -tol) {
      throw NotPositiveDefiniteError("covariance is not positive semidefinite (pivot " +
                                         std::to_string(diag) + " at index " +
                                         std::to_string(j) + ")",
                                     j);
    }
    if (diag <= tol) {
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = cov(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        if (std::abs(v) > std::sqrt(tol)) {
          throw NotPositiveDefiniteError(
              "covariance is not positive semidefinite (zero pivot with nonzero coupling at "
              "index " + std::to_string(j) + ")",
              j);
        }
      }
      continue;
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = cov(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

}  // namespace

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.data = data.select_columns(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  out.class_count = class_count;
  return out;
}

int RawImageSet::class_count() const {
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  return max_label + 1;
}

LabeledDataset RawImageSet::gather(std::span<const std::size_t> indices) const {
  const std::size_t d = pixel_count();
  LabeledDataset out;
  out.data = Matrix(d, indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::size_t i = indices[j];
    if (i >= count) {
      throw DimensionError("image index " + std::to_string(i) + " out of range for " +
                           std::to_string(count) + " images");
    }
    const std::uint8_t* src = pixels.data() + i * d;
    for (std::size_t r = 0; r < d; ++r) out.data(r, j) = static_cast<double>(src[r]) / 255.0;
    out.labels.push_back(labels.at(i));
  }
  out.class_count = class_count();
  return out;
}

LabeledDataset RawImageSet::to_dataset() const {
  std::vector<std::size_t> all(count);
  for (std::size_t i = 0; i < count; ++i) all[i] = i;
  return gather(all);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  if (has_gz_suffix(path)) return read_gzip(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RawImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) {
    throw TruncatedFileError("IDX image file truncated: " + std::to_string(bytes.size()) +
                             " bytes, header needs 16");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw BadMagicError("bad IDX image magic " + hex32(magic) + ", expected " +
                        hex32(kIdxImageMagic));
  }
  RawImageSet set;
  set.count = read_be32(bytes, 4);
  set.rows = read_be32(bytes, 8);
  set.cols = read_be32(bytes, 12);
  const std::size_t expected = set.count * set.rows * set.cols;
  const std::size_t payload = bytes.size() - 16;
  if (payload < expected) {
    throw TruncatedFileError("IDX image file truncated: " + std::to_string(payload) +
                             " pixel bytes, header promises " + std::to_string(expected));
  }
  if (payload > expected) {
    throw LengthMismatchError("IDX image file has " + std::to_string(payload - expected) +
                              " trailing bytes");
  }
  set.pixels.assign(bytes.begin() + 16, bytes.end());
  return set;
}

std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) {
    throw TruncatedFileError("IDX label file truncated: " + std::to_string(bytes.size()) +
                             " bytes, header needs 8");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw BadMagicError("bad IDX label magic " + hex32(magic) + ", expected " +
                        hex32(kIdxLabelMagic));
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t payload = bytes.size() - 8;
  if (payload < count) {
    throw TruncatedFileError("IDX label file truncated: " + std::to_string(payload) +
                             " label bytes, header promises " + std::to_string(count));
  }
  if (payload > count) {
    throw LengthMismatchError("IDX label file has " + std::to_string(payload - count) +
                              " trailing bytes");
  }
  return {bytes.begin() + 8, bytes.end()};
}

std::vector<std::uint8_t> encode_idx_images(std::size_t count, std::size_t rows,
                                            std::size_t cols,
                                            std::span<const std::uint8_t> pixels) {
  if (pixels.size() != count * rows * cols) {
    throw DimensionError("encode_idx_images: " + std::to_string(pixels.size()) +
                         " pixels for " + std::to_string(count) + " images of " +
                         shape_string(rows, cols));
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + pixels.size());
  put_be32(out, kIdxImageMagic);
  put_be32(out, static_cast<std::uint32_t>(count));
  put_be32(out, static_cast<std::uint32_t>(rows));
  put_be32(out, static_cast<std::uint32_t>(cols));
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const int> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) {
    if (l < 0 || l > 255) throw ConfigError("IDX labels must fit in a byte, got " + std::to_string(l));
    out.push_back(static_cast<std::uint8_t>(l));
  }
  return out;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

RawImageSet load_idx_raw(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path) {
  RawImageSet set = parse_idx_images(read_file_bytes(images_path));
  set.labels = parse_idx_labels(read_file_bytes(labels_path));
  if (set.labels.size() != set.count) {
    throw LengthMismatchError(images_path.string() + " holds " + std::to_string(set.count) +
                              " images but " + labels_path.string() + " holds " +
                              std::to_string(set.labels.size()) + " labels");
  }
  return set;
}

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  return load_idx_raw(images_path, labels_path).to_dataset();
}

LabeledDataset synthetic_gaussians(std::span<const std::vector<double>> means,
                                   std::span<const Matrix> covariances,
                                   std::span<const std::size_t> counts, std::uint64_t seed) {
  if (means.empty() || means.size() != covariances.size() || means.size() != counts.size()) {
    throw DimensionError("synthetic_gaussians: " + std::to_string(means.size()) + " means, " +
                         std::to_string(covariances.size()) + " covariances, " +
                         std::to_string(counts.size()) + " counts");
  }
  const std::size_t d = means.front().size();
  std::vector<Matrix> factors;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != d || covariances[k].rows() != d) {
      throw DimensionError("synthetic_gaussians: class " + std::to_string(k) +
                           " has inconsistent dimension");
    }
    factors.push_back(psd_factor(covariances[k]));
  }
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;

  Rng rng(seed);
  LabeledDataset out;
  out.data = Matrix(d, total);
  out.labels.reserve(total);
  out.class_count = static_cast<int>(means.size());
  std::vector<double> z(d);
  std::size_t col = 0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    for (std::size_t s = 0; s < counts[k]; ++s, ++col) {
      for (double& v : z) v = rng.normal();
      for (std::size_t r = 0; r < d; ++r) {
        double v = means[k][r];
        for (std::size_t c = 0; c <= r; ++c) v += factors[k](r, c) * z[c];
        out.data(r, col) = v;
      }
      out.labels.push_back(static_cast<int>(k));
    }
  }
  return out;
}

void export_embeddings(const Matrix& embeddings, std::span<const int> labels,
                       const std::filesystem::path& path) {
  if (labels.size() != embeddings.cols()) {
    throw DimensionError("export_embeddings: " + std::to_string(labels.size()) +
                         " labels for embeddings " + embeddings.shape());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "label";
  for (std::size_t r = 0; r < embeddings.rows(); ++r) out << ",f" << r;
  out << '\n';
  char buf[32];
  for (std::size_t c = 0; c < embeddings.cols(); ++c) {
    out << labels[c];
    for (std::size_t r = 0; r < embeddings.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.9g", embeddings(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

LabeledDataset read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("label", 0) != 0) {
    throw FormatError(path.string() + ": missing 'label,...' header");
  }
  const std::size_t p = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<double> values;
  LabeledDataset out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != p + 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(p + 1) + " fields, got " + std::to_string(fields.size()));
    }
    try {
      out.labels.push_back(std::stoi(fields[0]));
      for (std::size_t r = 0; r < p; ++r) values.push_back(std::stod(fields[r + 1]));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  const std::size_t n = out.labels.size();
  out.data = Matrix(p, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < p; ++r) out.data(r, c) = values[c * p + r];
  }
  int max_label = -1;
  for (int l : out.labels) max_label = std::max(max_label, l);
  out.class_count = max_label + 1;
  return out;
}

}  // namespace fdl

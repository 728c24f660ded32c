#include "fdl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fdl/error.hpp"

namespace fdl {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffULL) throw FormatError(std::string(what) + " too large for checkpoint");
  return static_cast<std::uint32_t>(v);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedFileError("checkpoint truncated at byte " + std::to_string(pos_) +
                               " (needed " + std::to_string(n) + " more)");
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
    return v;
  }

  double f64() {
    auto s = take(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return std::bit_cast<double>(bits);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_params(const NetworkParams& params) {
  params.validate();
  std::vector<std::uint8_t> out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  put_u32(out, to_u32(params.layers.size(), "layer count"));
  for (const DenseLayer& layer : params.layers) {
    put_u32(out, to_u32(layer.input_dim(), "layer width"));
    put_u32(out, to_u32(layer.output_dim(), "layer width"));
    put_u32(out, static_cast<std::uint32_t>(layer.activation));
  }
  put_u32(out, to_u32(params.projection.rows(), "projection rows"));
  put_u32(out, to_u32(params.projection.cols(), "projection cols"));
  for (const DenseLayer& layer : params.layers) {
    for (double v : layer.weight.values()) put_f64(out, v);
    for (double v : layer.bias) put_f64(out, v);
  }
  for (double v : params.projection.values()) put_f64(out, v);
  return out;
}

NetworkParams deserialize_params(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  auto magic = in.take(kCheckpointMagic.size());
  if (std::memcmp(magic.data(), kCheckpointMagic.data(), kCheckpointMagic.size()) != 0) {
    throw BadMagicError("not a checkpoint: magic string mismatch");
  }
  const std::uint32_t n_layers = in.u32();
  NetworkParams params;
  params.layers.resize(n_layers);
  for (DenseLayer& layer : params.layers) {
    const std::uint32_t in_dim = in.u32();
    const std::uint32_t out_dim = in.u32();
    const std::uint32_t act = in.u32();
    if (act > 1) throw FormatError("checkpoint: unknown activation tag " + std::to_string(act));
    if (static_cast<std::uint64_t>(in_dim) * out_dim > bytes.size()) {
      throw TruncatedFileError("checkpoint: layer " + shape_string(out_dim, in_dim) +
                               " exceeds file size");
    }
    layer.weight = Matrix(out_dim, in_dim);
    layer.bias.assign(out_dim, 0.0);
    layer.activation = static_cast<Activation>(act);
  }
  const std::uint32_t q = in.u32();
  const std::uint32_t p = in.u32();
  if (static_cast<std::uint64_t>(q) * p > bytes.size()) {
    throw TruncatedFileError("checkpoint: projection exceeds file size");
  }
  params.projection = Matrix(q, p);
  for (DenseLayer& layer : params.layers) {
    for (double& v : layer.weight.values()) v = in.f64();
    for (double& v : layer.bias) v = in.f64();
  }
  for (double& v : params.projection.values()) v = in.f64();
  if (!in.done()) throw LengthMismatchError("checkpoint: trailing bytes after payload");
  params.validate();
  return params;
}

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path) {
  const auto bytes = serialize_params(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_params(bytes);
}

}  // namespace fdl

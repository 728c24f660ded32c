#include "fdl/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdl/error.hpp"

namespace fdl {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::triplet:
      return "triplet";
    case LossKind::contrastive:
      return "contrastive";
    case LossKind::fdt:
      return "fdt";
    case LossKind::fdc:
      return "fdc";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view text) {
  for (LossKind k : {LossKind::triplet, LossKind::contrastive, LossKind::fdt, LossKind::fdc}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

bool is_pair_loss(LossKind kind) { return kind == LossKind::contrastive || kind == LossKind::fdc; }

LossConfig RunConfig::loss_config() const {
  return LossConfig{.alpha = alpha, .lambda = lambda, .mu_w = mu_w, .mu_b = mu_b};
}

NetworkShape RunConfig::network_shape(std::size_t input_dim) const {
  NetworkShape shape;
  shape.widths.push_back(input_dim);
  shape.widths.insert(shape.widths.end(), hidden.begin(), hidden.end());
  shape.widths.push_back(q);
  shape.feature_dim = p;
  shape.latent_activation = latent_activation;
  return shape;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (key == "loss") {
    const auto kind = parse_loss_kind(v);
    if (!kind) throw ConfigError("loss: expected triplet|contrastive|fdt|fdc, got '" + v + "'");
    loss = *kind;
  } else if (key == "alpha") {
    alpha = parse_double(key, v);
  } else if (key == "lambda") {
    lambda = parse_double(key, v);
  } else if (key == "mu-w") {
    mu_w = parse_double(key, v);
  } else if (key == "mu-b") {
    mu_b = parse_double(key, v);
  } else if (key == "hidden") {
    hidden.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!trim(item).empty()) hidden.push_back(parse_unsigned(key, item));
    }
  } else if (key == "q") {
    q = parse_unsigned(key, v);
  } else if (key == "p") {
    p = parse_unsigned(key, v);
  } else if (key == "latent-activation") {
    if (v == "relu") {
      latent_activation = Activation::relu;
    } else if (v == "linear") {
      latent_activation = Activation::linear;
    } else {
      throw ConfigError("latent-activation: expected relu|linear, got '" + v + "'");
    }
  } else if (key == "batch-size") {
    batch_size = parse_unsigned(key, v);
  } else if (key == "learning-rate") {
    learning_rate = parse_double(key, v);
  } else if (key == "epochs") {
    epochs = parse_unsigned(key, v);
  } else if (key == "triplet-count") {
    triplet_count = parse_unsigned(key, v);
  } else if (key == "positive-fraction") {
    positive_fraction = parse_double(key, v);
  } else if (key == "seed") {
    seed = parse_unsigned(key, v);
  } else if (key == "train-images") {
    train_images = v;
  } else if (key == "train-labels") {
    train_labels = v;
  } else if (key == "output-dir") {
    output_dir = v;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  if (!(alpha >= 0.0)) out.push_back("alpha: must be >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) out.push_back("lambda: must lie in (0, 1)");
  if (!(mu_w >= 0.0)) out.push_back("mu-w: must be >= 0");
  if (!(mu_b >= 0.0)) out.push_back("mu-b: must be >= 0");
  for (std::size_t w : hidden) {
    if (w == 0) out.push_back("hidden: layer widths must be >= 1");
  }
  if (p < 1) out.push_back("p: must be >= 1");
  if (q < p) out.push_back("q: must be >= p");
  if (batch_size < 1) out.push_back("batch-size: must be >= 1");
  if (!(learning_rate >= 0.0)) out.push_back("learning-rate: must be >= 0");
  if (triplet_count < 1) out.push_back("triplet-count: must be >= 1");
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    out.push_back("positive-fraction: must lie in [0, 1]");
  }
  if (train_images.empty()) out.push_back("train-images: path is required");
  if (train_labels.empty()) out.push_back("train-labels: path is required");
  if (output_dir.empty()) out.push_back("output-dir: path is required");
  return out;
}

void RunConfig::validate() const {
  const auto list = problems();
  if (list.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : list) msg += "\n  " + p;
  throw ConfigError(msg);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "loss=" << to_string(loss) << '\n';
  out << "alpha=" << format_double(alpha) << '\n';
  out << "lambda=" << format_double(lambda) << '\n';
  out << "mu-w=" << format_double(mu_w) << '\n';
  out << "mu-b=" << format_double(mu_b) << '\n';
  out << "hidden=";
  for (std::size_t i = 0; i < hidden.size(); ++i) out << (i ? "," : "") << hidden[i];
  out << '\n';
  out << "q=" << q << '\n';
  out << "p=" << p << '\n';
  out << "latent-activation=" << to_string(latent_activation) << '\n';
  out << "batch-size=" << batch_size << '\n';
  out << "learning-rate=" << format_double(learning_rate) << '\n';
  out << "epochs=" << epochs << '\n';
  out << "triplet-count=" << triplet_count << '\n';
  out << "positive-fraction=" << format_double(positive_fraction) << '\n';
  out << "seed=" << seed << '\n';
  out << "train-images=" << train_images.string() << '\n';
  out << "train-labels=" << train_labels.string() << '\n';
  out << "output-dir=" << output_dir.string() << '\n';
  return out.str();
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(trimmed).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(trimmed).substr(eq + 1));
  }
  return out;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  for (const auto& [key, value] : parse_key_values(buffer.str())) config.set(key, value);
}

}  // namespace fdl

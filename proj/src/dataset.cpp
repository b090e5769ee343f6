#include "pdslide/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "pdslide/error.hpp"
#include "pdslide/rng.hpp"

namespace pdslide {

void DataShard::validate() const {
  if (rows.size() != labels.size()) throw ConfigError("data shard: row/label count mismatch");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.index.size() != row.value.size()) throw ConfigError("data shard: index/value length mismatch");
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      if (row.index[k] < 1 || row.index[k] > feature_dim)
        throw ConfigError("data shard: feature id out of range in row " + std::to_string(r + 1));
      if (k > 0 && row.index[k] <= row.index[k - 1])
        throw ConfigError("data shard: feature ids not strictly increasing in row " + std::to_string(r + 1));
    }
    if (labels[r] != 1 && labels[r] != -1)
      throw ConfigError("data shard: label outside {-1,+1} in row " + std::to_string(r + 1));
  }
}

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw ConfigError("libsvm line " + std::to_string(line_no) + ": " + why);
}

double parse_double(std::string_view text, std::size_t line_no, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    malformed(line_no, std::string("bad ") + what + " '" + std::string(text) + "'");
  return v;
}

}  // namespace

DataShard read_libsvm(std::istream& in, LibsvmLoadReport* report) {
  DataShard shard;
  LibsvmLoadReport local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    const double label = parse_double(token, line_no, "label");
    int y = 0;
    if (label == 1.0) {
      y = 1;
    } else if (label == -1.0) {
      y = -1;
    } else if (label == 0.0) {
      y = -1;
      ++local.remapped_zero_labels;
    } else {
      malformed(line_no, "label must be one of -1, 0, +1");
    }
    SparseRow row;
    while (fields >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) malformed(line_no, "expected idx:val, got '" + token + "'");
      int idx = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + colon, idx);
      if (ec != std::errc() || ptr != token.data() + colon || idx < 1)
        malformed(line_no, "bad feature index in '" + token + "'");
      if (!row.index.empty() && idx <= row.index.back())
        malformed(line_no, "feature indices must be strictly increasing");
      row.index.push_back(idx);
      row.value.push_back(parse_double(std::string_view(token).substr(colon + 1), line_no, "feature value"));
      shard.feature_dim = std::max(shard.feature_dim, idx);
    }
    shard.rows.push_back(std::move(row));
    shard.labels.push_back(y);
  }
  if (shard.rows.empty()) throw ConfigError("libsvm input is empty");
  local.rows = shard.rows.size();
  if (report) *report = local;
  return shard;
}

DataShard load_libsvm(const std::string& path, LibsvmLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return read_libsvm(in, report);
}

void write_libsvm(std::ostream& out, const DataShard& shard) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < shard.size(); ++r) {
    out << (shard.labels[r] > 0 ? "+1" : "-1");
    const auto& row = shard.rows[r];
    for (std::size_t k = 0; k < row.index.size(); ++k) out << ' ' << row.index[k] << ':' << row.value[k];
    out << '\n';
  }
  out.precision(old_precision);
}

void save_libsvm(const std::string& path, const DataShard& shard) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset '" + path + "'");
  write_libsvm(out, shard);
}

std::vector<DataShard> split_shards(const DataShard& shard, int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("split_shards: m must be positive");
  if (shard.size() < static_cast<std::size_t>(m))
    throw ConfigError("split_shards: " + std::to_string(shard.size()) + " rows cannot feed " + std::to_string(m) +
                      " agents");
  std::vector<std::size_t> order(shard.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(hash_key(seed, 0x5a1d));
  std::shuffle(order.begin(), order.end(), gen);

  std::vector<DataShard> parts(m);
  const std::size_t base = shard.size() / m;
  const std::size_t extra = shard.size() % m;
  std::size_t next = 0;
  for (int i = 0; i < m; ++i) {
    const std::size_t count = base + (static_cast<std::size_t>(i) < extra ? 1 : 0);
    parts[i].feature_dim = shard.feature_dim;
    for (std::size_t c = 0; c < count; ++c, ++next) {
      parts[i].rows.push_back(shard.rows[order[next]]);
      parts[i].labels.push_back(shard.labels[order[next]]);
    }
  }
  return parts;
}

nlohmann::json shard_manifest(const std::vector<DataShard>& shards, std::uint64_t seed) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : shards) rows.push_back(s.size());
  return {{"seed", seed},
          {"agents", shards.size()},
          {"feature_dim", shards.empty() ? 0 : shards.front().feature_dim},
          {"rows", rows}};
}

}  // namespace pdslide

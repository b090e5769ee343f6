#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdslide/json_fwd.hpp"

namespace pdslide {

/// One sparse feature row; feature ids are 1-indexed as in LIBSVM files and
/// strictly increasing.
struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;

  friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

/// Labeled rows with labels in {-1, +1}.
struct DataShard {
  std::vector<SparseRow> rows;
  std::vector<int> labels;
  int feature_dim = 0;

  std::size_t size() const { return rows.size(); }
  /// Throws ConfigError if a row breaks ordering, exceeds feature_dim, or a
  /// label is outside {-1, +1}.
  void validate() const;

  friend bool operator==(const DataShard&, const DataShard&) = default;
};

struct LibsvmLoadReport {
  std::size_t rows = 0;
  std::size_t remapped_zero_labels = 0;  // 0 labels turned into -1
};

/// Parses `label idx:val idx:val ...` lines. Label 0 maps to -1 and is
/// counted in the report. Malformed lines raise ConfigError naming the line.
DataShard read_libsvm(std::istream& in, LibsvmLoadReport* report = nullptr);
DataShard load_libsvm(const std::string& path, LibsvmLoadReport* report = nullptr);

void write_libsvm(std::ostream& out, const DataShard& shard);
void save_libsvm(const std::string& path, const DataShard& shard);

/// Shuffles rows with `seed` and deals them into m parts whose sizes differ by at most one.
std::vector<DataShard> split_shards(const DataShard& shard, int m, std::uint64_t seed);

/// {"seed": s, "agents": m, "rows": [...], "feature_dim": d}
nlohmann::json shard_manifest(const std::vector<DataShard>& shards, std::uint64_t seed);

}  // namespace pdslide

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "secantboost/dataset.hpp"

namespace secantboost {

struct CsvOptions {
  /// Header name or zero-based index of the label column; empty means last.
  std::string label_column;
  /// Per-column kind overrides by header name.
  std::map<std::string, FeatureKind> kind_overrides;
};

/// Reads a comma-separated file with a header line. A column is numeric when
/// every value parses as a number, categorical otherwise. Labels must be in
/// {-1, +1} or {0, 1}; the latter is mapped to {-1, +1}. Missing values
/// (empty fields or "?") are rejected.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Same as load_csv on in-memory text; `source` names it in error messages.
Dataset parse_csv(const std::string& text, const CsvOptions& options = {}, const std::string& source = "<csv>");

void write_csv(const Dataset& S, const std::string& path, const std::string& label_name = "label");

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified k-fold assignment, deterministic in `seed`. Each class is
/// shuffled and dealt round-robin, continuing the deal across classes so fold
/// sizes also stay balanced.
FoldPlan stratified_folds(const Dataset& S, std::size_t k, std::uint64_t seed);

}  // namespace secantboost

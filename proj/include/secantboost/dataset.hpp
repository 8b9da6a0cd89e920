#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace secantboost {

enum class FeatureKind { numeric, categorical };

/// One feature column. Numeric columns fill `numeric`; categorical columns
/// fill `codes`, which index into `levels`.
struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<double> numeric;
  std::vector<int> codes;
  std::vector<std::string> levels;

  const std::string& level(std::size_t i) const { return levels[static_cast<std::size_t>(codes[i])]; }
};

/// m labeled examples with labels in {-1, +1}. Immutable once built.
class Dataset {
 public:
  Dataset(std::vector<FeatureColumn> columns, std::vector<int> labels);

  /// Dense numeric rows; feature names default to x0, x1, ...
  static Dataset from_numeric(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                              std::vector<std::string> names = {});

  /// Categorical rows with string levels; names default to c0, c1, ...
  static Dataset from_categorical(const std::vector<std::vector<std::string>>& rows, std::vector<int> labels,
                                  std::vector<std::string> names = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t num_features() const { return columns_.size(); }
  const FeatureColumn& column(std::size_t j) const { return columns_[j]; }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset with_labels(std::vector<int> labels) const;

 private:
  std::vector<FeatureColumn> columns_;
  std::vector<int> labels_;
};

/// Negates each label independently with probability eta, 0 <= eta < 0.5.
Dataset inject_label_noise(const Dataset& S, double eta, std::uint64_t seed);

}  // namespace secantboost

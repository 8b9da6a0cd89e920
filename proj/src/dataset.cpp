#include "secantboost/dataset.hpp"

#include <map>

#include "secantboost/error.hpp"
#include "secantboost/random.hpp"

namespace secantboost {

Dataset::Dataset(std::vector<FeatureColumn> columns, std::vector<int> labels)
    : columns_(std::move(columns)), labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("dataset has no examples");
  for (int y : labels_) {
    if (y != 1 && y != -1) throw DataError("labels must be -1 or +1");
  }
  for (const FeatureColumn& c : columns_) {
    const std::size_t n = c.kind == FeatureKind::numeric ? c.numeric.size() : c.codes.size();
    if (n != labels_.size()) throw DataError("column '" + c.name + "' has the wrong length");
    if (c.kind == FeatureKind::categorical) {
      for (int code : c.codes) {
        if (code < 0 || static_cast<std::size_t>(code) >= c.levels.size())
          throw DataError("column '" + c.name + "' has an invalid level code");
      }
    }
  }
}

Dataset Dataset::from_numeric(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                              std::vector<std::string> names) {
  if (rows.size() != labels.size()) throw DataError("row and label counts differ");
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  std::vector<FeatureColumn> cols(d);
  for (std::size_t j = 0; j < d; ++j) {
    cols[j].name = j < names.size() ? names[j] : "x" + std::to_string(j);
    cols[j].numeric.reserve(rows.size());
  }
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("ragged numeric rows");
    for (std::size_t j = 0; j < d; ++j) cols[j].numeric.push_back(r[j]);
  }
  return Dataset(std::move(cols), std::move(labels));
}

Dataset Dataset::from_categorical(const std::vector<std::vector<std::string>>& rows, std::vector<int> labels,
                                  std::vector<std::string> names) {
  if (rows.size() != labels.size()) throw DataError("row and label counts differ");
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  std::vector<FeatureColumn> cols(d);
  std::vector<std::map<std::string, int>> index(d);
  for (std::size_t j = 0; j < d; ++j) {
    cols[j].name = j < names.size() ? names[j] : "c" + std::to_string(j);
    cols[j].kind = FeatureKind::categorical;
  }
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("ragged categorical rows");
    for (std::size_t j = 0; j < d; ++j) {
      auto [it, inserted] = index[j].try_emplace(r[j], static_cast<int>(cols[j].levels.size()));
      if (inserted) cols[j].levels.push_back(r[j]);
      cols[j].codes.push_back(it->second);
    }
  }
  return Dataset(std::move(cols), std::move(labels));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<FeatureColumn> cols;
  cols.reserve(columns_.size());
  for (const FeatureColumn& c : columns_) {
    FeatureColumn out{c.name, c.kind, {}, {}, c.levels};
    for (std::size_t i : indices) {
      if (i >= size()) throw DataError("subset index out of range");
      if (c.kind == FeatureKind::numeric)
        out.numeric.push_back(c.numeric[i]);
      else
        out.codes.push_back(c.codes[i]);
    }
    cols.push_back(std::move(out));
  }
  std::vector<int> y;
  y.reserve(indices.size());
  for (std::size_t i : indices) y.push_back(labels_[i]);
  return Dataset(std::move(cols), std::move(y));
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
  if (labels.size() != size()) throw DataError("label count differs from dataset size");
  return Dataset(columns_, std::move(labels));
}

Dataset inject_label_noise(const Dataset& S, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 0.5)) throw ConfigError("noise rate must lie in [0, 0.5)");
  std::vector<int> y(S.labels().begin(), S.labels().end());
  if (eta == 0.0) return S;
  Rng rng(derive_seed(seed, {0x6e6f697365ULL}));
  for (int& label : y) {
    if (rng.bernoulli(eta)) label = -label;
  }
  return S.with_labels(std::move(y));
}

}  // namespace secantboost

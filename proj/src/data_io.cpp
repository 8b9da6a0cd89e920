#include "secantboost/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "secantboost/error.hpp"
#include "secantboost/random.hpp"

namespace secantboost {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  if (quoted) throw DataError(where + ": unterminated quote");
  out.push_back(trim(field));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& options, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const std::vector<std::string> header = split_row(line, source + ":1");
  if (header.size() < 1) throw DataError(source + ": header has no columns");

  std::size_t label_col = header.size() - 1;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it != header.end()) {
      label_col = static_cast<std::size_t>(it - header.begin());
    } else {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(options.label_column.data(),
                                       options.label_column.data() + options.label_column.size(), idx);
      if (ec != std::errc() || ptr != options.label_column.data() + options.label_column.size() ||
          idx >= header.size())
        throw DataError(source + ": no label column '" + options.label_column + "'");
      label_col = idx;
    }
  }

  std::vector<std::vector<std::string>> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto row = split_row(line, where);
    if (row.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j].empty() || row[j] == "?")
        throw DataError(where + ": missing value in column '" + header[j] + "'");
    }
    cells.push_back(std::move(row));
  }
  if (cells.empty()) throw DataError(source + ": no examples");

  std::vector<double> raw_labels;
  raw_labels.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double v = 0.0;
    if (!parse_number(cells[i][label_col], v))
      throw DataError(source + ": label '" + cells[i][label_col] + "' is not numeric");
    raw_labels.push_back(v);
  }
  const bool pm = std::all_of(raw_labels.begin(), raw_labels.end(), [](double v) { return v == 1.0 || v == -1.0; });
  const bool zo = std::all_of(raw_labels.begin(), raw_labels.end(), [](double v) { return v == 1.0 || v == 0.0; });
  if (!pm && !zo) throw DataError(source + ": labels must be in {-1, +1} or {0, 1}");
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (double v : raw_labels) labels.push_back(v == 1.0 ? 1 : -1);

  std::vector<FeatureColumn> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label_col) continue;
    FeatureColumn col;
    col.name = header[j];
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = parse_number(cells[i][j], values[i]);
    auto ov = options.kind_overrides.find(col.name);
    if (ov != options.kind_overrides.end()) {
      if (ov->second == FeatureKind::numeric && !numeric)
        throw DataError(source + ": column '" + col.name + "' forced numeric but has non-numeric values");
      numeric = ov->second == FeatureKind::numeric;
    }
    if (numeric) {
      col.kind = FeatureKind::numeric;
      col.numeric = std::move(values);
    } else {
      col.kind = FeatureKind::categorical;
      std::map<std::string, int> index;
      for (const auto& row : cells) {
        auto [it, inserted] = index.try_emplace(row[j], static_cast<int>(col.levels.size()));
        if (inserted) col.levels.push_back(row[j]);
        col.codes.push_back(it->second);
      }
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns), std::move(labels));
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), options, path);
}

void write_csv(const Dataset& S, const std::string& path, const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const FeatureColumn& c : S.columns()) out << c.name << ',';
  out << label_name << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (const FeatureColumn& c : S.columns()) {
      if (c.kind == FeatureKind::numeric)
        out << c.numeric[i];
      else
        out << c.level(i);
      out << ',';
    }
    out << S.label(i) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

FoldPlan stratified_folds(const Dataset& S, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < S.size(); ++i) (S.label(i) > 0 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k)
    throw DataError("each class needs at least " + std::to_string(k) + " examples for stratified folds");

  FoldPlan plan{k, std::vector<std::size_t>(S.size(), 0), seed};
  Rng rng(derive_seed(seed, {0x666f6c6473ULL}));
  std::size_t dealt = 0;
  for (auto* cls : {&pos, &neg}) {
    // Fisher-Yates
    for (std::size_t i = cls->size(); i > 1; --i) std::swap((*cls)[i - 1], (*cls)[rng.below(i)]);
    for (std::size_t idx : *cls) plan.assignments[idx] = dealt++ % k;
  }
  return plan;
}

}  // namespace secantboost

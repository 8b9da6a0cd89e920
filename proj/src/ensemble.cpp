#include "secantboost/ensemble.hpp"

#include "secantboost/error.hpp"

namespace secantboost {

double Ensemble::predict(const Dataset& S, std::size_t i) const {
  double h = h0;
  for (const EnsembleTerm& t : terms) h += t.alpha * t.tree.predict(S, i);
  return h;
}

std::vector<double> Ensemble::predict_all(const Dataset& S) const {
  for (const EnsembleTerm& t : terms) t.tree.check_schema(S);
  std::vector<double> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) out[i] = predict(S, i);
  return out;
}

double empirical_loss(const Loss& f, const Dataset& S, const Ensemble& H) {
  return empirical_loss(f, margins(S, H.predict_all(S)));
}

double empirical_loss(const Loss& f, std::span<const double> m) {
  if (m.empty()) throw DataError("empirical loss over no examples");
  double sum = 0.0;
  for (double z : m) sum += f(z);
  return sum / static_cast<double>(m.size());
}

double zero_one_error(std::span<const double> m) {
  if (m.empty()) throw DataError("error over no examples");
  std::size_t wrong = 0;
  for (double z : m) wrong += z <= 0.0 ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(m.size());
}

std::vector<double> margins(const Dataset& S, std::span<const double> predictions) {
  std::vector<double> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) out[i] = S.label(i) * predictions[i];
  return out;
}

}  // namespace secantboost

#pragma once

#include <span>
#include <vector>

#include "secantboost/dataset.hpp"
#include "secantboost/loss.hpp"
#include "secantboost/weak_learner.hpp"

namespace secantboost {

struct EnsembleTerm {
  double alpha = 0.0;
  DecisionTree tree;
};

/// H(x) = h0 + sum_t alpha_t h_t(x), summed in iteration order.
struct Ensemble {
  double h0 = 0.0;
  std::vector<EnsembleTerm> terms;

  double predict(const Dataset& S, std::size_t i) const;
  std::vector<double> predict_all(const Dataset& S) const;
};

/// (1/m) sum_i F(y_i H(x_i)).
double empirical_loss(const Loss& f, const Dataset& S, const Ensemble& H);

/// Same from precomputed margins y_i H(x_i).
double empirical_loss(const Loss& f, std::span<const double> margins);

/// Fraction of margins <= 0.
double zero_one_error(std::span<const double> margins);

std::vector<double> margins(const Dataset& S, std::span<const double> predictions);

}  // namespace secantboost

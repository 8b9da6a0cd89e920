#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "secantboost/dataset.hpp"
#include "secantboost/random.hpp"

namespace secantboost::testing {

/// Two numeric features in [-1, 1]^2, labelled by the side of the line
/// x0 + 0.6 x1 = 0.1, with points closer than `gap` to it rejected.
inline Dataset separable_2d(std::size_t m, std::uint64_t seed, double gap = 0.05) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  while (rows.size() < m) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    const double s = a + 0.6 * b - 0.1;
    if (std::fabs(s) < gap) continue;
    rows.push_back({a, b});
    y.push_back(s > 0.0 ? 1 : -1);
  }
  return Dataset::from_numeric(rows, std::move(y));
}

/// Circle-shaped concept on three numeric features with 10% label noise, so
/// no stump separates it.
inline Dataset noisy_3d(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    const double c = rng.uniform(-1.0, 1.0);
    int label = a * a + b * b < 0.5 ? 1 : -1;
    if (rng.bernoulli(0.1)) label = -label;
    rows.push_back({a, b, c});
    y.push_back(label);
  }
  return Dataset::from_numeric(rows, std::move(y));
}

namespace detail {

inline bool wins(const std::array<char, 9>& b, char p) {
  static constexpr int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                      {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  for (const auto& l : lines)
    if (b[l[0]] == p && b[l[1]] == p && b[l[2]] == p) return true;
  return false;
}

inline void play(std::array<char, 9>& b, char turn, int filled, std::set<std::array<char, 9>>& endings) {
  if (wins(b, 'x') || wins(b, 'o') || filled == 9) {
    endings.insert(b);
    return;
  }
  for (int k = 0; k < 9; ++k) {
    if (b[k] != 'b') continue;
    b[k] = turn;
    play(b, turn == 'x' ? 'o' : 'x', filled + 1, endings);
    b[k] = 'b';
  }
}

}  // namespace detail

/// Every final board of tic-tac-toe games where x moves first, labelled +1
/// when x has three in a row: 958 boards, 626 positive. Nine categorical
/// features with levels x, o, b.
inline Dataset tictactoe() {
  std::array<char, 9> board;
  board.fill('b');
  std::set<std::array<char, 9>> endings;
  detail::play(board, 'x', 0, endings);
  std::vector<std::vector<std::string>> rows;
  std::vector<int> y;
  static const char* names[9] = {"top_left", "top_middle", "top_right", "middle_left", "middle_middle",
                                 "middle_right", "bottom_left", "bottom_middle", "bottom_right"};
  for (const auto& b : endings) {
    std::vector<std::string> r;
    for (char c : b) r.emplace_back(1, c);
    rows.push_back(std::move(r));
    y.push_back(detail::wins(b, 'x') ? 1 : -1);
  }
  return Dataset::from_categorical(rows, std::move(y), std::vector<std::string>(names, names + 9));
}

}  // namespace secantboost::testing

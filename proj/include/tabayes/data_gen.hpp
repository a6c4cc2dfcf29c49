#ifndef TABAYES_DATA_GEN_HPP
#define TABAYES_DATA_GEN_HPP

#include <cstddef>

#include "tabayes/discrete_measure.hpp"
#include "tabayes/rng.hpp"

namespace tabayes {

inline constexpr double kMeanvarTrueMean = 3.5;
inline constexpr double kMeanvarTrueVariance = 10.75;
inline constexpr double kMarTrueMean = 6.0;

/// X = -6 Z + T with T ~ N(5, 4) and Z ~ Bernoulli(0.25).
Dataset gen_meanvar(std::size_t n, RngHandle& rng);

/// Missing-at-random triples (x, c, c*y). X ~ N(10, 100), e ~ N(0, 4).
///   1: y = 1 + 0.5x + e,                  P(C=1|x) = expit((x-10)/10)
///   2: y = 0.006(x^2 + 40x + 400) + e,    logistic
///   3: linear mean,                       P(C=1|x) = Phi((x-10)/10)
///   4: quadratic mean,                    probit
Dataset gen_mar(int model_id, std::size_t n, RngHandle& rng);

}  // namespace tabayes

#endif  // TABAYES_DATA_GEN_HPP

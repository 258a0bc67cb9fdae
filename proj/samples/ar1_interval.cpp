// Simulates an AR(1) chain and prints both intervals for its mean.
#include <iostream>

#include "chebci/chebci.hpp"

int main() {
  const chebci::Trace trace = chebci::simulate_ar1(0.9, 1.0, 100000, std::nullopt, 2024);

  chebci::CiConfig config;
  config.variance_method = chebci::VarianceMethod::initial_sequence;
  const auto report = chebci::analyze(trace, config);

  std::cout << "estimate   " << report.chebyshev.estimate << '\n'
            << "v_hat      " << report.variance.v_hat << " (true V = 100)\n"
            << "chebyshev  [" << report.chebyshev.lower << ", " << report.chebyshev.upper << "]\n"
            << "clt        [" << report.clt.lower << ", " << report.clt.upper << "]\n";
}

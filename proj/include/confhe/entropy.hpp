#pragma once

#include "confhe/schmidt.hpp"

namespace confhe {

struct EntropyResult {
  double S_vN = 0.0;  // bits
  double L = 0.0;
  double probability_sum = 0.0;
  int n_m = 0;
  int l_m = 0;
};

/// -sum (2l+1) lambda log2 lambda over the raw truncated spectrum, with
/// 0 log 0 = 0 and lambdas below 1e-16 dropped from the log sum. No
/// renormalization: the probability deficit stays visible. Throws
/// std::runtime_error (with an (n_m, l_m) hint) if |deficit| exceeds
/// deficit_tol.
double von_neumann(const SchmidtSpectrum& spectrum, double deficit_tol = 1e-4);

/// 1 - sum (2l+1) lambda^2, same truncation conventions.
double linear_entropy(const SchmidtSpectrum& spectrum,
                      double deficit_tol = 1e-4);

EntropyResult entropies(const SchmidtSpectrum& spectrum,
                        double deficit_tol = 1e-4);

}  // namespace confhe

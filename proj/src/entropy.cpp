#include "confhe/entropy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace confhe {

namespace {

// lambdas below this contribute < 1e-14 bits and only log-of-denormal noise
constexpr double kLogFloor = 1e-16;

void check_deficit(const SchmidtSpectrum& spectrum, double deficit_tol) {
  const double deficit = spectrum.deficit();
  if (std::abs(deficit) > deficit_tol) {
    std::ostringstream msg;
    msg << "probability deficit " << deficit << " exceeds tolerance "
        << deficit_tol << "; retry with n_m >= " << 2 * spectrum.n_m - 1
        << ", l_m >= " << spectrum.l_m + 6;
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

double von_neumann(const SchmidtSpectrum& spectrum, double deficit_tol) {
  check_deficit(spectrum, deficit_tol);
  double acc = 0.0;
  for (const auto& e : spectrum.entries) {
    if (e.lambda < kLogFloor) continue;
    acc -= (2.0 * e.l + 1.0) * e.lambda * std::log2(e.lambda);
  }
  return acc;
}

double linear_entropy(const SchmidtSpectrum& spectrum, double deficit_tol) {
  check_deficit(spectrum, deficit_tol);
  double acc = 0.0;
  for (const auto& e : spectrum.entries)
    acc += (2.0 * e.l + 1.0) * e.lambda * e.lambda;
  return 1.0 - acc;
}

EntropyResult entropies(const SchmidtSpectrum& spectrum, double deficit_tol) {
  EntropyResult r;
  r.S_vN = von_neumann(spectrum, deficit_tol);
  r.L = linear_entropy(spectrum, deficit_tol);
  r.probability_sum = spectrum.probability_sum;
  r.n_m = spectrum.n_m;
  r.l_m = spectrum.l_m;
  return r;
}

}  // namespace confhe

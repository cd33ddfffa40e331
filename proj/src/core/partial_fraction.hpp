#pragma once

#include <vector>

#include "spectral.hpp"
#include "types.hpp"

namespace slmap {

// Finite sum  sum_n sum_nu  coeffs[nu] / (lambda - pole)^{nu+1}  over pole blocks.
struct PoleBlock {
  Complex pole{};
  std::vector<Complex> coeffs;
};

struct PartialFraction {
  std::vector<PoleBlock> blocks;

  Complex eval(Complex lambda) const;
  bool empty() const { return blocks.empty(); }
};

// Truncation of the data to indices <= n_max as a partial fraction (the
// finite pole expansion of the Weyl function built from those indices).
// Blocks must hold equal eigenvalues consecutively.
PartialFraction build_MN(const SpectralData& data, int n_max);

// target - model with merged pole set; cancelled coefficients below
// drop_tol are removed.
PartialFraction hat_MN(const PartialFraction& model, const PartialFraction& target,
                       double drop_tol = 1e-14);

}  // namespace slmap

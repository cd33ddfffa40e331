#pragma once

#include <functional>
#include <string>

#include "spectral.hpp"
#include "types.hpp"

namespace slmap {

// Searches the two-parameter family q = c * w(x) for a potential whose
// characteristic function has a double zero: Newton on
// (Delta(lambda; c), d/dlambda Delta(lambda; c)) = (0, 0) in (lambda, c).
struct DoubleSearchOptions {
  std::string shape = "exp-ix";  // w(x); "exp-ix" or "exp-2ix"
  Complex c_seed{2.0, 1.0};
  Complex lambda_seed{1.0, 0.0};
  int grid_size = 257;
  int refine = 4;
  int max_iter = 80;
  bool scan = false;         // coarse scan of the c-window before Newton
  double scan_radius = 4.0;  // half-width of the scan box around c_seed
  int scan_points = 9;       // per axis
};

struct DoubleCertificate {
  Complex lambda{};
  Complex c{};
  double abs_char = 0.0;    // |Delta|, must be <= 1e-9
  double abs_dchar = 0.0;   // |d Delta/d lambda|, must be <= 1e-8
  double abs_d2char = 0.0;  // |d^2 Delta/d lambda^2|, must be >= 1e-4
  int winding = 0;          // must be 2 on the isolating circle
  double isolating_radius = 0.0;
};

struct DoubleSearchResult {
  BoundaryProblem problem;
  DoubleCertificate certificate;
};

std::function<Complex(double)> potential_shape(const std::string& name);

DoubleSearchResult find_double(const DoubleSearchOptions& opts = {});

}  // namespace slmap

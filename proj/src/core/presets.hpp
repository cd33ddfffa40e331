#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace slmap {

// Bundled model problems:
//   zero-robin      q = 0, h = H = 0, Robin
//   zero-dirichlet  q = 0, Dirichlet
//   const-complex   q = 0.5 + 0.5i, h = H = 0, Robin
//   smooth-complex  q = (1+i) sin x, h = H = 0, Robin
//   double-ep       q = c* exp(ix), h = H = 0, Robin, with c* tuned so the
//                   first two eigenvalues coalesce (cached search output)
BoundaryProblem preset_problem(const std::string& name, int grid_size);

std::vector<std::string> preset_names();

// cached double-eigenvalue parameters of the double-ep preset
Complex double_ep_coefficient();
Complex double_ep_lambda();

}  // namespace slmap

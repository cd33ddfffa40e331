#pragma once

#include <string>

#include "main_equation.hpp"
#include "perturb.hpp"
#include "spectral.hpp"

namespace slmap {

// Decimal text with 17 significant digits everywhere; doubles round-trip
// bit-exactly through these files.
std::string format_double(double v);

// One record per index: n, Re lambda, Im lambda, Re M, Im M, block id.
void write_gsd(const SpectralData& data, const std::string& path);
SpectralData read_gsd(const std::string& path);

std::string gsd_to_string(const SpectralData& data);
SpectralData gsd_from_string(const std::string& text);

// Rows: x, Re q, Im q, Re q~, Im q~, Re eps0, Im eps0. Header carries
// N, r, contour nodes, K, the measured perturbation sizes and h~, H~.
void write_reconstruction(const BoundaryProblem& model, const ReconstructionResult& res,
                          const std::string& path);

// Condition-check records: id, measured, bound, pass flag.
void write_check_report(const CheckReport& report, const std::string& path);

// Potential samples, one "re im" pair per line on the uniform grid over [0, pi].
void write_potential(const std::vector<Complex>& q, const std::string& path);
std::vector<Complex> read_potential(const std::string& path);

}  // namespace slmap

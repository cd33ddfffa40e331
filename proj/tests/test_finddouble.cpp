#include <doctest.h>

#include <cmath>

#include "core/find_double.hpp"
#include "core/perturb.hpp"
#include "core/presets.hpp"
#include "core/spectral.hpp"

using namespace slmap;

TEST_CASE("search certifies a double eigenvalue near the cached seed") {
  DoubleSearchOptions o;
  o.c_seed = double_ep_coefficient() + Complex(0.05, 0.05);
  o.lambda_seed = double_ep_lambda() + Complex(0.02, 0.0);
  const auto res = find_double(o);
  CHECK(res.certificate.abs_char <= 1e-9);
  CHECK(res.certificate.abs_dchar <= 1e-8);
  CHECK(res.certificate.abs_d2char >= 1e-4);
  CHECK(res.certificate.winding == 2);
  CHECK(std::abs(res.certificate.c - double_ep_coefficient()) < 1e-10);
  CHECK(std::abs(res.certificate.lambda - double_ep_lambda()) < 1e-10);
}

TEST_CASE("the cached preset carries the certified double block") {
  const auto p = preset_problem("double-ep", 257);
  const auto g = full_gsd(p, 8, {});
  CHECK(g.spectrum.N == 1);
  CHECK(g.spectrum.multiplicity(0) == 2);
  CHECK(std::abs(g.spectrum.eigenvalues[0] - double_ep_lambda()) < 1e-9);
  CHECK(g.spectrum.block_start[0] == 0);
  CHECK(g.spectrum.block_start[1] == 0);
  for (int i = 2; i < g.spectrum.count(); ++i)
    CHECK(g.spectrum.block_start[i] == i);
  // the leading coefficient of the double block must be usable for splitting
  CHECK(std::abs(g.weyl_coeffs[1]) > 1e-2);

  SUBCASE("splitting its data passes the discrete conditions on the moments") {
    const auto data = g.data_view();
    const auto target = split_double(data, 0, 1e-3);
    const auto rep = check_theorem2(data, target, data.N, 1e-3);
    for (const auto& rec : rep.records) {
      if (rec.id == "theorem2.block0.moment_s0" || rec.id == "theorem2.block0.moment_s1")
        CHECK(rec.measured <= 1e-12);
    }
  }
}

TEST_CASE("zero potential has a simple spectrum and defeats the search") {
  const auto p = preset_problem("zero-robin", 257);
  const auto spec = find_eigenvalues(p, 8, {});
  for (int n : spec.block_starts()) CHECK(spec.multiplicity(n) == 1);

  DoubleSearchOptions o;
  o.c_seed = Complex(0.0, 0.0);
  o.lambda_seed = Complex(1.0, 0.0);
  o.max_iter = 25;
  bool failed = false;
  Complex c_found;
  try {
    const auto res = find_double(o);
    c_found = res.certificate.c;
  } catch (const Error& e) {
    failed = true;
    CHECK(e.reason() == Reason::SearchFailed);
  }
  // either no convergence, or convergence far away from q = 0
  if (!failed) CHECK(std::abs(c_found) > 0.1);
}

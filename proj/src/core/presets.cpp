#include "presets.hpp"

#include <cmath>

namespace slmap {

namespace {

// Search output of the double-eigenvalue finder for q = c exp(ix), Robin
// h = H = 0 at grid 257: the first two eigenvalues coalesce. The family is
// symmetric under c -> -conj(c), so the coefficient sits on the imaginary
// axis and the double eigenvalue is real. Re-certified by the test suite
// (winding number 2).
constexpr double kDoubleEpCRe = 0.0;
constexpr double kDoubleEpCIm = -0.61594194842298056;
constexpr double kDoubleEpLambdaRe = 0.83452696630288947;
constexpr double kDoubleEpLambdaIm = 0.0;

}  // namespace

Complex double_ep_coefficient() { return Complex(kDoubleEpCRe, kDoubleEpCIm); }
Complex double_ep_lambda() { return Complex(kDoubleEpLambdaRe, kDoubleEpLambdaIm); }

BoundaryProblem preset_problem(const std::string& name, int grid_size) {
  require(grid_size >= 33, Reason::InvalidArgument, "grid_size must be >= 33");
  BoundaryProblem p;
  p.q.resize(grid_size);
  const auto fill = [&](auto&& f) {
    for (int i = 0; i < grid_size; ++i) p.q[i] = f(kPi * i / (grid_size - 1));
  };

  if (name == "zero-robin") {
    fill([](double) { return Complex(0.0, 0.0); });
  } else if (name == "zero-dirichlet") {
    fill([](double) { return Complex(0.0, 0.0); });
    p.kind = BcKind::Dirichlet;
  } else if (name == "const-complex") {
    fill([](double) { return Complex(0.5, 0.5); });
  } else if (name == "smooth-complex") {
    fill([](double x) { return Complex(1.0, 1.0) * std::sin(x); });
  } else if (name == "double-ep") {
    const Complex c = double_ep_coefficient();
    fill([&](double x) { return c * std::exp(Complex(0.0, 1.0) * x); });
  } else {
    fail(Reason::BadPreset, "unknown preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"zero-robin", "zero-dirichlet", "const-complex", "smooth-complex", "double-ep"};
}

}  // namespace slmap

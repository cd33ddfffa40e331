#include "partial_fraction.hpp"

#include <algorithm>
#include <cmath>

namespace slmap {

Complex PartialFraction::eval(Complex lambda) const {
  Complex acc(0.0, 0.0);
  for (const auto& b : blocks) {
    const Complex d = lambda - b.pole;
    Complex pw = d;
    for (const Complex c : b.coeffs) {
      acc += c / pw;
      pw *= d;
    }
  }
  return acc;
}

PartialFraction build_MN(const SpectralData& data, int n_max) {
  data.validate();
  PartialFraction pf;
  for (int i = 0; i < data.count(); ++i) {
    const int n = data.first_index + i;
    if (n > n_max) break;
    if (data.block_start[i] == n) {
      pf.blocks.push_back({data.lambdas[i], {data.weyl[i]}});
    } else {
      require(!pf.blocks.empty() && pf.blocks.back().pole == data.lambdas[i],
              Reason::BlockStructure, "equal poles must be consecutive");
      pf.blocks.back().coeffs.push_back(data.weyl[i]);
    }
  }
  // reject equal pole values split across blocks
  for (size_t a = 0; a < pf.blocks.size(); ++a)
    for (size_t b = a + 1; b < pf.blocks.size(); ++b)
      require(pf.blocks[a].pole != pf.blocks[b].pole, Reason::BlockStructure,
              "equal poles must be consecutive");
  return pf;
}

PartialFraction hat_MN(const PartialFraction& model, const PartialFraction& target,
                       double drop_tol) {
  PartialFraction out = target;
  for (const auto& mb : model.blocks) {
    bool merged = false;
    for (auto& ob : out.blocks) {
      if (ob.pole == mb.pole ||
          std::abs(ob.pole - mb.pole) <= 1e-15 * (1.0 + std::abs(mb.pole))) {
        if (ob.coeffs.size() < mb.coeffs.size()) ob.coeffs.resize(mb.coeffs.size());
        for (size_t i = 0; i < mb.coeffs.size(); ++i) ob.coeffs[i] -= mb.coeffs[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      PoleBlock nb = mb;
      for (auto& c : nb.coeffs) c = -c;
      out.blocks.push_back(nb);
    }
  }
  // drop cancelled coefficients and empty blocks
  for (auto& b : out.blocks) {
    while (!b.coeffs.empty() && std::abs(b.coeffs.back()) <= drop_tol) b.coeffs.pop_back();
    bool all_small = true;
    for (Complex c : b.coeffs)
      if (std::abs(c) > drop_tol) all_small = false;
    if (all_small) b.coeffs.clear();
  }
  out.blocks.erase(std::remove_if(out.blocks.begin(), out.blocks.end(),
                                  [](const PoleBlock& b) { return b.coeffs.empty(); }),
                   out.blocks.end());
  return out;
}

}  // namespace slmap

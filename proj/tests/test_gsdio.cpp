#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/gsd_io.hpp"
#include "core/presets.hpp"

using namespace slmap;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("gsd text round-trips bit-exactly") {
  // random data with a multiple block and denormal-ish magnitudes
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralData d;
  d.kind = BcKind::Robin;
  d.first_index = 0;
  d.N = 1;
  d.r = 2.6;
  const Complex la0(u(gen), u(gen));
  d.lambdas = {la0, la0};
  d.block_start = {0, 0};
  d.weyl = {Complex(u(gen), u(gen)), Complex(u(gen), u(gen))};
  for (int n = 2; n < 30; ++n) {
    d.lambdas.emplace_back(n * n + 1e-7 * u(gen), 1e-9 * u(gen));
    d.weyl.emplace_back(2.0 / kPi + u(gen) * 1e-13, u(gen) * 1e-17);
    d.block_start.push_back(n);
  }

  const auto path = tmp_file("slmap_gsd_roundtrip.txt");
  write_gsd(d, path.string());
  const auto back = read_gsd(path.string());
  REQUIRE(back.count() == d.count());
  CHECK(back.kind == d.kind);
  CHECK(back.first_index == d.first_index);
  CHECK(back.N == d.N);
  CHECK(back.r == d.r);
  for (int i = 0; i < d.count(); ++i) {
    CHECK(back.lambdas[i] == d.lambdas[i]);  // bit-exact through 17 digits
    CHECK(back.weyl[i] == d.weyl[i]);
    CHECK(back.block_start[i] == d.block_start[i]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("format_double survives extreme exponents") {
  for (double v : {1.0, -0.0, 1e-300, -3.141592653589793e300, 5e-324}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("malformed gsd files are rejected") {
  SUBCASE("bad kind") {
    CHECK_THROWS_AS((void)gsd_from_string("kind nonsense\n"), Error);
  }
  SUBCASE("out-of-order records") {
    const std::string text =
        "kind robin\nfirst_index 0\ncount 2\nN 0\nr 0.5\n"
        "1 1 0 0.6 0 1\n0 0 0 0.3 0 0\n";
    CHECK_THROWS_AS((void)gsd_from_string(text), Error);
  }
  SUBCASE("count mismatch") {
    const std::string text =
        "kind robin\nfirst_index 0\ncount 3\nN 0\nr 0.5\n0 0 0 0.3 0 0\n";
    CHECK_THROWS_AS((void)gsd_from_string(text), Error);
  }
}

TEST_CASE("check report format carries one record per condition") {
  CheckReport rep;
  rep.add("theorem1.contour_sup", 1e-4, 1e-3);
  rep.add("theorem1.tail_norm", 2e-3, 1e-3);
  const auto path = tmp_file("slmap_check_report.txt");
  write_check_report(rep, path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  CHECK(text.find("theorem1.contour_sup 0.0001") != std::string::npos);
  CHECK(text.find(" pass") != std::string::npos);
  CHECK(text.find(" fail") != std::string::npos);
  CHECK(text.find("overall fail") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("potential samples round-trip") {
  const auto p = preset_problem("smooth-complex", 65);
  const auto path = tmp_file("slmap_potential.txt");
  write_potential(p.q, path.string());
  const auto back = read_potential(path.string());
  REQUIRE(back.size() == p.q.size());
  for (size_t i = 0; i < back.size(); ++i) CHECK(back[i] == p.q[i]);
  std::filesystem::remove(path);
}

TEST_CASE("reconstruction file carries the header and the grid rows") {
  const auto p = preset_problem("zero-robin", 65);
  ReconstructionResult res;
  res.q_tilde.assign(65, Complex(0.25, -0.5));
  res.eps0.assign(65, Complex(0.0, 0.0));
  res.eps.assign(65, Complex(0.0, 0.0));
  res.h_tilde = Complex(0.125, 0.0);
  res.H_tilde = Complex(0.0, -0.25);
  res.diag.N = 0;
  res.diag.r = 0.5;
  res.diag.contour_nodes = 64;
  res.diag.trunc_k = 20;
  const auto path = tmp_file("slmap_reconstruction.txt");
  write_reconstruction(p, res, path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  CHECK(text.find("h_tilde 0.125 0") != std::string::npos);
  CHECK(text.find("contour_nodes 64") != std::string::npos);
  // one row per grid point plus headers
  size_t rows = 0;
  for (char ch : text)
    if (ch == '\n') ++rows;
  CHECK(rows >= 65);
  std::filesystem::remove(path);
}

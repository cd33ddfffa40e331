#include "gsd_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace slmap {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Reason::Io, "cannot open '" + path + "' for writing");
  out << text;
  require(out.good(), Reason::Io, "write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Reason::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string gsd_to_string(const SpectralData& data) {
  data.validate();
  std::ostringstream out;
  out << "# slmap gsd v1\n";
  out << "kind " << (data.kind == BcKind::Robin ? "robin" : "dirichlet") << "\n";
  out << "first_index " << data.first_index << "\n";
  out << "count " << data.count() << "\n";
  out << "N " << data.N << "\n";
  out << "r " << format_double(data.r) << "\n";
  out << "# n re(lambda) im(lambda) re(M) im(M) block\n";
  for (int i = 0; i < data.count(); ++i) {
    out << (data.first_index + i) << ' ' << format_double(data.lambdas[i].real()) << ' '
        << format_double(data.lambdas[i].imag()) << ' '
        << format_double(data.weyl[i].real()) << ' ' << format_double(data.weyl[i].imag())
        << ' ' << data.block_start[i] << "\n";
  }
  return out.str();
}

SpectralData gsd_from_string(const std::string& text) {
  SpectralData data;
  std::istringstream in(text);
  std::string line;
  int expected = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "kind") {
      std::string k;
      ls >> k;
      require(k == "robin" || k == "dirichlet", Reason::Io, "bad kind in gsd file");
      data.kind = k == "robin" ? BcKind::Robin : BcKind::Dirichlet;
    } else if (head == "first_index") {
      ls >> data.first_index;
    } else if (head == "count") {
      ls >> expected;
    } else if (head == "N") {
      ls >> data.N;
    } else if (head == "r") {
      ls >> data.r;
    } else {
      // data record: n re im re im block
      double lre, lim, mre, mim;
      int block;
      std::istringstream rs(line);
      long n;
      rs >> n >> lre >> lim >> mre >> mim >> block;
      require(!rs.fail(), Reason::Io, "malformed gsd record: " + line);
      require(n == data.first_index + data.count(), Reason::Io,
              "gsd records out of order at n=" + std::to_string(n));
      data.lambdas.emplace_back(lre, lim);
      data.weyl.emplace_back(mre, mim);
      data.block_start.push_back(block);
    }
  }
  require(expected < 0 || expected == data.count(), Reason::Io,
          "gsd record count does not match the header");
  data.validate();
  return data;
}

void write_gsd(const SpectralData& data, const std::string& path) {
  write_file(path, gsd_to_string(data));
}

SpectralData read_gsd(const std::string& path) { return gsd_from_string(read_file(path)); }

void write_reconstruction(const BoundaryProblem& model, const ReconstructionResult& res,
                          const std::string& path) {
  std::ostringstream out;
  const Diagnostics& d = res.diag;
  out << "# slmap reconstruction v1\n";
  out << "N " << d.N << "\n";
  out << "r " << format_double(d.r) << "\n";
  out << "contour_nodes " << d.contour_nodes << "\n";
  out << "trunc_k " << d.trunc_k << "\n";
  out << "contour_sup " << format_double(d.contour_sup) << "\n";
  out << "tail_norm " << format_double(d.tail_norm) << "\n";
  out << "max_op_norm_proxy " << format_double(d.max_op_norm_proxy) << "\n";
  out << "h " << format_double(model.h.real()) << ' ' << format_double(model.h.imag()) << "\n";
  out << "H " << format_double(model.H.real()) << ' ' << format_double(model.H.imag()) << "\n";
  out << "h_tilde " << format_double(res.h_tilde.real()) << ' '
      << format_double(res.h_tilde.imag()) << "\n";
  out << "H_tilde " << format_double(res.H_tilde.real()) << ' '
      << format_double(res.H_tilde.imag()) << "\n";
  out << "# x re(q) im(q) re(q~) im(q~) re(eps0) im(eps0)\n";
  for (int i = 0; i < model.grid_size(); ++i) {
    out << format_double(model.x_at(i)) << ' ' << format_double(model.q[i].real()) << ' '
        << format_double(model.q[i].imag()) << ' ' << format_double(res.q_tilde[i].real())
        << ' ' << format_double(res.q_tilde[i].imag()) << ' '
        << format_double(res.eps0[i].real()) << ' ' << format_double(res.eps0[i].imag())
        << "\n";
  }
  write_file(path, out.str());
}

void write_check_report(const CheckReport& report, const std::string& path) {
  std::ostringstream out;
  out << "# slmap check-report v1\n";
  out << "# condition measured bound pass\n";
  for (const auto& r : report.records)
    out << r.id << ' ' << format_double(r.measured) << ' ' << format_double(r.bound) << ' '
        << (r.pass ? "pass" : "fail") << "\n";
  out << "overall " << (report.pass ? "pass" : "fail") << "\n";
  write_file(path, out.str());
}

void write_potential(const std::vector<Complex>& q, const std::string& path) {
  std::ostringstream out;
  for (Complex v : q)
    out << format_double(v.real()) << ' ' << format_double(v.imag()) << "\n";
  write_file(path, out.str());
}

std::vector<Complex> read_potential(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Complex> q;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re, im;
    ls >> re >> im;
    require(!ls.fail(), Reason::Io, "malformed potential record: " + line);
    q.emplace_back(re, im);
  }
  require(q.size() >= 33, Reason::Io, "potential file needs at least 33 samples");
  return q;
}

}  // namespace slmap

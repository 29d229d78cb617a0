#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wavebasis/basis.hpp"

namespace wavebasis {

namespace {

constexpr const char* kMagic = "wavebasis-basis";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("basis file line " + std::to_string(line) + ": " + what);
}

std::vector<int> parse_ints(std::string_view body, std::size_t line) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t comma = body.find(',', pos);
    const std::string_view tok = body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) parse_error(line, "bad integer '" + std::string(tok) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void write_basis(std::ostream& out, const BasisSet& basis) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "dims " << basis.dims() << '\n';
  out << "actions " << basis.num_actions() << '\n';
  out << "next_id " << basis.next_id() << '\n';
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& f = basis.function(i);
    if (f.kind() == FeatureKind::wavelet) {
      out << "W " << basis.id_at(i) << ' ';
      for (const auto& a : f.atoms()) {
        out << '(' << a.order << ',' << a.scale << ',' << a.translation << ',' << a.dim << ')';
      }
    } else {
      out << "F " << basis.id_at(i) << " [";
      const auto& c = f.coefficients();
      for (std::size_t d = 0; d < c.size(); ++d) out << (d ? "," : "") << c[d];
      out << ']';
    }
    for (std::size_t a = 0; a < basis.num_actions(); ++a) out << ' ' << format_double(basis.weights(a)[i]);
    out << '\n';
  }
}

BasisSet read_basis(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) parse_error(line_no + 1, "unexpected end of input");
    ++line_no;
    return std::istringstream(line);
  };

  std::string word;
  int version = 0;
  if (!(next_line() >> word >> version) || word != kMagic) parse_error(line_no, "missing header");
  if (version != kFormatVersion) parse_error(line_no, "unsupported format version");

  int dims = 0;
  std::size_t actions = 0;
  FeatureId next_id = 0;
  if (!(next_line() >> word >> dims) || word != "dims") parse_error(line_no, "expected 'dims'");
  if (!(next_line() >> word >> actions) || word != "actions") parse_error(line_no, "expected 'actions'");
  if (!(next_line() >> word >> next_id) || word != "next_id") parse_error(line_no, "expected 'next_id'");

  BasisSet basis(dims, actions);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string kind, body;
    FeatureId id = 0;
    if (!(row >> kind >> id >> body)) parse_error(line_no, "malformed feature line");

    BasisFunction f = [&] {
      if (kind == "F") {
        if (body.size() < 2 || body.front() != '[' || body.back() != ']') parse_error(line_no, "bad Fourier coefficients");
        return BasisFunction::fourier(parse_ints(std::string_view(body).substr(1, body.size() - 2), line_no));
      }
      if (kind != "W") parse_error(line_no, "unknown feature kind '" + kind + "'");
      std::vector<WaveletAtom> atoms;
      std::size_t pos = 0;
      while (pos < body.size()) {
        const std::size_t close = body.find(')', pos);
        if (body[pos] != '(' || close == std::string::npos) parse_error(line_no, "bad atom list");
        const auto v = parse_ints(std::string_view(body).substr(pos + 1, close - pos - 1), line_no);
        if (v.size() != 4) parse_error(line_no, "atom needs (order,scale,translation,dim)");
        atoms.push_back({v[3], v[0], v[1], v[2]});
        pos = close + 1;
      }
      return BasisFunction::product(std::move(atoms));
    }();

    std::vector<double> weights(actions);
    for (auto& w : weights) {
      if (!(row >> w)) parse_error(line_no, "expected one weight per action");
    }
    basis.restore(id, std::move(f), weights);
  }
  basis.set_next_id(std::max(next_id, basis.next_id()));
  return basis;
}

}  // namespace wavebasis

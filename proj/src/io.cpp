#include "uasd/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace uasd {

std::string formatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void writeCsv(std::ostream& out, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << '\n';
  }
}

namespace {

std::string complexToken(const Complex& z) {
  std::string s = formatDouble(z.real());
  s += (z.imag() < 0 || std::signbit(z.imag())) ? "" : "+";
  s += formatDouble(z.imag());
  s += 'j';
  return s;
}

Complex parseComplexToken(const std::string& tok) {
  if (tok.empty() || tok.back() != 'j')
    throw ConfigError("bad complex token `" + tok + "`");
  std::string body = tok.substr(0, tok.size() - 1);
  // split at the sign that separates real and imaginary parts (skip a
  // leading sign and exponent signs)
  size_t split = std::string::npos;
  for (size_t i = 1; i < body.size(); ++i) {
    char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E')
      split = i;
  }
  if (split == std::string::npos)
    throw ConfigError("bad complex token `" + tok + "`");
  return Complex(std::stod(body.substr(0, split)),
                 std::stod(body.substr(split)));
}

}  // namespace

void writeMatrix(std::ostream& out, const MatrixXcd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << complexToken(m(i, j)) << (j + 1 < m.cols() ? " " : "");
    out << '\n';
  }
}

MatrixXcd readMatrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ConfigError("bad matrix header");
  MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) throw ConfigError("truncated matrix data");
      m(i, j) = parseComplexToken(tok);
    }
  return m;
}

}  // namespace uasd

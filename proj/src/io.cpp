#include "levsketch/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "levsketch/error.hpp"

namespace levsketch {

namespace {

constexpr char kMagic[4] = {'L', 'E', 'V', 'S'};
constexpr std::uint8_t kBinaryVersion = 1;

struct Token {
  std::string_view text;
  std::size_t column = 0;  // 1-based
};

std::vector<Token> split(std::string_view line, char sep) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (sep == ' ') {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      out.push_back({line.substr(start, i - start), start + 1});
    } else {
      const std::size_t end = std::min(line.find(sep, i), line.size());
      std::size_t a = i;
      std::size_t b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      out.push_back({line.substr(a, b - a), a + 1});
      i = end + 1;
    }
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
  raise(ErrorCode::ParseError,
        "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

double parse_double(const Token& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.text.empty() || ec != std::errc() || ptr != last)
    parse_error(line, tok.column, "expected a number, got '" + std::string(tok.text) + "'");
  if (!std::isfinite(v))
    raise(ErrorCode::NonFiniteEntry, "line " + std::to_string(line) + ", column " +
                                         std::to_string(tok.column) + ": non-finite value");
  return v;
}

std::size_t parse_index(const Token& tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (tok.text.empty() || ec != std::errc() || ptr != tok.text.data() + tok.text.size())
    parse_error(line, tok.column, "expected a nonnegative integer, got '" + std::string(tok.text) + "'");
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

template <class T>
void put_le(std::ostream& out, T v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    raise(ErrorCode::ParseError, "binary matrix is truncated");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace

std::string_view to_string(MatrixFormat format) {
  switch (format) {
    case MatrixFormat::MatrixMarket: return "matrix-market";
    case MatrixFormat::Csv: return "csv";
    case MatrixFormat::Binary: return "binary";
  }
  return "unknown";
}

MatrixFormat parse_matrix_format(std::string_view s) {
  if (s == "matrix-market" || s == "mtx") return MatrixFormat::MatrixMarket;
  if (s == "csv") return MatrixFormat::Csv;
  if (s == "binary" || s == "bin") return MatrixFormat::Binary;
  raise(ErrorCode::InvalidParameter, "unknown matrix format '" + std::string(s) + "'");
}

MatrixFormat format_from_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "mtx") return MatrixFormat::MatrixMarket;
  if (ext == "csv") return MatrixFormat::Csv;
  if (ext == "bin" || ext == "levs") return MatrixFormat::Binary;
  raise(ErrorCode::InvalidParameter, "cannot infer matrix format from '" + path + "'");
}

DenseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) raise(ErrorCode::ParseError, "empty Matrix Market input");
  ++lineno;
  strip_cr(line);
  const auto header = split(line, ' ');
  if (header.size() < 5 || header[0].text != "%%MatrixMarket" || lower(header[1].text) != "matrix")
    parse_error(1, 1, "missing '%%MatrixMarket matrix' banner");
  const std::string layout = lower(header[2].text);
  const std::string field = lower(header[3].text);
  const std::string symmetry = lower(header[4].text);
  if (layout != "array" && layout != "coordinate")
    parse_error(1, header[2].column, "unsupported layout '" + layout + "'");
  if (field != "real" && field != "integer" && field != "double" &&
      !(field == "pattern" && layout == "coordinate"))
    parse_error(1, header[3].column, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    parse_error(1, header[4].column, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  // Skip comments and blank lines up to the size line.
  std::vector<Token> size_tokens;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '%') continue;
    size_tokens = split(line, ' ');
    if (!size_tokens.empty()) break;
  }
  const std::size_t expected = layout == "array" ? 2 : 3;
  if (size_tokens.size() != expected)
    parse_error(lineno, 1, "size line needs " + std::to_string(expected) + " integers");
  const std::size_t rows = parse_index(size_tokens[0], lineno);
  const std::size_t cols = parse_index(size_tokens[1], lineno);
  if (symmetric && rows != cols) parse_error(lineno, 1, "symmetric matrix must be square");
  DenseMatrix a(rows, cols);

  auto next_data_line = [&](std::vector<Token>& toks) {
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (line.empty() || line[0] == '%') continue;
      toks = split(line, ' ');
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<Token> toks;
  if (layout == "array") {
    // Column-major; symmetric stores the lower triangle only.
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(toks)) parse_error(lineno + 1, 1, "unexpected end of array data");
        if (toks.size() != 1) parse_error(lineno, toks[1].column, "expected one value per line");
        a(i, j) = parse_double(toks[0], lineno);
        if (symmetric) a(j, i) = a(i, j);
      }
    }
  } else {
    const std::size_t nnz = parse_index(size_tokens[2], lineno);
    const std::size_t need = field == "pattern" ? 2 : 3;
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!next_data_line(toks)) parse_error(lineno + 1, 1, "unexpected end of coordinate data");
      if (toks.size() != need)
        parse_error(lineno, 1, "expected " + std::to_string(need) + " fields per entry");
      const std::size_t i = parse_index(toks[0], lineno);
      const std::size_t j = parse_index(toks[1], lineno);
      if (i < 1 || i > rows) parse_error(lineno, toks[0].column, "row index out of range");
      if (j < 1 || j > cols) parse_error(lineno, toks[1].column, "column index out of range");
      const double v = field == "pattern" ? 1.0 : parse_double(toks[2], lineno);
      a(i - 1, j - 1) += v;
      if (symmetric && i != j) a(j - 1, i - 1) += v;
    }
  }
  if (next_data_line(toks)) parse_error(lineno, toks[0].column, "trailing data after matrix");
  require(a.all_finite(), ErrorCode::NonFiniteEntry, "summed entries overflowed");
  return a;
}

DenseMatrix read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto toks = split(line, ',');
    if (rows == 0) cols = toks.size();
    if (toks.size() != cols)
      parse_error(lineno, 1, "expected " + std::to_string(cols) + " fields, got " +
                                 std::to_string(toks.size()));
    for (const auto& t : toks) data.push_back(parse_double(t, lineno));
    ++rows;
  }
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    raise(ErrorCode::ParseError, "binary matrix: bad magic (expected LEVS)");
  char version = 0;
  if (!in.get(version) || static_cast<std::uint8_t>(version) != kBinaryVersion)
    raise(ErrorCode::ParseError, "binary matrix: unsupported version");
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = get_le<double>(in);
  if (in.peek() != std::char_traits<char>::eof())
    raise(ErrorCode::ParseError, "binary matrix: trailing bytes");
  return DenseMatrix(rows, cols, std::move(data));
}

void write_matrix_market(std::ostream& out, const DenseMatrix& a) {
  out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out << format_double(a(i, j)) << '\n';
}

void write_csv(std::ostream& out, const DenseMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

void write_binary(std::ostream& out, const DenseMatrix& a) {
  out.write(kMagic, 4);
  out.put(static_cast<char>(kBinaryVersion));
  put_le<std::uint64_t>(out, a.rows());
  put_le<std::uint64_t>(out, a.cols());
  for (double v : a.data()) put_le<double>(out, v);
}

DenseMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path + "'");
  switch (format) {
    case MatrixFormat::MatrixMarket: return read_matrix_market(in);
    case MatrixFormat::Csv: return read_csv(in);
    case MatrixFormat::Binary: return read_binary(in);
  }
  raise(ErrorCode::InvalidParameter, "unknown format");
}

void save_matrix(const std::string& path, const DenseMatrix& a, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path + "'");
  switch (format) {
    case MatrixFormat::MatrixMarket: write_matrix_market(out, a); break;
    case MatrixFormat::Csv: write_csv(out, a); break;
    case MatrixFormat::Binary: write_binary(out, a); break;
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace levsketch

#include "homdisp/curve_file.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "homdisp/error.hpp"

namespace homdisp {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw SchemaError("line " + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& tok, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE) bad_line(line_no, "not a number: '" + tok + "'");
  return v;
}

std::int64_t parse_int(const std::string& tok, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE) bad_line(line_no, "not an integer: '" + tok + "'");
  return v;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_curve(const HomCurve& curve) {
  curve.validate();
  std::string rows;
  for (std::size_t i = 0; i < curve.delays_ps.size(); ++i) {
    rows += format_double(curve.delays_ps[i]) + " " + format_double(curve.expected[i]);
    if (curve.counts) rows += " " + std::to_string((*curve.counts)[i]);
    rows += "\n";
  }
  if (curve.config_echo.find('\n') != std::string::npos)
    throw InvalidArgument("config echo must be a single line");

  char sum[40];
  std::snprintf(sum, sizeof sum, "fnv1a64:%016" PRIx64, fnv1a64(rows));
  std::string out = std::string(kCurveHeader) + "\n";
  out += "# seed: " + (curve.seed ? std::to_string(*curve.seed) : std::string("none")) + "\n";
  out += "# config: " + curve.config_echo + "\n";
  out += std::string("# checksum: ") + sum + "\n";
  out += std::string("# columns: delay_ps expected_rate") + (curve.counts ? " counts" : "") + "\n";
  return out + rows;
}

HomCurve parse_curve(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) bad_line(line_no + 1, std::string("missing ") + what);
    ++line_no;
  };

  next("format header");
  if (line != kCurveHeader) bad_line(line_no, "expected '" + std::string(kCurveHeader) + "'");

  HomCurve curve;
  next("seed line");
  if (!starts_with(line, "# seed: ")) bad_line(line_no, "expected '# seed: '");
  const std::string seed = line.substr(8);
  if (seed != "none") {
    if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos)
      bad_line(line_no, "seed must be an unsigned integer or 'none'");
    errno = 0;
    curve.seed = std::strtoull(seed.c_str(), nullptr, 10);
    if (errno == ERANGE) bad_line(line_no, "seed out of range");
  }

  next("config line");
  if (!starts_with(line, "# config:")) bad_line(line_no, "expected '# config: '");
  curve.config_echo = line.size() > 10 ? line.substr(10) : "";

  next("checksum line");
  if (!starts_with(line, "# checksum: fnv1a64:")) bad_line(line_no, "expected '# checksum: fnv1a64:'");
  const std::string want = line.substr(20);

  next("columns line");
  bool with_counts = false;
  if (line == "# columns: delay_ps expected_rate counts") {
    with_counts = true;
  } else if (line != "# columns: delay_ps expected_rate") {
    bad_line(line_no, "unsupported columns");
  }

  std::string rows;
  std::vector<std::int64_t> counts;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) bad_line(line_no, "blank line in data block");
    const auto tok = split_ws(line);
    if (tok.size() != (with_counts ? 3u : 2u)) bad_line(line_no, "wrong number of columns");
    curve.delays_ps.push_back(parse_double(tok[0], line_no));
    curve.expected.push_back(parse_double(tok[1], line_no));
    if (with_counts) counts.push_back(parse_int(tok[2], line_no));
    rows += line + "\n";
  }
  char sum[20];
  std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a64(rows));
  if (want != sum) throw SchemaError("checksum mismatch: header says " + want + ", data rows give " + sum);
  if (with_counts) curve.counts = std::move(counts);
  try {
    curve.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return curve;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

void write_curve(const HomCurve& curve, const std::string& path) { write_text_file(path, format_curve(curve)); }

HomCurve read_curve(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_curve(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

}  // namespace homdisp

#include "specfx/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace specfx {

namespace {

double parse_field(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(line, "line " + std::to_string(line) + ": '" + field + "' is not a number");
  return value;
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 40> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw IoError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_spectra_csv(const std::string& path, const SpectrumSet& set) {
  std::string out = "wavenumber";
  for (const auto& label : set.labels()) {
    if (label.find_first_of(",\n\r") != std::string::npos)
      throw InvalidParams("label '" + label + "' contains a CSV delimiter");
    out += ',';
    out += label;
  }
  out += '\n';
  for (Eigen::Index j = 0; j < set.p(); ++j) {
    out += format_double(set.grid().point(j));
    for (Eigen::Index i = 0; i < set.n(); ++i) {
      out += ',';
      out += format_double(set.values()(i, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

SpectrumSet read_spectra_csv(const std::string& path,
                             const std::vector<std::string>& exclude_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "wavenumber")
    throw ParseError(1, "line 1: header must start with 'wavenumber'");
  if (header.size() < 2) throw ParseError(1, "line 1: no signal columns");
  const std::size_t columns = header.size() - 1;

  std::vector<double> wavenumbers;
  std::vector<std::vector<double>> data(columns);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    wavenumbers.push_back(parse_field(fields[0], line_no));
    for (std::size_t k = 0; k < columns; ++k)
      data[k].push_back(parse_field(fields[k + 1], line_no));
  }

  const Eigen::Index p = Eigen::Index(wavenumbers.size());
  if (p < 3) throw ParseError(line_no, "need at least 3 grid rows, got " + std::to_string(p));
  const double spacing = (wavenumbers.back() - wavenumbers.front()) / double(p - 1);
  if (!(spacing > 0.0)) throw ParseError(2, "wavenumbers must be strictly increasing");
  for (Eigen::Index j = 0; j + 1 < p; ++j) {
    const double gap = wavenumbers[std::size_t(j + 1)] - wavenumbers[std::size_t(j)];
    if (!(gap > 0.0))
      throw ParseError(std::size_t(j) + 3, "line " + std::to_string(j + 3) +
                                               ": wavenumbers must be strictly increasing");
    if (std::abs(gap - spacing) > 1e-6 * std::abs(spacing))
      throw ParseError(std::size_t(j) + 3,
                       "line " + std::to_string(j + 3) + ": wavenumbers are not equidistant");
  }

  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < columns; ++k) {
    bool excluded = false;
    for (const auto& ex : exclude_labels) excluded = excluded || header[k + 1] == ex;
    if (!excluded) keep.push_back(k);
  }
  if (keep.empty()) throw InvalidParams("all signal columns were excluded");

  WavenumberGrid grid(wavenumbers.front(), wavenumbers.back(), p);
  Eigen::MatrixXd values(Eigen::Index(keep.size()), p);
  std::vector<std::string> labels;
  labels.reserve(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    labels.push_back(header[keep[r] + 1]);
    for (Eigen::Index j = 0; j < p; ++j) values(Eigen::Index(r), j) = data[keep[r]][std::size_t(j)];
  }
  return SpectrumSet(grid, std::move(values), std::move(labels));
}

std::string fnv1a64_file(const std::string& path) {
  const std::string bytes = read_text(path);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

}  // namespace specfx

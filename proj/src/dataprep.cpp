#include "plsreg/dataprep.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plsreg/errors.hpp"

namespace plsreg {

namespace {

void check_dataset(const RawDataset& raw) {
  if (raw.X.rows() < 2) throw InvalidDataset("need at least two observations");
  if (raw.X.cols() < 1) throw InvalidDataset("need at least one predictor");
  if (raw.y.size() != raw.X.rows())
    throw DimensionMismatch("predictor rows and response length differ");
  if (!raw.X.allFinite() || !raw.y.allFinite()) throw NonFiniteInput();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  std::size_t last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) throw NonNumericCell(row, col);
  return value;
}

// Round-trippable decimal rendering of a double.
std::string format_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

StandardizedData standardize(const RawDataset& raw) {
  check_dataset(raw);
  const Index n = raw.n();
  const Index p = raw.p();

  StandardizedData out;
  out.x_bar = raw.X.colwise().mean();
  out.y_bar = raw.y.mean();
  out.X = raw.X.rowwise() - out.x_bar.transpose();
  out.y = raw.y.array() - out.y_bar;

  out.s_x.resize(p);
  for (Index j = 0; j < p; ++j) {
    const double variance = out.X.col(j).squaredNorm() / static_cast<double>(n - 1);
    if (variance <= 0.0) throw ZeroVarianceColumn(j);
    out.s_x(j) = std::sqrt(variance);
    out.X.col(j) /= out.s_x(j);
  }
  return out;
}

MomentSummary moments(const StandardizedData& data) {
  MomentSummary out;
  const double scale = 1.0 / static_cast<double>(data.n() - 1);
  out.S = scale * (data.X.transpose() * data.X);
  out.s = scale * (data.X.transpose() * data.y);
  out.K = data.X * data.X.transpose();
  return out;
}

double mean_abs_correlation(const Matrix& S) {
  const Index p = S.rows();
  if (p < 2) throw DimensionTooSmall("mean absolute correlation needs at least two columns");
  double total = 0.0;
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) total += std::abs(S(i, j));
  return total / (0.5 * static_cast<double>(p) * static_cast<double>(p - 1));
}

RawDataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream file(path);
  if (!file) throw InputError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(file, line)) throw ParseError(1, "missing header row");
  std::vector<std::string> header = split_line(line);
  for (auto& name : header) name = trim(name);

  std::ptrdiff_t target = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == target_column) target = static_cast<std::ptrdiff_t>(j);
  if (target < 0) throw MissingTarget(target_column);

  std::vector<std::vector<double>> rows;
  std::size_t line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw ParseError(line_number, "expected " + std::to_string(header.size()) + " cells, got " +
                                        std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      row[j] = parse_cell(cells[j], rows.size() + 1, j + 1);
    rows.push_back(std::move(row));
  }

  RawDataset data;
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(header.size()) - 1;
  if (p < 1) throw InvalidDataset("need at least one predictor column");
  data.X.resize(n, p);
  data.y.resize(n);
  data.names.reserve(p);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<std::ptrdiff_t>(j) != target) data.names.push_back(header[j]);
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == target)
        data.y(i) = rows[i][j];
      else
        data.X(i, col++) = rows[i][j];
    }
  }
  check_dataset(data);
  return data;
}

void save_csv(const RawDataset& data, const std::string& path, const std::string& target_column) {
  std::ofstream file(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  for (Index j = 0; j < data.p(); ++j) {
    if (j > 0) file << ',';
    file << (static_cast<std::size_t>(j) < data.names.size() ? data.names[j]
                                                             : "x" + std::to_string(j + 1));
  }
  file << ',' << target_column << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) {
      if (j > 0) file << ',';
      file << format_value(data.X(i, j));
    }
    file << ',' << format_value(data.y(i)) << '\n';
  }
}

AffineCoefficients to_original_scale(const StandardizedData& data, const Vector& beta_std) {
  if (beta_std.size() != data.p())
    throw DimensionMismatch("coefficient length does not match predictor count");
  AffineCoefficients out;
  out.beta = beta_std.array() / data.s_x.array();
  out.intercept = data.y_bar - data.x_bar.dot(out.beta);
  return out;
}

}  // namespace plsreg

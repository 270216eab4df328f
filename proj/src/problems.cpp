#include "sketchls/problems.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sketchls {

Problem gen_rosenbrock(int d) {
  if (d < 2) {
    throw std::invalid_argument("gen_rosenbrock: dimension must be at least 2, "
                                "got " + std::to_string(d));
  }
  Problem p;
  p.name = "rosenbrock";
  p.dim = d;
  p.n_residuals = 2 * (d - 1);
  p.x0.resize(d);
  for (int i = 0; i < d; ++i) p.x0[i] = i % 2 == 0 ? -1.2 : 1.0;
  p.f_min = 0.0;
  p.residual = [d](const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd r(2 * (d - 1));
    for (int i = 0; i + 1 < d; ++i) {
      r[2 * i] = 10.0 * (x[i + 1] - x[i] * x[i]);
      r[2 * i + 1] = x[i] - 1.0;
    }
    return r;
  };
  return p;
}

namespace {

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' ||
                          *(end - 1) == '\r')) --end;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw std::invalid_argument(
        "dataset: row " + std::to_string(row) + ", column " +
        std::to_string(col) + ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Problem dataset_problem(const std::filesystem::path& path, LinkKind link,
                        bool intercept) {
  std::ifstream file(path);
  if (!file) {
    throw std::invalid_argument("dataset: cannot open '" + path.string() + "'");
  }

  std::string line;
  if (!std::getline(file, line)) {
    throw std::invalid_argument("dataset: '" + path.string() +
                                "' is empty (a header row is required)");
  }
  const std::size_t n_cols = split_csv_line(line).size();
  if (n_cols < 2) {
    throw std::invalid_argument(
        "dataset: header declares " + std::to_string(n_cols) +
        " column(s); need at least one feature column and a label column");
  }
  const std::size_t p = n_cols - 1;

  std::vector<std::vector<double>> rows;
  std::size_t row_index = 1;  // the header is row 0
  while (std::getline(file, line)) {
    if (line.empty() || line == "\r") {
      ++row_index;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != n_cols) {
      throw std::invalid_argument(
          "dataset: row " + std::to_string(row_index) + ": expected " +
          std::to_string(n_cols) + " columns, got " +
          std::to_string(cells.size()));
    }
    std::vector<double> values(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
      values[c] = parse_cell(cells[c], row_index, c);
    }
    rows.push_back(std::move(values));
    ++row_index;
  }
  if (rows.empty()) {
    throw std::invalid_argument("dataset: '" + path.string() +
                                "' has a header but no data rows");
  }

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(p) + (intercept ? 1 : 0);
  if (n < d) {
    throw std::invalid_argument(
        "dataset: " + std::to_string(n) + " rows is fewer than the " +
        std::to_string(d) + " model parameters");
  }

  auto features = std::make_shared<Eigen::MatrixXd>(n, p);
  auto labels = std::make_shared<Eigen::VectorXd>(n);
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) (*features)(i, c) = rows[i][c];
    (*labels)[i] = rows[i][p];
  }

  Problem problem;
  problem.name = "dataset:" + path.filename().string();
  problem.dim = d;
  problem.n_residuals = n;
  problem.x0 = Eigen::VectorXd::Zero(d);
  problem.residual = [features, labels, link, intercept,
                      p](const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd z = *features * x.head(p);
    if (intercept) z.array() += x[p];
    if (link == LinkKind::logistic) {
      z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
    }
    return Eigen::VectorXd(z - *labels);
  };
  return problem;
}

Problem random_nlls(int d, int n, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("random_nlls: dimension must be positive");
  }
  if (n < d) {
    throw std::invalid_argument(
        "random_nlls: need n >= d, got n = " + std::to_string(n) +
        ", d = " + std::to_string(d));
  }
  constexpr double kSinAmplitude = 0.1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto linear = std::make_shared<Eigen::MatrixXd>(n, d);
  auto sine = std::make_shared<Eigen::MatrixXd>(n, d);
  auto offsets = std::make_shared<Eigen::VectorXd>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) (*linear)(i, j) = gauss(rng);
    for (int j = 0; j < d; ++j) (*sine)(i, j) = gauss(rng);
    (*offsets)[i] = gauss(rng);
  }

  Problem problem;
  problem.name = "random_nlls";
  problem.dim = d;
  problem.n_residuals = n;
  problem.x0 = Eigen::VectorXd::Zero(d);
  problem.residual = [linear, sine, offsets,
                      kSinAmplitude](const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd r = *linear * x;
    r.array() += kSinAmplitude * (*sine * x).array().sin();
    r -= *offsets;
    return r;
  };
  return problem;
}

}  // namespace sketchls

#include "casp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casp/common.hpp"

namespace casp {

AccuracyMatrix::AccuracyMatrix(std::size_t tasks)
    : tasks_(tasks), values_(tasks * tasks, 0.0), filled_(tasks * tasks, false) {
  if (tasks == 0) throw InputError("accuracy matrix needs at least one task");
}

std::size_t AccuracyMatrix::index(std::size_t i, std::size_t j) const {
  if (i >= tasks_ || j > i) {
    throw InputError("accuracy cell (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") is outside the lower triangle");
  }
  return i * tasks_ + j;
}

void AccuracyMatrix::set(std::size_t i, std::size_t j, double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InputError("accuracy outside [0, 1]");
  const auto k = index(i, j);
  values_[k] = accuracy;
  filled_[k] = true;
}

double AccuracyMatrix::at(std::size_t i, std::size_t j) const {
  const auto k = index(i, j);
  if (!filled_[k]) {
    throw InputError("accuracy cell (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") was never recorded");
  }
  return values_[k];
}

bool AccuracyMatrix::has(std::size_t i, std::size_t j) const { return filled_[index(i, j)]; }

bool AccuracyMatrix::row_complete(std::size_t i) const {
  for (std::size_t j = 0; j <= i; ++j) {
    if (!has(i, j)) return false;
  }
  return true;
}

double average_end_accuracy(const AccuracyMatrix& m) {
  const std::size_t last = m.tasks() - 1;
  if (!m.row_complete(last)) throw InputError("final accuracy row is incomplete");
  double total = 0.0;
  for (std::size_t j = 0; j <= last; ++j) total += m.at(last, j);
  return total / static_cast<double>(m.tasks());
}

double average_end_forgetting(const AccuracyMatrix& m) {
  const std::size_t t = m.tasks();
  if (t < 2) throw InputError("forgetting needs at least two tasks");
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < t; ++j) {
    double best = m.at(j, j);
    for (std::size_t i = j + 1; i + 1 < t; ++i) best = std::max(best, m.at(i, j));
    total += best - m.at(t - 1, j);
  }
  return total / static_cast<double>(t - 1);
}

std::map<ClassId, double> per_class_forgetting(
    const std::map<ClassId, std::vector<double>>& history) {
  if (history.empty()) throw InputError("empty accuracy history");
  std::map<ClassId, double> out;
  for (const auto& [cls, h] : history) {
    if (h.empty()) throw InputError("class " + std::to_string(cls) + " has no history");
    out[cls] = *std::max_element(h.begin(), h.end()) - h.back();
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson inputs differ in length");
  if (x.size() < 2) throw InputError("pearson needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InputError("pearson undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace casp

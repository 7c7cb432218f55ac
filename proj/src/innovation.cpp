// Copyright 2026 The lsgauss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <string>

#include "lsgauss/error.hpp"
#include "lsgauss/procgen.hpp"

namespace lsg {

namespace {

constexpr double kStandardizationTolerance = 1e-6;

// E||Z||^q for Z ~ N(0, I_d).
double gaussian_norm_moment(std::size_t d, double q) {
  const double half_d = 0.5 * static_cast<double>(d);
  return std::exp(0.5 * q * std::log(2.0) + std::lgamma(half_d + 0.5 * q) - std::lgamma(half_d));
}

void check_q(double q) {
  require(std::isfinite(q) && q >= 1.0, ErrorCode::BadArgs, "moment order q must be >= 1");
}

}  // namespace

InnovationLaw InnovationLaw::standard_gaussian(std::size_t dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::BadSpec, "gaussian innovation dimension");
  return InnovationLaw(Kind::StandardGaussian, dim);
}

InnovationLaw InnovationLaw::centered_exp_one() { return InnovationLaw(Kind::CenteredExpOne, 1); }

InnovationLaw InnovationLaw::custom_iid(std::vector<double> table) {
  require(table.size() >= 2, ErrorCode::BadSpec, "quantile table needs at least two entries");
  for (std::size_t k = 0; k < table.size(); ++k) {
    require(std::isfinite(table[k]), ErrorCode::BadSpec, "quantile table entry not finite");
    require(k == 0 || table[k] >= table[k - 1], ErrorCode::BadSpec, "quantile table must be nondecreasing");
  }
  // Moments of the piecewise-linear quantile function, exact per segment.
  const double segments = static_cast<double>(table.size() - 1);
  double mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k + 1 < table.size(); ++k) {
    const double a = table[k], b = table[k + 1];
    mean += 0.5 * (a + b) / segments;
    second += (a * a + a * b + b * b) / 3.0 / segments;
  }
  require(std::abs(mean) <= kStandardizationTolerance, ErrorCode::BadSpec,
          "custom innovation law must have mean zero (got " + std::to_string(mean) + ")");
  require(std::abs(second - 1.0) <= kStandardizationTolerance, ErrorCode::BadSpec,
          "custom innovation law must have unit variance (got " + std::to_string(second) + ")");
  InnovationLaw law(Kind::CustomIid, 1);
  law.table_ = std::move(table);
  return law;
}

std::string InnovationLaw::name() const {
  switch (kind_) {
    case Kind::StandardGaussian: return "gaussian";
    case Kind::CenteredExpOne: return "centered_exp";
    case Kind::CustomIid: return "custom";
  }
  return "unknown";
}

double InnovationLaw::transform(double u) const noexcept {
  switch (kind_) {
    case Kind::StandardGaussian:
      return inverse_normal_cdf(u);
    case Kind::CenteredExpOne:
      return -std::log1p(-u) - 1.0;
    case Kind::CustomIid: {
      const double pos = u * static_cast<double>(table_.size() - 1);
      const std::size_t k = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
      const double w = pos - static_cast<double>(k);
      return (1.0 - w) * table_[k] + w * table_[k + 1];
    }
  }
  return 0.0;
}

double InnovationLaw::difference_norm(double q) const {
  check_q(q);
  switch (kind_) {
    case Kind::StandardGaussian:
      // eta - eta' ~ N(0, 2 I).
      return std::sqrt(2.0) * std::pow(gaussian_norm_moment(dim_, q), 1.0 / q);
    case Kind::CenteredExpOne:
      // Difference of two Exp(1) variables is standard Laplace: E|L|^q = Gamma(q + 1).
      return std::exp(std::lgamma(q + 1.0) / q);
    case Kind::CustomIid: {
      constexpr int kGrid = 2000;
      double acc = 0.0;
      for (int i = 0; i < kGrid; ++i) {
        const double a = transform((i + 0.5) / kGrid);
        for (int j = i + 1; j < kGrid; ++j) {
          acc += 2.0 * std::pow(std::abs(a - transform((j + 0.5) / kGrid)), q);
        }
      }
      return std::pow(acc / (static_cast<double>(kGrid) * kGrid), 1.0 / q);
    }
  }
  return 0.0;
}

double InnovationLaw::norm(double q) const {
  check_q(q);
  switch (kind_) {
    case Kind::StandardGaussian:
      return std::pow(gaussian_norm_moment(dim_, q), 1.0 / q);
    case Kind::CenteredExpOne: {
      // E|Z - 1|^q = int_0^1 (1 - z)^q e^{-z} dz + e^{-1} Gamma(q + 1).
      constexpr int kSteps = 4000;  // composite Simpson, even
      const double h = 1.0 / kSteps;
      double s = 0.0;
      for (int k = 0; k <= kSteps; ++k) {
        const double z = k * h;
        const double w = (k == 0 || k == kSteps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        s += w * std::pow(1.0 - z, q) * std::exp(-z);
      }
      s *= h / 3.0;
      return std::pow(s + std::exp(std::lgamma(q + 1.0) - 1.0), 1.0 / q);
    }
    case Kind::CustomIid: {
      constexpr int kGrid = 200000;
      double acc = 0.0;
      for (int i = 0; i < kGrid; ++i) acc += std::pow(std::abs(transform((i + 0.5) / kGrid)), q);
      return std::pow(acc / kGrid, 1.0 / q);
    }
  }
  return 0.0;
}

}  // namespace lsg

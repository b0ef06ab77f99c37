//
// Copyright 2026 The OraclePriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ORACLEPRIV_STATS_H_
#define ORACLEPRIV_STATS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

namespace oraclepriv {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Clopper-Pearson interval for a binomial proportion at the given two-sided
// confidence level (default 99%).
inline Interval ClopperPearson(long successes, long trials,
                               double confidence = 0.99) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("invalid binomial counts");
  }
  double tail = (1.0 - confidence) / 2.0;
  Interval ci;
  if (successes == 0) {
    ci.low = 0.0;
  } else {
    boost::math::beta_distribution<double> lo(
        static_cast<double>(successes), static_cast<double>(trials - successes + 1));
    ci.low = boost::math::quantile(lo, tail);
  }
  if (successes == trials) {
    ci.high = 1.0;
  } else {
    boost::math::beta_distribution<double> hi(
        static_cast<double>(successes + 1), static_cast<double>(trials - successes));
    ci.high = boost::math::quantile(hi, 1.0 - tail);
  }
  return ci;
}

inline double NormalQuantile(double p) {
  boost::math::normal_distribution<double> n;
  return boost::math::quantile(n, p);
}

struct MeanStats {
  double mean = 0.0;
  double sd = 0.0;
  long count = 0;
};

inline MeanStats Summarize(const std::vector<double>& xs) {
  MeanStats s;
  s.count = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return s;
}

// Normal-approximation interval for a mean.
inline Interval MeanCi(const std::vector<double>& xs, double confidence = 0.99) {
  MeanStats s = Summarize(xs);
  if (s.count == 0) return Interval{0.0, 0.0};
  double z = NormalQuantile(1.0 - (1.0 - confidence) / 2.0);
  double half = z * s.sd / std::sqrt(static_cast<double>(s.count));
  return Interval{s.mean - half, s.mean + half};
}

inline double Median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<long>(mid), xs.end());
  double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  std::nth_element(xs.begin(), xs.begin() + static_cast<long>(mid) - 1, xs.end());
  return 0.5 * (xs[mid - 1] + hi);
}

inline double Quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = lo + 1 < xs.size() ? lo + 1 : lo;
  double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_STATS_H_

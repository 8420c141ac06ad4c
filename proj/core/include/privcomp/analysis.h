// Copyright 2026 The privcomp Authors
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
#ifndef PRIVCOMP_ANALYSIS_H_
#define PRIVCOMP_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "privcomp/client.h"

namespace privcomp {

using Rational = boost::rational<std::int64_t>;

// "a/b", or "a" when the denominator is 1.
std::string FormatRational(const Rational& r);

// (1 + 1/N + ... + 1/N^(K-1))^-1. Throws kInvalidArgument for N or K == 0.
Rational PcCapacity(std::uint64_t servers, std::uint64_t datasets);
// Rate when all M messages are treated as independent.
Rational Pir1Rate(std::uint64_t servers, std::uint64_t messages);
// 1 - 1/N.
Rational AsymptoticCapacity(std::uint64_t servers);

// Per-symbol entropies in bits. joint is H(w_1, w_2) and is only read by the
// two-message formula.
struct EntropyProfile {
  std::vector<double> marginals;
  double joint = 0.0;
};

inline constexpr double kEntropyTolerance = 1e-12;

// N H(w_2) / (H(w_1, w_2) + (N - 1) H(w_1)) with the larger marginal as
// w_1. Throws kInvalidProfile unless there are exactly two non-negative
// marginals and max marginal <= joint <= sum of marginals.
double TwoMessageCapacity(const EntropyProfile& profile, std::uint64_t servers);
// (H_min / H_max) (1 - 1/N). Throws kInvalidProfile unless every marginal is
// positive.
double GeneralAchievableRate(const EntropyProfile& profile, std::uint64_t servers);

struct RateReport {
  std::uint64_t servers = 0;
  std::uint64_t datasets = 0;
  std::uint64_t messages = 0;
  std::uint64_t modulus = 0;
  std::uint64_t length = 0;  // desired symbols retrieved
  std::uint64_t download_total = 0;
  bool uncompressed = false;
  Rational rate;
  Rational capacity;
  Rational pir1_rate;
  bool match = false;  // rate == capacity
};

RateReport MakeRateReport(std::uint64_t servers, std::uint64_t datasets,
                          std::uint64_t messages, std::uint64_t modulus,
                          std::uint64_t length, std::uint64_t download_total,
                          bool uncompressed);
RateReport MakeRateReport(const Transcript& transcript);

std::string RenderText(const RateReport& report);
std::string RenderJson(const RateReport& report);
// One aligned row per report under a column header.
std::string RenderTable(const std::vector<RateReport>& reports);

}  // namespace privcomp

#endif  // PRIVCOMP_ANALYSIS_H_

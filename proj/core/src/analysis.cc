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

#include "privcomp/analysis.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "privcomp/error.h"

namespace privcomp {

std::string FormatRational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational PcCapacity(std::uint64_t servers, std::uint64_t datasets) {
  if (servers == 0 || datasets == 0) {
    throw Error(ErrorCode::kInvalidArgument, "capacity needs N >= 1 and K >= 1");
  }
  Rational sum = 0;
  Rational term = 1;
  const Rational step(1, static_cast<std::int64_t>(servers));
  for (std::uint64_t k = 0; k < datasets; ++k) {
    sum += term;
    term *= step;
  }
  return 1 / sum;
}

Rational Pir1Rate(std::uint64_t servers, std::uint64_t messages) {
  return PcCapacity(servers, messages);
}

Rational AsymptoticCapacity(std::uint64_t servers) {
  if (servers == 0) throw Error(ErrorCode::kInvalidArgument, "need N >= 1");
  return 1 - Rational(1, static_cast<std::int64_t>(servers));
}

double TwoMessageCapacity(const EntropyProfile& profile, std::uint64_t servers) {
  if (servers == 0) throw Error(ErrorCode::kInvalidArgument, "need N >= 1");
  if (profile.marginals.size() != 2) {
    throw Error(ErrorCode::kInvalidProfile, "two marginal entropies required");
  }
  double h1 = profile.marginals[0];
  double h2 = profile.marginals[1];
  if (h1 < 0 || h2 < 0) throw Error(ErrorCode::kInvalidProfile, "negative entropy");
  if (h1 < h2) std::swap(h1, h2);
  const double joint = profile.joint;
  if (joint + kEntropyTolerance < h1 || joint > h1 + h2 + kEntropyTolerance) {
    throw Error(ErrorCode::kInvalidProfile,
                "joint entropy must lie between the larger marginal and their sum");
  }
  const double n = static_cast<double>(servers);
  const double denominator = joint + (n - 1) * h1;
  if (denominator <= kEntropyTolerance) {
    throw Error(ErrorCode::kInvalidProfile, "all entropies are zero");
  }
  return n * h2 / denominator;
}

double GeneralAchievableRate(const EntropyProfile& profile, std::uint64_t servers) {
  if (servers == 0) throw Error(ErrorCode::kInvalidArgument, "need N >= 1");
  if (profile.marginals.empty()) {
    throw Error(ErrorCode::kInvalidProfile, "no marginal entropies");
  }
  for (double h : profile.marginals) {
    if (!(h > 0)) throw Error(ErrorCode::kInvalidProfile, "entropies must be positive");
  }
  const auto [lo, hi] = std::minmax_element(profile.marginals.begin(), profile.marginals.end());
  return (*lo / *hi) * (1.0 - 1.0 / static_cast<double>(servers));
}

RateReport MakeRateReport(std::uint64_t servers, std::uint64_t datasets,
                          std::uint64_t messages, std::uint64_t modulus,
                          std::uint64_t length, std::uint64_t download_total,
                          bool uncompressed) {
  if (download_total == 0) {
    throw Error(ErrorCode::kInvalidArgument, "report needs a nonzero download");
  }
  RateReport r;
  r.servers = servers;
  r.datasets = datasets;
  r.messages = messages;
  r.modulus = modulus;
  r.length = length;
  r.download_total = download_total;
  r.uncompressed = uncompressed;
  r.rate = Rational(static_cast<std::int64_t>(length), static_cast<std::int64_t>(download_total));
  r.capacity = PcCapacity(servers, datasets);
  r.pir1_rate = Pir1Rate(servers, messages);
  r.match = r.rate == r.capacity;
  return r;
}

RateReport MakeRateReport(const Transcript& t) {
  return MakeRateReport(t.servers, t.datasets, t.messages, t.modulus,
                        t.round_length * t.rounds, t.download_total, t.uncompressed);
}

std::string RenderText(const RateReport& r) {
  std::ostringstream out;
  out << "parameters  N=" << r.servers << " K=" << r.datasets << " M=" << r.messages
      << " p=" << r.modulus << " L=" << r.length << "\n";
  out << "mode        " << (r.uncompressed ? "uncompressed" : "compressed") << "\n";
  out << "download    " << r.download_total << " symbols (fixed per run)\n";
  out << "rate        " << FormatRational(r.rate) << "\n";
  out << "capacity    " << FormatRational(r.capacity) << "\n";
  out << "pir1 rate   " << FormatRational(r.pir1_rate) << "\n";
  out << "match       " << (r.match ? "yes" : "no");
  if (!r.match) out << " (gap " << FormatRational(r.capacity - r.rate) << ")";
  out << "\n";
  return out.str();
}

std::string RenderJson(const RateReport& r) {
  nlohmann::ordered_json j;
  j["N"] = r.servers;
  j["K"] = r.datasets;
  j["M"] = r.messages;
  j["p"] = r.modulus;
  j["L"] = r.length;
  j["mode"] = r.uncompressed ? "uncompressed" : "compressed";
  j["download_total"] = r.download_total;
  j["download_is_fixed"] = true;
  j["rate"] = FormatRational(r.rate);
  j["capacity"] = FormatRational(r.capacity);
  j["pir1_rate"] = FormatRational(r.pir1_rate);
  j["match"] = r.match;
  if (!r.match) j["gap"] = FormatRational(r.capacity - r.rate);
  return j.dump(2);
}

std::string RenderTable(const std::vector<RateReport>& reports) {
  const std::vector<std::string> header = {"N", "K", "M", "p", "L", "D", "rate", "capacity",
                                           "match"};
  std::vector<std::vector<std::string>> rows;
  rows.push_back(header);
  for (const RateReport& r : reports) {
    rows.push_back({std::to_string(r.servers), std::to_string(r.datasets),
                    std::to_string(r.messages), std::to_string(r.modulus),
                    std::to_string(r.length), std::to_string(r.download_total),
                    FormatRational(r.rate), FormatRational(r.capacity), r.match ? "yes" : "no"});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      out << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace privcomp

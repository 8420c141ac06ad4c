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

#include "privcomp/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "privcomp/client.h"
#include "privcomp/error.h"
#include "privcomp/model.h"
#include "privcomp/redundancy.h"
#include "privcomp/server.h"
#include "privcomp/transport.h"

namespace privcomp {
namespace {

void CheckShape(std::uint16_t servers, std::uint16_t datasets, std::uint16_t messages) {
  if (servers == 0 || datasets == 0 || messages < datasets) {
    throw Error(ErrorCode::kInvalidArgument, "audit needs N >= 1 and M >= K >= 1");
  }
}

std::string ViewBytes(const std::vector<WireQuery>& queries) {
  std::vector<std::uint8_t> bytes;
  for (const WireQuery& q : queries) AppendQueryBytes(q, bytes);
  return std::string(bytes.begin(), bytes.end());
}

// Digest of the canonical view, then one digest per query of its messages
// and signs with positions dropped.
std::vector<std::uint64_t> ViewFeatures(const std::vector<WireQuery>& queries) {
  std::vector<std::uint64_t> out;
  out.reserve(queries.size() + 1);
  std::vector<std::uint8_t> bytes;
  for (const WireQuery& q : Canonicalize(queries).queries) AppendQueryBytes(q, bytes);
  out.push_back(Fingerprint(bytes));
  for (const WireQuery& q : queries) {
    std::uint64_t pattern = 0;
    for (const WireTerm& t : q.terms) pattern = pattern * 131 + t.message * 2 + (t.sign < 0);
    out.push_back(pattern);
  }
  return out;
}

struct DigestTest {
  std::size_t buckets = 0;
  double chi_square = 0.0;
  double z_score = 0.0;
  double total_variation = 0.0;
  double max_bucket_gap = 0.0;
};

// Upper-tail chi-square probability expressed as a one-sided normal z.
double ChiSquareZ(double chi_square, double df) {
  if (df <= 0) return 0.0;
  const double tail =
      boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), chi_square));
  if (tail <= std::numeric_limits<double>::min()) {
    return std::numeric_limits<double>::infinity();
  }
  if (tail >= 1.0) return -std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

// Two-sample chi-square over digest buckets. Buckets are exact digests when
// at most n/10 distinct values occur, otherwise digest mod 256.
DigestTest CompareDigests(const std::vector<std::uint64_t>& a,
                          const std::vector<std::uint64_t>& b) {
  const double n = static_cast<double>(a.size());
  std::unordered_set<std::uint64_t> distinct(a.begin(), a.end());
  distinct.insert(b.begin(), b.end());
  const bool exact = distinct.size() <= a.size() / 10;
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> buckets;
  for (std::uint64_t d : a) ++buckets[exact ? d : d % 256].first;
  for (std::uint64_t d : b) ++buckets[exact ? d : d % 256].second;
  DigestTest t;
  t.buckets = buckets.size();
  double abs_sum = 0.0;
  for (const auto& [key, count] : buckets) {
    const double x = static_cast<double>(count.first);
    const double y = static_cast<double>(count.second);
    t.chi_square += (x - y) * (x - y) / (x + y);
    abs_sum += std::abs(x - y);
    t.max_bucket_gap = std::max(t.max_bucket_gap, std::abs(x - y) / n);
  }
  t.total_variation = abs_sum / (2.0 * n);
  t.z_score = ChiSquareZ(t.chi_square, static_cast<double>(buckets.size()) - 1.0);
  return t;
}

std::string Params(std::uint16_t n, std::uint16_t k, std::uint16_t m, std::uint64_t p) {
  std::ostringstream out;
  out << "N=" << n << " K=" << k << " M=" << m << " p=" << p;
  return out.str();
}

}  // namespace

CanonicalView Canonicalize(std::span<const WireQuery> queries) {
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::int8_t>> seen;
  CanonicalView view;
  view.queries.reserve(queries.size());
  for (const WireQuery& q : queries) {
    WireQuery c;
    c.terms.reserve(q.terms.size());
    for (const WireTerm& t : q.terms) {
      auto [it, fresh] = seen.try_emplace(
          t.position, std::pair<std::uint64_t, std::int8_t>{seen.size() + 1, t.sign});
      const auto& [label, first_sign] = it->second;
      c.terms.push_back({t.message, label, static_cast<std::int8_t>(t.sign * first_sign)});
    }
    view.queries.push_back(std::move(c));
  }
  return view;
}

std::string FormatWireQuery(const WireQuery& query, std::size_t messages) {
  std::string out;
  for (std::size_t i = 0; i < query.terms.size(); ++i) {
    const WireTerm& t = query.terms[i];
    if (i == 0) {
      if (t.sign < 0) out += "-";
    } else {
      out += t.sign < 0 ? " - " : " + ";
    }
    out += MessageLetter(t.message, messages) + "_" + std::to_string(t.position);
  }
  return out;
}

std::optional<std::string> FirstDifference(const CanonicalView& expected,
                                           const CanonicalView& actual,
                                           std::size_t messages) {
  const std::size_t common = std::min(expected.queries.size(), actual.queries.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (expected.queries[i] != actual.queries[i]) {
      return "query " + std::to_string(i + 1) + ": expected '" +
             FormatWireQuery(expected.queries[i], messages) + "', got '" +
             FormatWireQuery(actual.queries[i], messages) + "'";
    }
  }
  if (expected.queries.size() != actual.queries.size()) {
    return "query count " + std::to_string(actual.queries.size()) + " != " +
           std::to_string(expected.queries.size());
  }
  return std::nullopt;
}

bool AuditReport::passed() const {
  if (inconclusive) return false;
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

void AuditReport::Add(std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

std::string AuditReport::Render() const {
  std::ostringstream out;
  out << "audit " << title << "\n";
  std::size_t failed = 0;
  for (const AuditCheck& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
    failed += c.pass ? 0 : 1;
  }
  out << "result " << (inconclusive ? "INCONCLUSIVE" : failed == 0 ? "PASS" : "FAIL") << " ("
      << checks.size() - failed << "/" << checks.size() << " checks passed)\n";
  return out.str();
}

AuditReport StructuralAudit(const PrimeField& field, std::uint16_t servers,
                            std::uint16_t datasets, std::uint16_t messages) {
  CheckShape(servers, datasets, messages);
  AuditReport report;
  report.title = "structural " + Params(servers, datasets, messages, field.modulus());
  std::vector<CanonicalView> reference;
  for (std::uint16_t theta = 1; theta <= messages; ++theta) {
    const QueryPlan plan = MakePlan(field, theta, servers, messages, 0, true);
    for (std::uint16_t n = 1; n <= servers; ++n) {
      CanonicalView view = Canonicalize(ServerWire(plan, n));
      if (theta == 1) {
        reference.push_back(std::move(view));
        continue;
      }
      const auto diff = FirstDifference(reference[n - 1], view, messages);
      report.Add("theta=" + std::to_string(theta) + " server=" + std::to_string(n),
                 !diff.has_value(),
                 diff.value_or(std::to_string(view.queries.size()) + " queries match theta=1"));
    }
  }
  if (messages == 1) report.Add("single message", true, "nothing to compare");
  return report;
}

std::uint64_t EnumerationSize(const PrimeField& field, std::uint64_t length) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (std::uint64_t i = 2; i <= length; ++i) {
    if (total > kMax / i) return kMax;
    total *= i;
  }
  if (!field.is_binary()) {
    for (std::uint64_t i = 0; i < length; ++i) {
      if (total > kMax / 2) return kMax;
      total *= 2;
    }
  }
  return total;
}

AuditReport EnumerationAudit(const PrimeField& field, std::uint16_t servers,
                             std::uint16_t datasets, std::uint16_t messages,
                             std::uint64_t budget) {
  CheckShape(servers, datasets, messages);
  const std::uint64_t length = SymbolsPerRound(servers, messages);
  const std::uint64_t views = EnumerationSize(field, length);
  if (views > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                (views == std::numeric_limits<std::uint64_t>::max() ? std::string("over 2^64")
                                                                    : std::to_string(views)) +
                    " views per theta exceed the budget of " + std::to_string(budget));
  }
  AuditReport report;
  report.title = "enumeration " + Params(servers, datasets, messages, field.modulus());
  const std::uint64_t masks = field.is_binary() ? 1 : (std::uint64_t{1} << length);

  using Multiset = std::map<std::string, std::uint64_t>;
  std::vector<Multiset> reference;
  for (std::uint16_t theta = 1; theta <= messages; ++theta) {
    const auto tree = BuildSignedTree(field, theta, servers, messages);
    std::vector<Multiset> counts(servers);
    Randomizer r;
    r.permutation.resize(length);
    std::iota(r.permutation.begin(), r.permutation.end(), std::uint64_t{1});
    r.signs.assign(length, 1);
    std::uint64_t enumerated = 0;
    do {
      for (std::uint64_t mask = 0; mask < masks; ++mask) {
        for (std::uint64_t i = 0; i < length; ++i) r.signs[i] = (mask >> i) & 1 ? -1 : 1;
        const QueryPlan plan(tree, r);
        for (std::uint16_t n = 1; n <= servers; ++n) ++counts[n - 1][ViewBytes(ServerWire(plan, n))];
        ++enumerated;
      }
    } while (std::next_permutation(r.permutation.begin(), r.permutation.end()));
    if (theta == 1) {
      reference = std::move(counts);
      for (std::uint16_t n = 1; n <= servers; ++n) {
        report.Add("theta=1 server=" + std::to_string(n), true,
                   std::to_string(enumerated) + " views, " +
                       std::to_string(reference[n - 1].size()) + " distinct (reference)");
      }
      continue;
    }
    for (std::uint16_t n = 1; n <= servers; ++n) {
      report.Add("theta=" + std::to_string(theta) + " server=" + std::to_string(n),
                 counts[n - 1] == reference[n - 1],
                 std::to_string(enumerated) + " views, " +
                     std::to_string(counts[n - 1].size()) + " distinct");
    }
  }
  return report;
}

SampledAuditResult SampledAudit(const PrimeField& field, std::uint16_t servers,
                                std::uint16_t datasets, std::uint16_t messages,
                                const SampledAuditOptions& options) {
  CheckShape(servers, datasets, messages);
  constexpr std::uint64_t kMinSamples = 1000;
  SampledAuditResult result;
  AuditReport& report = result.report;
  report.title = "sampled " + Params(servers, datasets, messages, field.modulus()) +
                 " samples=" + std::to_string(options.samples) +
                 (options.wire.leak_theta_sign ? " mutant=leak-theta-sign" : "");
  if (options.samples < kMinSamples) {
    report.inconclusive = true;
    report.Add("sample size", true,
               std::to_string(options.samples) + " < " + std::to_string(kMinSamples) +
                   ", inconclusive");
    if (options.samples == 0) return result;
  }
  const std::uint64_t length = SymbolsPerRound(servers, messages);
  const std::uint64_t n = options.samples;

  // samples[theta-1][server-1][sample]: one digest per feature.
  std::vector<std::vector<std::vector<std::vector<std::uint64_t>>>> features(
      messages, std::vector<std::vector<std::vector<std::uint64_t>>>(servers));
  std::mt19937_64 seeds(options.seed);
  for (std::uint16_t theta = 1; theta <= messages; ++theta) {
    const auto tree = BuildSignedTree(field, theta, servers, messages);
    for (std::uint64_t s = 0; s < n; ++s) {
      const QueryPlan plan(tree, Randomizer::Random(length, seeds(), field));
      for (std::uint16_t k = 1; k <= servers; ++k) {
        features[theta - 1][k - 1].push_back(
            ViewFeatures(ServerWire(plan, k, options.wire)));
      }
    }
  }

  const double gap_bound = 3.0 / std::sqrt(static_cast<double>(n));
  for (std::uint16_t theta = 2; theta <= messages; ++theta) {
    for (std::uint16_t k = 1; k <= servers; ++k) {
      const auto& a = features[0][k - 1];
      const auto& b = features[theta - 1][k - 1];
      SampleComparison c;
      c.theta = theta;
      c.server = k;
      std::size_t worst_feature = 0;
      for (std::size_t f = 0; f < a.front().size(); ++f) {
        std::vector<std::uint64_t> xs(n), ys(n);
        for (std::uint64_t s = 0; s < n; ++s) {
          xs[s] = a[s][f];
          ys[s] = b[s][f];
        }
        const DigestTest t = CompareDigests(xs, ys);
        c.buckets += t.buckets;
        c.total_variation = std::max(c.total_variation, t.total_variation);
        c.max_bucket_gap = std::max(c.max_bucket_gap, t.max_bucket_gap);
        if (f == 0 || t.z_score > c.z_score) {
          c.z_score = t.z_score;
          c.chi_square = t.chi_square;
          worst_feature = f;
        }
      }
      c.rejected = c.z_score > kRejectSigma;
      result.comparisons.push_back(c);

      std::ostringstream detail;
      detail.precision(4);
      detail << "features=" << a.front().size() << " buckets=" << c.buckets << " worst="
             << (worst_feature == 0 ? std::string("view")
                                    : "query " + std::to_string(worst_feature))
             << " chi2=" << c.chi_square << " z=" << c.z_score << " tv=" << c.total_variation
             << " max_gap=" << c.max_bucket_gap << " bound=" << gap_bound;
      report.Add("theta=1 vs theta=" + std::to_string(theta) + " server=" + std::to_string(k),
                 !c.rejected && c.max_bucket_gap < gap_bound, detail.str());
    }
  }
  return result;
}

AuditReport AnswerObliviousnessAudit(const PrimeField& field, std::uint16_t servers,
                                     std::uint16_t datasets, std::uint16_t messages,
                                     std::uint64_t seed) {
  CheckShape(servers, datasets, messages);
  AuditReport report;
  report.title = "answers " + Params(servers, datasets, messages, field.modulus());
  const std::uint64_t length = SymbolsPerRound(servers, messages);
  const CombinationMatrix matrix(
      field, RandomCombinationMatrix(field, seed, messages, datasets, false));
  const DatasetStore store = GenerateDatasets(field, seed + 1, datasets, length);
  const DatasetStore swapped = GenerateDatasets(field, seed + 2, datasets, length);
  const CompressionSpec spec = CompressionSpec::Build(field, servers, matrix.normalized());
  const std::string spec_text = spec.Serialize();
  const ServerEngine engine(field, store, matrix, spec);
  const ServerEngine other(field, swapped, matrix, spec);
  std::vector<const ServerEngine*> engines(servers, &engine);
  InProcessTransport transport(engines);
  const MessageView view(field, store, matrix);

  bool data_changes_answers = false;
  for (std::uint16_t theta = 1; theta <= messages; ++theta) {
    const std::string tag = "theta=" + std::to_string(theta);
    const std::string rebuilt =
        CompressionSpec::Build(field, servers, matrix.normalized()).Serialize();
    report.Add(tag + " compression bytes", rebuilt == spec_text);

    RetrievalConfig config;
    config.theta = theta;
    config.seed = seed + theta;
    const Transcript t = Retrieve(field, matrix, spec, length, config, transport);

    bool schedule = true;
    bool deterministic = true;
    bool same_length = true;
    for (std::uint16_t n = 1; n <= servers; ++n) {
      const Frame& request = t.requests[0][n - 1];
      const Frame& response = t.responses[0][n - 1];
      schedule &= DecodeResponse(response).size() == spec.PerServerDownload();
      deterministic &= engine.HandleRequest(request) == response;
      const auto changed = other.HandleRequest(request);
      same_length &= changed.size() == response.size();
      data_changes_answers |= changed != response;
    }
    report.Add(tag + " answer schedule", schedule,
               std::to_string(spec.PerServerDownload()) + " symbols per server");
    report.Add(tag + " deterministic answers", deterministic);
    report.Add(tag + " data swap keeps lengths", same_length);
    report.Add(tag + " decode", t.decoded == view.Message(matrix.internal_index(theta)));
  }
  report.Add("data swap changes answers", data_changes_answers);
  return report;
}

std::vector<WireQuery> ApplyIndexSignMap(std::span<const WireQuery> queries,
                                         const IndexSignMap& map) {
  std::vector<WireQuery> out(queries.begin(), queries.end());
  for (WireQuery& q : out) {
    for (WireTerm& t : q.terms) {
      const std::uint64_t source = t.position;
      if (const auto it = map.index.find(source); it != map.index.end()) t.position = it->second;
      if (map.flips.contains(source)) t.sign = static_cast<std::int8_t>(-t.sign);
    }
  }
  return out;
}

namespace {

IndexSignMap FromTuples(const std::vector<std::uint64_t>& from,
                        const std::vector<std::uint64_t>& to,
                        std::set<std::uint64_t> flips) {
  IndexSignMap map;
  for (std::size_t i = 0; i < from.size(); ++i) map.index[from[i]] = to[i];
  map.flips = std::move(flips);
  return map;
}

}  // namespace

IndexSignMap ExampleWitness(std::uint16_t theta, std::uint16_t server) {
  if (server == 1) {
    switch (theta) {
      case 2:
        return FromTuples({3, 2, 7, 9, 10, 8, 15, 14}, {2, 3, 9, 7, 8, 10, 14, 15}, {6, 12, 13});
      case 3:
        return FromTuples({3, 4, 2, 7, 6, 9, 10, 11, 8, 14, 13, 15},
                          {2, 3, 4, 9, 7, 6, 8, 10, 11, 15, 14, 13}, {8, 12});
      case 4:
        return FromTuples({3, 4, 5, 2, 6, 7, 8, 9, 10, 11, 14, 13, 12, 15},
                          {2, 3, 4, 5, 8, 10, 11, 6, 7, 9, 15, 14, 13, 12}, {});
      default:
        break;
    }
  } else if (server == 2) {
    switch (theta) {
      case 2:
        return FromTuples({6, 1, 12, 4, 13, 5, 16, 11}, {1, 6, 4, 12, 5, 13, 11, 16}, {3, 9, 10});
      case 3:
        return FromTuples({7, 6, 1, 4, 3, 12, 14, 13, 5, 11, 10, 16},
                          {6, 1, 7, 12, 4, 3, 13, 5, 14, 16, 11, 10}, {5, 9});
      case 4:
        return FromTuples({6, 7, 8, 1, 3, 4, 5, 12, 13, 14, 11, 10, 9, 16},
                          {1, 6, 7, 8, 5, 13, 14, 3, 4, 12, 16, 11, 10, 9}, {});
      default:
        break;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "witness exists for theta 2..4 and servers 1..2");
}

std::set<std::uint64_t> SignFlipWitness(const QueryTree& tree, std::uint16_t server) {
  if (server == 0 || server > tree.servers) {
    throw Error(ErrorCode::kIndexOutOfRange, "server index out of range");
  }
  if (tree.theta == 1) return {};
  std::map<std::uint64_t, bool> decision;
  for (std::uint32_t id : tree.by_server[server - 1]) {
    for (const Query& q : tree.vertices[id].queries) {
      if (!q.desired) continue;
      const bool odd = q.sub_block % 2 == 1;
      for (std::size_t pos = 1; pos <= q.terms.size(); ++pos) {
        if (pos == q.delta) continue;
        const bool flip = odd ? pos > q.delta : pos < q.delta;
        const auto [it, fresh] = decision.try_emplace(q.terms[pos - 1].index, flip);
        if (!fresh && it->second != flip) {
          throw Error(ErrorCode::kInternal,
                      "index " + std::to_string(q.terms[pos - 1].index) +
                          " receives conflicting flips at server " + std::to_string(server));
        }
      }
    }
  }
  std::set<std::uint64_t> flips;
  for (const auto& [index, flip] : decision) {
    if (flip) flips.insert(index);
  }
  return flips;
}

bool AlternatesAfterFlips(const QueryTree& tree, std::uint16_t server,
                          const std::set<std::uint64_t>& flips) {
  for (std::uint32_t id : tree.by_server.at(server - 1)) {
    for (const Query& q : tree.vertices[id].queries) {
      for (std::size_t pos = 0; pos < q.terms.size(); ++pos) {
        int sign = q.terms[pos].sign;
        if (flips.contains(q.terms[pos].index)) sign = -sign;
        if (sign != (pos % 2 == 0 ? 1 : -1)) return false;
      }
    }
  }
  return true;
}

}  // namespace privcomp

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
#ifndef PRIVCOMP_PRIVACY_H_
#define PRIVCOMP_PRIVACY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "privcomp/gf.h"
#include "privcomp/planner.h"
#include "privcomp/wire.h"

namespace privcomp {

// A server's query sequence with positions renumbered 1, 2, ... by first
// appearance and every position's sign normalized so that its first
// occurrence is +.
struct CanonicalView {
  std::vector<WireQuery> queries;

  bool operator==(const CanonicalView&) const = default;
};

CanonicalView Canonicalize(std::span<const WireQuery> queries);

// Human-readable "+a_1 - b_2" rendering of one wire query.
std::string FormatWireQuery(const WireQuery& query, std::size_t messages);

// Description of the first differing query, or nullopt if equal.
std::optional<std::string> FirstDifference(const CanonicalView& expected,
                                           const CanonicalView& actual,
                                           std::size_t messages);

struct AuditCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AuditReport {
  std::string title;
  std::vector<AuditCheck> checks;
  bool inconclusive = false;

  bool passed() const;
  void Add(std::string name, bool pass, std::string detail = {});
  // "audit <title>" followed by one "PASS|FAIL <name>  <detail>" line per
  // check and a summary line.
  std::string Render() const;
};

// Canonical views of every server are identical for all desired messages.
// Uses the identity randomizer.
AuditReport StructuralAudit(const PrimeField& field, std::uint16_t servers,
                            std::uint16_t datasets, std::uint16_t messages);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100000;

// Number of (pi, sigma) choices per desired message: L! 2^L, or L! over F_2.
// Saturates at UINT64_MAX.
std::uint64_t EnumerationSize(const PrimeField& field, std::uint64_t length);

// Exact multiset of serialized server views over every (pi, sigma), compared
// across desired messages. Throws kBudgetExceeded above `budget`.
AuditReport EnumerationAudit(const PrimeField& field, std::uint16_t servers,
                             std::uint16_t datasets, std::uint16_t messages,
                             std::uint64_t budget = kDefaultEnumerationBudget);

struct SampledAuditOptions {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  WireOptions wire;  // set leak_theta_sign for the negative control
};

// Reject threshold, in normal standard deviations, for the chi-square tail.
inline constexpr double kRejectSigma = 5.0;

struct SampleComparison {
  std::uint16_t theta = 0;
  std::uint16_t server = 0;
  std::size_t buckets = 0;         // summed over features
  double chi_square = 0.0;         // of the worst feature
  double z_score = 0.0;            // normal quantile of the worst chi-square tail
  double total_variation = 0.0;    // largest over features
  double max_bucket_gap = 0.0;     // largest per-bucket frequency difference
  bool rejected = false;           // z_score > kRejectSigma
};

struct SampledAuditResult {
  AuditReport report;
  std::vector<SampleComparison> comparisons;  // theta != 1, every server
};

// Two-sample comparison between theta = 1 and each other theta of several
// view digests: the canonical view, and each query's message and sign
// pattern. Buckets are exact digests when at most samples/10 distinct digests
// occur, otherwise digest mod 256. samples == 0 yields an inconclusive report.
SampledAuditResult SampledAudit(const PrimeField& field, std::uint16_t servers,
                                std::uint16_t datasets, std::uint16_t messages,
                                const SampledAuditOptions& options);

// Answer lengths and compression bytes do not depend on theta, and answers
// are deterministic functions of query and data.
AuditReport AnswerObliviousnessAudit(const PrimeField& field, std::uint16_t servers,
                                     std::uint16_t datasets, std::uint16_t messages,
                                     std::uint64_t seed);

// Relabeling of symbol indices plus the set of indices whose private sign is
// negated. Flips refer to source indices.
struct IndexSignMap {
  std::map<std::uint64_t, std::uint64_t> index;  // unlisted indices map to themselves
  std::set<std::uint64_t> flips;
};

// Applies the map to every term: position i becomes index[i] and the sign is
// negated when i is in flips.
std::vector<WireQuery> ApplyIndexSignMap(std::span<const WireQuery> queries,
                                         const IndexSignMap& map);

// The explicit maps taking the theta-plan of N=2, M=4 to the theta=1 plan
// for theta in {2, 3, 4} and server in {1, 2}.
IndexSignMap ExampleWitness(std::uint16_t theta, std::uint16_t server);

// Sign flips that turn a server's theta-plan into one whose queries all
// alternate in sign, starting with +. Flips non-desired symbols right of the
// desired one in odd sub-blocks and left of it in even ones, over queries
// holding the desired message at a position > 0. Throws kInternal if one
// index receives conflicting decisions. Empty for theta = 1.
std::set<std::uint64_t> SignFlipWitness(const QueryTree& tree, std::uint16_t server);

// Every query of the server alternates +, -, +, ... after flipping `flips`.
bool AlternatesAfterFlips(const QueryTree& tree, std::uint16_t server,
                          const std::set<std::uint64_t>& flips);

}  // namespace privcomp

#endif  // PRIVCOMP_PRIVACY_H_

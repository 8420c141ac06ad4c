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
#ifndef PRIVCOMP_REDUNDANCY_H_
#define PRIVCOMP_REDUNDANCY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privcomp/gf.h"
#include "privcomp/planner.h"

namespace privcomp {

// The desired message plus K-1 messages completing it to a basis of the
// message space. Indices are internal and refer to the normalized matrix.
struct BasisSelection {
  std::uint16_t theta = 0;
  MessageSet others;  // ascending, size K-1
};

// Lexicographically smallest completion drawn from the first K messages.
// Throws kRankDeficient when the desired row is zero.
BasisSelection SelectBasis(const PrimeField& field, std::uint16_t theta,
                           const FieldMatrix& normalized);

// M x K coordinates of every message in the selected basis. Column 0 is the
// desired message; column b >= 1 is others[b-1].
FieldMatrix BasisCoordinates(const PrimeField& field, const BasisSelection& basis,
                             const FieldMatrix& normalized);

// Positions (into QueryVertex::queries) of the interference queries that touch
// the basis (group 1) and of those that avoid it (group 2).
struct GroupSplit {
  std::vector<std::uint32_t> group1;
  std::vector<std::uint32_t> group2;
};
GroupSplit SplitGroups(const QueryVertex& vertex, const BasisSelection& basis);

// For a redundant query over `target` messages: the combining coefficient of
// the group-1 query over `combo`, as a signed minor of the basis
// coordinates. Requires every basis index below every target index. Throws
// kInvalidTuple for a combo that is not drawn from others and target, or that
// equals target.
Element HCoefficient(const PrimeField& field, const MessageSet& combo,
                     const MessageSet& target, const BasisSelection& basis,
                     const FieldMatrix& coordinates);

// q[target] = sum_j interference[j] * q[j] + sum_x desired[x] * u_theta(x),
// where x ranges over desired-query positions of the same vertex and
// u_theta(x) is the desired symbol that query carries.
struct RedundancyRelation {
  std::uint32_t target = 0;
  std::vector<Element> interference;  // indexed by query position
  std::vector<Element> desired;       // indexed by query position

  bool operator==(const RedundancyRelation&) const = default;
};

// Elimination over basis coordinates. Throws kDimensionMismatch if the group
// sizes or ranks disagree with the expected counts.
std::vector<RedundancyRelation> RelationsOracle(const PrimeField& field,
                                                const QueryTree& tree,
                                                std::uint32_t vertex,
                                                const BasisSelection& basis,
                                                const FieldMatrix& coordinates);

// Determinant expansion of the same relations.
std::vector<RedundancyRelation> RelationsClosedForm(const PrimeField& field,
                                                    const QueryTree& tree,
                                                    std::uint32_t vertex,
                                                    const BasisSelection& basis,
                                                    const FieldMatrix& coordinates);

// Linear constraint on a vertex's raw query values: row . q = rhs, where rhs
// is rhs_weights . (parent interference values of the desired queries).
struct RelationRow {
  std::vector<Element> row;
  std::vector<Element> rhs_weights;  // indexed by desired-query position
};
RelationRow ToRelationRow(const PrimeField& field, const QueryVertex& vertex,
                          const RedundancyRelation& relation);

// Relation rows for the first vertex of each level (levels with no
// redundancy yield an empty matrix). Entry [m-1] covers level m.
std::vector<std::vector<RelationRow>> LevelRelationRows(const PrimeField& field,
                                                        const QueryTree& tree,
                                                        const BasisSelection& basis,
                                                        const FieldMatrix& coordinates);

struct LevelCompression {
  std::size_t level = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool identity = false;
  std::vector<Element> nodes;  // empty for identity levels
  FieldMatrix matrix;          // rows x cols
};

// Public per-level download compression shared by every server and every
// desired message.
class CompressionSpec {
 public:
  // Vandermonde rows over consecutive nodes, certified against every desired
  // message for the given normalized matrix. Throws kFieldTooSmall if no
  // node set within the search bound works.
  static CompressionSpec Build(const PrimeField& field, std::size_t servers,
                               const FieldMatrix& normalized);
  // Identity at every level: each query value is downloaded as is.
  static CompressionSpec Uncompressed(const PrimeField& field, std::size_t servers,
                                      std::size_t messages, std::size_t datasets);

  std::size_t servers() const { return servers_; }
  std::size_t messages() const { return messages_; }
  std::size_t datasets() const { return datasets_; }
  std::uint64_t modulus() const { return modulus_; }
  bool uncompressed() const { return uncompressed_; }
  const LevelCompression& level(std::size_t m) const { return levels_.at(m - 1); }
  const std::vector<LevelCompression>& levels() const { return levels_; }

  std::uint64_t PerServerDownload() const;
  std::uint64_t TotalDownload() const { return servers_ * PerServerDownload(); }

  // One header line, then one line per level:
  //   "level m rows r cols c nodes n1 n2 ..." or "level m rows r cols c identity".
  std::string Serialize() const;

 private:
  std::size_t servers_ = 0;
  std::size_t messages_ = 0;
  std::size_t datasets_ = 0;
  std::uint64_t modulus_ = 0;
  bool uncompressed_ = false;
  std::vector<LevelCompression> levels_;
};

// Node sets tried before giving up.
inline constexpr std::size_t kCompressionSearchBound = 64;

// N * sum_m (N-1)^(m-1) (C(M,m) - C(M-K,m)).
std::uint64_t DownloadCount(std::size_t servers, std::size_t messages,
                            std::size_t datasets);
// N/(N-1) (N^M - N^(M-K)) for N >= 2, K for N == 1.
std::uint64_t DownloadCountClosedForm(std::size_t servers, std::size_t messages,
                                      std::size_t datasets);

}  // namespace privcomp

#endif  // PRIVCOMP_REDUNDANCY_H_

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

#include "privcomp/redundancy.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "privcomp/error.h"

namespace privcomp {

BasisSelection SelectBasis(const PrimeField& field, std::uint16_t theta,
                           const FieldMatrix& normalized) {
  (void)field;
  const std::size_t m = normalized.rows();
  const std::size_t k = normalized.cols();
  if (theta == 0 || theta > m) {
    throw Error(ErrorCode::kIndexOutOfRange, "desired message out of range");
  }
  BasisSelection basis;
  basis.theta = theta;
  std::size_t excluded = 0;
  if (theta <= k) {
    excluded = theta;
  } else {
    for (std::size_t e = k; e >= 1; --e) {
      if (normalized(theta - 1, e - 1) != 0) {
        excluded = e;
        break;
      }
    }
    if (excluded == 0) {
      throw Error(ErrorCode::kRankDeficient, "desired function is identically zero");
    }
  }
  for (std::size_t i = 1; i <= k; ++i) {
    if (i != excluded) basis.others.push_back(static_cast<std::uint16_t>(i));
  }
  return basis;
}

FieldMatrix BasisCoordinates(const PrimeField& field, const BasisSelection& basis,
                             const FieldMatrix& normalized) {
  std::vector<std::size_t> rows = {static_cast<std::size_t>(basis.theta - 1)};
  for (std::uint16_t r : basis.others) rows.push_back(r - 1);
  return Multiply(field, normalized, Inverse(field, normalized.SelectRows(rows)));
}

GroupSplit SplitGroups(const QueryVertex& vertex, const BasisSelection& basis) {
  GroupSplit split;
  for (std::uint32_t pos = 0; pos < vertex.queries.size(); ++pos) {
    const Query& q = vertex.queries[pos];
    if (q.desired) continue;
    bool touches = false;
    for (const Term& t : q.terms) {
      if (std::binary_search(basis.others.begin(), basis.others.end(), t.message)) {
        touches = true;
        break;
      }
    }
    (touches ? split.group1 : split.group2).push_back(pos);
  }
  return split;
}

namespace {

// Column of the coordinates matrix holding basis message `message`.
std::size_t BasisColumn(const BasisSelection& basis, std::uint16_t message) {
  const auto it = std::lower_bound(basis.others.begin(), basis.others.end(), message);
  return 1 + static_cast<std::size_t>(it - basis.others.begin());
}

bool Contains(const MessageSet& set, std::uint16_t x) {
  return std::binary_search(set.begin(), set.end(), x);
}

void ExpectGroupSizes(const QueryTree& tree, const QueryVertex& v, const GroupSplit& split,
                      std::size_t datasets) {
  const std::size_t m = v.level;
  const std::size_t expected2 = Binomial(tree.messages - datasets, m);
  const std::size_t interference = Binomial(tree.messages - 1, m);
  if (split.group2.size() != expected2 ||
      split.group1.size() + split.group2.size() != interference) {
    throw Error(ErrorCode::kDimensionMismatch,
                "level " + std::to_string(m) + " has " +
                    std::to_string(split.group2.size()) + " redundant queries, expected " +
                    std::to_string(expected2));
  }
}

}  // namespace

Element HCoefficient(const PrimeField& field, const MessageSet& combo,
                     const MessageSet& target, const BasisSelection& basis,
                     const FieldMatrix& coordinates) {
  const MessageSet& others = basis.others;
  if (combo.size() != target.size() || combo == target ||
      !std::is_sorted(combo.begin(), combo.end())) {
    throw Error(ErrorCode::kInvalidTuple, "combo must be a sorted tuple other than target");
  }
  if (!others.empty() && !target.empty() && others.back() >= target.front()) {
    throw Error(ErrorCode::kInvalidTuple, "basis indices must precede target indices");
  }
  MessageSet from_basis;
  MessageSet shared;
  for (std::uint16_t x : combo) {
    if (Contains(others, x)) {
      from_basis.push_back(x);
    } else if (Contains(target, x)) {
      shared.push_back(x);
    } else {
      throw Error(ErrorCode::kInvalidTuple,
                  "combo index " + std::to_string(x) + " outside basis and target");
    }
  }
  MessageSet replaced;
  std::size_t exponent = 1;
  for (std::size_t pos = 0; pos < target.size(); ++pos) {
    if (!Contains(shared, target[pos])) {
      replaced.push_back(target[pos]);
      exponent += pos + 1;
    }
  }
  const std::size_t t = from_basis.size();
  exponent += t * (t - 1) / 2;
  FieldMatrix minor(t, t);
  for (std::size_t a = 0; a < t; ++a) {
    for (std::size_t c = 0; c < t; ++c) {
      minor(a, c) = coordinates(replaced[c] - 1, BasisColumn(basis, from_basis[a]));
    }
  }
  const Element det = Determinant(field, minor);
  return exponent % 2 == 0 ? det : field.Neg(det);
}

std::vector<RedundancyRelation> RelationsOracle(const PrimeField& field,
                                                const QueryTree& tree,
                                                std::uint32_t vertex,
                                                const BasisSelection& basis,
                                                const FieldMatrix& coordinates) {
  const QueryVertex& v = tree.vertices.at(vertex);
  const std::size_t k = coordinates.cols();
  const GroupSplit split = SplitGroups(v, basis);
  ExpectGroupSizes(tree, v, split, k);
  if (split.group2.empty()) return {};

  std::unordered_map<std::uint64_t, std::uint32_t> desired_at;  // theta index -> pos
  for (std::uint32_t pos = 0; pos < v.queries.size(); ++pos) {
    if (v.queries[pos].desired) desired_at[v.queries[pos].desired_term().index] = pos;
  }
  std::unordered_map<std::uint64_t, std::size_t> index_id;
  std::vector<std::uint64_t> index_of;
  for (const Query& q : v.queries) {
    if (q.desired) continue;
    for (const Term& t : q.terms) {
      if (index_id.emplace(t.index, index_of.size()).second) index_of.push_back(t.index);
    }
  }
  const std::size_t n = index_of.size();

  // Coordinates of a query: non-desired basis part and desired part.
  auto expand = [&](const Query& q, std::vector<Element>& rest,
                    std::vector<Element>& theta_part) {
    rest.assign((k - 1) * n, 0);
    theta_part.assign(n, 0);
    for (const Term& t : q.terms) {
      const std::size_t id = index_id.at(t.index);
      for (std::size_t b = 0; b < k; ++b) {
        const Element val = field.Signed(t.sign, coordinates(t.message - 1, b));
        Element& slot = b == 0 ? theta_part[id] : rest[(b - 1) * n + id];
        slot = field.Add(slot, val);
      }
    }
  };

  const std::size_t g1 = split.group1.size();
  FieldMatrix a((k - 1) * n, g1);
  std::vector<std::vector<Element>> g1_theta(g1);
  std::vector<Element> rest;
  for (std::size_t j = 0; j < g1; ++j) {
    expand(v.queries[split.group1[j]], rest, g1_theta[j]);
    for (std::size_t r = 0; r < rest.size(); ++r) a(r, j) = rest[r];
  }

  std::vector<RedundancyRelation> out;
  for (std::uint32_t target : split.group2) {
    std::vector<Element> theta_part;
    expand(v.queries[target], rest, theta_part);
    const auto solution = SolveAny(field, a, rest);
    if (!solution) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "redundant query not spanned by the basis-touching queries");
    }
    RedundancyRelation rel;
    rel.target = target;
    rel.interference.assign(v.queries.size(), 0);
    rel.desired.assign(v.queries.size(), 0);
    for (std::size_t j = 0; j < g1; ++j) {
      rel.interference[split.group1[j]] = (*solution)[j];
      for (std::size_t id = 0; id < n; ++id) {
        theta_part[id] = field.Sub(theta_part[id], field.Mul((*solution)[j], g1_theta[j][id]));
      }
    }
    for (std::size_t id = 0; id < n; ++id) {
      if (theta_part[id] == 0) continue;
      const auto it = desired_at.find(index_of[id]);
      if (it == desired_at.end()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "residual on a symbol that carries no desired value");
      }
      rel.desired[it->second] = theta_part[id];
    }
    out.push_back(std::move(rel));
  }
  return out;
}

std::vector<RedundancyRelation> RelationsClosedForm(const PrimeField& field,
                                                    const QueryTree& tree,
                                                    std::uint32_t vertex,
                                                    const BasisSelection& basis,
                                                    const FieldMatrix& coordinates) {
  const QueryVertex& v = tree.vertices.at(vertex);
  const std::size_t m = v.level;
  const std::size_t messages = tree.messages;
  const MessageSet& others = basis.others;
  const GroupSplit split = SplitGroups(v, basis);
  ExpectGroupSizes(tree, v, split, coordinates.cols());

  std::vector<RedundancyRelation> out;
  for (std::uint32_t target : split.group2) {
    const MessageSet redundant = v.queries[target].messages();
    MessageSet span = others;
    span.insert(span.end(), redundant.begin(), redundant.end());
    std::sort(span.begin(), span.end());

    // Row a: e_{redundant[a]} minus its basis coordinates, over `span`.
    FieldMatrix z(m, span.size());
    for (std::size_t row = 0; row < m; ++row) {
      for (std::size_t col = 0; col < span.size(); ++col) {
        if (span[col] == redundant[row]) {
          z(row, col) = 1;
        } else if (Contains(others, span[col])) {
          z(row, col) = field.Neg(coordinates(redundant[row] - 1, BasisColumn(basis, span[col])));
        }
      }
    }
    auto columns = [&](const MessageSet& picks, bool with_desired) {
      FieldMatrix sub(m, picks.size() + (with_desired ? 1 : 0));
      for (std::size_t row = 0; row < m; ++row) {
        std::size_t col = 0;
        if (with_desired) sub(row, col++) = coordinates(redundant[row] - 1, 0);
        for (std::uint16_t p : picks) sub(row, col++) = z(row, p - 1);
      }
      return sub;
    };
    auto to_messages = [&](const MessageSet& picks) {
      MessageSet out_set;
      for (std::uint16_t p : picks) out_set.push_back(span[p - 1]);
      return out_set;
    };

    const bool separated = others.empty() || others.back() < redundant.front();
    RedundancyRelation rel;
    rel.target = target;
    rel.interference.assign(v.queries.size(), 0);
    rel.desired.assign(v.queries.size(), 0);
    for (const MessageSet& picks : Subsets(span.size(), m)) {
      const MessageSet combo = to_messages(picks);
      if (combo == redundant) continue;
      const Element g = separated
                            ? HCoefficient(field, combo, redundant, basis, coordinates)
                            : field.Neg(Determinant(field, columns(picks, false)));
      rel.interference[SubsetRank(combo, messages)] = g;
    }
    for (const MessageSet& picks : Subsets(span.size(), m - 1)) {
      MessageSet with_theta = to_messages(picks);
      with_theta.insert(std::upper_bound(with_theta.begin(), with_theta.end(), basis.theta),
                        basis.theta);
      rel.desired[SubsetRank(with_theta, messages)] =
          Determinant(field, columns(picks, true));
    }
    out.push_back(std::move(rel));
  }
  return out;
}

RelationRow ToRelationRow(const PrimeField& field, const QueryVertex& vertex,
                          const RedundancyRelation& relation) {
  const std::size_t size = vertex.queries.size();
  RelationRow r;
  r.row.assign(size, 0);
  r.rhs_weights.assign(size, 0);
  r.row[relation.target] = 1;
  for (std::size_t j = 0; j < size; ++j) {
    if (relation.interference[j] != 0) {
      r.row[j] = field.Sub(r.row[j], relation.interference[j]);
    }
    if (relation.desired[j] != 0) {
      // u_theta = s * (q - e * P) with s the desired term's sign and e the
      // side-information sign; P is the parent value.
      const Query& q = vertex.queries[j];
      const Element coeff = field.Signed(q.desired_term().sign, relation.desired[j]);
      r.row[j] = field.Sub(r.row[j], coeff);
      r.rhs_weights[j] = field.Neg(field.Signed(q.side_sign, coeff));
    }
  }
  return r;
}

std::vector<std::vector<RelationRow>> LevelRelationRows(const PrimeField& field,
                                                        const QueryTree& tree,
                                                        const BasisSelection& basis,
                                                        const FieldMatrix& coordinates) {
  std::vector<std::vector<RelationRow>> out(tree.messages);
  std::vector<bool> seen(tree.messages, false);
  for (std::uint32_t id = 0; id < tree.vertices.size(); ++id) {
    const QueryVertex& v = tree.vertices[id];
    if (seen[v.level - 1]) continue;
    seen[v.level - 1] = true;
    for (const auto& rel : RelationsOracle(field, tree, id, basis, coordinates)) {
      out[v.level - 1].push_back(ToRelationRow(field, v, rel));
    }
  }
  return out;
}

namespace {

LevelCompression IdentityLevel(std::size_t level, std::size_t cols) {
  LevelCompression lc;
  lc.level = level;
  lc.rows = cols;
  lc.cols = cols;
  lc.identity = true;
  lc.matrix = FieldMatrix::Identity(cols);
  return lc;
}

LevelCompression VandermondeLevel(const PrimeField& field, std::size_t level,
                                  std::size_t rows, std::size_t cols, Element first) {
  LevelCompression lc;
  lc.level = level;
  lc.rows = rows;
  lc.cols = cols;
  lc.matrix = FieldMatrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const Element node = first + c;
    lc.nodes.push_back(node);
    Element power = 1;
    for (std::size_t r = 0; r < rows; ++r) {
      lc.matrix(r, c) = power;
      power = field.Mul(power, node);
    }
  }
  return lc;
}

}  // namespace

CompressionSpec CompressionSpec::Build(const PrimeField& field, std::size_t servers,
                                       const FieldMatrix& normalized) {
  const std::size_t messages = normalized.rows();
  const std::size_t datasets = normalized.cols();
  if (servers == 0 || datasets == 0 || messages < datasets) {
    throw Error(ErrorCode::kInvalidArgument, "need N >= 1 and M >= K >= 1");
  }
  CompressionSpec spec;
  spec.servers_ = servers;
  spec.messages_ = messages;
  spec.datasets_ = datasets;
  spec.modulus_ = field.modulus();

  // Relation rows do not depend on N, so a two-server tree certifies all N.
  std::vector<std::vector<std::vector<RelationRow>>> by_theta;
  if (messages > datasets) {
    for (std::uint16_t theta = 1; theta <= messages; ++theta) {
      bool zero_row = true;
      for (std::size_t k = 0; k < datasets; ++k) zero_row &= normalized(theta - 1, k) == 0;
      if (zero_row) continue;  // the desired value is known to be zero
      const QueryTree tree = [&] {
        QueryTree t = BuildTree(theta, 2, static_cast<std::uint16_t>(messages));
        SignAssign(field, t);
        return t;
      }();
      const BasisSelection basis = SelectBasis(field, theta, normalized);
      const FieldMatrix coords = BasisCoordinates(field, basis, normalized);
      by_theta.push_back(LevelRelationRows(field, tree, basis, coords));
    }
  }

  for (std::size_t m = 1; m <= messages; ++m) {
    const std::size_t cols = Binomial(messages, m);
    const std::size_t redundant = Binomial(messages - datasets, m);
    if (redundant == 0) {
      spec.levels_.push_back(IdentityLevel(m, cols));
      continue;
    }
    const std::size_t rows = cols - redundant;
    bool found = false;
    for (std::size_t attempt = 0; attempt < kCompressionSearchBound && !found; ++attempt) {
      const Element first = 1 + attempt;
      if (first + cols - 1 >= field.modulus()) break;
      LevelCompression lc = VandermondeLevel(field, m, rows, cols, first);
      bool ok = true;
      for (const auto& levels : by_theta) {
        FieldMatrix relation(levels[m - 1].size(), cols);
        for (std::size_t r = 0; r < levels[m - 1].size(); ++r) {
          std::copy(levels[m - 1][r].row.begin(), levels[m - 1][r].row.end(),
                    relation.row(r).begin());
        }
        if (Rank(field, lc.matrix.StackBelow(relation)) != cols) {
          ok = false;
          break;
        }
      }
      if (ok) {
        spec.levels_.push_back(std::move(lc));
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kFieldTooSmall,
                  "no certified compression for level " + std::to_string(m) +
                      " over p=" + std::to_string(field.modulus()));
    }
  }
  return spec;
}

CompressionSpec CompressionSpec::Uncompressed(const PrimeField& field, std::size_t servers,
                                              std::size_t messages, std::size_t datasets) {
  if (servers == 0 || datasets == 0 || messages < datasets) {
    throw Error(ErrorCode::kInvalidArgument, "need N >= 1 and M >= K >= 1");
  }
  CompressionSpec spec;
  spec.servers_ = servers;
  spec.messages_ = messages;
  spec.datasets_ = datasets;
  spec.modulus_ = field.modulus();
  spec.uncompressed_ = true;
  for (std::size_t m = 1; m <= messages; ++m) {
    spec.levels_.push_back(IdentityLevel(m, Binomial(messages, m)));
  }
  return spec;
}

std::uint64_t CompressionSpec::PerServerDownload() const {
  std::uint64_t total = 0;
  std::uint64_t fan = 1;
  for (const LevelCompression& lc : levels_) {
    total += fan * lc.rows;
    fan *= servers_ - 1;
  }
  return total;
}

std::string CompressionSpec::Serialize() const {
  std::ostringstream out;
  out << "compression N=" << servers_ << " M=" << messages_ << " K=" << datasets_
      << " p=" << modulus_ << "\n";
  for (const LevelCompression& lc : levels_) {
    out << "level " << lc.level << " rows " << lc.rows << " cols " << lc.cols;
    if (lc.identity) {
      out << " identity";
    } else {
      out << " nodes";
      for (Element node : lc.nodes) out << ' ' << node;
    }
    out << "\n";
  }
  return out.str();
}

std::uint64_t DownloadCount(std::size_t servers, std::size_t messages,
                            std::size_t datasets) {
  std::uint64_t per_server = 0;
  std::uint64_t fan = 1;
  for (std::size_t m = 1; m <= messages; ++m) {
    per_server += fan * (Binomial(messages, m) - Binomial(messages - datasets, m));
    fan *= servers - 1;
  }
  return servers * per_server;
}

std::uint64_t DownloadCountClosedForm(std::size_t servers, std::size_t messages,
                                      std::size_t datasets) {
  if (servers == 1) return datasets;
  std::uint64_t full = 1;
  std::uint64_t reduced = 1;
  for (std::size_t i = 0; i < messages; ++i) full *= servers;
  for (std::size_t i = 0; i < messages - datasets; ++i) reduced *= servers;
  return servers * (full - reduced) / (servers - 1);
}

}  // namespace privcomp

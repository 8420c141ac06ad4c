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

#include "privcomp/server.h"

#include <string>

#include "privcomp/error.h"
#include "privcomp/planner.h"

namespace privcomp {

ServerEngine::ServerEngine(const PrimeField& field, const DatasetStore& store,
                           const CombinationMatrix& matrix, const CompressionSpec& spec)
    : field_(field), store_(store), matrix_(matrix), spec_(spec) {
  if (store.datasets() != matrix.datasets() || spec.datasets() != matrix.datasets() ||
      spec.messages() != matrix.messages() || spec.modulus() != field.modulus()) {
    throw Error(ErrorCode::kShapeMismatch, "store, matrix and compression disagree");
  }
}

std::vector<Element> ServerEngine::Evaluate(std::span<const WireQuery> queries) const {
  const FieldMatrix& rows = matrix_.evaluation();
  const std::size_t k = matrix_.datasets();
  std::vector<Element> out;
  out.reserve(queries.size());
  for (const WireQuery& q : queries) {
    Element acc = 0;
    for (const WireTerm& t : q.terms) {
      if (t.message == 0 || t.message > matrix_.messages()) {
        throw Error(ErrorCode::kUnknownMessage,
                    "message " + std::to_string(t.message) + " not served");
      }
      if (t.position == 0 || t.position > store_.length()) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "position " + std::to_string(t.position) + " outside the store");
      }
      const auto coeffs = rows.row(t.message - 1);
      Element symbol = 0;
      for (std::size_t d = 0; d < k; ++d) {
        symbol = field_.Add(symbol, field_.Mul(coeffs[d], store_.at(d + 1, t.position)));
      }
      acc = field_.Add(acc, field_.Signed(t.sign, symbol));
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<Element> ServerEngine::Compress(std::span<const Element> values) const {
  const std::size_t servers = spec_.servers();
  if (values.size() != QueriesPerServer(servers, spec_.messages())) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(values.size()) + " values do not fit the vertex layout");
  }
  std::vector<Element> out;
  out.reserve(spec_.PerServerDownload());
  std::size_t offset = 0;
  std::uint64_t fan = 1;
  for (const LevelCompression& lc : spec_.levels()) {
    for (std::uint64_t v = 0; v < fan; ++v) {
      const auto block = values.subspan(offset, lc.cols);
      if (lc.identity) {
        out.insert(out.end(), block.begin(), block.end());
      } else {
        const auto y = Multiply(field_, lc.matrix, block);
        out.insert(out.end(), y.begin(), y.end());
      }
      offset += lc.cols;
    }
    fan *= servers - 1;
  }
  return out;
}

RequestHeader ServerEngine::ExpectedHeader() const {
  RequestHeader h;
  h.modulus_check = static_cast<std::uint32_t>(field_.modulus());
  h.servers = static_cast<std::uint16_t>(spec_.servers());
  h.datasets = static_cast<std::uint16_t>(matrix_.datasets());
  h.messages = static_cast<std::uint16_t>(matrix_.messages());
  h.length = store_.length();
  return h;
}

std::vector<Element> ServerEngine::Answer(const Request& request) const {
  if (!(request.header == ExpectedHeader())) {
    throw Error(ErrorCode::kParameterMismatch,
                "request parameters differ from this server's configuration");
  }
  const std::size_t servers = spec_.servers();
  if (request.queries.size() != QueriesPerServer(servers, spec_.messages())) {
    throw Error(ErrorCode::kMalformedFrame, "query count does not match the plan layout");
  }
  std::size_t index = 0;
  std::uint64_t fan = 1;
  for (const LevelCompression& lc : spec_.levels()) {
    for (std::uint64_t q = 0; q < fan * lc.cols; ++q, ++index) {
      const WireQuery& query = request.queries[index];
      if (query.terms.size() != lc.level) {
        throw Error(ErrorCode::kMalformedFrame,
                    "query " + std::to_string(index) + " has the wrong term count");
      }
      for (std::size_t t = 1; t < query.terms.size(); ++t) {
        if (query.terms[t].message <= query.terms[t - 1].message) {
          throw Error(ErrorCode::kMalformedFrame, "message indices must increase");
        }
      }
    }
    fan *= servers - 1;
  }
  return Compress(Evaluate(request.queries));
}

std::vector<std::uint8_t> ServerEngine::HandleRequest(
    std::span<const std::uint8_t> frame) const {
  return EncodeResponse(Answer(DecodeRequest(frame)));
}

}  // namespace privcomp

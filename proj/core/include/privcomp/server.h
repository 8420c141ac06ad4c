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
#ifndef PRIVCOMP_SERVER_H_
#define PRIVCOMP_SERVER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "privcomp/gf.h"
#include "privcomp/model.h"
#include "privcomp/redundancy.h"
#include "privcomp/wire.h"

namespace privcomp {

// Answers requests against a replicated store. Holds no per-session state;
// one engine may serve any number of concurrent sessions.
class ServerEngine {
 public:
  // The engine keeps references; all three must outlive it.
  ServerEngine(const PrimeField& field, const DatasetStore& store,
               const CombinationMatrix& matrix, const CompressionSpec& spec);

  // Signed sums of message symbols. Throws kUnknownMessage or
  // kIndexOutOfRange.
  std::vector<Element> Evaluate(std::span<const WireQuery> queries) const;

  // Applies the per-level compression vertex by vertex, in transmission
  // order. Throws kShapeMismatch if the value count does not fit the layout.
  std::vector<Element> Compress(std::span<const Element> values) const;

  // Checks the header and the block layout, then evaluates and compresses.
  // Throws kParameterMismatch, kMalformedFrame or kVersionMismatch.
  std::vector<Element> Answer(const Request& request) const;
  std::vector<std::uint8_t> HandleRequest(std::span<const std::uint8_t> frame) const;

  RequestHeader ExpectedHeader() const;

 private:
  const PrimeField& field_;
  const DatasetStore& store_;
  const CombinationMatrix& matrix_;
  const CompressionSpec& spec_;
};

}  // namespace privcomp

#endif  // PRIVCOMP_SERVER_H_

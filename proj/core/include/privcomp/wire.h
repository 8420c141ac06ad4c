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
#ifndef PRIVCOMP_WIRE_H_
#define PRIVCOMP_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "privcomp/gf.h"

namespace privcomp {

// One signed symbol reference as seen by a server.
struct WireTerm {
  std::uint16_t message = 0;   // 1-based internal message index
  std::uint64_t position = 0;  // 1-based storage position
  std::int8_t sign = 1;        // +1 or -1

  bool operator==(const WireTerm&) const = default;
  auto operator<=>(const WireTerm&) const = default;
};

struct WireQuery {
  std::vector<WireTerm> terms;  // ascending message index

  bool operator==(const WireQuery&) const = default;
  auto operator<=>(const WireQuery&) const = default;
};

struct RequestHeader {
  std::uint32_t modulus_check = 0;  // p mod 2^32
  std::uint16_t servers = 0;
  std::uint16_t datasets = 0;
  std::uint16_t messages = 0;
  std::uint64_t length = 0;

  bool operator==(const RequestHeader&) const = default;
};

struct Request {
  RequestHeader header;
  std::vector<WireQuery> queries;
};

inline constexpr char kRequestMagic[4] = {'P', 'C', 'Q', '1'};
inline constexpr char kResponseMagic[4] = {'P', 'C', 'A', '1'};

// Little-endian framing. Decoders reject trailing bytes and short frames with
// kMalformedFrame and a wrong magic with kVersionMismatch.
std::vector<std::uint8_t> EncodeRequest(const Request& request);
Request DecodeRequest(std::span<const std::uint8_t> frame);
std::vector<std::uint8_t> EncodeResponse(std::span<const Element> values);
std::vector<Element> DecodeResponse(std::span<const std::uint8_t> frame);

// Query bytes in request layout without the header; used for view digests.
void AppendQueryBytes(const WireQuery& query, std::vector<std::uint8_t>& out);

// 64-bit FNV-1a, for compact fingerprints in reports.
std::uint64_t Fingerprint(std::span<const std::uint8_t> bytes);

}  // namespace privcomp

#endif  // PRIVCOMP_WIRE_H_

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

#include "privcomp/wire.h"

#include <cstring>
#include <string>

#include "privcomp/error.h"

namespace privcomp {
namespace {

template <typename T>
void Put(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    if (bytes_.size() - offset_ < sizeof(T)) {
      throw Error(ErrorCode::kMalformedFrame,
                  "frame truncated at byte " + std::to_string(offset_));
    }
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(bytes_[offset_ + i]) << (8 * i));
    }
    offset_ += sizeof(T);
    return value;
  }

  void ExpectMagic(const char (&magic)[4]) {
    if (bytes_.size() < 4) {
      throw Error(ErrorCode::kMalformedFrame, "frame shorter than its magic");
    }
    if (std::memcmp(bytes_.data(), magic, 4) != 0) {
      throw Error(ErrorCode::kVersionMismatch, "unknown frame magic");
    }
    offset_ = 4;
  }

  std::size_t remaining() const { return bytes_.size() - offset_; }

  void ExpectEnd() const {
    if (offset_ != bytes_.size()) {
      throw Error(ErrorCode::kMalformedFrame,
                  std::to_string(bytes_.size() - offset_) + " trailing bytes");
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

}  // namespace

void AppendQueryBytes(const WireQuery& query, std::vector<std::uint8_t>& out) {
  Put<std::uint16_t>(out, static_cast<std::uint16_t>(query.terms.size()));
  for (const WireTerm& t : query.terms) {
    Put<std::uint16_t>(out, t.message);
    Put<std::uint64_t>(out, t.position);
    Put<std::uint8_t>(out, t.sign < 0 ? 1 : 0);
  }
}

std::vector<std::uint8_t> EncodeRequest(const Request& request) {
  std::vector<std::uint8_t> out(kRequestMagic, kRequestMagic + 4);
  const RequestHeader& h = request.header;
  Put<std::uint32_t>(out, h.modulus_check);
  Put<std::uint16_t>(out, h.servers);
  Put<std::uint16_t>(out, h.datasets);
  Put<std::uint16_t>(out, h.messages);
  Put<std::uint64_t>(out, h.length);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(request.queries.size()));
  for (const WireQuery& q : request.queries) AppendQueryBytes(q, out);
  return out;
}

Request DecodeRequest(std::span<const std::uint8_t> frame) {
  Reader in(frame);
  in.ExpectMagic(kRequestMagic);
  Request request;
  RequestHeader& h = request.header;
  h.modulus_check = in.Get<std::uint32_t>();
  h.servers = in.Get<std::uint16_t>();
  h.datasets = in.Get<std::uint16_t>();
  h.messages = in.Get<std::uint16_t>();
  h.length = in.Get<std::uint64_t>();
  const auto count = in.Get<std::uint32_t>();
  // Each query needs at least its two-byte term count.
  if (count > in.remaining() / 2) {
    throw Error(ErrorCode::kMalformedFrame, "query count exceeds frame size");
  }
  request.queries.resize(count);
  for (WireQuery& q : request.queries) {
    const auto terms = in.Get<std::uint16_t>();
    q.terms.resize(terms);
    for (WireTerm& t : q.terms) {
      t.message = in.Get<std::uint16_t>();
      t.position = in.Get<std::uint64_t>();
      const auto sign = in.Get<std::uint8_t>();
      if (sign > 1) {
        throw Error(ErrorCode::kMalformedFrame, "sign byte must be 0 or 1");
      }
      t.sign = sign ? -1 : 1;
    }
  }
  in.ExpectEnd();
  return request;
}

std::vector<std::uint8_t> EncodeResponse(std::span<const Element> values) {
  std::vector<std::uint8_t> out(kResponseMagic, kResponseMagic + 4);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(values.size()));
  for (Element v : values) Put<std::uint64_t>(out, v);
  return out;
}

std::vector<Element> DecodeResponse(std::span<const std::uint8_t> frame) {
  Reader in(frame);
  in.ExpectMagic(kResponseMagic);
  const auto count = in.Get<std::uint32_t>();
  if (count > in.remaining() / 8) {
    throw Error(ErrorCode::kMalformedFrame, "value count exceeds frame size");
  }
  std::vector<Element> values(count);
  for (Element& v : values) v = in.Get<std::uint64_t>();
  in.ExpectEnd();
  return values;
}

std::uint64_t Fingerprint(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace privcomp

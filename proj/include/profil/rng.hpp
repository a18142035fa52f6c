#pragma once

#include <cstdint>
#include <string_view>

namespace modchain {

// Counter-based deterministic generator. Draw i of stream (seed, stream_id)
// is a fixed integer mix of the triple, so sequences are reproducible across
// platforms and independent streams can be derived without sharing state.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();
  double uniform(double lo, double hi);

  // Uniform integer in [lo, hi], both ends inclusive.
  int uniform_int(int lo, int hi);

  bool bernoulli(double p);

  // Number of failures before the first success when each trial continues
  // with probability p. Mean p / (1 - p).
  int geometric_failures(double p);

  // Independent stream derived from this one; does not consume draws.
  RngStream child(std::uint64_t index) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
};

// Named root stream for a (seed, purpose) pair. Same inputs always yield the
// same stream; distinct purposes yield unrelated streams.
RngStream derive_stream(std::uint64_t seed, std::string_view purpose);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace modchain

#include "profil/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace modchain {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  std::uint64_t h = mix64(seed_ + kGolden);
  h = mix64(h ^ stream_id_);
  h = mix64(h ^ counter_++);
  return h;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

int RngStream::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
  const auto offset = static_cast<int>(next_double() * span);
  return lo + (offset < static_cast<int>(span) ? offset : static_cast<int>(span) - 1);
}

bool RngStream::bernoulli(double p) { return next_double() < p; }

int RngStream::geometric_failures(double p) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("geometric_failures: p must be in [0,1)");
  if (p == 0.0) return 0;
  const double u = next_double();
  return static_cast<int>(std::floor(std::log1p(-u) / std::log(p)));
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(seed_, mix64(stream_id_ ^ ((index + 1) * kGolden)));
}

RngStream derive_stream(std::uint64_t seed, std::string_view purpose) {
  if (purpose.empty()) throw std::invalid_argument("derive_stream: purpose must be non-empty");
  return RngStream(seed, fnv1a64(purpose));
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace modchain

#include "aels/core.hpp"

#include <numbers>

namespace aels {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

RngStream RngStream::for_trial(std::uint64_t suite_seed, std::uint64_t trial_index) {
  std::uint64_t mix = trial_index;
  const std::uint64_t salt = splitmix64(mix);
  return RngStream(suite_seed ^ salt);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % bound;
}

double RngStream::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector random_unit_vector(RngStream& rng, Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("random_unit_vector: dimension must be >= 1");
  Vector z(n);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    norm = z.norm();
  } while (norm == 0.0);
  return z / norm;
}

Vector line_point(const Vector& x, const Vector& d, double t) { return x + t * d; }

Vector Objective::gradient(const Vector&) const {
  throw std::logic_error("objective does not provide a gradient");
}

std::unique_ptr<Objective> Objective::sample_step(RngStream&) const { return nullptr; }

void Objective::check_dim(const Vector& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("dimension mismatch: expected " + std::to_string(dim()) +
                                ", got " + std::to_string(x.size()));
  }
}

}  // namespace aels

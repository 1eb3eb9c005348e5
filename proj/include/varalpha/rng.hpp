#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace varalpha {

// SplitMix64 finalizer: bijective 64-bit mixer with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based stream: output n is mix64(key + n*gamma), so any draw is a
// pure function of (seed, stream_id, counter). Distinct stream ids get both a
// distinct key and a distinct odd gamma, which makes sequence overlap between
// streams astronomically unlikely. Replaying a (seed, stream_id) pair yields
// a bit-identical sequence; jumping to an absolute counter is O(1).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    key_ = mix64(h ^ stream_id);
    gamma_ = derive_gamma(key_ + stream_id);
    state_ = key_;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    state_ += gamma_;
    ++counter_;
    return mix64(state_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // reciprocals downstream are always finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double exponential() { return -std::log(uniform01()); }

  // Box-Muller pair with a cached spare. The spare is deterministic replay
  // state: a fresh stream with the same (seed, stream_id) reproduces the
  // same gaussian sequence from the start.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double phi = 6.283185307179586476925286766559 * uniform01();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static constexpr std::uint64_t derive_gamma(std::uint64_t h) {
    std::uint64_t g = mix64(h + 0x9e3779b97f4a7c15ULL) | 1ULL;
    // Avoid gammas with too few bit transitions (same guard SplittableRandom
    // uses); keeps the underlying Weyl sequence well mixed.
    if (__builtin_popcountll(g ^ (g >> 1)) < 24) g ^= 0xaaaaaaaaaaaaaaaaULL;
    return g;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_ = 0;
  std::uint64_t gamma_ = 0;
  std::uint64_t state_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace detail {

// sin(x)/x, stable near 0.
inline double sinc(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

// log S for S one-sided alpha-stable normalized by E[exp(-lambda S)] =
// exp(-lambda^alpha). Kanter's representation:
//   S = (A(theta) / W^(1-alpha))^(1/alpha),  theta ~ U(0,pi), W ~ Exp(1),
//   A(theta) = [(1-a) sinc((1-a)theta)]^(1-a) [a sinc(a theta)]^a / sinc(theta),
// evaluated in log space so tiny and huge samples keep full precision.
inline double log_sample_positive_stable(double alpha, RandomStream& rs) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("stable sampler: alpha must lie in (0,1)");
  const double pi = 3.141592653589793238462643383280;
  const double theta = pi * rs.uniform01();  // in (0, pi)
  const double w = rs.exponential();         // strictly positive
  const double b = 1.0 - alpha;
  const double log_a = b * std::log(b * detail::sinc(b * theta)) +
                       alpha * std::log(alpha * detail::sinc(alpha * theta)) -
                       std::log(detail::sinc(theta));
  return (log_a - b * std::log(w)) / alpha;
}

inline double sample_positive_stable(double alpha, RandomStream& rs) {
  return std::exp(log_sample_positive_stable(alpha, rs));
}

// One subordinator increment over internal step dt: dt^(1/alpha) * S. The
// scaling is applied in log space; `overflow` is set instead of returning a
// non-finite value when the product exceeds double range (small alpha makes
// this reachable), and callers must check it.
struct StableIncrement {
  double value = 0.0;
  double order = 0.0;
  double dt = 0.0;
  bool overflow = false;
};

inline StableIncrement sample_stable_increment(double alpha, double dt,
                                               RandomStream& rs) {
  if (!(dt > 0.0)) throw std::domain_error("stable increment: dt must be > 0");
  StableIncrement inc;
  inc.order = alpha;
  inc.dt = dt;
  const double log_v = std::log(dt) / alpha + log_sample_positive_stable(alpha, rs);
  if (log_v >= 709.0) {  // exp would exceed double range
    inc.overflow = true;
    inc.value = std::numeric_limits<double>::infinity();
  } else {
    inc.value = std::exp(log_v);
  }
  return inc;
}

}  // namespace varalpha

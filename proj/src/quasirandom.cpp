#include "quasirandom.hpp"

namespace gradjump {
namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > 20) throw ValidationError("halton dimension out of range");
  // skip a seed-dependent prefix; keeps streams for different seeds disjoint
  // for any practical draw count.
  index_ = 1 + (seed % 65521) * 101;
}

VectorXd HaltonSequence::next() {
  VectorXd p(dim_);
  for (int d = 0; d < dim_; ++d) p[d] = radical_inverse(index_, kPrimes[d]);
  ++index_;
  return p;
}

VectorXd HaltonSequence::next_in_box(const VectorXd& lo, const VectorXd& hi) {
  VectorXd p = next();
  return lo.array() + (hi - lo).array() * p.array();
}

VectorXd HaltonSequence::next_in_ball(const VectorXd& center, double radius) {
  // rejection from the enclosing cube; acceptance is ~0.52 in 3d, fine here
  for (;;) {
    VectorXd p = next();
    VectorXd y = (2.0 * p.array() - 1.0).matrix();
    if (y.norm() <= 1.0) return center + radius * y;
  }
}

}  // namespace gradjump

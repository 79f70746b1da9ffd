#pragma once

#include "types.hpp"

#include <cstdint>

namespace gradjump {

// Halton low-discrepancy sequence with a seed-dependent start index. The same
// seed always yields the same point stream, which is what makes report.json
// byte-reproducible.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  VectorXd next();                       // point in [0,1)^dim
  VectorXd next_in_box(const VectorXd& lo, const VectorXd& hi);
  VectorXd next_in_ball(const VectorXd& center, double radius);

 private:
  int dim_;
  std::uint64_t index_;
};

}  // namespace gradjump

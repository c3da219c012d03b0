#pragma once

#include <cstdint>
#include <vector>

namespace casp {

using SampleId = std::uint64_t;
using ClassId = int;

/// One labeled feature vector. `id` is unique within a stream and survives
/// class-order shuffles, buffer moves and corruption.
struct Sample {
  SampleId id = 0;
  std::vector<double> features;
  ClassId label = 0;
  int task = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

}  // namespace casp

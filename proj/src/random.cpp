#include "crp/random.hpp"

#include <stdexcept>

namespace crp {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  engine_.seed(seq);
}

double RandomStream::next_uniform() {
  // 53 random bits, shifted by half an ulp so 0 and 1 are never produced.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

ScriptedUniforms::ScriptedUniforms(std::vector<double> values) : values_(std::move(values)) {
  for (double u : values_) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("scripted uniform outside (0,1)");
  }
}

double ScriptedUniforms::next_uniform() {
  if (pos_ >= values_.size()) throw std::out_of_range("scripted uniform stream exhausted");
  return values_[pos_++];
}

}  // namespace crp

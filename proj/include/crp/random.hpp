#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace crp {

/// Source of uniform draws on the open interval (0, 1).
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double next_uniform() = 0;
};

/// Mersenne-twister stream. Substreams are keyed by (seed, index) so that
/// path i of a run is identical regardless of how paths are scheduled.
class RandomStream final : public UniformSource {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t index = 0);

  double next_uniform() override;

 private:
  std::mt19937_64 engine_;
};

/// Replays a fixed list of uniforms; throws once exhausted. Test hook for
/// forcing specific draws through the samplers.
class ScriptedUniforms final : public UniformSource {
 public:
  explicit ScriptedUniforms(std::vector<double> values);

  double next_uniform() override;
  std::size_t consumed() const { return pos_; }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

}  // namespace crp

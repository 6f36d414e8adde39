#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "caevo/ca.hpp"

namespace caevo {

// Black-box fitness over fixed-length bit strings, maximised by every
// optimizer. begin_epoch is called once per epoch, before any evaluation of
// that epoch, on the coordinating thread; evaluate must be safe to call
// concurrently afterwards.
class BitObjective {
 public:
  virtual ~BitObjective() = default;
  virtual void begin_epoch(std::uint64_t /*epoch*/) {}
  virtual double evaluate(const BitString& bits) const = 0;
};

// Wraps a plain function (onemax and friends).
class FunctionObjective final : public BitObjective {
 public:
  explicit FunctionObjective(std::function<double(const BitString&)> fn) : fn_(std::move(fn)) {}
  double evaluate(const BitString& bits) const override { return fn_(bits); }

 private:
  std::function<double(const BitString&)> fn_;
};

using RealObjective = std::function<double(std::span<const double>)>;

}  // namespace caevo

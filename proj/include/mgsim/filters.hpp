#pragma once

#include <string>

#include "mgsim/common.hpp"

namespace mgsim {

/// First-order low-pass, forward-Euler discretized: y += dt*wc*(u - y).
/// Requires dt*wc < 1 (Euler stability with margin for monotone step response).
class LowPass {
  public:
    LowPass() = default;
    LowPass(double wc, double dt, double y0 = 0.0) : wc_(wc), dt_(dt), y_(y0) {
        if (!(wc > 0.0)) throw ConfigError("low-pass cutoff must be positive, got " + std::to_string(wc));
        if (!(dt > 0.0)) throw ConfigError("low-pass dt must be positive, got " + std::to_string(dt));
        if (!(dt * wc < 1.0))
            throw ConfigError("low-pass dt*wc must be < 1 for stability, got " + std::to_string(dt * wc));
    }

    double update(double u) {
        y_ += dt_ * wc_ * (u - y_);
        return y_;
    }

    double value() const { return y_; }
    void reset(double y0) { y_ = y0; }

  private:
    double wc_ = 1.0;
    double dt_ = 1e-3;
    double y_ = 0.0;
};

}  // namespace mgsim

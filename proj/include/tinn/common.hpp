#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tinn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SpaceTimePoint {
    double x = 0.0;
    double y = 0.0;  // unused for 1-D problems
    double t = 0.0;
};

// splitmix64 stream; uniforms use the top 53 bits of each output word.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

}  // namespace tinn

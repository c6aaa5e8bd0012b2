#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace dyadlab {

using std::int64_t;
using std::uint64_t;

// Error taxonomy.  The CLI maps ConfigError -> exit 2 and
// ResolutionError -> exit 3; everything else is an internal failure.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};
struct GridMismatchError : ConfigError {
    using ConfigError::ConfigError;
};
struct AlignmentError : ConfigError {
    using ConfigError::ConfigError;
};
struct UnsupportedError : ConfigError {
    using ConfigError::ConfigError;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}
inline void require_resolution(bool cond, const std::string& msg) {
    if (!cond) throw ResolutionError(msg);
}

/// Exact nonnegative rational, used for relative distances.
struct Fraction {
    int64_t num = 0;
    int64_t den = 1;

    Fraction() = default;
    Fraction(int64_t n, int64_t d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.num == b.num && a.den == b.den;
    }
    // num/den <= k, exactly
    bool leq_int(int64_t k) const { return num <= k * den; }
};

// Deterministic RNG.  mt19937_64 has a fully specified sequence, and the
// value mappings below avoid the implementation-defined std distributions,
// so identical seeds give identical streams on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }
    int bit() { return static_cast<int>(eng_() >> 63); }
    /// uniform in [0, 1)
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// uniform in [-1, 1)
    double symmetric() { return 2.0 * unit() - 1.0; }
    /// uniform integer in [0, n)
    int64_t below(int64_t n) { return static_cast<int64_t>(eng_() % static_cast<uint64_t>(n)); }
    /// standard normal (Box-Muller, fixed call order)
    double normal();

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Parallelism knobs.  parallel_for partitions [0, n) into contiguous chunks;
// the worker must write only to its own indices, so results are identical
// for every job count.
void set_jobs(int jobs);
int effective_jobs();
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& chunk_fn);

}  // namespace dyadlab

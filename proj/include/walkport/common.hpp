#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace walkport {

using cplx = std::complex<double>;

/// Tolerances used across the library. Amplitudes below `prune_eps` are
/// dropped from sparse supports; `norm_tol` guards exact identities
/// (normalization, unitarity); `compare_tol` guards accumulated-error
/// comparisons between independently computed states.
inline constexpr double prune_eps = 1e-14;
inline constexpr double norm_tol = 1e-12;
inline constexpr double compare_tol = 1e-10;

inline constexpr const char* version = "1.0.0";

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

}  // namespace walkport

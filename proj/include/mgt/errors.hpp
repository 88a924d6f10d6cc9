#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

/// Spectral data whose inverse transform carries a non-negligible imaginary part.
class SpectralSymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Node doubling changed a kernel quadrature by more than the accepted tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard increments kept growing; the time horizon is too long for a contraction.
class PicardDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration file. The message starts with the field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path), detail_(what) {}

    const std::string& path() const { return path_; }
    /// The message without the path prefix.
    const std::string& detail() const { return detail_; }

private:
    std::string path_;
    std::string detail_;
};

/// Unrecoverable numerical failure (non-finite data outside blow-up detection).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mgt

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gradleak {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor or layer dimensions do not agree.
struct ShapeError : Error {
    using Error::Error;
};

/// Malformed document, schema violation, or inconsistent manifest.
struct ParseError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// A value claimed to be an activation output lies outside the
/// activation's range.
struct ActivationDomainError : Error {
    using Error::Error;
};

/// Every bias gradient of the dense layer is (numerically) zero, so the
/// input recovery cannot start.
struct BiasGradientsZeroError : Error {
    using Error::Error;
};

/// The stacked constraint system does not determine all unknowns.
struct RankDeficientError : Error {
    RankDeficientError(std::size_t rank, std::size_t unknowns, int layer = -1)
        : Error(format(rank, unknowns, layer)),
          rank(rank),
          unknowns(unknowns),
          layer(layer) {}

    std::size_t rank;
    std::size_t unknowns;
    int layer;  // conv layer index in the architecture, -1 if not attached

private:
    static std::string format(std::size_t rank, std::size_t unknowns, int layer) {
        std::string s = "rank-deficient system: rank " + std::to_string(rank) +
                        " < " + std::to_string(unknowns) + " unknowns";
        if (layer >= 0) s += " (layer " + std::to_string(layer) + ")";
        return s;
    }
};

}  // namespace gradleak

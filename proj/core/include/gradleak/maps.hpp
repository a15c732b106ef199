#pragma once

#include <cstdint>
#include <vector>

#include "gradleak/geometry.hpp"

namespace gradleak {

/// Index lists recording which output each input position and each
/// kernel position touches during the sliding-window pass. Spatial only:
/// channels and filters replicate the pattern, so they are expanded by
/// the consumers. All indices are flat row-major.
struct ContributionMaps {
    ConvGeometry geom;

    struct OutKer {
        std::uint32_t out;  // output spatial index
        std::uint32_t ker;  // kernel spatial index
    };
    struct OutIn {
        std::uint32_t out;
        std::uint32_t in;  // input spatial index
    };
    struct KerIn {
        std::uint32_t ker;
        std::uint32_t in;
    };

    /// outputs each input position contributes to, and through which
    /// kernel position
    std::vector<std::vector<OutKer>> input_to_outputs;
    /// (output, input) pairs each kernel position multiplies
    std::vector<std::vector<OutIn>> kernel_to_outputs;
    /// (kernel, input) pairs under each output's window
    std::vector<std::vector<KerIn>> output_to_inputs;
    /// windows per kernel position that fell on padding (constant zero)
    std::vector<std::uint32_t> kernel_padded_hits;
};

/// Enumerates the sliding-window forward pass once and records all three
/// views of it.
ContributionMaps build_contribution_maps(const ConvGeometry& geom);

}  // namespace gradleak

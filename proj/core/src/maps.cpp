#include "gradleak/maps.hpp"

namespace gradleak {

ContributionMaps build_contribution_maps(const ConvGeometry& geom) {
    geom.validate();
    const std::size_t H = geom.in_size;
    const std::size_t K = geom.kernel;
    const std::size_t out = geom.out_size();
    const long pad = static_cast<long>(geom.padding);

    ContributionMaps maps;
    maps.geom = geom;
    maps.input_to_outputs.resize(H * H);
    maps.kernel_to_outputs.resize(K * K);
    maps.output_to_inputs.resize(out * out);
    maps.kernel_padded_hits.assign(K * K, 0);

    for (std::size_t oy = 0; oy < out; ++oy) {
        for (std::size_t ox = 0; ox < out; ++ox) {
            const auto o = static_cast<std::uint32_t>(oy * out + ox);
            for (std::size_t p = 0; p < K; ++p) {
                const long iy = static_cast<long>(oy * geom.stride + p) - pad;
                for (std::size_t q = 0; q < K; ++q) {
                    const long ix = static_cast<long>(ox * geom.stride + q) - pad;
                    const auto k = static_cast<std::uint32_t>(p * K + q);
                    if (iy < 0 || iy >= static_cast<long>(H) || ix < 0 ||
                        ix >= static_cast<long>(H)) {
                        ++maps.kernel_padded_hits[k];
                        continue;
                    }
                    const auto in = static_cast<std::uint32_t>(iy * static_cast<long>(H) + ix);
                    maps.input_to_outputs[in].push_back({o, k});
                    maps.kernel_to_outputs[k].push_back({o, in});
                    maps.output_to_inputs[o].push_back({k, in});
                }
            }
        }
    }
    return maps;
}

}  // namespace gradleak

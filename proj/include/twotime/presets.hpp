#ifndef TWOTIME_PRESETS_HPP
#define TWOTIME_PRESETS_HPP

// Named figure reproductions. Only dimensionless ratios are fixed; the
// anchors set the units.

#include <string>
#include <string_view>
#include <vector>

#include "twotime/config.hpp"

namespace twotime {

struct PresetAnchors {
    double m = 1.0;
    double V0 = 1.0;
    double D = 0.0; ///< 0 picks the preset's own half-width
};

std::vector<std::string> preset_names();

/// Throws ValidationError for an unknown name.
RunConfig make_preset(std::string_view name, const PresetAnchors& anchors = {});

/// (KE_rel - PE) / |PE| with KE_rel the mean relative kinetic energy of the group.
double energy_ratio(const BarrierWavegroupConfig& cfg, const SystemParams& params);

} // namespace twotime

#endif

#pragma once

#include <cstddef>

// Generated at configure time from data/presets (see cmake/EmbedPresets.cmake).
namespace encs::detail {

extern const char* const kPresetMain;
extern const char* const kPresetScenarios[];
extern const std::size_t kPresetScenarioCount;

}  // namespace encs::detail

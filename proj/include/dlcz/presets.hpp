#pragma once

#include <string>
#include <vector>

namespace dlcz {

/// A scenario config compiled into the library from presets/<name>.json.
struct EmbeddedPreset {
  const char* name;
  const char* json;
};

/// All built-in presets, sorted by name.
const std::vector<EmbeddedPreset>& embedded_presets();

/// nullptr when no preset has that name.
const EmbeddedPreset* find_preset(const std::string& name);

}  // namespace dlcz

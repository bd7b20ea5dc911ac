#pragma once

#include <string>

#include "json.hpp"
#include "mee/canonical.hpp"
#include "mee/spectrum.hpp"

namespace mee {

/// {"levels": [...], "degeneracies": [...]?}; degeneracies default to ones.
Spectrum spectrum_from_json(const nlohmann::json& j);
nlohmann::json spectrum_to_json(const Spectrum& spectrum);

/// {"levels_a": [...], "levels_b": [...]}
BipartiteSpectrum bipartite_from_json(const nlohmann::json& j);

/// Full listing for small spectra, otherwise a summary with an FNV-1a hash.
nlohmann::json spectrum_digest(const Spectrum& spectrum);

/// Reads and parses a JSON file; failures raise ParseError.
nlohmann::json read_json_file(const std::string& path);

}  // namespace mee

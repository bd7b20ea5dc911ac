#include "mee/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "mee/error.hpp"

namespace mee {

Spectrum spectrum_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("levels")) {
    throw ParseError("spectrum JSON needs a \"levels\" array");
  }
  try {
    auto levels = j.at("levels").get<std::vector<double>>();
    std::vector<std::uint64_t> deg;
    if (j.contains("degeneracies") && !j.at("degeneracies").is_null()) {
      for (const auto& d : j.at("degeneracies")) {
        if (!d.is_number_integer() || d.get<long long>() <= 0) {
          throw ParseError("degeneracies must be positive integers");
        }
        deg.push_back(d.get<std::uint64_t>());
      }
    }
    return Spectrum(std::move(levels), std::move(deg));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed spectrum JSON: ") + e.what());
  }
}

nlohmann::json spectrum_to_json(const Spectrum& spectrum) {
  return {{"levels", std::vector<double>(spectrum.levels().begin(), spectrum.levels().end())},
          {"degeneracies",
           std::vector<std::uint64_t>(spectrum.degeneracies().begin(), spectrum.degeneracies().end())}};
}

BipartiteSpectrum bipartite_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("levels_a") || !j.contains("levels_b")) {
    throw ParseError("bipartite JSON needs \"levels_a\" and \"levels_b\" arrays");
  }
  try {
    return BipartiteSpectrum(j.at("levels_a").get<std::vector<double>>(),
                             j.at("levels_b").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed bipartite JSON: ") + e.what());
  }
}

nlohmann::json spectrum_digest(const Spectrum& spectrum) {
  if (spectrum.distinct() <= 64) {
    auto j = spectrum_to_json(spectrum);
    j["n"] = spectrum.dimension();
    return j;
  }
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      hash ^= (word >> (8 * b)) & 0xffU;
      hash *= 1099511628211ULL;
    }
  };
  for (std::size_t k = 0; k < spectrum.distinct(); ++k) {
    mix(std::bit_cast<std::uint64_t>(spectrum.levels()[k]));
    mix(spectrum.degeneracies()[k]);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return {{"distinct", spectrum.distinct()},
          {"n", spectrum.dimension()},
          {"min", spectrum.min()},
          {"max", spectrum.max()},
          {"fnv1a", hex}};
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open input file", {{"path", path}});
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), {{"path", path}});
  }
}

}  // namespace mee

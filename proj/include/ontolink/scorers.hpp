#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ontolink/graphcore.hpp"

namespace ontolink {

using ScorerParams = std::map<std::string, std::string>;

// snore, adamic, jaccard, pref, spectral, transe, random
const std::vector<std::string>& known_scorers();
bool is_known_scorer(std::string_view name);

// Params are per-scorer key=value strings, e.g. {"d", "64"} for spectral.
// Throws Error on an unknown scorer or parameter.
std::unique_ptr<Scorer> make_scorer(std::string_view name, const ScorerParams& params = {});

}  // namespace ontolink

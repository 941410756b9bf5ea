#include "ontolink/scorers.hpp"

#include <algorithm>
#include <charconv>

#include "ontolink/errors.hpp"
#include "ontolink/snore.hpp"
#include "ontolink/spectral.hpp"
#include "ontolink/transe.hpp"

namespace ontolink {

namespace {

template <typename T>
T parse_number(std::string_view scorer, const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("bad value '" + text + "' for " + std::string(scorer) + "." + key);
  }
  return value;
}

// Applies each known key through `set`, rejecting the rest.
template <typename Setter>
void apply(std::string_view scorer, const ScorerParams& params, std::initializer_list<std::string_view> keys,
           Setter&& set) {
  for (const auto& [key, value] : params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error("unknown parameter " + std::string(scorer) + "." + key);
    }
    set(key, value);
  }
}

}  // namespace

const std::vector<std::string>& known_scorers() {
  static const std::vector<std::string> names = {"snore", "adamic", "jaccard", "pref", "spectral", "transe", "random"};
  return names;
}

bool is_known_scorer(std::string_view name) {
  const auto& names = known_scorers();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::unique_ptr<Scorer> make_scorer(std::string_view name, const ScorerParams& params) {
  if (name == "snore") {
    SnoreParams p;
    apply(name, params, {"walks", "max_len", "threshold", "cap"}, [&](const std::string& k, const std::string& v) {
      if (k == "walks") p.walks_per_node = parse_number<int>(name, k, v);
      if (k == "max_len") p.max_len = parse_number<int>(name, k, v);
      if (k == "threshold") p.threshold = parse_number<double>(name, k, v);
      if (k == "cap") p.nnz_cap_per_node = parse_number<int>(name, k, v);
    });
    return std::make_unique<SnoreScorer>(p);
  }
  if (name == "spectral") {
    SpectralParams p;
    apply(name, params, {"d"}, [&](const std::string& k, const std::string& v) {
      if (k == "d") p.dimensions = parse_number<int>(name, k, v);
    });
    return std::make_unique<SpectralScorer>(p);
  }
  if (name == "transe") {
    TransEParams p;
    apply(name, params, {"d", "margin", "lr", "epochs", "negatives"}, [&](const std::string& k, const std::string& v) {
      if (k == "d") p.dimensions = parse_number<int>(name, k, v);
      if (k == "margin") p.margin = parse_number<double>(name, k, v);
      if (k == "lr") p.learning_rate = parse_number<double>(name, k, v);
      if (k == "epochs") p.epochs = parse_number<int>(name, k, v);
      if (k == "negatives") p.negatives_per_positive = parse_number<int>(name, k, v);
    });
    return std::make_unique<TransEScorer>(p);
  }

  if (!params.empty()) throw Error("scorer " + std::string(name) + " takes no parameters");
  if (name == "adamic") return std::make_unique<ProximityScorer>("adamic", &adamic_adar);
  if (name == "jaccard") return std::make_unique<ProximityScorer>("jaccard", &jaccard);
  if (name == "pref") return std::make_unique<ProximityScorer>("pref", &preferential);
  if (name == "random") return std::make_unique<RandomScorer>();
  throw Error("unknown scorer: " + std::string(name));
}

}  // namespace ontolink

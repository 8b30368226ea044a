#include "config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>

#include "hgde/errors.hpp"

namespace hgde::cli {
namespace {

constexpr std::array kKeys{
    KeyInfo{"graph", "", "edge list path"},
    KeyInfo{"features", "", "headerless CSV feature matrix"},
    KeyInfo{"kappa", "-1", "ball curvature (< 0)"},
    KeyInfo{"dim", "16", "embedding dimension when no features are given"},
    KeyInfo{"scheme", "isotropic", "isotropic | local | global | local_global"},
    KeyInfo{"channel_mode", "per_channel", "scalar | per_channel"},
    KeyInfo{"beta", "0.5", "global weight of the mixed schemes"},
    KeyInfo{"heads", "1", "global attention heads"},
    KeyInfo{"alpha", "0.5", "ORC mass kept at the center node"},
    KeyInfo{"sigma", "identity", "identity | tanh"},
    KeyInfo{"method", "heuler", "heuler | hrk4 | ham"},
    KeyInfo{"tau", "1.0", "step size"},
    KeyInfo{"T", "8", "time horizon"},
    KeyInfo{"s_min", "2", "HAM warm-up length"},
    KeyInfo{"s_max", "4", "HAM maximum order"},
    KeyInfo{"residual", "true", "use the gyromidpoint residual flow"},
    KeyInfo{"eta1", "1.0", "residual weight of the flow output"},
    KeyInfo{"eta2", "0.6", "residual weight of the current state"},
    KeyInfo{"eta3", "0.1", "residual weight of the initial state"},
    KeyInfo{"seed", "0", "random seed"},
    KeyInfo{"out", ".", "output directory"},
    KeyInfo{"methods", "heuler,hrk4,ham", "convergence: comma-separated methods"},
    KeyInfo{"taus", "0.2,0.1,0.05,0.025", "convergence: comma-separated step sizes"},
    KeyInfo{"k", "5", "knn: neighbors per node"},
    KeyInfo{"metric", "euclidean", "knn: euclidean | cosine"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_as(std::string_view key, const std::string& value, std::string_view what) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError("key '" + std::string(key) + "' expects " + std::string(what) +
                     ", got '" + value + "'");
  }
  return out;
}

}  // namespace

std::span<const KeyInfo> known_keys() { return kKeys; }

RunConfig RunConfig::defaults(std::string_view command) {
  RunConfig cfg;
  for (const KeyInfo& k : kKeys) cfg.values_.emplace(std::string(k.name), std::string(k.fallback));
  if (command == "convergence") {
    cfg.values_["T"] = "1";
    cfg.values_["dim"] = "4";
  }
  return cfg;
}

void RunConfig::set(std::string_view key, std::string value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown configuration key '" + std::string(key) + "'");
  it->second = std::move(value);
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    try {
      set(key, std::string(trim(line.substr(eq + 1))));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

const std::string& RunConfig::text(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

const std::string& RunConfig::required(std::string_view key) const {
  const std::string& v = text(key);
  if (v.empty()) throw InputError("missing required key '" + std::string(key) + "'");
  return v;
}

double RunConfig::number(std::string_view key) const {
  return parse_as<double>(key, text(key), "a number");
}

long long RunConfig::integer(std::string_view key) const {
  return parse_as<long long>(key, text(key), "an integer");
}

std::uint64_t RunConfig::unsigned_integer(std::string_view key) const {
  return parse_as<std::uint64_t>(key, text(key), "a non-negative integer");
}

bool RunConfig::boolean(std::string_view key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("key '" + std::string(key) + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> RunConfig::list(std::string_view key) const {
  std::vector<std::string> out;
  std::string_view rest = text(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::vector<double> RunConfig::numbers(std::string_view key) const {
  std::vector<double> out;
  for (const std::string& item : list(key)) out.push_back(parse_as<double>(key, item, "numbers"));
  return out;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const KeyInfo& k : kKeys) j[std::string(k.name)] = values_.at(std::string(k.name));
  return j;
}

}  // namespace hgde::cli

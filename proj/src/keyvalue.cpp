#include "lmbreak/keyvalue.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lmbreak/errors.hpp"

namespace lmbreak {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

double to_number(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw SpecError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

TransitionFamily to_family(const std::string& key, const std::string& word) {
  if (word == "logistic") return TransitionFamily::logistic;
  if (word == "exponential") return TransitionFamily::exponential;
  throw SpecError("key '" + key + "': unknown transition family '" + word + "'");
}

const char* family_name(TransitionFamily f) {
  return f == TransitionFamily::logistic ? "logistic" : "exponential";
}

std::string require(const KeyValueConfig& c, const std::string& key) {
  auto v = c.get(key);
  if (!v) throw SpecError("missing key '" + key + "'");
  return *v;
}

std::vector<double> require_numbers(const KeyValueConfig& c, const std::string& key) {
  auto v = c.get_numbers(key);
  if (!v) throw SpecError("missing key '" + key + "'");
  return *v;
}

double require_number(const KeyValueConfig& c, const std::string& key) {
  auto v = c.get_number(key);
  if (!v) throw SpecError("missing key '" + key + "'");
  return *v;
}

std::pair<double, double> require_pair(const KeyValueConfig& c, const std::string& key) {
  const auto v = require_numbers(c, key);
  if (v.size() != 2) throw SpecError("key '" + key + "' needs exactly two values");
  return {v[0], v[1]};
}

TransitionSpec read_transition(const KeyValueConfig& c, const std::string& p) {
  TransitionSpec t;
  t.family = to_family(p + ".family", c.get(p + ".family").value_or("logistic"));
  t.tau1 = require_number(c, p + ".tau1");
  t.gamma = require_number(c, p + ".gamma");
  return t;
}

void write_transition(KeyValueConfig& c, const TransitionSpec& t, const std::string& p) {
  c.set(p + ".family", family_name(t.family));
  c.set(p + ".tau1", format_number(t.tau1));
  c.set(p + ".gamma", format_number(t.gamma));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw SpecError(fmt::format("line {}: expected 'key = value'", number));
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw SpecError(fmt::format("line {}: empty key", number));
    if (cfg.entries_.count(key)) {
      throw SpecError(fmt::format("line {}: duplicate key '{}'", number, key));
    }
    cfg.entries_.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_number(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return to_number(key, *v);
}

std::optional<std::vector<double>> KeyValueConfig::get_numbers(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) out.push_back(to_number(key, item));
  return out;
}

std::optional<std::vector<std::string>> KeyValueConfig::get_words(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return split_list(*v);
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  entries_[key] = std::move(value);
}

void KeyValueConfig::set_numbers(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ", ";
    joined += format_number(values[i]);
  }
  set(key, std::move(joined));
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

MeanSpec read_mean_spec(const KeyValueConfig& c, const std::string& p) {
  const auto variant = require(c, p + ".variant");
  MeanSpec spec;
  if (variant == "constant") {
    const auto levels = require_numbers(c, p + ".levels");
    if (levels.size() != 1) throw SpecError("constant mean needs exactly one level");
    spec = ConstantMean{levels[0]};
  } else if (variant == "step") {
    spec = StepMean{require_numbers(c, p + ".levels"), require_numbers(c, p + ".fractions")};
  } else if (variant == "smooth") {
    const auto [from, to] = require_pair(c, p + ".levels");
    spec = SmoothMean{from, to, read_transition(c, p)};
  } else {
    throw SpecError("key '" + p + ".variant': unknown mean variant '" + variant + "'");
  }
  validate(spec);
  return spec;
}

SigmaSpec read_sigma_spec(const KeyValueConfig& c, const std::string& p) {
  const auto variant = require(c, p + ".variant");
  SigmaSpec spec;
  if (variant == "constant") {
    const auto levels = require_numbers(c, p + ".levels");
    if (levels.size() != 1) throw SpecError("constant sigma needs exactly one level");
    spec = ConstantSigma{levels[0]};
  } else if (variant == "step") {
    spec = StepSigma{require_numbers(c, p + ".levels"), require_numbers(c, p + ".fractions")};
  } else if (variant == "smooth") {
    const auto [from, to] = require_pair(c, p + ".levels");
    spec = SmoothSigma{from, to, read_transition(c, p)};
  } else if (variant == "multi_regime") {
    MultiRegimeSigma m;
    m.levels = require_numbers(c, p + ".levels");
    m.locations = require_numbers(c, p + ".locations");
    m.scales = require_numbers(c, p + ".scales");
    const auto families = c.get_words(p + ".families");
    if (families) {
      for (const auto& f : *families) m.families.push_back(to_family(p + ".families", f));
    } else {
      m.families.assign(m.locations.size(), TransitionFamily::logistic);
    }
    spec = std::move(m);
  } else {
    throw SpecError("key '" + p + ".variant': unknown sigma variant '" + variant + "'");
  }
  validate(spec);
  return spec;
}

void write_spec(KeyValueConfig& c, const MeanSpec& spec, const std::string& p) {
  if (const auto* m = std::get_if<ConstantMean>(&spec)) {
    c.set(p + ".variant", "constant");
    c.set_numbers(p + ".levels", {m->level});
  } else if (const auto* s = std::get_if<StepMean>(&spec)) {
    c.set(p + ".variant", "step");
    c.set_numbers(p + ".levels", s->levels);
    c.set_numbers(p + ".fractions", s->fractions);
  } else if (const auto* sm = std::get_if<SmoothMean>(&spec)) {
    c.set(p + ".variant", "smooth");
    c.set_numbers(p + ".levels", {sm->from, sm->to});
    write_transition(c, sm->transition, p);
  }
}

void write_spec(KeyValueConfig& c, const SigmaSpec& spec, const std::string& p) {
  if (const auto* m = std::get_if<ConstantSigma>(&spec)) {
    c.set(p + ".variant", "constant");
    c.set_numbers(p + ".levels", {m->level});
  } else if (const auto* s = std::get_if<StepSigma>(&spec)) {
    c.set(p + ".variant", "step");
    c.set_numbers(p + ".levels", s->levels);
    c.set_numbers(p + ".fractions", s->fractions);
  } else if (const auto* sm = std::get_if<SmoothSigma>(&spec)) {
    c.set(p + ".variant", "smooth");
    c.set_numbers(p + ".levels", {sm->from, sm->to});
    write_transition(c, sm->transition, p);
  } else if (const auto* mr = std::get_if<MultiRegimeSigma>(&spec)) {
    c.set(p + ".variant", "multi_regime");
    c.set_numbers(p + ".levels", mr->levels);
    c.set_numbers(p + ".locations", mr->locations);
    c.set_numbers(p + ".scales", mr->scales);
    std::string fams;
    for (std::size_t i = 0; i < mr->families.size(); ++i) {
      if (i) fams += ", ";
      fams += family_name(mr->families[i]);
    }
    c.set(p + ".families", fams);
  }
}

}  // namespace lmbreak

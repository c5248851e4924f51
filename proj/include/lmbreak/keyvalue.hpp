#pragma once

// Flat `key = value` configuration, shared by the CLI config file and the
// serialized form of mean/sigma specs.
//
//   # comment
//   series = 1,4,7
//   mean.variant = smooth
//   mean.levels = 1, 2
//   mean.family = logistic
//   mean.tau1 = 0.5
//   mean.gamma = 20
//
// Spec keys under a prefix P: P.variant (constant | step | smooth |
// multi_regime), P.levels, P.fractions, P.family, P.tau1, P.gamma,
// P.locations, P.scales, P.families.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmbreak/signals.hpp"

namespace lmbreak {

class KeyValueConfig {
 public:
  /// Throws SpecError naming the line for malformed input or duplicate keys.
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_number(const std::string& key) const;
  std::optional<std::vector<double>> get_numbers(const std::string& key) const;
  std::optional<std::vector<std::string>> get_words(const std::string& key) const;

  void set(const std::string& key, std::string value);
  void set_numbers(const std::string& key, const std::vector<double>& values);

  /// Keys in lexicographic order, numbers with round-trip precision.
  std::string dump() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

MeanSpec read_mean_spec(const KeyValueConfig& config, const std::string& prefix = "mean");
SigmaSpec read_sigma_spec(const KeyValueConfig& config, const std::string& prefix = "sigma");
void write_spec(KeyValueConfig& config, const MeanSpec& spec, const std::string& prefix = "mean");
void write_spec(KeyValueConfig& config, const SigmaSpec& spec, const std::string& prefix = "sigma");

}  // namespace lmbreak

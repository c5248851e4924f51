#include "lmbreak/montecarlo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "lmbreak/core.hpp"
#include "lmbreak/errors.hpp"
#include "lmbreak/parallel.hpp"

namespace lmbreak {
namespace {

constexpr double kTau1 = 0.5;
constexpr double kTau2 = 2.0 / 3.0;
constexpr double kGamma = 20.0;

MeanSpec preset_mean(int dynamic) {
  switch (dynamic) {
    case 0:
      return ConstantMean{1.0};
    case 1:
      return StepMean{{1.0, 2.0}, {kTau1}};
    default:
      return SmoothMean{1.0, 2.0, {TransitionFamily::logistic, kTau1, kGamma}};
  }
}

SigmaSpec preset_sigma(int dynamic) {
  switch (dynamic) {
    case 0:
      return ConstantSigma{1.0};
    case 1:
      return StepSigma{{0.5, 1.5}, {kTau2}};
    default:
      return SmoothSigma{0.5, 1.5, {TransitionFamily::logistic, kTau2, kGamma}};
  }
}

// FNV-1a: stable across platforms, unlike std::hash.
std::uint64_t label_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t design_key(const SeriesDesign& d) {
  return d.id != 0 ? static_cast<std::uint64_t>(d.id) : label_hash(d.label);
}

std::string series_name(const RejectionCell& c) {
  return c.series_id != 0 ? std::to_string(c.series_id) : c.label;
}

std::string percent_label(double alpha) { return fmt::format("{:g}%", alpha * 100.0); }

std::string emit_csv(const RejectionTable& t) {
  std::string out = "series,n,alpha,rejections,replications,frequency\n";
  for (const auto& c : t.cells) {
    out += fmt::format("{},{},{:g},{},{},{:.6f}\n", series_name(c), c.n, c.alpha, c.rejections,
                       c.replications, c.frequency());
  }
  return out;
}

std::string emit_json(const RejectionTable& t) {
  nlohmann::ordered_json doc;
  doc["master_seed"] = t.master_seed;
  doc["replications"] = t.replications;
  doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : t.cells) {
    nlohmann::ordered_json cell;
    cell["series"] = c.series_id;
    cell["label"] = c.label;
    cell["n"] = c.n;
    cell["alpha"] = c.alpha;
    cell["rejections"] = c.rejections;
    cell["replications"] = c.replications;
    cell["frequency"] = c.frequency();
    cell["degenerate"] = c.degenerate;
    cell["valid"] = c.valid();
    doc["cells"].push_back(cell);
  }
  return doc.dump(2) + "\n";
}

std::string emit_text(const RejectionTable& t) {
  std::vector<Eigen::Index> ns;
  std::vector<std::string> series;
  std::vector<double> alphas;
  for (const auto& c : t.cells) {
    if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
    const auto name = series_name(c);
    if (std::find(series.begin(), series.end(), name) == series.end()) series.push_back(name);
    if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end()) alphas.push_back(c.alpha);
  }
  std::sort(ns.begin(), ns.end());
  std::sort(alphas.begin(), alphas.end());

  std::string out = fmt::format("Rejection frequencies (in %), {} replications, seed {}\n",
                                t.replications, t.master_seed);
  std::string header = fmt::format("{:<12} {:>6}", "series", "alpha");
  for (auto n : ns) header += fmt::format(" {:>8}", fmt::format("n={}", n));
  out += header + "\n";
  for (const auto& name : series) {
    out += std::string(header.size(), '-') + "\n";
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const std::string lead = a == alphas.size() / 2 ? fmt::format("Series {}", name) : "";
      std::string row = fmt::format("{:<12} {:>6}", lead, percent_label(alphas[a]));
      for (auto n : ns) {
        const RejectionCell* cell = nullptr;
        for (const auto& c : t.cells) {
          if (series_name(c) == name && c.n == n && c.alpha == alphas[a]) cell = &c;
        }
        if (cell == nullptr) {
          row += fmt::format(" {:>8}", "");
        } else {
          row += fmt::format(" {:>8}", fmt::format("{:.1f}{}", 100.0 * cell->frequency(),
                                                   cell->valid() ? "" : "*"));
        }
      }
      out += row + "\n";
    }
  }
  bool flagged = false;
  for (const auto& c : t.cells) flagged = flagged || !c.valid();
  if (flagged) out += "* cell contains degenerate (zero-variance) replications\n";
  return out;
}

}  // namespace

SeriesDesign preset(int series_id) {
  if (series_id < 1 || series_id > 9) {
    throw SpecError("series preset must be in 1..9, got " + std::to_string(series_id));
  }
  const int k = series_id - 1;
  return {series_id, "Series " + std::to_string(series_id), preset_mean(k / 3),
          preset_sigma(k % 3)};
}

SeriesDesign tabulated_preset(int series_id) {
  SeriesDesign d = preset(series_id);
  if (auto* step = std::get_if<StepSigma>(&d.sigma)) {
    std::reverse(step->levels.begin(), step->levels.end());
  } else if (auto* smooth = std::get_if<SmoothSigma>(&d.sigma)) {
    std::swap(smooth->from, smooth->to);
  }
  d.id = 0;
  d.label = "Series " + std::to_string(series_id) + "/t";
  return d;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw SpecError("replications must be positive");
  if (workers < 1) throw SpecError("workers must be positive");
  if (levels.empty()) throw SpecError("at least one significance level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw SpecError("levels must lie in (0,1)");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw SpecError("levels must be sorted ascending");
  }
  for (auto n : sample_sizes) {
    if (n < 2) throw SpecError("sample sizes must be at least 2");
  }
  for (const auto& d : designs) {
    lmbreak::validate(d.mean);
    lmbreak::validate(d.sigma);
  }
}

const RejectionCell* RejectionTable::find(int series_id, Eigen::Index n, double alpha) const {
  for (const auto& c : cells) {
    if (c.series_id == series_id && c.n == n && std::abs(c.alpha - alpha) < 1e-12) return &c;
  }
  return nullptr;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int series_id, Eigen::Index n,
                               int replication) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(series_id),
                      static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replication)});
}

namespace {

std::vector<double> statistics_for_key(const SeriesDesign& design, std::uint64_t key,
                                       Eigen::Index n, int replications,
                                       std::uint64_t master_seed, int workers) {
  const SeriesGenerator gen(design.mean, design.sigma, n);
  std::vector<double> stats(static_cast<std::size_t>(replications));
  detail::parallel_for(replications, workers, [&](std::int64_t r) {
    const auto seed = derive_seed({master_seed, key, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(r)});
    const Series y = gen.draw(seed);
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      value = lm_test(y, 0.5).statistic;
    } catch (const DegenerateSeries&) {
    }
    stats[static_cast<std::size_t>(r)] = value;
  });
  return stats;
}

}  // namespace

std::vector<double> simulate_statistics(const SeriesDesign& design, Eigen::Index n,
                                        int replications, std::uint64_t master_seed,
                                        int workers) {
  return statistics_for_key(design, design_key(design), n, replications, master_seed, workers);
}

RejectionTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  RejectionTable table;
  table.replications = config.replications;
  table.master_seed = config.master_seed;
  for (const auto& design : config.designs) {
    for (auto n : config.sample_sizes) {
      const auto stats = simulate_statistics(design, n, config.replications, config.master_seed,
                                             config.workers);
      int degenerate = 0;
      std::vector<int> rejections(config.levels.size(), 0);
      for (double s : stats) {
        if (std::isnan(s)) {
          ++degenerate;
          continue;
        }
        const double p = p_value(s);
        for (std::size_t a = 0; a < config.levels.size(); ++a) {
          if (p < config.levels[a]) ++rejections[a];
        }
      }
      for (std::size_t a = 0; a < config.levels.size(); ++a) {
        table.cells.push_back({design.id, design.label, n, config.levels[a], rejections[a],
                               config.replications, degenerate});
      }
    }
  }
  return table;
}

std::optional<TableFormat> parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "json") return TableFormat::json;
  if (name == "text") return TableFormat::text;
  return std::nullopt;
}

std::string emit_table(const RejectionTable& table, TableFormat format) {
  switch (format) {
    case TableFormat::csv:
      return emit_csv(table);
    case TableFormat::json:
      return emit_json(table);
    case TableFormat::text:
      return emit_text(table);
  }
  return {};
}

}  // namespace lmbreak

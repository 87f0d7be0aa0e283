#pragma once

// Configuration-driven experiment suite shared by the command-line runner and
// the acceptance binary: a declarative config, a lazily built lab (group,
// density, core, samplers, test function) and one runner per experiment id.

#include "horolab/equidistribution.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace horolab {

struct ExperimentConfig {
  std::string name = "unnamed";
  std::uint64_t seed = 1;
  int dim = 2;

  // Either a symmetric example (rank > 0) or explicit pairings.
  int rank = 2;
  double radius = 0.72;
  std::vector<PairingSpec> pairings;
  int pingpong_grid = 1000;

  int exponent_min_length = 2;
  int exponent_max_length = 9;
  double density_offset = 0.01;
  int density_length = 8;
  std::vector<int> conformality_lengths{4, 8};

  int core_limit_length = 3;
  double core_spacing = 0.1;

  int psi_count = 8;
  double psi_t_radius = 0.4;
  double psi_p_radius = 0.4;
  int psi_smoothness = 2;

  // The frame x = a_{x_flow} e whose horosphere the windows run along.
  double x_flow = 0.0;

  std::size_t draws = 400000;

  double shadow_min = 1.0;
  double shadow_max = 100.0;
  int shadow_points = 21;

  double friendliness_window = 25.0;

  std::vector<double> window_T{4, 8, 16, 32, 64};
  double window_resolution = 0.01;
  double conjugation_time = 1.0;

  std::vector<double> translate_s{1, 2, 3, 4, 5, 6};
  double translate_f_radius = 0.5;

  std::vector<double> mixing_s{0, 1, 2, 3, 4, 5, 6};

  int dual_density_length = 6;
  int dual_time_nodes = 8;
  std::size_t dual_draws = 400000;

  int diophantine_count = 100;
  double diophantine_epsilon = 0.5;
  double diophantine_s_max = 20.0;

  double nondivergence_T = 16.0;
  double nondivergence_s = 2.0;

  double good_window = 4.0;
  double good_radius = 2.0;

  std::vector<std::string> experiments;  // empty: nothing requested
  std::map<std::string, double> tolerances;

  double tolerance(const std::string& key) const;
};

// Tolerances every verdict is judged against, keyed by `<experiment>.<check>`.
const std::map<std::string, double>& default_tolerances();

// The bundled reference example: two symmetric generator pairs in H^2.
ExperimentConfig standard_config();

// `key = value` lines, `#` comments. Unknown keys, malformed values and
// out-of-range settings throw invalid_config naming the line and field.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Canonical text of every setting except the seed; its hash tags reports.
std::string canonical_text(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct ExperimentInfo {
  std::string id;
  std::string description;
};
const std::vector<ExperimentInfo>& experiment_catalog();
bool is_experiment(const std::string& id);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // empty or one per point
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
  std::string id;
  std::string config_hash;
  std::uint64_t seed = 0;
  Table table;
  std::vector<std::pair<std::string, RateFit>> fits;
  std::vector<std::pair<std::string, std::string>> records;
  std::vector<Verdict> verdicts;
  std::optional<Plot> plot;
  double seconds = 0.0;  // wall clock, kept out of the table

  bool passed() const;
};

// Shared objects are built on first use; construction problems surface as
// construction_failed whatever the underlying cause.
class Lab {
 public:
  explicit Lab(ExperimentConfig config, int jobs = 1);
  ~Lab();
  Lab(const Lab&) = delete;
  Lab& operator=(const Lab&) = delete;

  const ExperimentConfig& config() const { return config_; }
  int jobs() const { return jobs_; }

  const SchottkyGroup& group();
  const CriticalExponent& exponent();
  const PattersonDensity& density();
  const CoreApproximation& core();
  const TestFunction& psi();
  const GlobalSample& bms();
  const GlobalSample& br();
  // m^BMS(psi) / |m^BMS| and m^BR(psi) / |m^BMS|.
  Estimate bms_target();
  Estimate br_target();
  LorentzMatrix x() const;

  // Seed of the named stream; independent of which other experiments run.
  std::uint64_t stream(const std::string& name) const;

  // Throws invalid_config for an unknown id.
  ExperimentReport run(const std::string& id);

 private:
  struct Cache;

  ExperimentConfig config_;
  int jobs_ = 1;
  std::unique_ptr<Cache> cache_;
};

// Tab-separated table headed by `# experiment=... config=... seed=...`.
void write_table(std::ostream& out, const ExperimentReport& report);
// key = value records, one block per experiment.
void write_summary(std::ostream& out, const ExperimentConfig& config, const std::vector<ExperimentReport>& reports);
void write_svg(std::ostream& out, const Plot& plot);

struct EmitOptions {
  bool plots = true;
};

// Writes <id>.tsv (and <id>.svg) per report plus summary.txt into `directory`,
// creating it if needed. Returns the paths written; throws io_error.
std::vector<std::string> emit_outputs(const std::string& directory, const ExperimentConfig& config,
                                      const std::vector<ExperimentReport>& reports, const EmitOptions& options = {});

}  // namespace horolab

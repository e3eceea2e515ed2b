#ifndef KERNELSKEL_EXPERIMENTS_HPP
#define KERNELSKEL_EXPERIMENTS_HPP

#include <map>
#include <string>
#include <vector>

#include "kernelskel/h2.hpp"

namespace kernelskel {

// One experiment run: id in exp1..exp5 plus the knobs the runners read.
// Defaults reproduce the reference setups at desk scale.
struct ExperimentConfig {
  std::string experiment = "exp1";
  std::string kernel = "multiquadric";
  int dim = 2;
  std::string pair = "far";  // far | near
  std::string adm = "strong";
  std::string mode = "proxy";  // proxy | hybrid | srrqr
  std::string scheme = "id";   // id | random:<n> | surface:<n>
  long x0_count = 1000;
  std::vector<long> y0_sizes = {4000, 16000, 64000};
  std::vector<long> n_list = {5000, 10000, 30000};
  long leaf_cap = 300;
  double tol = 1e-6;
  double entry_bound = 2.0;
  long probe_count = 40000;
  long random_proxy_count = 2000;
  long xd_count = 1500;   // candidate grid sizes for the id selection
  long yd_count = 15000;
  // svd/aca baselines in exp2 run only up to this target size
  long heavy_baseline_max = 4000;
  int time_reps = 3;
  long n_max = 100000;  // larger runs need an explicit override
  long audit_budget = 1 << 22;
  uint64_t seed = 1;
  std::string out_dir = ".";
};

struct ExperimentSummary {
  std::vector<std::string> files;
  std::map<std::string, double> metrics;
  std::string summary_line;
};

ExperimentSummary run_experiment(const ExperimentConfig& cfg);

// plain key=value configuration files; '#' starts a comment
ExperimentConfig config_from_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
uint64_t config_hash(const ExperimentConfig& cfg);

// presets used across the experiments: far = [-1,1]^d against
// [-9,9]^d \ [-3,3]^d (strong), near = [-9,9]^d \ [-1.1,1.1]^d (weak)
DomainPair preset_pair(int dim, const std::string& name);

ProxySchemeSpec parse_scheme(const std::string& spec, uint64_t seed);

}  // namespace kernelskel

#endif

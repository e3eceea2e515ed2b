#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "kernelskel/experiments.hpp"
#include "kernelskel/util.hpp"

using namespace kernelskel;

namespace {

struct CommonArgs {
  uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

DomainPair pair_from_name(int dim, const std::string& name) { return preset_pair(dim, name); }

int cmd_proxy_select(const CommonArgs& common, const std::string& kernel_name, int dim,
                     const std::string& pair_name, const std::string& scheme,
                     const std::string& out_file) {
  DomainPair pair = pair_from_name(dim, pair_name);
  Kernel k = parse_kernel(kernel_name, dim, &pair);
  const double t0_wall = std::chrono::duration<double>(
                             std::chrono::steady_clock::now().time_since_epoch())
                             .count();
  ProxySet proxy = select_proxy_any(k, pair, parse_scheme(scheme, common.seed));
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now().time_since_epoch())
                          .count() -
                      t0_wall;
  write_pointset(out_file, proxy.points);
  std::printf("proxy-select scheme=%s |Yp|=%ld rounds=%d wall=%.3fs out=%s\n",
              proxy.scheme.c_str(), proxy.points.size(), proxy.diag.rounds, wall,
              out_file.c_str());
  return 0;
}

int cmd_compress(const CommonArgs& common, const std::string& kernel_name, int dim,
                 const std::string& pair_name, const std::string& x0_spec,
                 const std::string& proxy_spec, double tol, double entry_bound, bool hybrid,
                 double near_half_edge, long probe_count, const std::string& report) {
  DomainPair pair = pair_from_name(dim, pair_name);
  Kernel k = parse_kernel(kernel_name, dim, &pair);

  PointSet x0;
  long gen_n = 0;
  if (std::sscanf(x0_spec.c_str(), "gen:%ld", &gen_n) == 1)
    x0 = random_uniform_points(pair.source, gen_n, common.seed);
  else
    x0 = read_pointset(x0_spec);

  ProxySet proxy;
  if (proxy_spec.find(':') != std::string::npos || proxy_spec == "id") {
    proxy = select_proxy_any(k, pair, parse_scheme(proxy_spec, common.seed + 1));
  } else {
    proxy.points = read_pointset(proxy_spec);
    proxy.scheme = "file";
    proxy.pair = pair;
    proxy.selection_rank = proxy.points.size();
  }

  const double eps = tol * std::sqrt(static_cast<double>(proxy.points.size()));
  CompressionResult res;
  std::vector<long> near_count;
  if (hybrid) {
    PointSet y0 = random_uniform_points(pair.target, probe_count, common.seed + 2);
    ShellRegion near_region(Box::centered_cube(dim, near_half_edge), pair.source);
    auto hyb = compress_hybrid(k, x0, y0, near_region, proxy, eps, entry_bound);
    res = std::move(hyb.result);
  } else {
    res = compress_proxy(k, x0, proxy, Stop::threshold(eps), entry_bound);
  }

  PointSet probe = grid_points(pair.target, probe_count);
  PointSet xp = grid_points(pair.source, 4 * proxy.points.size());
  ErrorReport rep = diagnostics(k, x0, res, probe, xp);

  std::FILE* f = std::fopen(report.c_str(), "w");
  if (!f) {
    std::fprintf(stderr, "cannot open %s\n", report.c_str());
    return 1;
  }
  std::fprintf(f, "# schema-version: 1\n# seed=%llu\n",
               static_cast<unsigned long long>(common.seed));
  std::fprintf(f, "row_index,err_Yp,err_Y0,ratio_max,ratio_avg\n");
  for (long i = 0; i < x0.size(); ++i)
    std::fprintf(f, "%ld,%.12g,%.12g,%.12g,%.12g\n", i, rep.err_yp[i], rep.err_probe[i],
                 rep.ratio_max[i], rep.ratio_avg[i]);
  std::fclose(f);
  std::printf("compress rank=%ld |Yp|=%ld deviation=%.3e max_ratio=%.3g report=%s\n", res.rank,
              proxy.points.size(), rep.representation_deviation, rep.max_ratio(), report.c_str());
  return 0;
}

int cmd_h2_build(const CommonArgs& common, const std::string& kernel_name, long n, int dim,
                 const std::string& adm, const std::string& mode_name, const std::string& scheme,
                 double tau, long leaf_cap, long audit_budget, const std::string& stats_csv) {
  ExperimentConfig cfg;
  cfg.experiment = "exp5";
  cfg.kernel = kernel_name;
  cfg.dim = dim;
  cfg.adm = adm;
  cfg.mode = mode_name;
  cfg.scheme = scheme;
  cfg.tol = tau;
  cfg.leaf_cap = leaf_cap;
  cfg.audit_budget = audit_budget;
  cfg.n_list = {n};
  cfg.seed = common.seed;
  cfg.out_dir = common.out_dir;
  ExperimentSummary sum = run_experiment(cfg);
  if (!stats_csv.empty()) {
    std::rename((common.out_dir + "/exp5_stats.csv").c_str(), stats_csv.c_str());
    std::rename((common.out_dir + "/exp5_time.csv").c_str(),
                (stats_csv + ".time.csv").c_str());
  }
  std::puts(sum.summary_line.c_str());
  return 0;
}

int run_exp(const CommonArgs& common, ExperimentConfig cfg) {
  cfg.seed = common.seed;
  cfg.out_dir = common.out_dir;
  ExperimentSummary sum = run_experiment(cfg);
  std::puts(sum.summary_line.c_str());
  for (const auto& f : sum.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxy-point kernel block compression and H2 construction"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--seed", common.seed, "global random seed");
  app.add_option("--threads", common.threads, "worker threads for the parallel kernels");
  app.add_option("--out-dir", common.out_dir, "output directory");

  // proxy-select
  auto* ps = app.add_subcommand("proxy-select", "select a proxy point set for a domain pair");
  std::string ps_kernel = "multiquadric", ps_pair = "far", ps_scheme = "id", ps_out = "proxy.txt";
  int ps_dim = 2;
  ps->add_option("--kernel", ps_kernel);
  ps->add_option("--dim", ps_dim);
  ps->add_option("--pair", ps_pair, "far|near");
  ps->add_option("--scheme", ps_scheme, "id|random:<n>|surface:<n>");
  ps->add_option("--out", ps_out);

  // compress
  auto* cp = app.add_subcommand("compress", "compress a kernel block via proxy points");
  std::string cp_kernel = "multiquadric", cp_pair = "far", cp_x0 = "gen:1000", cp_proxy = "id";
  std::string cp_report = "compress_report.csv";
  int cp_dim = 2;
  double cp_tol = 1e-6, cp_c = 2.0, cp_near = 3.0;
  bool cp_hybrid = false;
  long cp_probe = 10000;
  cp->add_option("--kernel", cp_kernel);
  cp->add_option("--dim", cp_dim);
  cp->add_option("--pair", cp_pair, "far|near");
  cp->add_option("--x0", cp_x0, "point-set file or gen:<n>");
  cp->add_option("--proxy", cp_proxy, "point-set file or id|random:<n>|surface:<n>");
  cp->add_option("--eps", cp_tol, "per-entry tolerance; threshold = eps*sqrt(|Yp|)");
  cp->add_option("--c", cp_c, "sRRQR entry bound");
  cp->add_flag("--hybrid", cp_hybrid, "near/far hybrid compression");
  cp->add_option("--near", cp_near, "half edge of the hybrid near region");
  cp->add_option("--probe", cp_probe, "probe grid size for the report");
  cp->add_option("--report", cp_report);

  // h2-build
  auto* hb = app.add_subcommand("h2-build", "build an H2 representation of K(X,X)");
  std::string hb_kernel = "multiquadric", hb_adm = "strong", hb_mode = "proxy", hb_scheme = "id";
  std::string hb_stats;
  long hb_n = 5000, hb_leaf = 300, hb_budget = 1 << 22;
  int hb_dim = 2;
  double hb_tau = 1e-6;
  hb->add_option("--kernel", hb_kernel);
  hb->add_option("--n", hb_n);
  hb->add_option("--dim", hb_dim);
  hb->add_option("--adm", hb_adm, "strong|weak");
  hb->add_option("--mode", hb_mode, "proxy|hybrid|srrqr");
  hb->add_option("--scheme", hb_scheme, "id|random:<n>");
  hb->add_option("--tau", hb_tau);
  hb->add_option("--leaf-cap", hb_leaf);
  hb->add_option("--audit-budget", hb_budget);
  hb->add_option("--stats", hb_stats, "stats CSV path");

  // experiments
  std::string config_file;
  std::vector<std::pair<CLI::App*, ExperimentConfig>> exps;
  std::map<std::string, CLI::App*> exp_cmds;
  std::map<std::string, std::vector<std::string>> exp_sets;
  for (const char* name : {"exp1", "exp2", "exp3", "exp4", "exp5"}) {
    auto* cmd = app.add_subcommand(
        name, std::string("experiment runner ") + name +
                  " (set options via --config and/or --set key=value)");
    cmd->add_option("--config", config_file, "key=value configuration file");
    cmd->add_option("--set", exp_sets[name], "override, e.g. --set kernel=inv-dist");
    exp_cmds[name] = cmd;
  }

  CLI11_PARSE(app, argc, argv);
  set_num_threads(common.threads);

  try {
    if (ps->parsed())
      return cmd_proxy_select(common, ps_kernel, ps_dim, ps_pair, ps_scheme, ps_out);
    if (cp->parsed())
      return cmd_compress(common, cp_kernel, cp_dim, cp_pair, cp_x0, cp_proxy, cp_tol, cp_c,
                          cp_hybrid, cp_near, cp_probe, cp_report);
    if (hb->parsed())
      return cmd_h2_build(common, hb_kernel, hb_n, hb_dim, hb_adm, hb_mode, hb_scheme, hb_tau,
                          hb_leaf, hb_budget, hb_stats);
    for (auto& [name, cmd] : exp_cmds) {
      if (!cmd->parsed()) continue;
      ExperimentConfig cfg =
          config_file.empty() ? ExperimentConfig{} : config_from_file(config_file);
      cfg.experiment = name;
      for (const std::string& kv : exp_sets[name]) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      return run_exp(common, cfg);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#include "kernelskel/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kernelskel/util.hpp"

namespace kernelskel {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class Csv {
 public:
  Csv(const std::string& path, uint64_t seed, uint64_t hash, const std::string& header)
      : f_(path) {
    if (!f_) throw std::runtime_error("cannot open output file " + path);
    f_ << "# schema-version: 1\n";
    f_ << "# seed=" << seed << " config-hash=" << hash << "\n";
    f_ << header << "\n";
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((f_ << (first ? "" : ","), first = false, put(cells)), ...);
    f_ << "\n";
  }

 private:
  void put(const std::string& s) { f_ << s; }
  void put(const char* s) { f_ << s; }
  void put(double v) { f_ << fmt(v); }
  void put(long v) { f_ << v; }
  void put(int v) { f_ << v; }
  std::ofstream f_;
};

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return cfg.out_dir + "/" + name;
}

double avg_entry_error(const Matrix& exact, const Matrix& approx) {
  return frobenius_diff(exact, approx) /
         std::sqrt(static_cast<double>(exact.rows()) * exact.cols());
}

// mean over non-skeleton rows of |e_i(y)|, probe processed in slices
std::vector<double> mean_abs_error_field(const Kernel& k, const PointSet& x0,
                                         const CompressionResult& res, const PointSet& probe) {
  const long n = x0.size();
  std::vector<char> skel(n, 0);
  for (long l : res.x_rep) skel[l] = 1;
  long active = 0;
  for (long i = 0; i < n; ++i) active += !skel[i];
  PointSet xrep = x0.select(res.x_rep);
  std::vector<double> field(probe.size(), 0.0);
  const long chunk = 4000;
  for (long start = 0; start < probe.size(); start += chunk) {
    std::vector<long> ids;
    for (long j = start; j < std::min(probe.size(), start + chunk); ++j) ids.push_back(j);
    PointSet slice = probe.select(ids);
    Matrix exact = assemble(k, x0, slice);
    Matrix approx = matmul(res.w, assemble(k, xrep, slice));
    for (long j = 0; j < slice.size(); ++j) {
      double s = 0.0;
      for (long i = 0; i < n; ++i)
        if (!skel[i]) s += std::fabs(exact(i, j) - approx(i, j));
      field[start + j] = s / active;
    }
  }
  return field;
}

IdSelectParams id_params_from(const ExperimentConfig& cfg) {
  IdSelectParams p;
  p.xd_count = cfg.xd_count;
  p.yd_count = cfg.yd_count;
  p.entry_bound = cfg.entry_bound;
  return p;
}

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

template <typename F>
double timed(int reps, F&& fn) {
  double t[3] = {0, 0, 0};
  reps = std::min(reps, 3);
  for (int r = 0; r < std::max(1, reps); ++r) {
    const double t0 = now_s();
    fn();
    t[r] = now_s() - t0;
  }
  if (reps <= 1) return t[0];
  if (reps == 2) return 0.5 * (t[0] + t[1]);
  return median3(t[0], t[1], t[2]);
}

ExperimentSummary exp1(const ExperimentConfig& cfg);
ExperimentSummary exp2(const ExperimentConfig& cfg);
ExperimentSummary exp3(const ExperimentConfig& cfg);
ExperimentSummary exp4(const ExperimentConfig& cfg);
ExperimentSummary exp5(const ExperimentConfig& cfg);

}  // namespace

DomainPair preset_pair(int dim, const std::string& name) {
  DomainPair pair;
  pair.source = Box::centered_cube(dim, 1.0);
  if (name == "far") {
    pair.target = ShellRegion(Box::centered_cube(dim, 9.0), Box::centered_cube(dim, 3.0));
    pair.admissibility = Admissibility::Strong;
  } else if (name == "near") {
    pair.target = ShellRegion(Box::centered_cube(dim, 9.0), Box::centered_cube(dim, 1.1));
    pair.admissibility = Admissibility::Weak;
  } else {
    throw std::invalid_argument("unknown pair preset '" + name + "' (use far|near)");
  }
  return pair;
}

ProxySchemeSpec parse_scheme(const std::string& spec, uint64_t seed) {
  if (spec == "id") return IdSelectParams{};
  long n = 0;
  if (std::sscanf(spec.c_str(), "random:%ld", &n) == 1) return SchemeRandom{n, seed};
  if (std::sscanf(spec.c_str(), "surface:%ld", &n) == 1) return SchemeSurface{n};
  throw std::invalid_argument("unknown scheme '" + spec + "' (use id|random:<n>|surface:<n>)");
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto parse_list = [](const std::string& v) {
    std::vector<long> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
  };
  if (key == "experiment") cfg.experiment = value;
  else if (key == "kernel") cfg.kernel = value;
  else if (key == "dim") cfg.dim = std::stoi(value);
  else if (key == "pair") cfg.pair = value;
  else if (key == "adm") cfg.adm = value;
  else if (key == "mode") cfg.mode = value;
  else if (key == "scheme") cfg.scheme = value;
  else if (key == "x0_count") cfg.x0_count = std::stol(value);
  else if (key == "y0_sizes") cfg.y0_sizes = parse_list(value);
  else if (key == "n_list") cfg.n_list = parse_list(value);
  else if (key == "leaf_cap") cfg.leaf_cap = std::stol(value);
  else if (key == "tol") cfg.tol = std::stod(value);
  else if (key == "entry_bound") cfg.entry_bound = std::stod(value);
  else if (key == "probe_count") cfg.probe_count = std::stol(value);
  else if (key == "random_proxy_count") cfg.random_proxy_count = std::stol(value);
  else if (key == "xd_count") cfg.xd_count = std::stol(value);
  else if (key == "yd_count") cfg.yd_count = std::stol(value);
  else if (key == "heavy_baseline_max") cfg.heavy_baseline_max = std::stol(value);
  else if (key == "time_reps") cfg.time_reps = std::stoi(value);
  else if (key == "n_max") cfg.n_max = std::stol(value);
  else if (key == "audit_budget") cfg.audit_budget = std::stol(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_entry(cfg, key, value);
  }
  return cfg;
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << cfg.experiment << "|" << cfg.kernel << "|" << cfg.dim << "|" << cfg.pair << "|" << cfg.adm
     << "|" << cfg.mode << "|" << cfg.scheme << "|" << cfg.x0_count << "|";
  for (long v : cfg.y0_sizes) os << v << ",";
  os << "|";
  for (long v : cfg.n_list) os << v << ",";
  os << "|" << cfg.leaf_cap << "|" << fmt(cfg.tol) << "|" << fmt(cfg.entry_bound) << "|"
     << cfg.probe_count << "|" << cfg.random_proxy_count << "|" << cfg.xd_count << "|"
     << cfg.yd_count << "|" << cfg.heavy_baseline_max << "|"
     << cfg.time_reps << "|" << cfg.n_max << "|" << cfg.audit_budget << "|" << cfg.seed;
  return fnv1a(os.str());
}

namespace {

ExperimentSummary exp1(const ExperimentConfig& cfg) {
  DomainPair pair = preset_pair(cfg.dim, cfg.pair);
  Kernel k = parse_kernel(cfg.kernel, cfg.dim, &pair);
  PointSet x0 = random_uniform_points(pair.source, cfg.x0_count, cfg.seed);
  PointSet probe = grid_points(pair.target, cfg.probe_count);

  ExperimentSummary sum;
  const uint64_t hash = config_hash(cfg);
  const std::string path = out_path(cfg, "exp1_ratios.csv");
  Csv csv(path, cfg.seed, hash, "scheme,rank,sort_index,row_index,ratio_max,ratio_avg");
  sum.files.push_back(path);

  struct SchemeRun {
    std::string name;
    ProxySchemeSpec spec;
  };
  std::vector<SchemeRun> runs = {{"id", id_params_from(cfg)},
                                 {"random", SchemeRandom{cfg.random_proxy_count, cfg.seed + 1}}};
  std::ostringstream line;
  line << "exp1 kernel=" << cfg.kernel;
  for (const auto& run : runs) {
    ProxySet proxy = select_proxy_any(k, pair, run.spec);
    const double eps = cfg.tol * std::sqrt(static_cast<double>(proxy.points.size()));
    CompressionResult res = compress_proxy(k, x0, proxy, Stop::threshold(eps), cfg.entry_bound);
    PointSet xp = grid_points(pair.source, 4 * proxy.points.size());
    ErrorReport rep = diagnostics(k, x0, res, probe, xp);

    std::vector<long> order;
    for (long i = 0; i < x0.size(); ++i)
      if (!rep.is_skeleton[i]) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](long a, long b) { return rep.ratio_max[a] < rep.ratio_max[b]; });
    for (size_t s = 0; s < order.size(); ++s)
      csv.row(run.name, res.rank, static_cast<long>(s), order[s], rep.ratio_max[order[s]],
              rep.ratio_avg[order[s]]);

    sum.metrics["deviation_" + run.name] = rep.representation_deviation;
    sum.metrics["max_ratio_" + run.name] = rep.max_ratio();
    sum.metrics["mean_ratio_" + run.name] = rep.mean_ratio();
    sum.metrics["yp_" + run.name] = static_cast<double>(proxy.points.size());
    sum.metrics["rank_" + run.name] = static_cast<double>(res.rank);
    line << " dev_" << run.name << "=" << fmt(rep.representation_deviation) << " |Yp_" << run.name
         << "|=" << proxy.points.size() << " rank_" << run.name << "=" << res.rank;
  }
  sum.summary_line = line.str();
  return sum;
}

ExperimentSummary exp2(const ExperimentConfig& cfg) {
  DomainPair pair = preset_pair(cfg.dim, cfg.pair);
  Kernel k = parse_kernel(cfg.kernel, cfg.dim, &pair);
  PointSet x0 = random_uniform_points(pair.source, cfg.x0_count, cfg.seed);

  ExperimentSummary sum;
  const uint64_t hash = config_hash(cfg);
  const std::string err_path = out_path(cfg, "exp2_error.csv");
  const std::string time_path = out_path(cfg, "exp2_time.csv");
  Csv err_csv(err_path, cfg.seed, hash, "method,kernel,y0_size,rank,avg_entry_error");
  Csv time_csv(time_path, cfg.seed, hash, "method,kernel,y0_size,rank,seconds");
  sum.files = {err_path, time_path};

  // reference compression fixes the rank for every method
  ProxySet proxy_id = select_proxy_id(k, pair, id_params_from(cfg));
  const double eps = cfg.tol * std::sqrt(static_cast<double>(proxy_id.points.size()));
  CompressionResult res_id;
  const double t_id = timed(cfg.time_reps, [&] {
    res_id = compress_proxy(k, x0, proxy_id, Stop::threshold(eps), cfg.entry_bound);
  });
  const long rank = res_id.rank;
  sum.metrics["rank"] = static_cast<double>(rank);
  sum.metrics["yp_id"] = static_cast<double>(proxy_id.points.size());

  ProxySet proxy_rand =
      select_proxy(k, pair, SchemeRandom{cfg.random_proxy_count, cfg.seed + 1});
  CompressionResult res_rand;
  const double t_rand = timed(cfg.time_reps, [&] {
    res_rand = compress_proxy(k, x0, proxy_rand, Stop::fixed_rank(rank), cfg.entry_bound);
  });

  for (long ny : cfg.y0_sizes) {
    PointSet y0 = random_uniform_points(pair.target, ny, cfg.seed + 100 + ny);
    Matrix exact = assemble(k, x0, y0);

    auto emit = [&](const std::string& method, double err, double seconds) {
      err_csv.row(method, cfg.kernel, ny, rank, err);
      time_csv.row(method, cfg.kernel, ny, rank, seconds);
      sum.metrics["err_" + method + "_" + std::to_string(ny)] = err;
      sum.metrics["sec_" + method + "_" + std::to_string(ny)] = seconds;
    };

    emit("proxy-id", avg_entry_error(exact, evaluate_approx(res_id, k, x0, y0)), t_id);
    emit("proxy-rand", avg_entry_error(exact, evaluate_approx(res_rand, k, x0, y0)), t_rand);

    CompressionResult refined;
    const double t_ref =
        timed(cfg.time_reps, [&] { refined = refine_weights(res_id, k, x0, y0); });
    emit("id-refined", avg_entry_error(exact, evaluate_approx(refined, k, x0, y0)), t_ref);

    IdResult direct;
    const double t_dir = timed(cfg.time_reps, [&] {
      direct = id_rows(exact, cfg.entry_bound, Stop::fixed_rank(rank));
    });
    emit("srrqr",
         avg_entry_error(exact, matmul(direct.u, exact.select_rows(direct.skeleton))), t_dir);

    auto row_oracle = [&](long i, double* out) {
      for (long j = 0; j < exact.cols(); ++j) out[j] = exact(i, j);
    };
    auto col_oracle = [&](long j, double* out) {
      for (long i = 0; i < exact.rows(); ++i) out[i] = exact(i, j);
    };
    AcaResult cross;
    const double t_aca = timed(cfg.time_reps, [&] {
      cross = aca(row_oracle, col_oracle, exact.rows(), exact.cols(), Stop::fixed_rank(rank));
    });
    emit("aca", avg_entry_error(exact, matmul(cross.u, cross.v)), t_aca);

    if (ny <= cfg.heavy_baseline_max) {
      SvdResult svd;
      const double t_svd = timed(cfg.time_reps, [&] { svd = truncated_svd(exact, rank); });
      Matrix us(exact.rows(), rank);
      for (long j = 0; j < rank; ++j)
        for (long i = 0; i < exact.rows(); ++i) us(i, j) = svd.u(i, j) * svd.sigma[j];
      emit("svd", avg_entry_error(exact, matmul(us, svd.v, false, true)), t_svd);
    }
  }
  std::ostringstream line;
  line << "exp2 kernel=" << cfg.kernel << " rank=" << rank << " |Yp_id|=" << proxy_id.points.size();
  sum.summary_line = line.str();
  return sum;
}

ExperimentSummary exp3(const ExperimentConfig& cfg) {
  DomainPair pair = preset_pair(cfg.dim, cfg.pair);
  Kernel k = parse_kernel(cfg.kernel, cfg.dim, &pair);
  PointSet x0 = random_uniform_points(pair.source, cfg.x0_count, cfg.seed);

  ExperimentSummary sum;
  const uint64_t hash = config_hash(cfg);
  const std::string path = out_path(cfg, "exp3_selection.csv");
  Csv csv(path, cfg.seed, hash, "scheme,yp_size,kernel,y0_size,rank,avg_entry_error");
  sum.files.push_back(path);

  ProxySet proxy_id = select_proxy_id(k, pair, id_params_from(cfg));
  const long yp_id = proxy_id.points.size();
  const double eps = cfg.tol * std::sqrt(static_cast<double>(yp_id));
  CompressionResult res_id = compress_proxy(k, x0, proxy_id, Stop::threshold(eps), cfg.entry_bound);
  const long rank = res_id.rank;
  sum.metrics["yp_id"] = static_cast<double>(yp_id);
  sum.metrics["rank"] = static_cast<double>(rank);

  struct Variant {
    std::string name;
    CompressionResult res;
  };
  std::vector<Variant> variants;
  variants.push_back({"id", std::move(res_id)});
  int salt = 0;
  for (double factor : {0.5, 1.0, 2.0}) {
    const long count = std::max<long>(rank, static_cast<long>(std::llround(yp_id * factor)));
    ProxySet pr = select_proxy(k, pair, SchemeRandom{count, cfg.seed + 200 + salt});
    variants.push_back({"random-" + std::to_string(count),
                        compress_proxy(k, x0, pr, Stop::fixed_rank(rank), cfg.entry_bound)});
    ProxySet ps = select_proxy(k, pair, SchemeSurface{count});
    variants.push_back({"surface-" + std::to_string(count),
                        compress_proxy(k, x0, ps, Stop::fixed_rank(rank), cfg.entry_bound)});
    ++salt;
  }

  for (long ny : cfg.y0_sizes) {
    PointSet y0 = random_uniform_points(pair.target, ny, cfg.seed + 300 + ny);
    Matrix exact = assemble(k, x0, y0);
    for (const auto& v : variants) {
      const double err = avg_entry_error(exact, evaluate_approx(v.res, k, x0, y0));
      csv.row(v.name, v.res.proxy.points.size(), cfg.kernel, ny, v.res.rank, err);
      sum.metrics["err_" + v.name + "_" + std::to_string(ny)] = err;
    }
  }
  std::ostringstream line;
  line << "exp3 kernel=" << cfg.kernel << " |Yp_id|=" << yp_id << " rank=" << rank;
  sum.summary_line = line.str();
  return sum;
}

ExperimentSummary exp4(const ExperimentConfig& cfg) {
  DomainPair pair = preset_pair(cfg.dim, cfg.pair);
  Kernel k = parse_kernel(cfg.kernel, cfg.dim, &pair);
  PointSet x0 = random_uniform_points(pair.source, cfg.x0_count, cfg.seed);
  PointSet probe = grid_points(pair.target, cfg.probe_count);

  ExperimentSummary sum;
  const uint64_t hash = config_hash(cfg);
  const std::string path = out_path(cfg, "exp4_error_field.csv");
  Csv csv(path, cfg.seed, hash, "variant,rank,yp_size,y1,y2,mean_abs_error");
  sum.files.push_back(path);

  struct Variant {
    std::string name;
    IdSelectParams params;
  };
  IdSelectParams adaptive = id_params_from(cfg);
  adaptive.adaptive_near_fraction = 0.5;
  adaptive.adaptive_band = Box::centered_cube(cfg.dim, 2.0);
  std::vector<Variant> variants = {{"default", id_params_from(cfg)}, {"adaptive", adaptive}};

  std::ostringstream line;
  line << "exp4 kernel=" << cfg.kernel;
  for (const auto& v : variants) {
    ProxySet proxy = select_proxy_id(k, pair, v.params);
    const double eps = cfg.tol * std::sqrt(static_cast<double>(proxy.points.size()));
    CompressionResult res = compress_proxy(k, x0, proxy, Stop::threshold(eps), cfg.entry_bound);
    std::vector<double> field = mean_abs_error_field(k, x0, res, probe);
    double field_max = 0.0;
    for (long j = 0; j < probe.size(); ++j) {
      const double* p = probe.point(j);
      csv.row(v.name, res.rank, proxy.points.size(), p[0], cfg.dim > 1 ? p[1] : 0.0, field[j]);
      field_max = std::max(field_max, field[j]);
    }
    sum.metrics["max_field_" + v.name] = field_max;
    sum.metrics["yp_" + v.name] = static_cast<double>(proxy.points.size());
    sum.metrics["rank_" + v.name] = static_cast<double>(res.rank);
    line << " " << v.name << ": |Yp|=" << proxy.points.size() << " rank=" << res.rank
         << " max_mean_err=" << fmt(field_max);
  }
  sum.summary_line = line.str();
  return sum;
}

ExperimentSummary exp5(const ExperimentConfig& cfg) {
  const Admissibility kind =
      cfg.adm == "weak" ? Admissibility::Weak : Admissibility::Strong;
  BuildMode mode = BuildMode::Proxy;
  if (cfg.mode == "hybrid") mode = BuildMode::Hybrid;
  else if (cfg.mode == "srrqr") mode = BuildMode::DirectSrrqr;
  else if (cfg.mode != "proxy") throw std::invalid_argument("exp5: unknown mode " + cfg.mode);
  if (kind == Admissibility::Weak && cfg.kernel == "inv-dist" && mode == BuildMode::Proxy)
    throw std::invalid_argument(
        "exp5: inv-dist under weak admissibility requires mode=hybrid (the kernel is singular on "
        "the domain boundary)");

  ExperimentSummary sum;
  const uint64_t hash = config_hash(cfg);
  const std::string stats_path = out_path(cfg, "exp5_stats.csv");
  const std::string time_path = out_path(cfg, "exp5_time.csv");
  Csv stats_csv(stats_path, cfg.seed, hash,
                "N,kernel,adm,mode,S_N_mb,S_inadm_mb,S_total_mb,E,max_rank,subsampled");
  Csv time_csv(time_path, cfg.seed, hash, "N,kernel,adm,mode,build_seconds,proxy_seconds");
  sum.files = {stats_path, time_path};

  Kernel k = parse_kernel(cfg.kernel, cfg.dim, nullptr);
  std::ostringstream line;
  line << "exp5 kernel=" << cfg.kernel << " adm=" << cfg.adm << " mode=" << cfg.mode;
  for (long n : cfg.n_list) {
    if (n > cfg.n_max)
      throw std::invalid_argument("exp5: N exceeds n_max; raise n_max explicitly for large runs");
    const double edge = std::pow(static_cast<double>(n), 1.0 / cfg.dim);
    Box domain(std::vector<double>(cfg.dim, 0.0), std::vector<double>(cfg.dim, edge));
    PointSet cloud = random_uniform_points(domain, n, cfg.seed + static_cast<uint64_t>(n));
    PartitionTree tree = build_tree(cloud, cfg.leaf_cap);
    ProxyCache cache;
    ProxySchemeSpec scheme = parse_scheme(cfg.scheme, cfg.seed + 5);
    if (std::holds_alternative<IdSelectParams>(scheme)) scheme = id_params_from(cfg);
    auto built = build_h2(k, std::move(tree), kind, scheme, cfg.tol, cfg.entry_bound, mode,
                          &cache);
    BuildStats audited = audit(built.first, k, cfg.audit_budget, cfg.seed + 17);
    long max_rank = 0;
    for (long r : built.second.level_rank_max) max_rank = std::max(max_rank, r);
    stats_csv.row(n, cfg.kernel, cfg.adm, cfg.mode, dense_storage_mb(n),
                  audited.storage_dense_mb, audited.storage_total_mb, audited.audited_error,
                  max_rank, static_cast<long>(audited.audit_subsampled));
    time_csv.row(n, cfg.kernel, cfg.adm, cfg.mode, built.second.seconds_total,
                 built.second.seconds_proxy);
    const std::string tag = std::to_string(n);
    sum.metrics["E_" + tag] = audited.audited_error;
    sum.metrics["stotal_" + tag] = audited.storage_total_mb;
    sum.metrics["sinadm_" + tag] = audited.storage_dense_mb;
    sum.metrics["sn_" + tag] = dense_storage_mb(n);
    sum.metrics["sec_" + tag] = built.second.seconds_total;
    sum.metrics["secproxy_" + tag] = built.second.seconds_proxy;
    sum.metrics["subsampled_" + tag] = audited.audit_subsampled ? 1.0 : 0.0;
    line << " E(" << n << ")=" << fmt(audited.audited_error);
  }
  sum.summary_line = line.str();
  return sum;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "exp1") return exp1(cfg);
  if (cfg.experiment == "exp2") return exp2(cfg);
  if (cfg.experiment == "exp3") return exp3(cfg);
  if (cfg.experiment == "exp4") return exp4(cfg);
  if (cfg.experiment == "exp5") return exp5(cfg);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "' (exp1..exp5)");
}

}  // namespace kernelskel

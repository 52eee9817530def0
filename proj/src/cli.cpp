#include "optidesign/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "optidesign/certificates.hpp"
#include "optidesign/datagen.hpp"
#include "optidesign/errors.hpp"
#include "optidesign/greedy.hpp"
#include "optidesign/oracle.hpp"
#include "optidesign/parallel.hpp"
#include "optidesign/pool_io.hpp"
#include "optidesign/recsys.hpp"
#include "optidesign/sweep.hpp"

namespace optidesign::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Either --pool FILE or the synthetic-pool flags, never both.
struct PoolInput {
  std::string path;
  SynthSpec spec;
  std::optional<double> snr_db;
  bool synth_flag = false;
  CLI::Option* pool_opt = nullptr;
  std::vector<CLI::Option*> synth_opts;

  void attach(CLI::App* app, bool with_pool = true) {
    if (with_pool) pool_opt = app->add_option("--pool", path, "Pool JSON file")->check(CLI::ExistingFile);
    synth_opts = {
        app->add_flag("--synth", synth_flag, "Use a synthetic pool (defaults below)"),
        app->add_option("--p", spec.p, "Synthetic: parameter dimension")->check(CLI::PositiveNumber),
        app->add_option("--n-e", spec.n_e, "Synthetic: rows per experiment")->check(CLI::PositiveNumber),
        app->add_option("--pool-size", spec.pool_size, "Synthetic: number of experiments")
            ->check(CLI::PositiveNumber),
        app->add_option("--noise-var", spec.noise_var, "Synthetic: noise variance")
            ->check(CLI::PositiveNumber),
        app->add_option("--snr-db", snr_db, "Synthetic: SNR in dB, 10 log10(n_e / noise_var)"),
        app->add_option("--prior-var", spec.prior_var, "Synthetic: prior variance")
            ->check(CLI::PositiveNumber),
        app->add_option("--synth-seed", spec.seed, "Synthetic: generator seed"),
    };
    synth_opts[5]->excludes(synth_opts[4]);
  }

  bool synthetic() const {
    return std::any_of(synth_opts.begin(), synth_opts.end(), [](CLI::Option* o) { return o->count() > 0; });
  }

  Pool resolve(json& config) {
    const bool synth = synthetic();
    const bool from_file = pool_opt != nullptr && pool_opt->count() > 0;
    if (from_file && synth) throw UsageError("--pool and synthetic-pool flags are mutually exclusive");
    if (!from_file && !synth) throw UsageError("an input is required: --pool FILE or --synth");
    if (!synth) {
      config["pool"] = path;
      return load_pool(path);
    }
    if (snr_db) spec.noise_var = snr_db_to_noise_var(*snr_db, spec.n_e);
    config["synth"] = {{"p", spec.p},
                       {"n_e", spec.n_e},
                       {"pool_size", spec.pool_size},
                       {"noise_var", spec.noise_var},
                       {"prior_var", spec.prior_var},
                       {"seed", spec.seed}};
    return synth_pool(spec);
  }
};

struct Output {
  std::string path;
  void attach(CLI::App* app) { app->add_option("--out", path, "Output file (default: standard output)"); }

  void write(const std::string& text, std::ostream& out) const {
    if (path.empty()) {
      out << text;
    } else {
      write_file_atomic(path, text);
    }
  }
};

void emit(const std::string& command, json config, const std::optional<std::string>& hash, json result,
          Clock::time_point start, const Output& output, std::ostream& out) {
  json doc = {{"tool", "optidesign"}, {"version", OPTIDESIGN_VERSION}, {"command", command},
              {"config", std::move(config)}};
  doc["pool_hash"] = hash ? json(*hash) : json();
  doc["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
  doc["result"] = std::move(result);
  output.write(doc.dump(2) + "\n", out);
}

CLI::Option* add_criterion(CLI::App* app, std::string& value) {
  return app->add_option("--criterion,-c", value, "A, E or D")
      ->check(CLI::IsMember({"A", "E", "D"}, CLI::ignore_case))
      ->capture_default_str();
}

json trace_json(const GreedyTrace& t) {
  json steps = json::array();
  for (const GreedyStep& s : t.steps) {
    steps.push_back({{"iteration", s.iteration}, {"id", s.chosen}, {"gain", s.gain}, {"cost_after", s.cost_after}});
  }
  return {{"criterion", to_string(t.criterion)},
          {"ell", t.ell},
          {"with_replacement", t.with_replacement},
          {"steps", std::move(steps)},
          {"final_design", design_to_json(t.final_design)},
          {"final_cost", t.final_cost()}};
}

std::string design_summary(const Design& d) {
  std::ostringstream s;
  s << '{';
  bool first = true;
  for (const auto& [id, c] : d.counts()) {
    s << (first ? "" : ", ") << id << ':' << c;
    first = false;
  }
  s << '}';
  return s.str();
}

// Pulls the pool hash and final cost out of a `design` output and checks it
// belongs to the same pool and criterion.
double greedy_cost_from_trace(const std::string& trace_path, const std::string& hash, Criterion c) {
  json doc;
  try {
    doc = json::parse(read_file(trace_path));
  } catch (const json::exception& e) {
    throw ParseError(trace_path + ": " + e.what());
  }
  if (!doc.contains("pool_hash") || !doc["pool_hash"].is_string() || !doc.contains("result")) {
    throw ParseError(trace_path + ": not a design output");
  }
  const std::string trace_hash = doc["pool_hash"].get<std::string>();
  if (trace_hash != hash) {
    throw InvalidArgument("pool hash mismatch: trace " + trace_hash + ", pool " + hash);
  }
  const json& r = doc["result"];
  if (!r.contains("criterion") || parse_criterion(r["criterion"].get<std::string>()) != c) {
    throw InvalidArgument("trace criterion does not match --criterion");
  }
  return r.at("final_cost").get<double>();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_threads_from_env();
  CLI::App app{"Greedy Bayesian experimental design with approximate-supermodularity certificates",
               "optidesign"};
  app.set_version_flag("--version", std::string(OPTIDESIGN_VERSION));
  app.require_subcommand(1);

  Output output;
  PoolInput design_in, certify_in, audit_in, oracle_in, synth_in;
  std::string criterion_s = "A";
  int k = 0;
  std::optional<int> ell_opt;
  bool no_replacement = false;
  bool serial = false;

  // design
  auto* design_cmd = app.add_subcommand("design", "Run the greedy design");
  design_in.attach(design_cmd);
  add_criterion(design_cmd, criterion_s);
  design_cmd->add_option("--k", k, "Design size")->required()->check(CLI::NonNegativeNumber);
  design_cmd->add_option("--ell", ell_opt, "Greedy steps (default: k)")->check(CLI::NonNegativeNumber);
  design_cmd->add_flag("--no-replacement", no_replacement, "Use each experiment at most once");
  design_cmd->add_flag("--serial", serial, "Use the serial reference kernels");
  output.attach(design_cmd);

  // certify
  bool tightened = false;
  std::string trace_path;
  std::optional<double> f_star;
  auto* certify_cmd = app.add_subcommand("certify", "Closed-form certificates from pool-level bounds");
  certify_in.attach(certify_cmd);
  add_criterion(certify_cmd, criterion_s);
  certify_cmd->add_option("--k", k, "Comparison design size")->required()->check(CLI::PositiveNumber);
  certify_cmd->add_option("--ell", ell_opt, "Greedy steps (default: k)")->check(CLI::PositiveNumber);
  certify_cmd->add_flag("--tightened", tightened, "Use the per-experiment tightened alpha bound");
  certify_cmd->add_flag("--no-replacement", no_replacement, "Designs without replacement");
  certify_cmd->add_option("--trace", trace_path, "Output of `design` to certify")->check(CLI::ExistingFile);
  certify_cmd->add_option("--f-star", f_star, "Known optimal cost f(D*), if any");
  output.attach(certify_cmd);

  // audit
  std::string audit_what = "both";
  bool fast = false;
  std::uint64_t max_triples = AuditOptions{}.max_triples;
  auto* audit_cmd = app.add_subcommand("audit", "Exhaustive alpha/epsilon tables (small pools)");
  audit_in.attach(audit_cmd);
  add_criterion(audit_cmd, criterion_s);
  audit_cmd->add_option("--k", k, "Comparison design size")->required()->check(CLI::PositiveNumber);
  audit_cmd->add_option("--ell", ell_opt, "Greedy steps (default: k)")->check(CLI::PositiveNumber);
  audit_cmd->add_option("--what", audit_what, "alpha, epsilon or both")
      ->check(CLI::IsMember({"alpha", "epsilon", "both"}));
  audit_cmd->add_flag("--fast", fast, "Rank-update gains instead of recomputed costs");
  audit_cmd->add_option("--max-triples", max_triples, "Guard on (A, B, u) triples per pair");
  audit_cmd->add_flag("--serial", serial, "Use the serial reference kernels");
  output.attach(audit_cmd);

  // oracle
  bool with_tables = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force optimal design (small pools)");
  oracle_in.attach(oracle_cmd);
  add_criterion(oracle_cmd, criterion_s);
  oracle_cmd->add_option("--k", k, "Design size bound")->required()->check(CLI::NonNegativeNumber);
  oracle_cmd->add_flag("--no-replacement", no_replacement, "Use each experiment at most once");
  oracle_cmd->add_flag("--tables", with_tables, "Also emit exhaustive alpha/epsilon tables");
  oracle_cmd->add_option("--ell", ell_opt, "Greedy steps for --tables (default: k)")->check(CLI::PositiveNumber);
  oracle_cmd->add_flag("--serial", serial, "Use the serial reference kernels");
  output.attach(oracle_cmd);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic pool as JSON");
  synth_in.attach(synth_cmd, /*with_pool=*/false);
  output.attach(synth_cmd);

  // bench
  SweepConfig sweep;
  double snr_min = -20, snr_max = 10, snr_step = 2;
  auto* bench_cmd = app.add_subcommand("bench", "Figure sweeps (CSV)");
  bench_cmd->require_subcommand(1);
  auto* fig_a = bench_cmd->add_subcommand("fig-a", "Equivalent alpha over SNR (A criterion)");
  auto* fig_e = bench_cmd->add_subcommand("fig-e", "Equivalent epsilon over SNR (E criterion)");
  for (auto* fig : {fig_a, fig_e}) {
    fig->add_option("--p", sweep.p)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--n-e", sweep.n_e)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--pool-size", sweep.pool_size)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--k", sweep.k)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--ell", ell_opt, "Greedy steps (default: k)")->check(CLI::PositiveNumber);
    fig->add_option("--prior-var", sweep.prior_var)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--snr-min", snr_min)->capture_default_str();
    fig->add_option("--snr-max", snr_max)->capture_default_str();
    fig->add_option("--snr-step", snr_step)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--seeds", sweep.seeds)->check(CLI::PositiveNumber)->capture_default_str();
    fig->add_option("--seed", sweep.base_seed, "Base seed; trial s uses seed + s")->capture_default_str();
    fig->add_flag("--tightened", sweep.tightened, "Tightened alpha bound (fig-a)");
    fig->add_flag("--serial", serial, "Run trials serially");
    output.attach(fig);
  }

  // recsys
  std::string ratings_path;
  LowRankSpec lowrank;
  RecsysPoolOptions rec_opts;
  std::string impute_s = "zero";
  int n_train = 100, n_test = 40, trials = 20;
  std::uint64_t seed = 0;
  auto* recsys_cmd = app.add_subcommand("recsys", "Cold-start recommender: greedy vs random elicitation");
  auto* ratings_opt = recsys_cmd->add_option("--ratings", ratings_path, "Ratings CSV (user,movie,rating[,genre])")
                          ->check(CLI::ExistingFile);
  std::vector<CLI::Option*> lowrank_opts = {
      recsys_cmd->add_option("--users", lowrank.users, "Synthetic: users")->check(CLI::PositiveNumber),
      recsys_cmd->add_option("--movies", lowrank.movies, "Synthetic: movies")->check(CLI::PositiveNumber),
      recsys_cmd->add_option("--rank", lowrank.rank, "Synthetic: rank")->check(CLI::PositiveNumber),
      recsys_cmd->add_option("--noise-sd", lowrank.noise_sd, "Synthetic: rating noise")->check(CLI::NonNegativeNumber),
      recsys_cmd->add_option("--density", lowrank.density, "Synthetic: observed fraction"),
      recsys_cmd->add_option("--genres", lowrank.genres, "Synthetic: genre labels")->check(CLI::NonNegativeNumber),
  };
  for (auto* o : lowrank_opts) o->excludes(ratings_opt);
  recsys_cmd->add_option("--train", n_train, "Training users")->check(CLI::PositiveNumber)->capture_default_str();
  recsys_cmd->add_option("--test", n_test, "Test users")->check(CLI::PositiveNumber)->capture_default_str();
  recsys_cmd->add_option("--k", k, "Movies to ask")->required()->check(CLI::PositiveNumber);
  recsys_cmd->add_option("--trials", trials, "Paired trials")->check(CLI::PositiveNumber)->capture_default_str();
  recsys_cmd->add_option("--seed", seed, "Base seed; trial t uses seed + t")->capture_default_str();
  recsys_cmd->add_option("--noise-var", rec_opts.noise_var, "Observation noise variance")
      ->check(CLI::PositiveNumber)->capture_default_str();
  recsys_cmd->add_option("--prior-var", rec_opts.prior_var, "Prior variance")
      ->check(CLI::PositiveNumber)->capture_default_str();
  recsys_cmd->add_option("--impute", impute_s, "Missing training ratings: zero or mean")
      ->check(CLI::IsMember({"zero", "mean"}))->capture_default_str();
  recsys_cmd->add_flag("--serial", serial, "Use the serial reference kernels");
  output.attach(recsys_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const auto start = Clock::now();
  const Execution exec = serial ? Execution::serial : Execution::parallel;
  const bool with_replacement = !no_replacement;
  try {
    const Criterion criterion = parse_criterion(criterion_s);
    json config;

    if (design_cmd->parsed()) {
      const Pool pool = design_in.resolve(config);
      const int ell = ell_opt.value_or(k);
      config.update({{"criterion", to_string(criterion)}, {"k", k}, {"ell", ell}, {"with_replacement", with_replacement}});
      const GreedyTrace t = greedy_design(pool, criterion, ell, with_replacement, exec);
      err << "design: " << to_string(criterion) << ", " << ell << " steps, final design "
          << design_summary(t.final_design) << ", cost " << t.final_cost() << "\n";
      emit("design", config, pool_hash(pool), trace_json(t), start, output, out);
      return kExitOk;
    }

    if (certify_cmd->parsed()) {
      const Pool pool = certify_in.resolve(config);
      const int ell = ell_opt.value_or(k);
      const std::string hash = pool_hash(pool);
      config.update({{"criterion", to_string(criterion)}, {"k", k}, {"ell", ell}, {"tightened", tightened},
                     {"with_replacement", with_replacement}});
      const Provenance prov{hash, criterion, k, ell};
      std::optional<double> greedy_cost;
      if (!trace_path.empty()) {
        config["trace"] = trace_path;
        greedy_cost = greedy_cost_from_trace(trace_path, hash, criterion);
      }
      json result;
      std::optional<double> bound;
      if (criterion == Criterion::A) {
        const AlphaCertificate cert = alpha_guarantee(pool_alpha_fn(pool, tightened, with_replacement), k, ell);
        result = {{"bound_params", to_json(bound_params(pool))}, {"certificate", to_json(cert, prov)}};
        if (f_star) bound = cert.factor_product * *f_star;
        err << "certify: A, factor_product " << cert.factor_product << ", alpha_bar " << cert.alpha_bar;
        if (cert.equivalent_alpha) err << ", equivalent alpha " << *cert.equivalent_alpha;
        err << "\n";
      } else if (criterion == Criterion::E) {
        const EpsilonCertificate cert = epsilon_guarantee(pool_epsilon_fn(pool), k, ell, f_star);
        result = {{"bound_params", to_json(bound_params(pool))}, {"certificate", to_json(cert, prov)}};
        if (f_star) bound = cert.product_bound(*f_star);
        err << "certify: E, epsilon_bar " << cert.epsilon_bar << ", equivalent epsilon "
            << cert.equivalent_epsilon << "\n";
      } else {
        const DGuarantee d = d_guarantee(k);
        result = {{"certificate", to_json(d, prov)}};
        if (f_star) bound = d.finite * *f_star;
        err << "certify: D, factor " << d.finite << "\n";
      }
      if (greedy_cost) result["greedy_cost"] = *greedy_cost;
      if (f_star) {
        result["f_star"] = *f_star;
        result["bound"] = *bound;
        if (greedy_cost) result["holds"] = *greedy_cost <= *bound + 1e-9;
      }
      emit("certify", config, hash, result, start, output, out);
      return kExitOk;
    }

    if (audit_cmd->parsed()) {
      const Pool pool = audit_in.resolve(config);
      const int ell = ell_opt.value_or(k);
      const bool want_alpha = audit_what != "epsilon";
      const bool want_eps = audit_what != "alpha";
      config.update({{"criterion", to_string(criterion)}, {"k", k}, {"ell", ell}, {"what", audit_what},
                     {"gain_path", fast ? "fast" : "recompute"}});
      AuditOptions opts;
      opts.path = fast ? GainPath::fast : GainPath::recompute;
      opts.max_triples = max_triples;
      opts.exec = exec;
      const AuditTables tables = audit_tables(pool, criterion, k, ell, want_alpha, want_eps, opts);
      const std::string hash = pool_hash(pool);
      const Provenance prov{hash, criterion, k, ell};
      json result;
      if (want_alpha) {
        json rows = json::array();
        for (const AuditEntry& e : tables.alpha) rows.push_back(to_json(e, "alpha"));
        result["alpha"] = std::move(rows);
        try {
          const AlphaCertificate cert =
              alpha_guarantee([&](int a, int b) { return tables.alpha_at(a, b); }, k, ell);
          result["alpha_certificate"] = to_json(cert, prov);
          err << "audit: alpha_bar " << cert.alpha_bar << ", factor_product " << cert.factor_product << "\n";
        } catch (const InvalidAlpha& e) {
          result["alpha_certificate"] = nullptr;
          err << "audit: no alpha certificate (" << e.what() << ")\n";
        }
      }
      if (want_eps) {
        json rows = json::array();
        for (const AuditEntry& e : tables.epsilon) rows.push_back(to_json(e, "epsilon"));
        result["epsilon"] = std::move(rows);
        const EpsilonCertificate cert =
            epsilon_guarantee([&](int a, int b) { return tables.epsilon_at(a, b); }, k, ell);
        result["epsilon_certificate"] = to_json(cert, prov);
        err << "audit: epsilon_bar " << cert.epsilon_bar << "\n";
      }
      emit("audit", config, hash, result, start, output, out);
      return kExitOk;
    }

    if (oracle_cmd->parsed()) {
      const Pool pool = oracle_in.resolve(config);
      config.update({{"criterion", to_string(criterion)}, {"k", k}, {"with_replacement", with_replacement}});
      const OptimalDesign opt = optimal_design_bruteforce(pool, criterion, k, with_replacement, exec);
      json result = to_json(opt);
      if (with_tables) {
        const int ell = ell_opt.value_or(k);
        config["ell"] = ell;
        AuditOptions opts;
        opts.exec = exec;
        const AuditTables tables = audit_tables(pool, criterion, std::max(k, 1), ell, true, true, opts);
        json alpha = json::array(), eps = json::array();
        for (const AuditEntry& e : tables.alpha) alpha.push_back(to_json(e, "alpha"));
        for (const AuditEntry& e : tables.epsilon) eps.push_back(to_json(e, "epsilon"));
        result["alpha"] = std::move(alpha);
        result["epsilon"] = std::move(eps);
      }
      err << "oracle: optimal design " << design_summary(opt.design) << ", cost " << opt.value << " ("
          << opt.enumerated << " designs)\n";
      emit("oracle", config, pool_hash(pool), result, start, output, out);
      return kExitOk;
    }

    if (synth_cmd->parsed()) {
      synth_in.synth_flag = true;
      const Pool pool = synth_in.resolve(config);
      output.write(pool_to_json(pool).dump(1) + "\n", out);
      err << "synth: " << pool.size() << " experiments, p = " << pool.p() << ", hash " << pool_hash(pool) << "\n";
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      sweep.criterion = fig_a->parsed() ? Criterion::A : Criterion::E;
      sweep.ell = ell_opt.value_or(sweep.k);
      sweep.snr_db.clear();
      if (snr_max < snr_min) throw UsageError("--snr-max must be >= --snr-min");
      for (int i = 0;; ++i) {
        const double db = snr_min + i * snr_step;
        if (db > snr_max + 1e-9) break;
        sweep.snr_db.push_back(db);
      }
      const std::vector<SweepRow> rows = run_sweep(sweep, exec);
      output.write(sweep_csv(rows), out);
      const char* name = sweep.criterion == Criterion::A ? "alpha" : "epsilon";
      for (const SweepPoint& pt : sweep_medians(rows)) {
        err << "snr " << pt.snr_db << " dB: median equivalent " << name << " " << pt.median << "\n";
      }
      return kExitOk;
    }

    if (recsys_cmd->parsed()) {
      rec_opts.impute = parse_impute(impute_s);
      RatingsTable table;
      if (!ratings_path.empty()) {
        table = load_ratings(ratings_path);
        config["ratings"] = ratings_path;
      } else {
        lowrank.users = std::max(lowrank.users, n_train + n_test);
        lowrank.seed = seed;
        table = synth_ratings(lowrank);
        config["synthetic_ratings"] = {{"users", lowrank.users}, {"movies", lowrank.movies},
                                       {"rank", lowrank.rank}, {"noise_sd", lowrank.noise_sd},
                                       {"density", lowrank.density}, {"genres", lowrank.genres},
                                       {"seed", lowrank.seed}};
      }
      config.update({{"train", n_train}, {"test", n_test}, {"k", k}, {"trials", trials}, {"seed", seed},
                     {"noise_var", rec_opts.noise_var}, {"prior_var", rec_opts.prior_var}, {"impute", impute_s}});
      json rows = json::array();
      int wins = 0;
      std::vector<double> g_mae, r_mae;
      for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
        const UserSplit split = split_users(table, n_train, n_test, trial_seed);
        const RecsysComparison cmp = compare_recsys(table, split, k, derive_seed(trial_seed, 1), rec_opts, exec);
        json row = {{"seed", trial_seed},
                    {"greedy_mae", cmp.greedy.mae},
                    {"random_mae", cmp.random.mae},
                    {"greedy_design", design_to_json(cmp.trace.final_design)}};
        row["greedy_genre_error"] = cmp.greedy.genre_error_rate ? json(*cmp.greedy.genre_error_rate) : json();
        row["random_genre_error"] = cmp.random.genre_error_rate ? json(*cmp.random.genre_error_rate) : json();
        rows.push_back(std::move(row));
        if (cmp.greedy.mae < cmp.random.mae) ++wins;
        g_mae.push_back(cmp.greedy.mae);
        r_mae.push_back(cmp.random.mae);
      }
      json result = {{"trials", std::move(rows)},
                     {"greedy_wins", wins},
                     {"median_greedy_mae", median(g_mae)},
                     {"median_random_mae", median(r_mae)}};
      err << "recsys: greedy MAE below random in " << wins << "/" << trials << " trials (median "
          << median(g_mae) << " vs " << median(r_mae) << ")\n";
      emit("recsys", config, std::nullopt, result, start, output, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace optidesign::cli

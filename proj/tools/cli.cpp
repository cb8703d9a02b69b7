#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chaosbandit/analysis.hpp"
#include "chaosbandit/bandit.hpp"
#include "chaosbandit/error.hpp"
#include "chaosbandit/experiment.hpp"
#include "chaosbandit/output.hpp"
#include "chaosbandit/signal.hpp"
#include "chaosbandit/threshold_tree.hpp"
#include "json.hpp"

#ifndef CHAOSBANDIT_VERSION
#define CHAOSBANDIT_VERSION "0.0.0"
#endif

namespace chaosbandit::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kEnvPrefix = "CHAOSBANDIT_";

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  return out;
}

// All knobs of every subcommand. Each subcommand owns a separate instance so
// per-subcommand defaults do not collide.
struct Settings {
  // source
  std::string source = "uniform";
  std::vector<std::string> sources;  // sweep-ds only
  std::uint64_t seed = 1;
  std::size_t length = 1'000'000;
  double sigma_span = 6.0;
  double cutoff_ghz = 10.0;
  std::size_t ar_lag = 5;
  double ar_radius = 0.85;
  std::optional<double> ar_a1;
  std::optional<double> ar_a2;
  double freq1_ghz = 6.5;
  double freq2_ghz = 6.5 / 1.6180339887498949;
  double dither = 0.05;
  std::string trace_path;
  std::optional<double> period_ps;

  // experiment
  std::string problem = "canonical:2";
  std::optional<std::uint64_t> reward_seed;
  std::size_t plays = 500;
  std::size_t reps = 1000;
  std::size_t ds = 5;
  std::size_t dl = 10;
  int levels_k = 8;
  double delta = 1.0;
  double alpha = 0.99;
  double omega_max = 100.0;
  std::optional<double> omega;
  bool no_wrap = false;
  unsigned jobs = 0;
  bool dump_tree = false;

  // sweeps
  std::size_t at_cycle = 100;
  std::vector<std::size_t> ds_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> dl_values{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> types{1, 2, 3, 4};
  std::vector<int> k_values{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> p1_values{0.5, 0.7};

  // scaling
  std::vector<std::size_t> arms{2, 4, 8, 16, 32, 64};
  double level = 0.95;
  std::size_t max_plays = 0;
  std::size_t max_reps = 0;

  // analyze
  std::string what;
  std::size_t max_lag = 20;
  std::size_t window = 20;
  std::vector<std::size_t> taus{1, 10, 100, 1000, 10000};
  std::size_t walks = 100;
  std::size_t horizon = 100'000;
  std::size_t lag_d = 10'000;
  std::string pairing = "pooled";

  // output
  std::string out_dir = ".";
  std::string output;
  std::string config_path;
  int verbose = 0;
};

// JSON <-> field glue for one option. `recorded` options go into the
// resolved-config header.
struct Entry {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const json&)> load;
  std::function<json()> save;
  bool recorded = true;
};

template <class T>
json to_json_value(const T& v) {
  return json(v);
}
template <class T>
json to_json_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}
template <class T>
void from_json_value(const json& j, T& v) {
  v = j.get<T>();
}
template <class T>
void from_json_value(const json& j, std::optional<T>& v) {
  if (j.is_null()) {
    v.reset();
  } else {
    v = j.get<T>();
  }
}

class Registry {
 public:
  explicit Registry(CLI::App& app) : app_(app) {}

  CLI::App& app() { return app_; }

  template <class T>
  CLI::Option* add(const std::string& key, T& field, const std::string& desc, bool recorded = true) {
    CLI::Option* opt = app_.add_option("--" + key, field, desc)->envname(env_name(key));
    if constexpr (!std::is_same_v<T, std::string> && requires { field.begin(); }) {
      opt->delimiter(',');
    }
    push(key, opt, field, recorded);
    return opt;
  }

  template <class T>
  CLI::Option* add(const std::string& key, std::optional<T>& field, const std::string& desc) {
    CLI::Option* opt =
        app_.add_option_function<T>("--" + key, [&field](const T& v) { field = v; }, desc)
            ->envname(env_name(key));
    push(key, opt, field, true);
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& field, const std::string& desc) {
    CLI::Option* opt = app_.add_flag("--" + key, field, desc)->envname(env_name(key));
    push(key, opt, field, true);
    return opt;
  }

  void apply_config(const json& doc) {
    if (!doc.is_object()) throw InvalidArgument("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(),
                             [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end())
        throw InvalidArgument("unknown config key '" + key + "' for this subcommand");
      if (it->option->count() > 0) continue;  // flag or environment wins
      try {
        it->load(value);
      } catch (const json::exception& e) {
        throw InvalidArgument("config key '" + key + "': " + e.what());
      }
    }
  }

  json resolved() const {
    json doc = json::object();
    for (const auto& e : entries_)
      if (e.recorded) doc[e.key] = e.save();
    return doc;
  }

 private:
  template <class T>
  void push(const std::string& key, CLI::Option* opt, T& field, bool recorded) {
    entries_.push_back({key, opt, [&field](const json& j) { from_json_value(j, field); },
                        [&field] { return to_json_value(field); }, recorded});
  }

  CLI::App& app_;
  std::vector<Entry> entries_;
};

struct Command {
  CLI::App* app = nullptr;
  Settings settings;
  std::unique_ptr<Registry> registry;
  std::function<std::string(Command&)> action;  // returns the summary line
};

void add_source_options(Registry& r, Settings& s, bool multi_source = false) {
  if (multi_source) {
    r.add("source", s.sources, "Signal sources to compare (comma separated)");
  } else {
    r.add("source", s.source, "Signal source: uniform, coloured, quasiperiodic, ar, trace");
  }
  r.add("seed", s.seed, "Seed for signal generation (and rewards unless --reward-seed)");
  r.add("length", s.length, "Generated series length (analysis and gen-signal)");
  r.add("sigma-span", s.sigma_span, "Gaussian quantizer full scale in standard deviations");
  r.add("cutoff-ghz", s.cutoff_ghz, "Coloured-noise cut-off frequency");
  r.add("ar-lag", s.ar_lag, "Lag of the AR(2) surrogate's first autocorrelation minimum");
  r.add("ar-radius", s.ar_radius, "Pole radius of the AR(2) surrogate");
  r.add("ar-a1", s.ar_a1, "Explicit AR(2) coefficient a1 (with --ar-a2)");
  r.add("ar-a2", s.ar_a2, "Explicit AR(2) coefficient a2 (with --ar-a1)");
  r.add("freq1-ghz", s.freq1_ghz, "Quasiperiodic first tone");
  r.add("freq2-ghz", s.freq2_ghz, "Quasiperiodic second tone (0 for a single tone)");
  r.add("dither", s.dither, "Quasiperiodic Gaussian dither, relative to tone amplitude");
  r.add("trace-path", s.trace_path, "Trace file for --source trace (.csv/.txt or int8 binary)");
  r.add("period-ps", s.period_ps, "Sample period in picoseconds");
}

void add_experiment_options(Registry& r, Settings& s) {
  r.add("problem", s.problem,
        "Bandit problem: canonical:<N>, type:<1-4>, file:<path> or probs:<p0>,<p1>,...");
  r.add("reward-seed", s.reward_seed, "Seed for reward draws (default: --seed)");
  r.add("plays", s.plays, "Plays per repetition");
  r.add("reps", s.reps, "Independent repetitions");
  r.add("ds", s.ds, "Inter-decision interval in samples");
  r.add("dl", s.dl, "Inter-bit interval in samples");
  r.add("levels-k", s.levels_k, "Threshold precision K (2^K + 1 levels)");
  r.add("delta", s.delta, "Threshold step on a win");
  r.add("alpha", s.alpha, "Forgetting factor");
  r.add("omega-max", s.omega_max, "Cap on the loss step");
  r.add("omega", s.omega, "Pin the loss step to a constant (0 disables loss updates)");
  r.flag("no-wrap", s.no_wrap, "Fail instead of reusing a short trace");
  r.add("jobs", s.jobs, "Worker threads (0 = all cores); never changes results", false);
}

void add_output_options(Registry& r, Settings& s) {
  r.add("out", s.out_dir, "Output directory", false);
  r.add("config", s.config_path, "JSON config with flag names as keys", false);
  r.app().add_flag("-v,--verbose", s.verbose, "Verbosity");
}

SourceSpec source_spec(const Settings& s, const std::string& kind) {
  SourceSpec src;
  src.kind = parse_source_kind(kind);
  src.seed = s.seed;
  src.length = s.length;
  src.sigma_span = s.sigma_span;
  src.cutoff_ghz = s.cutoff_ghz;
  src.ar_lag = s.ar_lag;
  src.ar_pole_radius = s.ar_radius;
  if (s.ar_a1.has_value() != s.ar_a2.has_value())
    throw InvalidArgument("--ar-a1 and --ar-a2 must be given together");
  src.ar_a1 = s.ar_a1;
  src.ar_a2 = s.ar_a2;
  src.freq1_ghz = s.freq1_ghz;
  src.freq2_ghz = s.freq2_ghz;
  src.dither = s.dither;
  src.trace_path = s.trace_path;
  src.period_ps = s.period_ps;
  if (src.kind == SourceKind::kTraceFile) {
    if (s.trace_path.empty()) throw InvalidArgument("--source trace needs --trace-path");
    if (!fs::exists(s.trace_path)) throw IoError("trace file not found: " + s.trace_path);
  }
  return src;
}

ExperimentSpec experiment_spec(const Settings& s, const std::string& kind) {
  ExperimentSpec spec;
  spec.problem = parse_problem_ref(s.problem, s.reward_seed.value_or(s.seed));
  spec.source = source_spec(s, kind);
  spec.plan.delta_s = s.ds;
  spec.plan.delta_l = s.dl;
  spec.plays = s.plays;
  spec.repetitions = s.reps;
  spec.threshold_levels_k = s.levels_k;
  spec.tree.delta = s.delta;
  spec.tree.alpha = s.alpha;
  spec.tree.omega_max = s.omega_max;
  spec.tree.omega_override = s.omega;
  spec.allow_wrap = !s.no_wrap;
  spec.jobs = s.jobs;
  spec.validate();
  return spec;
}

json resolved_options(const Command& cmd) {
  json cfg = cmd.registry->resolved();
  if (cfg.contains("reward-seed") && cfg["reward-seed"].is_null()) cfg["reward-seed"] = cmd.settings.seed;
  return cfg;
}

std::string command_name(const Command& cmd) {
  std::string name = cmd.app->get_name();
  if (!cmd.settings.what.empty()) name += " " + cmd.settings.what;
  return name;
}

std::vector<std::string> header(const Command& cmd) {
  return {"chaosbandit " CHAOSBANDIT_VERSION " " + command_name(cmd),
          "config " + resolved_options(cmd).dump()};
}

json config_json(const Command& cmd) {
  return {{"tool", "chaosbandit " CHAOSBANDIT_VERSION},
          {"subcommand", command_name(cmd)},
          {"options", resolved_options(cmd)}};
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

fs::path out_path(const Settings& s, const std::string& name) { return fs::path(s.out_dir) / name; }

std::string fmt(double v) { return format_real(v); }

void save_sweep(const Command& cmd, const std::vector<SweepRow>& rows, const std::string& name,
                bool with_cv) {
  std::vector<std::string> cols{"param", "value", "cdr"};
  if (with_cv) cols.push_back("cv");
  CsvWriter csv(header(cmd), cols);
  for (const auto& row : rows) {
    std::vector<std::string> cells{row.label, fmt(row.value), fmt(row.cdr)};
    if (with_cv) cells.push_back(row.cv ? fmt(*row.cv) : "");
    csv.row(cells);
  }
  csv.save(out_path(cmd.settings, name));
}

std::string do_run(Command& cmd) {
  const Settings& s = cmd.settings;
  const ExperimentSpec spec = experiment_spec(s, s.source);
  const SignalSeries series = experiment_series(spec);
  const ExperimentResult r = run_experiment(spec, series);

  CsvWriter csv(header(cmd), {"cycle", "cdr"});
  for (std::size_t t = 0; t < r.cdr.size(); ++t) csv.row({std::to_string(t + 1), fmt(r.cdr[t])});
  csv.save(out_path(s, "cdr.csv"));
  if (s.dump_tree)
    write_file_atomic(out_path(s, "tree_dump.json"), run_repetition(spec, series, 0).final_tree.dump_json());

  std::ostringstream msg;
  msg << "run: final CDR " << fmt(r.cdr.back());
  const auto reached = r.first_cycle_reaching(0.95);
  if (reached) {
    msg << ", CDR >= 0.95 at cycle " << *reached;
  } else {
    msg << ", CDR never reached 0.95";
  }
  if (r.wrapped) msg << " (source reused cyclically)";
  return msg.str();
}

std::string do_sweep_ds(Command& cmd) {
  const Settings& s = cmd.settings;
  std::vector<SweepRow> rows;
  for (const auto& kind : s.sources) {
    const auto part = sweep_inter_decision(experiment_spec(s, kind), s.ds_values, s.at_cycle);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  save_sweep(cmd, rows, "sweep_ds.csv", false);
  return "sweep-ds: " + std::to_string(rows.size()) + " rows, CDR at cycle " +
         std::to_string(s.at_cycle);
}

std::string do_sweep_dl(Command& cmd) {
  const Settings& s = cmd.settings;
  const auto rows = sweep_inter_bit(experiment_spec(s, s.source), s.dl_values, s.types, s.at_cycle);
  save_sweep(cmd, rows, "sweep_dl.csv", true);
  double best_cv = 0.0;
  std::size_t best_dl = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || *rows[i].cv < best_cv) {
      best_cv = *rows[i].cv;
      best_dl = static_cast<std::size_t>(rows[i].value);
    }
  }
  return "sweep-dl: " + std::to_string(rows.size()) + " rows, lowest CV " + fmt(best_cv) +
         " at dl=" + std::to_string(best_dl);
}

std::string do_sweep_levels(Command& cmd) {
  const Settings& s = cmd.settings;
  const auto rows =
      sweep_threshold_levels(experiment_spec(s, s.source), s.k_values, s.p1_values, s.at_cycle);
  save_sweep(cmd, rows, "sweep_levels.csv", false);
  return "sweep-levels: " + std::to_string(rows.size()) + " rows, CDR at cycle " +
         std::to_string(s.at_cycle);
}

std::string do_scaling(Command& cmd) {
  const Settings& s = cmd.settings;
  std::vector<ScalingSetting> settings;
  for (std::size_t n : s.arms) {
    ScalingSetting st = table1_setting(n);
    if (s.max_plays > 0) st.plays = std::min(st.plays, s.max_plays);
    if (s.max_reps > 0) st.repetitions = std::min(st.repetitions, s.max_reps);
    settings.push_back(st);
  }
  ExperimentSpec templ = experiment_spec(s, s.source);
  const ScalingResult res = scaling_study(templ, settings, s.level);

  json points = json::array();
  for (const auto& p : res.points) {
    points.push_back({{"n", p.setting.arms},
                      {"plays", p.setting.plays},
                      {"reps", p.setting.repetitions},
                      {"cycles", p.cycles ? json(*p.cycles) : json(nullptr)}});
  }
  json doc = {{"config", config_json(cmd)}, {"level", s.level}, {"points", points}};
  if (res.fit) {
    doc["a"] = res.fit->a;
    doc["b"] = res.fit->b;
    doc["residuals"] = res.fit->residuals;
  } else {
    doc["a"] = nullptr;
    doc["b"] = nullptr;
    doc["residuals"] = json::array();
  }
  write_file_atomic(out_path(s, "fit.json"), doc.dump(2) + "\n");
  if (!res.fit) return "scaling: fewer than two arm counts reached the level; no fit";
  return "scaling: a=" + fmt(res.fit->a) + " b=" + fmt(res.fit->b);
}

std::string do_analyze(Command& cmd) {
  const Settings& s = cmd.settings;
  if (s.what == "acf") {
    const SignalSeries series = make_series(source_spec(s, s.source));
    const auto rho = autocorrelation(series, s.max_lag);
    CsvWriter csv(header(cmd), {"lag", "rho"});
    std::size_t min_lag = 1;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      csv.row({std::to_string(k), fmt(rho[k])});
      if (k >= 1 && rho[k] < rho[min_lag]) min_lag = k;
    }
    csv.save(out_path(s, "acf.csv"));
    return "acf: minimum " + fmt(rho[min_lag]) + " at lag " + std::to_string(min_lag);
  }
  if (s.what == "spectrum") {
    const SignalSeries series = make_series(source_spec(s, s.source));
    const auto spec = power_spectrum(series, s.window);
    CsvWriter csv(header(cmd), {"freq_ghz", "power_db"});
    for (const auto& p : spec) csv.row({fmt(p.freq_ghz), fmt(p.power_db)});
    csv.save(out_path(s, "spectrum.csv"));
    return "spectrum: " + std::to_string(spec.size()) + " bins";
  }
  if (s.what == "etmsd" || s.what == "condition") {
    SourceSpec src = source_spec(s, s.source);
    if (src.kind != SourceKind::kTraceFile) src.length = s.walks * s.horizon;
    const SignalSeries series = make_series(src);
    const WalkEnsemble ens = build_ensemble(series, s.walks, s.horizon, s.seed);
    if (s.what == "etmsd") {
      const auto values = etmsd(ens, s.taus);
      CsvWriter csv(header(cmd), {"tau", "etmsd"});
      std::string msg = "etmsd:";
      for (std::size_t i = 0; i < values.size(); ++i) {
        csv.row({std::to_string(s.taus[i]), fmt(values[i])});
        msg += " tau=" + std::to_string(s.taus[i]) + " -> " + fmt(values[i]);
      }
      csv.save(out_path(s, "etmsd.csv"));
      return msg;
    }
    PairingMode mode;
    if (s.pairing == "pooled") {
      mode = PairingMode::kPooled;
    } else if (s.pairing == "averaged") {
      mode = PairingMode::kAveraged;
    } else {
      throw InvalidArgument("--pairing must be pooled or averaged");
    }
    const double theta = condition_number(ens, s.lag_d, mode);
    json doc = {{"config", config_json(cmd)},
                {"condition_number", real_or_null(theta)},
                {"singular", !std::isfinite(theta)},
                {"lag", s.lag_d},
                {"pairing", s.pairing}};
    write_file_atomic(out_path(s, "condition.json"), doc.dump(2) + "\n");
    return "condition: " + fmt(theta);
  }
  throw InvalidArgument("unknown analysis '" + s.what + "'");
}

std::string do_gen_signal(Command& cmd) {
  const Settings& s = cmd.settings;
  const SignalSeries series = make_series(source_spec(s, s.source));
  const fs::path path = s.output.empty() ? out_path(s, "signal.csv") : fs::path(s.output);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv" || ext == ".txt") {
    write_trace_csv(series, path);
  } else {
    write_trace_binary(series, path);
  }
  return "gen-signal: " + std::to_string(series.size()) + " samples -> " + path.string();
}

Command& new_command(std::list<Command>& cmds, CLI::App& root, const std::string& name,
                     const std::string& desc, std::function<std::string(Command&)> action) {
  Command& c = cmds.emplace_back();
  c.app = root.add_subcommand(name, desc);
  c.registry = std::make_unique<Registry>(*c.app);
  c.action = std::move(action);
  return c;
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidArgument("config file " + path + ": " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Bandit solver driven by chaotic or surrogate signal sources", "chaosbandit");
  app.require_subcommand(1);
  app.set_version_flag("--version", CHAOSBANDIT_VERSION);

  std::list<Command> cmds;

  {
    Command& c = new_command(cmds, app, "run", "Average CDR curve of one configuration", do_run);
    add_source_options(*c.registry, c.settings);
    add_experiment_options(*c.registry, c.settings);
    c.registry->flag("dump-tree", c.settings.dump_tree,
                     "Also write the first repetition's final tree");
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "sweep-ds", "CDR versus inter-decision interval", do_sweep_ds);
    c.settings.sources = {"ar", "coloured", "quasiperiodic", "uniform"};
    c.settings.problem = "probs:0.1,0.5";
    c.settings.plays = 100;
    add_source_options(*c.registry, c.settings, true);
    add_experiment_options(*c.registry, c.settings);
    c.registry->add("ds-values", c.settings.ds_values, "Inter-decision intervals to sweep");
    c.registry->add("at-cycle", c.settings.at_cycle, "Cycle at which CDR is read");
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "sweep-dl", "CDR of the four Type problems versus inter-bit interval",
                             do_sweep_dl);
    c.settings.source = "ar";
    c.settings.plays = 100;
    add_source_options(*c.registry, c.settings);
    add_experiment_options(*c.registry, c.settings);
    c.registry->add("dl-values", c.settings.dl_values, "Inter-bit intervals to sweep");
    c.registry->add("types", c.settings.types, "Type problems to run")->check(CLI::Range(1, 4));
    c.registry->add("at-cycle", c.settings.at_cycle, "Cycle at which CDR is read");
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "sweep-levels", "CDR versus threshold precision K",
                             do_sweep_levels);
    c.settings.source = "ar";
    c.settings.plays = 200;
    c.settings.at_cycle = 200;
    add_source_options(*c.registry, c.settings);
    add_experiment_options(*c.registry, c.settings);
    c.registry->add("k-values", c.settings.k_values, "Threshold precisions to sweep")
        ->check(CLI::Range(1, 8));
    c.registry->add("p1-values", c.settings.p1_values, "Second arm probabilities (first arm is 0.9)");
    c.registry->add("at-cycle", c.settings.at_cycle, "Cycle at which CDR is read");
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "scaling", "Cycles to reach a CDR level versus arm count",
                             do_scaling);
    c.settings.source = "ar";
    add_source_options(*c.registry, c.settings);
    add_experiment_options(*c.registry, c.settings);
    c.registry->add("n", c.settings.arms, "Arm counts (2, 4, 8, 16, 32, 64)");
    c.registry->add("level", c.settings.level, "CDR level")->check(CLI::Range(0.0, 1.0));
    c.registry->add("max-plays", c.settings.max_plays, "Cap on plays per arm count (0 = published)");
    c.registry->add("max-reps", c.settings.max_reps, "Cap on repetitions per arm count (0 = published)");
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "analyze", "Signal statistics: acf, spectrum, etmsd, condition",
                             do_analyze);
    c.app->add_option("what", c.settings.what, "Analysis to run")
        ->required()
        ->check(CLI::IsMember({"acf", "spectrum", "etmsd", "condition"}));
    add_source_options(*c.registry, c.settings);
    c.registry->add("max-lag", c.settings.max_lag, "acf: largest lag in samples");
    c.registry->add("window", c.settings.window, "spectrum: moving-average width in bins");
    c.registry->add("tau", c.settings.taus, "etmsd: time differences");
    c.registry->add("walks", c.settings.walks, "etmsd/condition: number of walks");
    c.registry->add("horizon", c.settings.horizon, "etmsd/condition: steps per walk");
    c.registry->add("lag", c.settings.lag_d, "condition: pairing lag D");
    c.registry->add("pairing", c.settings.pairing, "condition: pooled or averaged")
        ->check(CLI::IsMember({"pooled", "averaged"}));
    add_output_options(*c.registry, c.settings);
  }
  {
    Command& c = new_command(cmds, app, "gen-signal", "Write a generated series as a trace file",
                             do_gen_signal);
    add_source_options(*c.registry, c.settings);
    c.registry->add("output", c.settings.output, "Trace path (.csv/.txt text, otherwise int8 binary)",
                    false);
    add_output_options(*c.registry, c.settings);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForVersion&) {
    out << CHAOSBANDIT_VERSION << "\n";
    return 0;
  } catch (const CLI::Success&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 2;
  }

  Command* cmd = nullptr;
  for (auto& c : cmds)
    if (c.app->parsed()) cmd = &c;
  if (cmd == nullptr) {
    err << app.help();
    return 2;
  }

  try {
    if (!cmd->settings.config_path.empty())
      cmd->registry->apply_config(read_config(cmd->settings.config_path));
    const std::string summary = cmd->action(*cmd);
    out << summary << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace chaosbandit::cli

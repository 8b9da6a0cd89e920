#include "secantboost/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "secantboost/booster.hpp"
#include "secantboost/data_io.hpp"
#include "secantboost/error.hpp"
#include "secantboost/model_io.hpp"
#include "secantboost/random.hpp"

namespace secantboost {

namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ConstantLossError& e) {
    err << "constant loss: " << e.what() << '\n';
    return kExitConstantLoss;
  } catch (const DiscontinuityCollisionError& e) {
    err << "discontinuity collision: " << e.what() << '\n';
    return kExitDiscontinuity;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

Dataset load_for(const RunConfig& config, const std::string& path) {
  CsvOptions opts;
  opts.label_column = config.label_column;
  return load_csv(path, opts);
}

Model make_model(const RunConfig& config, const Loss& loss, const BoostResult& r, const Dataset& S) {
  Model m;
  m.ensemble = r.ensemble;
  m.config = config;
  m.v0 = r.v0;
  m.schema = schema_of(S);
  m.loss_table.assign(loss.table().begin(), loss.table().end());
  return m;
}

// Test error of every prefix H_0 .. H_T.
std::vector<double> prefix_errors(const Ensemble& H, const Dataset& test) {
  std::vector<double> pred(test.size(), H.h0);
  std::vector<double> out;
  out.push_back(zero_one_error(margins(test, pred)));
  for (const EnsembleTerm& t : H.terms) {
    t.tree.check_schema(test);
    for (std::size_t i = 0; i < test.size(); ++i) pred[i] += t.alpha * t.tree.predict(test, i);
    out.push_back(zero_one_error(margins(test, pred)));
  }
  return out;
}

}  // namespace

std::string telemetry_path_for(const std::string& model_path) {
  std::filesystem::path p(model_path);
  p.replace_extension(".telemetry.csv");
  return p.string();
}

int cmd_train(const RunConfig& config, const std::string& data_path, const std::string& out_path, std::ostream& log,
              std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Loss loss = config.make_loss();
    Dataset S = load_for(config, data_path);
    if (config.noise_eta > 0.0) S = inject_label_noise(S, config.noise_eta, derive_seed(config.seed, {0x747261696eULL}));
    const BoostResult r = run(loss, S, config.boost_config());
    save_model(make_model(config, loss, r, S), out_path);
    write_telemetry_csv(r.telemetry, telemetry_path_for(out_path));
    for (const std::string& w : r.warnings) err << "warning: " << w << '\n';
    const TelemetryRow& last = r.telemetry.back();
    log << "iterations=" << r.telemetry.size() << " terms=" << r.ensemble.terms.size()
        << " train_loss=" << format_double(last.train_loss) << " train_err=" << format_double(last.train_err)
        << " stop=" << to_string(r.stop_reason) << '\n';
    return r.constant_loss ? kExitConstantLoss : kExitOk;
  });
}

EvalMetrics evaluate_model(const std::string& model_path, const std::string& data_path) {
  const Model model = load_model(model_path);
  CsvOptions opts;
  opts.label_column = model.config.label_column;
  const Dataset S = load_csv(data_path, opts);
  const Loss loss = model.loss();
  const std::vector<double> mg = margins(S, model.ensemble.predict_all(S));
  return {S.size(), zero_one_error(mg), empirical_loss(loss, mg)};
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EvalMetrics m = evaluate_model(model_path, data_path);
    nlohmann::json j{{"m", m.m}, {"error", m.error}, {"loss", m.loss}};
    out << j.dump() << '\n';
    return kExitOk;
  });
}

int cmd_cv(const RunConfig& config, const std::string& data_path, const std::string& out_dir, std::ostream& log,
           std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Loss loss = config.make_loss();
    const Dataset S = load_for(config, data_path);
    const FoldPlan plan = stratified_folds(S, config.folds, config.seed);
    std::filesystem::create_directories(out_dir);

    std::vector<std::vector<double>> curves;
    for (std::size_t k = 0; k < plan.k; ++k) {
      const auto train_idx = plan.train_indices(k);
      const auto test_idx = plan.test_indices(k);
      Dataset train = S.subset(train_idx);
      const Dataset test = S.subset(test_idx);
      const std::uint64_t fold_seed = derive_seed(config.seed, {k});
      if (config.noise_eta > 0.0) train = inject_label_noise(train, config.noise_eta, fold_seed);
      BoostConfig bc = config.boost_config();
      bc.seed = fold_seed;
      const BoostResult r = run(loss, train, bc);
      if (r.constant_loss) throw ConstantLossError("loss is flat on every probed chord");
      char name[64];
      std::snprintf(name, sizeof name, "fold_%02zu_telemetry.csv", k);
      write_telemetry_csv(r.telemetry, (std::filesystem::path(out_dir) / name).string());
      std::vector<double> curve = prefix_errors(r.ensemble, test);
      // A fold that stopped early keeps its final model.
      curve.resize(config.T + 1, curve.back());
      log << "fold " << k << ": test_err=" << format_double(curve.back()) << " stop=" << to_string(r.stop_reason)
          << '\n';
      curves.push_back(std::move(curve));
    }

    std::ofstream out((std::filesystem::path(out_dir) / "cv_test_error.csv").string(), std::ios::binary);
    if (!out) throw DataError("cannot write aggregate CSV in '" + out_dir + "'");
    out << 't';
    for (std::size_t k = 0; k < plan.k; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, ",fold_%02zu", k);
      out << name;
    }
    out << ",mean\n";
    for (std::size_t t = 0; t <= config.T; ++t) {
      out << t;
      double sum = 0.0;
      for (const auto& c : curves) {
        out << ',' << format_double(c[t]);
        sum += c[t];
      }
      out << ',' << format_double(sum / static_cast<double>(curves.size())) << '\n';
    }
    if (!out) throw DataError("write failed in '" + out_dir + "'");
    double final_sum = 0.0;
    for (const auto& c : curves) final_sum += c.back();
    log << "mean_test_err=" << format_double(final_sum / static_cast<double>(curves.size())) << '\n';
    return kExitOk;
  });
}

int cmd_losses(const RunConfig& config, double lo, double hi, std::size_t steps, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (steps < 2) throw ConfigError("steps must be at least 2");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ConfigError("need a finite range lo < hi");
    const Loss loss = config.make_loss();
    out << "z,F_of_z\n";
    for (std::size_t k = 0; k < steps; ++k) {
      const double z = k + 1 == steps ? hi : lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(steps - 1));
      out << format_double(z) << ',' << format_double(loss(z)) << '\n';
    }
    return kExitOk;
  });
}

namespace {

struct ConfigFlags {
  std::string config_file;
  std::string loss;
  std::vector<std::string> loss_params;
  std::string loss_table;
  std::size_t T = 0, max_nodes = 0, precision_Z = 0, folds = 0;
  double delta_init = 0, epsilon = 0, noise_eta = 0;
  std::uint64_t seed = 0;
  std::string label_col;
  bool force_find_alpha = false;
  std::vector<CLI::Option*> opts;
  CLI::Option *o_loss{}, *o_params{}, *o_table{}, *o_T{}, *o_nodes{}, *o_Z{}, *o_folds{}, *o_delta{}, *o_eps{},
      *o_noise{}, *o_seed{}, *o_label{}, *o_force{};

  void add(CLI::App* app, bool training) {
    app->add_option("--config", config_file, "JSON run configuration; flags override it");
    o_loss = app->add_option("--loss", loss, "Loss name");
    o_params = app->add_option("--loss-param", loss_params, "Loss parameter key=value (repeatable)");
    o_table = app->add_option("--loss-table", loss_table, "Piecewise-linear loss table CSV (z,F_of_z)");
    if (!training) return;
    o_T = app->add_option("-T,--iterations", T, "Boosting iterations");
    o_nodes = app->add_option("--max-nodes", max_nodes, "Internal nodes per tree (1 = stumps)");
    o_delta = app->add_option("--delta-init", delta_init, "Initial step of the leveraging search");
    o_eps = app->add_option("--epsilon", epsilon, "epsilon of the smoothness route");
    o_Z = app->add_option("--precision-z", precision_Z, "Offset oracle scan resolution");
    o_noise = app->add_option("--noise", noise_eta, "Training label flip probability");
    o_folds = app->add_option("--folds", folds, "Cross-validation folds");
    o_seed = app->add_option("--seed", seed, "Random seed (default: $SECANTBOOST_SEED or 0)");
    o_label = app->add_option("--label-col", label_col, "Label column name or index (default: last)");
    o_force = app->add_flag("--find-alpha", force_find_alpha, "Use the general leveraging search even for smooth losses");
  }

  RunConfig resolve() const {
    RunConfig c;
    c.seed = default_seed();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot open config '" + config_file + "'");
      try {
        c = config_from_json(nlohmann::json::parse(in), c);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + config_file + "' is not valid JSON: " + e.what());
      }
    }
    auto set = [](CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (set(o_loss)) c.loss = loss;
    if (set(o_table)) c.loss_table = loss_table;
    if (set(o_params)) {
      for (const std::string& kv : loss_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("loss parameter '" + kv + "' is not key=value");
        double v = 0.0;
        try {
          std::size_t used = 0;
          v = std::stod(kv.substr(eq + 1), &used);
          if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
        } catch (const std::exception&) {
          throw ConfigError("loss parameter '" + kv + "' has a non-numeric value");
        }
        c.loss_params[kv.substr(0, eq)] = v;
      }
    }
    if (set(o_T)) c.T = T;
    if (set(o_nodes)) c.max_nodes = max_nodes;
    if (set(o_delta)) c.delta_init = delta_init;
    if (set(o_eps)) c.epsilon = epsilon;
    if (set(o_Z)) c.precision_Z = precision_Z;
    if (set(o_noise)) c.noise_eta = noise_eta;
    if (set(o_folds)) c.folds = folds;
    if (set(o_seed)) c.seed = seed;
    if (set(o_label)) c.label_column = label_col;
    if (set(o_force)) c.force_find_alpha = force_find_alpha;
    return c;
  }
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeroth-order boosting with secant-based weights"};
  app.require_subcommand(1);

  ConfigFlags train_flags, cv_flags, loss_flags;
  std::string data, model_out = "model.json", cv_out = "cv_out", eval_model, eval_data;
  double lo = -5.0, hi = 5.0;
  std::size_t steps = 1001;

  CLI::App* train = app.add_subcommand("train", "Train a model");
  train_flags.add(train, true);
  train->add_option("--data", data, "Training CSV")->required();
  train->add_option("--out", model_out, "Model output path (telemetry goes next to it)");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a saved model");
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--data", eval_data, "CSV to evaluate on")->required();

  CLI::App* cv = app.add_subcommand("cv", "Stratified cross-validation");
  cv_flags.add(cv, true);
  cv->add_option("--data", data, "CSV dataset")->required();
  cv->add_option("--out", cv_out, "Output directory");

  CLI::App* losses = app.add_subcommand("losses", "Sample a loss for plotting");
  loss_flags.add(losses, false);
  losses->add_option("--lo", lo, "Range start");
  losses->add_option("--hi", hi, "Range end");
  losses->add_option("--steps", steps, "Number of samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (train->parsed()) {
    RunConfig c;
    if (int code = guarded(err, [&] { c = train_flags.resolve(); return 0; }); code) return code;
    return cmd_train(c, data, model_out, out, err);
  }
  if (eval->parsed()) return cmd_eval(eval_model, eval_data, out, err);
  if (cv->parsed()) {
    RunConfig c;
    if (int code = guarded(err, [&] { c = cv_flags.resolve(); return 0; }); code) return code;
    return cmd_cv(c, data, cv_out, out, err);
  }
  RunConfig c;
  if (int code = guarded(err, [&] { c = loss_flags.resolve(); return 0; }); code) return code;
  return cmd_losses(c, lo, hi, steps, out, err);
}

}  // namespace secantboost

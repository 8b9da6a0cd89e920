#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "secantboost/run_config.hpp"

namespace secantboost {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitConstantLoss = 4,
  kExitDiscontinuity = 5,
};

/// model.json -> model.telemetry.csv
std::string telemetry_path_for(const std::string& model_path);

/// Trains on `data_path`, writes the model to `out_path` and the telemetry
/// next to it. Returns an ExitCode; errors are reported on `err`.
int cmd_train(const RunConfig& config, const std::string& data_path, const std::string& out_path, std::ostream& log,
              std::ostream& err);

struct EvalMetrics {
  std::size_t m = 0;
  double error = 0.0;
  double loss = 0.0;
};

/// Evaluates a saved model; throws DataError on schema mismatch.
EvalMetrics evaluate_model(const std::string& model_path, const std::string& data_path);
int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out, std::ostream& err);

/// k-fold cross-validation. Writes fold_XX_telemetry.csv for each fold and
/// cv_test_error.csv (t, one test-error column per fold, mean) into out_dir.
int cmd_cv(const RunConfig& config, const std::string& data_path, const std::string& out_dir, std::ostream& log,
           std::ostream& err);

/// Writes `steps` samples z,F_of_z evenly spaced over [lo, hi].
int cmd_losses(const RunConfig& config, double lo, double hi, std::size_t steps, std::ostream& out, std::ostream& err);

/// Full command line entry point (train | eval | cv | losses).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace secantboost

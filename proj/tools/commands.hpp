#pragma once

#include "glle/common.hpp"
#include "glle/manifold_data.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace glle::cli {

struct RunConfig {
  std::string method = "lle";  // lle | glle-em | glle-direct
  std::string dataset = "swiss-roll";
  std::filesystem::path in;       // CSV input; overrides dataset when set
  std::filesystem::path out;      // generate only
  std::filesystem::path out_dir = ".";
  Index k = 10;
  Index p = 2;
  Index n = 1000;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::vector<double> scales{0.01, 0.1, 1.0, 5.0, 10.0};
  Index generations = 1;
  double reg = 1e-3;
  double gamma_reg = 1e-6;
  double tol = 1e-6;
  Index max_iter = 100;
  Index eval_k = 0;  // 0 means "same as k"
  bool literal_second_moment = false;
  bool sample_every_iteration = false;
  bool exact_mean = false;
  int threads = 1;
};

/// Generated (or loaded) dataset for a config.
Dataset make_dataset(const RunConfig& cfg);

void cmd_generate(const RunConfig& cfg, std::ostream& log);
void cmd_embed(const RunConfig& cfg, std::ostream& log);
void cmd_sweep(const RunConfig& cfg, std::ostream& log);
void cmd_compare(const RunConfig& cfg, std::ostream& log);

/// Parses argv and dispatches. Returns the process exit code:
/// 0 success, 1 runtime or numerical failure, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace glle::cli

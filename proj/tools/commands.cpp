#include "commands.hpp"

#include "glle/glle_direct.hpp"
#include "glle/glle_em.hpp"
#include "glle/lle.hpp"
#include "glle/metrics.hpp"
#include "glle/neighborhood.hpp"
#include "glle/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace glle::cli {

namespace fs = std::filesystem;

namespace {

std::string scale_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

std::string stem(const RunConfig& cfg, const Dataset& ds) {
  return (ds.name.empty() ? std::string("data") : ds.name) + "_" + cfg.method;
}

Index eval_k(const RunConfig& cfg) { return cfg.eval_k > 0 ? cfg.eval_k : cfg.k; }

// Everything a GLLE method needs that does not depend on the sampling seed
// or scale, so generations and sweeps fit once and only resample.
class MethodRunner {
 public:
  MethodRunner(const RunConfig& cfg, const Dataset& ds, std::ostream& log) : cfg_(cfg), ds_(ds) {
    lle_ = lle_pipeline(ds, cfg.k, cfg.p, cfg.reg, cfg.threads);
    if (cfg.method == "glle-direct") {
      direct_ = fit_direct(ds, lle_, cfg.gamma_reg, cfg.threads);
    } else if (cfg.method == "glle-em" && !cfg.sample_every_iteration) {
      em_ = run_em(ds, lle_.graph, em_options(cfg.seed, cfg.scale));
      log << "glle-em: " << em_->trace.rows.size() << " iterations, "
          << (em_->trace.converged ? "converged" : "hit max-iter") << "\n";
    }
  }

  const LleResult& lle() const { return lle_; }
  const std::optional<EmResult>& em_fit() const { return em_; }

  Embedding embedding(std::uint64_t seed, double scale) {
    if (cfg_.method == "lle") return lle_.embedding;
    WeightMatrix w;
    if (cfg_.method == "glle-direct") {
      w = sample_direct(*direct_, scale, seed, cfg_.exact_mean, cfg_.threads);
    } else if (em_) {
      w = sample_em_weights(em_->state, scale, seed, cfg_.threads);
    } else {
      w = run_em(ds_, lle_.graph, em_options(seed, scale)).weights;
    }
    return embed_weights(w, lle_.graph, cfg_.p);
  }

  MetricsRow metrics(const Embedding& emb, std::uint64_t seed, double scale) const {
    MetricsRow row{cfg_.method, seed, scale, 0.0, 0.0};
    row.preservation = neighborhood_preservation(ds_.points, emb.coords, eval_k(cfg_), cfg_.threads);
    row.procrustes_vs_lle = procrustes_residual(lle_.embedding.coords, emb.coords);
    return row;
  }

 private:
  EmOptions em_options(std::uint64_t seed, double scale) const {
    EmOptions o;
    o.max_iter = cfg_.max_iter;
    o.tol = cfg_.tol;
    o.seed = seed;
    o.scale = scale;
    o.second_moment = cfg_.literal_second_moment ? SecondMoment::kLiteral : SecondMoment::kStandard;
    o.sample_every_iteration = cfg_.sample_every_iteration;
    o.threads = cfg_.threads;
    return o;
  }

  const RunConfig& cfg_;
  const Dataset& ds_;
  LleResult lle_;
  std::optional<DirectParams> direct_;
  std::optional<EmResult> em_;
};

void write_outputs(const Embedding& emb, const Dataset& ds, const fs::path& base,
                   const std::string& title) {
  save_embedding_csv(emb, ds.param, base.string() + ".csv");
  if (emb.coords.cols() == 2) render_svg(emb.coords, ds.param, base.string() + ".svg", title);
}

void require_glle(const RunConfig& cfg) {
  require(cfg.method == "glle-em" || cfg.method == "glle-direct",
          "this command needs --method glle-em or glle-direct");
}

}  // namespace

Dataset make_dataset(const RunConfig& cfg) {
  if (!cfg.in.empty()) {
    Dataset ds = load_csv(cfg.in);
    validate(ds);
    return ds;
  }
  require(cfg.n >= 1, "--n must be >= 1");
  if (cfg.dataset == "s-curve") return gen_s_curve(cfg.n, cfg.seed);
  if (cfg.dataset == "swiss-roll") return gen_swiss_roll(cfg.n, false, cfg.seed);
  if (cfg.dataset == "swiss-roll-hole") return gen_swiss_roll(cfg.n, true, cfg.seed);
  if (cfg.dataset == "severed-bowl") return gen_severed_bowl(cfg.n, cfg.seed);
  throw InvalidArgument("unknown dataset '" + cfg.dataset + "'");
}

void cmd_generate(const RunConfig& cfg, std::ostream& log) {
  const Dataset ds = make_dataset(cfg);
  fs::path out = cfg.out.empty() ? cfg.out_dir / (ds.name + ".csv") : cfg.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_csv(ds, out);
  log << "wrote " << ds.size() << " points to " << out.string() << "\n";
}

void cmd_embed(const RunConfig& cfg, std::ostream& log) {
  require(cfg.generations >= 1, "--generations must be >= 1");
  const Dataset ds = make_dataset(cfg);
  fs::create_directories(cfg.out_dir);
  MethodRunner runner(cfg, ds, log);
  if (runner.em_fit())
    save_trace_csv(runner.em_fit()->trace, cfg.out_dir / (stem(cfg, ds) + "_trace.csv"));

  std::vector<MetricsRow> rows;
  for (Index g = 0; g < cfg.generations; ++g) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(g);
    const Embedding emb = runner.embedding(seed, cfg.scale);
    const fs::path base = cfg.out_dir / (stem(cfg, ds) + "_g" + std::to_string(g));
    write_outputs(emb, ds, base, stem(cfg, ds) + " generation " + std::to_string(g));
    rows.push_back(runner.metrics(emb, seed, cfg.scale));
    log << cfg.method << " g" << g << " seed=" << seed << " preservation=" << rows.back().preservation
        << " procrustes_vs_lle=" << rows.back().procrustes_vs_lle << "\n";
  }
  save_metrics_csv(rows, cfg.out_dir / (stem(cfg, ds) + "_metrics.csv"));
}

void cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  require_glle(cfg);
  require(!cfg.scales.empty(), "--scales must list at least one value");
  for (double a : cfg.scales) require(a > 0.0, "--scales values must be > 0");
  const Dataset ds = make_dataset(cfg);
  fs::create_directories(cfg.out_dir);
  MethodRunner runner(cfg, ds, log);

  std::vector<MetricsRow> rows;
  for (double a : cfg.scales) {
    const Embedding emb = runner.embedding(cfg.seed, a);
    const fs::path base = cfg.out_dir / (stem(cfg, ds) + "_a" + scale_label(a));
    write_outputs(emb, ds, base, stem(cfg, ds) + " scale " + scale_label(a));
    rows.push_back(runner.metrics(emb, cfg.seed, a));
    log << cfg.method << " a=" << scale_label(a) << " preservation=" << rows.back().preservation
        << " procrustes_vs_lle=" << rows.back().procrustes_vs_lle << "\n";
  }
  save_metrics_csv(rows, cfg.out_dir / (stem(cfg, ds) + "_sweep.csv"));
}

void cmd_compare(const RunConfig& cfg, std::ostream& log) {
  require_glle(cfg);
  require(cfg.generations >= 1, "--generations must be >= 1");
  const Dataset ds = make_dataset(cfg);
  fs::create_directories(cfg.out_dir);
  MethodRunner runner(cfg, ds, log);

  ComparisonReport report;
  report.neighborhood_preservation =
      neighborhood_preservation(ds.points, runner.lle().embedding.coords, eval_k(cfg), cfg.threads);
  std::vector<MetricsRow> rows;
  rows.push_back({"lle", cfg.seed, 0.0, report.neighborhood_preservation, 0.0});
  for (Index g = 0; g < cfg.generations; ++g) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(g);
    const MetricsRow row = runner.metrics(runner.embedding(seed, cfg.scale), seed, cfg.scale);
    report.per_generation.emplace_back(seed, row.preservation);
    report.procrustes_residual = std::max(report.procrustes_residual, row.procrustes_vs_lle);
    rows.push_back(row);
  }
  save_metrics_csv(rows, cfg.out_dir / (stem(cfg, ds) + "_compare.csv"));

  const double null_value = static_cast<double>(eval_k(cfg)) / static_cast<double>(ds.size() - 1);
  log << "lle preservation=" << report.neighborhood_preservation << " (permutation null "
      << null_value << ")\n";
  for (const auto& r : rows)
    if (r.method != "lle")
      log << r.method << " seed=" << r.seed << " preservation=" << r.preservation
          << " procrustes_vs_lle=" << r.procrustes_vs_lle << "\n";
}

int run(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Locally linear embedding and its generative variants"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--dataset", cfg.dataset, "Synthetic manifold")
      ->check(CLI::IsMember({"s-curve", "swiss-roll", "swiss-roll-hole", "severed-bowl"}))
      ->capture_default_str();
  app.add_option("--in", cfg.in, "Dataset CSV (overrides --dataset)");
  app.add_option("--out", cfg.out, "Output file for generate");
  app.add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--method", cfg.method, "Embedding method")
      ->check(CLI::IsMember({"lle", "glle-em", "glle-direct"}))
      ->capture_default_str();
  app.add_option("--k", cfg.k, "Neighbors")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--p", cfg.p, "Embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--n", cfg.n, "Points to generate")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed (generation g uses seed + g)")->capture_default_str();
  app.add_option("--scale", cfg.scale, "Covariance scale for sampling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--scales", cfg.scales, "Covariance scales for sweep")->delimiter(',');
  app.add_option("--generations", cfg.generations, "Generations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--reg", cfg.reg, "LLE Gram regularization")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--gamma-reg", cfg.gamma_reg, "Direct-sampling Gamma regularization")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "EM tolerance on max |delta sigma|")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "EM iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--eval-k", cfg.eval_k, "k for neighborhood preservation (default --k)");
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--literal-second-moment", cfg.literal_second_moment,
               "EM: use E[ww^T] = Cov[w|x] without the mean outer product");
  app.add_flag("--sample-every-iteration", cfg.sample_every_iteration,
               "EM: draw weights inside every iteration");
  app.add_flag("--exact-mean", cfg.exact_mean, "Direct: center samples on the joint conditional mean");

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV")->fallthrough();
  auto* embed = app.add_subcommand("embed", "Embed with one method for several generations")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "Run a GLLE method over covariance scales")->fallthrough();
  auto* compare = app.add_subcommand("compare", "Compare GLLE generations with LLE")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) cmd_generate(cfg, std::cout);
    if (embed->parsed()) cmd_embed(cfg, std::cout);
    if (sweep->parsed()) cmd_sweep(cfg, std::cout);
    if (compare->parsed()) cmd_compare(cfg, std::cout);
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace glle::cli

#include "labelrank/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "labelrank/amm_multiclass.hpp"
#include "labelrank/amm_rank.hpp"
#include "labelrank/baselines.hpp"
#include "labelrank/core.hpp"
#include "labelrank/cv.hpp"
#include "labelrank/data_pipeline.hpp"
#include "labelrank/metrics.hpp"
#include "labelrank/model_io.hpp"

namespace labelrank::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  long long elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_manifest(const std::string& path, json manifest,
                    const WallClock& clock) {
  manifest["timings"] = {{"wall_ms", clock.elapsed_ms()}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest.dump(2) << "\n";
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<double> parse_lambda_grid(const std::string& s) {
  std::vector<double> grid;
  for (const auto& tok : split_csv(s)) grid.push_back(std::stod(tok));
  if (grid.empty()) throw std::invalid_argument("empty lambda grid");
  for (double l : grid) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda must be > 0");
  }
  return grid;
}

json config_json(const TrainConfig& cfg) {
  return {{"lambda", cfg.lambda},
          {"epochs", cfg.epochs},
          {"seed", cfg.seed},
          {"max_weights_per_class", cfg.max_weights_per_class},
          {"prune_period", cfg.prune_period},
          {"prune_threshold", cfg.prune_threshold},
          {"nu_mode", to_string(cfg.nu_mode)},
          {"l2_normalize", cfg.l2_normalize}};
}

// --- gen --------------------------------------------------------------------

struct GenArgs {
  std::string out_dir;
  SyntheticConfig cfg;
};

int cmd_gen(const GenArgs& args) {
  WallClock clock;
  args.cfg.validate();
  fs::create_directories(args.out_dir);
  const SyntheticData data = generate_synthetic(args.cfg);

  const std::string events_path = args.out_dir + "/events.tsv";
  const std::string demo_path = args.out_dir + "/demographics.tsv";
  save_event_log(data.events, events_path);
  save_demographics(data.demographics, demo_path);

  std::cout << "generated users=" << args.cfg.n_users
            << " events=" << data.events.size() << " L=" << args.cfg.num_labels
            << " prototypes=" << args.cfg.n_prototypes << "\n";

  json manifest{{"command", "gen"},
                {"seed", args.cfg.seed},
                {"config",
                 {{"users", args.cfg.n_users},
                  {"L", args.cfg.num_labels},
                  {"alpha", args.cfg.alpha},
                  {"horizon", args.cfg.horizon},
                  {"prototypes", args.cfg.n_prototypes},
                  {"noise", args.cfg.noise}}},
                {"outputs", {events_path, demo_path}},
                {"counts", {{"events", data.events.size()}}}};
  write_manifest(args.out_dir + "/gen.manifest.json", std::move(manifest),
                 clock);
  return 0;
}

// --- featurize ---------------------------------------------------------------

struct FeaturizeArgs {
  std::string events_path;
  std::string demographics_path;
  std::string out_path;
  long long t_features = 0;
  long long t_labels = 0;
  bool adv = false;
  double alpha = 0.98;
  int min_categories = 3;
  bool normalize = true;
  int num_labels = 0;  // 0: infer from the log
};

int cmd_featurize(const FeaturizeArgs& args) {
  WallClock clock;
  if (args.t_features >= args.t_labels) {
    throw std::invalid_argument("--t-features must be < --t-labels");
  }
  const EventLog log = load_event_log(args.events_path);
  const DemographicsMap demo = load_demographics(args.demographics_path);

  int L = args.num_labels;
  if (L == 0) {
    for (const auto& e : log) L = std::max(L, e.category);
  }
  if (L < 1) throw std::invalid_argument("event log has no categories");

  FeatureLayout layout{L, args.adv};
  const auto features =
      featurize(log, demo, args.t_features, layout, args.alpha, args.normalize);
  const auto labels = build_labels(log, args.t_features, args.t_labels,
                                   args.alpha, L, args.min_categories);
  const RankedDataset data = make_ranked_dataset(features, labels, layout);
  save_ranked_dataset(data, args.out_path);

  std::cout << "featurized L=" << data.num_labels << " d=" << data.dim
            << " users=" << data.size() << "\n";

  json manifest{{"command", "featurize"},
                {"config",
                 {{"t_features", args.t_features},
                  {"t_labels", args.t_labels},
                  {"adv", args.adv},
                  {"alpha", args.alpha},
                  {"min_categories", args.min_categories},
                  {"normalize", args.normalize},
                  {"L", L}}},
                {"inputs", {args.events_path, args.demographics_path}},
                {"outputs", {args.out_path}},
                {"counts",
                 {{"users", data.size()},
                  {"L", data.num_labels},
                  {"d", data.dim}}}};
  write_manifest(args.out_path + ".manifest.json", std::move(manifest), clock);
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string data_path;
  std::string algo;
  std::string model_out;
  TrainConfig cfg;
};

int cmd_train(const TrainArgs& args) {
  WallClock clock;
  if (!algo_is_known(args.algo) || args.algo == "ib-mal") {
    throw std::invalid_argument(
        "unknown algo '" + args.algo +
        "' (ib-mal has no training phase; use evaluate/predict)");
  }
  args.cfg.validate();
  const RankedDataset data = load_ranked_dataset(args.data_path);
  if (data.instances.empty()) throw std::invalid_argument("empty dataset");

  if (args.algo == "amm") {
    train_multiclass(data, args.cfg).save_file(args.model_out);
  } else if (args.algo == "amm-rank") {
    train_rank(data, args.cfg).save_file(args.model_out);
  } else if (args.algo == "central-mal") {
    save_any_model(fit_central(data), args.model_out);
  } else if (args.algo == "ag-mal") {
    save_any_model(fit_ag(data, demo_layout_from_dims(data.num_labels, data.dim)),
                   args.model_out);
  } else if (args.algo == "lr") {
    save_any_model(fit_lr(data, args.cfg), args.model_out);
  } else {
    save_any_model(fit_pw(data, args.cfg), args.model_out);
  }

  std::cout << "trained algo=" << args.algo << " model=" << args.model_out
            << "\n";
  json manifest{{"command", "train"},
                {"algorithm", args.algo},
                {"seed", args.cfg.seed},
                {"config", config_json(args.cfg)},
                {"inputs", {args.data_path}},
                {"outputs", {args.model_out}}};
  write_manifest(args.model_out + ".manifest.json", std::move(manifest), clock);
  return 0;
}

// --- predict / evaluate ------------------------------------------------------

struct PredictArgs {
  std::string model_path;  // empty for ib-mal
  std::string algo;        // "ib-mal" or empty
  std::string train_path;  // ib-mal pool
  int k = 10;
  int subsample = 100000;
  std::uint64_t seed = 1;
  std::string data_path;
  std::string out_path;
};

std::vector<Ranking> compute_predictions(const PredictArgs& args,
                                         const RankedDataset& data) {
  std::vector<Ranking> preds;
  preds.reserve(data.size());
  if (args.algo == "ib-mal") {
    if (args.train_path.empty()) {
      throw std::invalid_argument("ib-mal requires --train");
    }
    const RankedDataset pool_data = load_ranked_dataset(args.train_path);
    if (pool_data.num_labels != data.num_labels ||
        pool_data.dim != data.dim) {
      throw std::invalid_argument("train/test dimension mismatch");
    }
    std::vector<int> all(pool_data.size());
    std::iota(all.begin(), all.end(), 0);
    const IbPool pool = make_ib_pool(pool_data, all, args.subsample, args.seed);
    const int k = std::min<int>(args.k, static_cast<int>(pool.indices.size()));
    for (const auto& inst : data.instances) {
      preds.push_back(predict_ib(pool, inst.features, k));
    }
    return preds;
  }
  if (!args.algo.empty()) {
    throw std::invalid_argument("--algo only supports ib-mal; pass --model");
  }
  if (args.model_path.empty()) {
    throw std::invalid_argument("need --model or --algo ib-mal with --train");
  }
  const AnyModel model = load_any_model(args.model_path);
  if (model_num_labels(model) != data.num_labels) {
    throw std::invalid_argument("model/data label count mismatch");
  }
  if (model_dim(model) >= 0 && model_dim(model) != data.dim) {
    throw std::invalid_argument("model/data dimension mismatch");
  }
  for (const auto& inst : data.instances) {
    preds.push_back(predict_any(model, inst.features));
  }
  return preds;
}

int cmd_predict(const PredictArgs& args) {
  WallClock clock;
  const RankedDataset data = load_ranked_dataset(args.data_path);
  const std::vector<Ranking> preds = compute_predictions(args, data);

  std::ofstream out(args.out_path);
  if (!out) throw std::runtime_error("cannot write " + args.out_path);
  for (const auto& r : preds) {
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      if (i) out << ',';
      out << r.labels[i];
    }
    out << "\n";
  }
  std::cout << "predicted " << preds.size() << " rankings\n";

  json manifest{{"command", "predict"},
                {"algorithm", args.algo.empty() ? "model-file" : args.algo},
                {"seed", args.seed},
                {"inputs", {args.data_path, args.model_path, args.train_path}},
                {"outputs", {args.out_path}},
                {"config", {{"k", args.k}, {"subsample", args.subsample}}}};
  write_manifest(args.out_path + ".manifest.json", std::move(manifest), clock);
  return 0;
}

struct EvaluateArgs {
  PredictArgs predict;
  std::string report_out;
  std::string csv_out;
  int topk_max = 10;
};

int cmd_evaluate(const EvaluateArgs& args) {
  WallClock clock;
  const RankedDataset data = load_ranked_dataset(args.predict.data_path);
  if (data.instances.empty()) throw std::invalid_argument("empty test set");
  const std::vector<Ranking> preds = compute_predictions(args.predict, data);

  std::vector<Ranking> truths;
  truths.reserve(data.size());
  for (const auto& inst : data.instances) truths.push_back(inst.truth);

  const EvalReport report =
      evaluate_rankings(preds, truths, data.num_labels, args.topk_max);
  report.save(args.report_out, args.csv_out);
  std::cout << "dis_error " << format_double(report.dis_error) << " on "
            << report.n_test << " instances\n";

  json manifest{
      {"command", "evaluate"},
      {"algorithm",
       args.predict.algo.empty() ? "model-file" : args.predict.algo},
      {"seed", args.predict.seed},
      {"inputs",
       {args.predict.data_path, args.predict.model_path,
        args.predict.train_path}},
      {"outputs", {args.report_out, args.csv_out}},
      {"config",
       {{"topk_max", args.topk_max},
        {"k", args.predict.k},
        {"subsample", args.predict.subsample}}},
      {"results", {{"dis_error", report.dis_error}}}};
  write_manifest(args.report_out + ".manifest.json", std::move(manifest),
                 clock);
  return 0;
}

// --- cv ----------------------------------------------------------------------

struct CvArgs {
  std::string data_path;
  std::string out_dir;
  CvOptions opt;
};

int cmd_cv(const CvArgs& args) {
  WallClock clock;
  const RankedDataset data = load_ranked_dataset(args.data_path);
  const CvResult result = run_cv(data, args.opt);

  fs::create_directories(args.out_dir);
  const std::string summary_path = args.out_dir + "/cv_summary.csv";
  const std::string topk_path = args.out_dir + "/cv_topk.csv";
  const std::string table_path = args.out_dir + "/cv_table.txt";
  {
    std::ofstream out(summary_path);
    write_cv_summary_csv(result, out);
  }
  {
    std::ofstream out(topk_path);
    write_cv_topk_csv(result, out);
  }
  {
    std::ofstream out(table_path);
    write_cv_table(result, out);
  }
  write_cv_table(result, std::cout);

  json lambdas = json::object();
  for (const auto& a : result.algos) lambdas[a.algo] = a.fold_lambda;
  json manifest{{"command", "cv"},
                {"seed", args.opt.base.seed},
                {"config",
                 {{"folds", args.opt.folds},
                  {"algos", args.opt.algos},
                  {"lambda_grid", args.opt.lambda_grid},
                  {"topk_max", args.opt.topk_max},
                  {"ib_k", args.opt.ib_k},
                  {"ib_subsample", args.opt.ib_subsample},
                  {"train", config_json(args.opt.base)}}},
                {"chosen_lambda", lambdas},
                {"inputs", {args.data_path}},
                {"outputs", {summary_path, topk_path, table_path}}};
  write_manifest(args.out_dir + "/cv.manifest.json", std::move(manifest),
                 clock);
  return 0;
}

void add_train_config_flags(CLI::App* cmd, TrainConfig& cfg,
                            std::string& nu_mode) {
  cmd->add_option("--lambda", cfg.lambda, "regularization parameter");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--max-weights", cfg.max_weights_per_class,
                  "hyperplane budget per class");
  cmd->add_option("--prune-period", cfg.prune_period,
                  "prune every N updates (-1: every 10*d, 0: off)");
  cmd->add_option("--prune-threshold", cfg.prune_threshold,
                  "squared-norm prune threshold");
  cmd->add_option("--nu", nu_mode, "rank importance: constant|inverse-rank");
  cmd->add_flag("--normalize", cfg.l2_normalize,
                "L2-normalize features during training");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"label ranking toolkit"};
  app.require_subcommand(1);

  // one seed flag shared by every subcommand
  std::uint64_t seed = 1;
  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  };

  // gen
  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic event log");
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--users", gen.cfg.n_users, "number of users");
  gen_cmd->add_option("--L,--labels", gen.cfg.num_labels, "category count");
  gen_cmd->add_option("--alpha", gen.cfg.alpha, "decay factor in (0,1)");
  gen_cmd->add_option("--horizon", gen.cfg.horizon, "time span");
  gen_cmd->add_option("--prototypes", gen.cfg.n_prototypes,
                      "latent preference clusters");
  gen_cmd->add_option("--noise", gen.cfg.noise, "sampling temperature");
  add_seed(gen_cmd);

  // featurize
  FeaturizeArgs feat;
  auto* feat_cmd =
      app.add_subcommand("featurize", "build a ranked dataset from a log");
  feat_cmd->add_option("--events", feat.events_path, "event log TSV")->required();
  feat_cmd->add_option("--demographics", feat.demographics_path,
                       "demographics TSV")->required();
  feat_cmd->add_option("--out", feat.out_path, "output dataset")->required();
  feat_cmd->add_option("--t-features", feat.t_features, "feature timestamp")
      ->required();
  feat_cmd->add_option("--t-labels", feat.t_labels, "label timestamp")
      ->required();
  feat_cmd->add_flag("--adv", feat.adv, "include the adv feature group");
  feat_cmd->add_option("--alpha", feat.alpha, "decay factor in (0,1)");
  feat_cmd->add_option("--min-categories", feat.min_categories,
                       "minimum distinct clicked categories");
  feat_cmd->add_flag("!--no-normalize", feat.normalize,
                     "skip per-user L2 normalization");
  feat_cmd->add_option("--L,--labels", feat.num_labels,
                       "category count (default: inferred)");
  add_seed(feat_cmd);

  // train
  TrainArgs train;
  std::string train_nu = "constant";
  auto* train_cmd = app.add_subcommand("train", "train a ranking model");
  train_cmd->add_option("--data", train.data_path, "training dataset")->required();
  train_cmd->add_option("--algo", train.algo,
                        "amm|amm-rank|central-mal|ag-mal|lr|pw-lr")->required();
  train_cmd->add_option("--model-out", train.model_out, "model file")->required();
  add_train_config_flags(train_cmd, train.cfg, train_nu);
  add_seed(train_cmd);

  // predict
  PredictArgs predict;
  auto* predict_cmd =
      app.add_subcommand("predict", "write one predicted ranking per line");
  predict_cmd->add_option("--model", predict.model_path, "model file");
  predict_cmd->add_option("--data", predict.data_path, "input dataset")->required();
  predict_cmd->add_option("--out", predict.out_path, "predictions file")->required();
  predict_cmd->add_option("--algo", predict.algo, "ib-mal (lazy, needs --train)");
  predict_cmd->add_option("--train", predict.train_path, "ib-mal training pool");
  predict_cmd->add_option("--k", predict.k, "ib-mal neighbor count");
  predict_cmd->add_option("--subsample", predict.subsample,
                          "ib-mal pool subsample size");
  add_seed(predict_cmd);

  // evaluate
  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "score predictions");
  eval_cmd->add_option("--model", eval.predict.model_path, "model file");
  eval_cmd->add_option("--data", eval.predict.data_path, "test dataset")->required();
  eval_cmd->add_option("--report-out", eval.report_out, "key-value report")
      ->required();
  eval_cmd->add_option("--csv-out", eval.csv_out, "per-K CSV (default: <report>.csv)");
  eval_cmd->add_option("--topk-max", eval.topk_max, "largest K");
  eval_cmd->add_option("--algo", eval.predict.algo, "ib-mal (lazy, needs --train)");
  eval_cmd->add_option("--train", eval.predict.train_path, "ib-mal training pool");
  eval_cmd->add_option("--k", eval.predict.k, "ib-mal neighbor count");
  eval_cmd->add_option("--subsample", eval.predict.subsample,
                       "ib-mal pool subsample size");
  add_seed(eval_cmd);

  // cv
  CvArgs cv;
  std::string cv_algos = "amm-rank,pw-lr,lr,ag-mal,central-mal";
  std::string cv_grid = "1e-5";
  std::string cv_nu = "constant";
  bool cv_serial = false;
  auto* cv_cmd = app.add_subcommand("cv", "cross-validated comparison");
  cv_cmd->add_option("--data", cv.data_path, "dataset")->required();
  cv_cmd->add_option("--out-dir", cv.out_dir, "output directory")->required();
  cv_cmd->add_option("--folds", cv.opt.folds, "fold count");
  cv_cmd->add_option("--algos", cv_algos, "comma-separated algorithm list");
  cv_cmd->add_option("--lambda-grid", cv_grid,
                     "comma-separated lambda candidates");
  cv_cmd->add_option("--topk-max", cv.opt.topk_max, "largest K");
  cv_cmd->add_option("--k", cv.opt.ib_k, "ib-mal neighbor count");
  cv_cmd->add_option("--subsample", cv.opt.ib_subsample,
                     "ib-mal pool subsample size");
  cv_cmd->add_flag("--serial", cv_serial, "run folds sequentially");
  add_train_config_flags(cv_cmd, cv.opt.base, cv_nu);
  add_seed(cv_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) {
      gen.cfg.seed = seed;
      return cmd_gen(gen);
    }
    if (*feat_cmd) return cmd_featurize(feat);
    if (*train_cmd) {
      train.cfg.seed = seed;
      train.cfg.nu_mode = nu_mode_from_string(train_nu);
      return cmd_train(train);
    }
    if (*predict_cmd) {
      predict.seed = seed;
      return cmd_predict(predict);
    }
    if (*eval_cmd) {
      eval.predict.seed = seed;
      if (eval.csv_out.empty()) eval.csv_out = eval.report_out + ".csv";
      return cmd_evaluate(eval);
    }
    if (*cv_cmd) {
      cv.opt.base.seed = seed;
      cv.opt.base.nu_mode = nu_mode_from_string(cv_nu);
      cv.opt.algos = split_csv(cv_algos);
      cv.opt.lambda_grid = parse_lambda_grid(cv_grid);
      cv.opt.parallel = !cv_serial;
      return cmd_cv(cv);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

}  // namespace labelrank::cli

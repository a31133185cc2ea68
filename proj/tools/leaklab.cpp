// leaklab - teacher/student soft-label leakage laboratory
//
// Subcommands mirror the pipeline stages so every intermediate artifact
// (dataset, partition, teacher checkpoint, soft-label file) is inspectable.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "leaklab/serialize.hpp"
#include "leaklab/svg.hpp"
#include "leaklab/sweep.hpp"
#include "leaklab/thresholds.hpp"

using namespace leaklab;

namespace {

bool g_json_errors = false;

int fail(const std::string& msg) {
  if (g_json_errors)
    std::cerr << json{{"error", msg}}.dump() << "\n";
  else
    std::cerr << "error: " << msg << "\n";
  return 2;
}

json trace_to_json(const std::vector<TracePoint>& trace) {
  json out = json::array();
  for (const TracePoint& tp : trace)
    out.push_back({{"step", tp.step},
                   {"loss", tp.loss},
                   {"acc_train", tp.acc_train},
                   {"acc_test", tp.acc_test},
                   {"acc_val", tp.acc_val}});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leaklab: soft-label distillation leakage experiments"};
  app.require_subcommand(1);
  bool deterministic = false;
  app.add_flag("--json-errors", g_json_errors, "machine-readable errors on stderr");
  app.add_flag("--deterministic", deterministic,
               "suppress any non-reproducible output fields");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a dataset (and optional partition)");
  std::string gen_kind = "random_iid", gen_out = "data.json", gen_part_out;
  std::uint64_t gen_seed = 0;
  long gen_n = 100, gen_d = 10;
  int gen_c = 2, gen_p = 0;
  double gen_teacher_frac = 1.0, gen_rho = 0.8;
  gen->add_option("--kind", gen_kind, "random_iid | modular_addition | toy2d");
  gen->add_option("--n", gen_n, "sample count (ignored for modular_addition)");
  gen->add_option("--d", gen_d, "input dimension (random_iid)");
  gen->add_option("--c", gen_c, "class count");
  gen->add_option("--p", gen_p, "modulus for modular_addition");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "dataset output path");
  gen->add_option("--partition-out", gen_part_out, "also write a partition here");
  gen->add_option("--teacher-frac", gen_teacher_frac, "teacher fraction of the dataset");
  gen->add_option("--rho", gen_rho, "student train fraction of the teacher set");

  // train-teacher
  auto* tt = app.add_subcommand("train-teacher", "train a teacher on ground-truth labels");
  std::string tt_data, tt_part, tt_out = "teacher.json", tt_arch = "linear";
  std::vector<long> tt_hidden;
  std::uint64_t tt_seed = 0;
  TrainConfig tt_cfg;
  tt->add_option("--data", tt_data, "dataset JSON")->required();
  tt->add_option("--partition", tt_part, "partition JSON (trains on the teacher rows)");
  tt->add_option("--arch", tt_arch, "linear | mlp1 | mlp2");
  tt->add_option("--hidden", tt_hidden, "hidden widths");
  tt->add_option("--steps", tt_cfg.steps);
  tt->add_option("--lr", tt_cfg.lr);
  tt->add_option("--weight-decay", tt_cfg.weight_decay);
  tt->add_option("--seed", tt_seed);
  tt->add_option("--out", tt_out, "model checkpoint output path");

  // distill
  auto* di = app.add_subcommand("distill", "produce soft labels from a teacher");
  std::string di_teacher, di_data, di_part, di_out = "soft.json", di_transform = "none";
  double di_tau = 1.0;
  std::uint64_t di_seed = 0;
  di->add_option("--teacher", di_teacher)->required();
  di->add_option("--data", di_data)->required();
  di->add_option("--partition", di_part, "restrict to the student train rows");
  di->add_option("--tau", di_tau, "softmax temperature");
  di->add_option("--transform", di_transform, "none | shuffle | topk:K | zerocol:C");
  di->add_option("--seed", di_seed, "rng seed (shuffle transform)");
  di->add_option("--out", di_out);

  // eval
  auto* ev = app.add_subcommand("eval", "metrics panel for a teacher/student pair");
  std::string ev_teacher, ev_student, ev_data, ev_part;
  ev->add_option("--teacher", ev_teacher)->required();
  ev->add_option("--student", ev_student)->required();
  ev->add_option("--data", ev_data)->required();
  ev->add_option("--partition", ev_part)->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "run a config-driven experiment grid");
  std::string sw_config, sw_out;
  int sw_workers = 0;
  bool sw_verbose = false;
  sw->add_option("--config", sw_config, "sweep config JSON")->required();
  sw->add_option("--out", sw_out, "override output_dir");
  sw->add_option("--workers", sw_workers, "worker count (default: LEAKLAB_WORKERS or hw)");
  sw->add_flag("--verbose", sw_verbose, "per-cell progress on stderr");

  // thresholds
  auto* th = app.add_subcommand("thresholds", "estimate alpha thresholds from a store");
  std::string th_store, th_name;
  double th_rho = -1, th_tau = -1;
  th->add_option("--store", th_store, "sweep output directory")->required();
  th->add_option("--name", th_name,
                 "alpha_T_label | alpha_S_label | alpha_S_id | alpha_S_shuffle_label")
      ->required();
  th->add_option("--rho", th_rho, "rho slice filter");
  th->add_option("--tau", th_tau, "tau slice filter");

  // plot
  auto* pl = app.add_subcommand("plot", "emit SVG figures from a store or checkpoint");
  std::string pl_store, pl_kind = "regime", pl_metric = "acc_S_test", pl_x = "alpha",
              pl_y = "rho", pl_out = "plot.svg", pl_model, pl_data;
  double pl_tau = -1, pl_rho = -1, pl_lo = -3, pl_hi = 3;
  int pl_res = 200;
  pl->add_option("--store", pl_store, "sweep output directory");
  pl->add_option("--kind", pl_kind, "regime | metric | boundary");
  pl->add_option("--metric", pl_metric, "metric for --kind metric");
  pl->add_option("--x", pl_x);
  pl->add_option("--y", pl_y);
  pl->add_option("--tau", pl_tau, "tau slice filter");
  pl->add_option("--rho", pl_rho, "rho slice filter");
  pl->add_option("--model", pl_model, "model checkpoint for --kind boundary");
  pl->add_option("--data", pl_data, "dataset for --kind boundary");
  pl->add_option("--bounds", pl_hi, "raster half-width for --kind boundary");
  pl->add_option("--resolution", pl_res);
  pl->add_option("--out", pl_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      RngState rng(gen_seed);
      Dataset ds;
      if (gen_kind == "modular_addition") {
        ds = gen_modular_addition(gen_p);
      } else if (gen_kind == "toy2d") {
        ds = gen_toy_2d(rng, gen_n, gen_c);
      } else {
        ds = sample_random_dataset(rng, gen_n, gen_d, gen_c);
      }
      ds.seed = gen_seed;
      save_json(dataset_to_json(ds), gen_out);
      if (!gen_part_out.empty()) {
        RngState prng = rng.fork(0x9a27);
        save_json(partition_to_json(make_partition(prng, ds, gen_teacher_frac, gen_rho)),
                  gen_part_out);
      }
    } else if (tt->parsed()) {
      Dataset ds = dataset_from_json(load_json(tt_data));
      Matrix X = ds.inputs;
      std::vector<int> y = ds.labels;
      if (!tt_part.empty()) {
        Partition part = partition_from_json(load_json(tt_part));
        X = take_rows(ds.inputs, part.teacher_idx);
        y = take_labels(ds.labels, part.teacher_idx);
      }
      RngState rng = RngState(tt_seed).fork(0x7eac);
      std::vector<Index> hidden(tt_hidden.begin(), tt_hidden.end());
      TrainResult res =
          train_teacher(rng, X, y, ds.c, arch_from_name(tt_arch), hidden, tt_cfg);
      json out = model_to_json(res.model);
      out["training"] = {{"steps_run", res.steps_run},
                         {"final_acc", res.trace.empty() ? 0.0 : res.trace.back().acc_train},
                         {"trace", trace_to_json(res.trace)}};
      save_json(out, tt_out);
    } else if (di->parsed()) {
      Model teacher = model_from_json(load_json(di_teacher));
      Dataset ds = dataset_from_json(load_json(di_data));
      Matrix X = ds.inputs;
      std::vector<int> y = ds.labels;
      if (!di_part.empty()) {
        Partition part = partition_from_json(load_json(di_part));
        X = take_rows(ds.inputs, part.student_train_idx);
        y = take_labels(ds.labels, part.student_train_idx);
      }
      SoftLabelSet soft = make_soft_labels(teacher, X, di_tau);
      RngState rng = RngState(di_seed).fork(0x5f);
      soft = apply_transform(rng, soft, Transform::parse(di_transform), y);
      save_json(softlabels_to_json(soft), di_out);
    } else if (ev->parsed()) {
      Model teacher = model_from_json(load_json(ev_teacher));
      Model student = model_from_json(load_json(ev_student));
      Dataset ds = dataset_from_json(load_json(ev_data));
      Partition part = partition_from_json(load_json(ev_part));
      Matrix X_T = take_rows(ds.inputs, part.teacher_idx);
      Matrix X_tr = take_rows(ds.inputs, part.student_train_idx);
      Matrix X_te = take_rows(ds.inputs, part.student_test_idx);
      Matrix X_val = part.val_data ? part.val_data->inputs : take_rows(ds.inputs, part.val_idx);
      std::vector<int> y_val =
          part.val_data ? part.val_data->labels : take_labels(ds.labels, part.val_idx);
      MetricsRecord m;
      m.acc_T_star = accuracy(teacher, X_T, take_labels(ds.labels, part.teacher_idx));
      m.acc_T_val = accuracy(teacher, X_val, y_val);
      m.acc_S_train = accuracy(student, X_tr, take_labels(ds.labels, part.student_train_idx));
      m.acc_S_test = accuracy(student, X_te, take_labels(ds.labels, part.student_test_idx));
      m.acc_S_val = accuracy(student, X_val, y_val);
      m.acc_S_match_T = match_accuracy(student, teacher, X_te);
      m.mse_train = logit_mse(student, teacher, X_tr);
      m.mse_test = logit_mse(student, teacher, X_te);
      std::cout << json{{"acc_T_star", m.acc_T_star},
                        {"acc_S_train", m.acc_S_train},
                        {"acc_S_test", m.acc_S_test},
                        {"acc_T_val", m.acc_T_val},
                        {"acc_S_val", m.acc_S_val},
                        {"acc_S_match_T", m.acc_S_match_T},
                        {"mse_train", m.mse_train},
                        {"mse_test", m.mse_test},
                        {"regime", regime_name(classify_regime(m))}}
                       .dump(2)
                << "\n";
    } else if (sw->parsed()) {
      SweepConfig cfg = SweepConfig::from_json(load_json(sw_config));
      if (!sw_out.empty()) cfg.output_dir = sw_out;
      ResultStore store = run_sweep(cfg, sw_workers, sw_verbose);
      std::cout << store.cells.size() << " cells in " << cfg.output_dir << "\n";
    } else if (th->parsed()) {
      ResultStore store = ResultStore::load_csv(th_store + "/cells.csv");
      json manifest = load_json(th_store + "/manifest.json");
      std::string mode = manifest.at("config").value("mode", "ce");
      RegimeCutoffs cutoffs;
      std::optional<double> rho, tau;
      if (th_rho >= 0) rho = th_rho;
      if (th_tau >= 0) tau = th_tau;
      ThresholdSummary sum = named_threshold(store, th_name, mode, cutoffs, rho, tau);
      json out{{"name", sum.name},
               {"metric", sum.metric},
               {"cutoff", sum.cutoff},
               {"direction", sum.direction == CrossDirection::falling ? "falling" : "rising"},
               {"n_seeds", sum.n_seeds},
               {"n_crossed", sum.n_crossed}};
      if (sum.n_crossed > 0) {
        out["alpha_star"] = sum.alpha.mean;
        out["sem"] = sum.alpha.sem;
      } else {
        out["not_crossed"] = true;
      }
      std::cout << out.dump(2) << "\n";
    } else if (pl->parsed()) {
      if (pl_kind == "boundary") {
        if (pl_model.empty() || pl_data.empty())
          return fail("plot --kind boundary needs --model and --data");
        Model model = model_from_json(load_json(pl_model));
        Dataset ds = dataset_from_json(load_json(pl_data));
        emit_decision_boundary(model, ds, -pl_hi, pl_hi, pl_res, pl_out);
      } else {
        if (pl_store.empty()) return fail("plot needs --store");
        ResultStore store = ResultStore::load_csv(pl_store + "/cells.csv");
        std::optional<double> tau, rho;
        if (pl_tau >= 0) tau = pl_tau;
        if (pl_rho >= 0) rho = pl_rho;
        emit_heatmap(store, pl_kind == "regime" ? "regime" : pl_metric, pl_x, pl_y, pl_out,
                     tau, rho);
      }
      std::cout << pl_out << "\n";
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 0;
}

#include "leaklab/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace leaklab {

namespace {

// stream tags for per-cell substreams
constexpr std::uint64_t kDataTag = 0xda7a;
constexpr std::uint64_t kPartitionTag = 0x9a27;
constexpr std::uint64_t kTeacherTag = 0x7eac;
constexpr std::uint64_t kStudentTag = 0x57d;
constexpr std::uint64_t kShuffleTag = 0x5f;

json train_config_to_json(const TrainConfig& t) {
  return json{{"steps", t.steps},       {"lr", t.lr},
              {"beta1", t.beta1},       {"beta2", t.beta2},
              {"eps", t.eps},           {"weight_decay", t.weight_decay},
              {"stop_loss", t.stop_loss}, {"early_stop", t.early_stop},
              {"record_every", t.record_every}, {"bias", t.bias}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig t) {
  t.steps = j.value("steps", t.steps);
  t.lr = j.value("lr", t.lr);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.eps = j.value("eps", t.eps);
  t.weight_decay = j.value("weight_decay", t.weight_decay);
  t.stop_loss = j.value("stop_loss", t.stop_loss);
  t.early_stop = j.value("early_stop", t.early_stop);
  t.record_every = j.value("record_every", t.record_every);
  t.bias = j.value("bias", t.bias);
  return t;
}

json arch_to_json(const ArchSpec& a) {
  return json{{"arch", arch_name(a.arch)}, {"hidden", a.hidden}, {"bias", a.bias}};
}

ArchSpec arch_from_json(const json& j, ArchSpec a) {
  if (j.contains("arch")) a.arch = arch_from_name(j.at("arch").get<std::string>());
  if (j.contains("hidden")) a.hidden = j.at("hidden").get<std::vector<Index>>();
  a.bias = j.value("bias", a.bias);
  return a;
}

}  // namespace

SweepConfig SweepConfig::from_json(const json& j) {
  SweepConfig c;
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    if (d.contains("kind")) c.dataset.kind = dataset_kind_from_name(d.at("kind").get<std::string>());
    c.dataset.d = d.value("d", c.dataset.d);
    c.dataset.c = d.value("c", c.dataset.c);
    c.dataset.p = d.value("p", c.dataset.p);
    if (c.dataset.kind == DatasetKind::modular_addition) {
      c.dataset.d = 3 * static_cast<Index>(c.dataset.p);
      c.dataset.c = c.dataset.p;
    }
    if (c.dataset.kind == DatasetKind::toy2d) c.dataset.d = 2;
  }
  if (j.contains("alpha_grid")) c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  if (j.contains("rho_grid")) c.rho_grid = j.at("rho_grid").get<std::vector<double>>();
  if (j.contains("tau_grid")) c.tau_grid = j.at("tau_grid").get<std::vector<double>>();
  std::string units = j.value("alpha_units", "n_over_d");
  if (units == "n_over_d") c.alpha_units = AlphaUnits::n_over_d;
  else if (units == "n_over_dc") c.alpha_units = AlphaUnits::n_over_dc;
  else throw std::invalid_argument("alpha_units must be n_over_d or n_over_dc");
  c.teacher_frac = j.value("teacher_frac", c.teacher_frac);
  if (j.contains("teacher_arch")) c.teacher_arch = arch_from_json(j.at("teacher_arch"), c.teacher_arch);
  if (j.contains("student_arch")) c.student_arch = arch_from_json(j.at("student_arch"), c.student_arch);
  else c.student_arch = c.teacher_arch;
  c.teacher_train.steps = 10000;
  c.student_train.steps = c.student_arch.arch == Arch::linear ? 5000 : 50000;
  if (j.contains("teacher_train")) c.teacher_train = train_config_from_json(j.at("teacher_train"), c.teacher_train);
  if (j.contains("student_train")) c.student_train = train_config_from_json(j.at("student_train"), c.student_train);
  c.mode = j.value("mode", c.mode);
  if (c.mode != "ce" && c.mode != "pinv") throw std::invalid_argument("mode must be ce or pinv");
  if (j.contains("transform")) c.transform = Transform::parse(j.at("transform").get<std::string>());
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("cutoffs")) {
    const json& cj = j.at("cutoffs");
    c.cutoffs.fit = cj.value("fit", c.cutoffs.fit);
    c.cutoffs.weak = cj.value("weak", c.cutoffs.weak);
    c.cutoffs.mse = cj.value("mse", c.cutoffs.mse);
  }
  c.record_traces = j.value("record_traces", c.record_traces);
  c.output_dir = j.value("output_dir", c.output_dir);

  if (c.alpha_grid.empty() || c.rho_grid.empty() || c.tau_grid.empty())
    throw std::invalid_argument("sweep grids must be nonempty");
  for (double a : c.alpha_grid)
    if (a <= 0) throw std::invalid_argument("alpha values must be > 0");
  for (double r : c.rho_grid)
    if (r <= 0 || r >= 1) throw std::invalid_argument("rho values must be in (0,1)");
  for (double t : c.tau_grid)
    if (t <= 0) throw std::invalid_argument("tau values must be > 0");
  return c;
}

json SweepConfig::to_json() const {
  return json{
      {"dataset",
       {{"kind", dataset_kind_name(dataset.kind)}, {"d", dataset.d}, {"c", dataset.c}, {"p", dataset.p}}},
      {"alpha_grid", alpha_grid},
      {"rho_grid", rho_grid},
      {"tau_grid", tau_grid},
      {"alpha_units", alpha_units == AlphaUnits::n_over_d ? "n_over_d" : "n_over_dc"},
      {"teacher_frac", teacher_frac},
      {"teacher_arch", arch_to_json(teacher_arch)},
      {"student_arch", arch_to_json(student_arch)},
      {"teacher_train", train_config_to_json(teacher_train)},
      {"student_train", train_config_to_json(student_train)},
      {"mode", mode},
      {"transform", transform.tag()},
      {"seeds", seeds},
      {"cutoffs", {{"fit", cutoffs.fit}, {"weak", cutoffs.weak}, {"mse", cutoffs.mse}}},
      {"record_traces", record_traces},
      {"output_dir", output_dir}};
}

std::uint64_t SweepConfig::hash() const {
  json j = to_json();
  j.erase("output_dir");  // relocating a store must not change cell keys
  std::string s = j.dump();
  return fnv1a(s.data(), s.size());
}

Index SweepConfig::n_for_alpha(double alpha) const {
  if (dataset.kind == DatasetKind::modular_addition)
    return static_cast<Index>(dataset.p) * dataset.p;
  double scale = static_cast<double>(dataset.d);
  if (alpha_units == AlphaUnits::n_over_dc) scale *= dataset.c;
  return round_count(alpha * scale);
}

std::uint64_t cell_key(const SweepConfig& cfg, const CellCoords& coords) {
  std::uint64_t h = cfg.hash();
  h = fnv1a(&coords.alpha, sizeof(double), h);
  h = fnv1a(&coords.rho, sizeof(double), h);
  h = fnv1a(&coords.tau, sizeof(double), h);
  h = fnv1a(&coords.seed, sizeof(std::uint64_t), h);
  return h;
}

CellResult run_cell(const SweepConfig& cfg, const CellCoords& coords) {
  CellResult cell;
  cell.coords = coords;
  cell.key = cell_key(cfg, coords);
  auto t0 = std::chrono::steady_clock::now();
  try {
    const Index n = cfg.n_for_alpha(coords.alpha);
    RngState base(coords.seed);

    Dataset ds;
    switch (cfg.dataset.kind) {
      case DatasetKind::random_iid: {
        RngState r = base.fork(kDataTag);
        ds = sample_random_dataset(r, n, cfg.dataset.d, cfg.dataset.c);
        break;
      }
      case DatasetKind::toy2d: {
        RngState r = base.fork(kDataTag);
        ds = gen_toy_2d(r, n, cfg.dataset.c);
        break;
      }
      case DatasetKind::modular_addition:
        ds = gen_modular_addition(cfg.dataset.p);
        break;
    }
    cell.n = ds.n();
    cell.d = ds.d();
    cell.c = ds.c;

    RngState prng = base.fork(kPartitionTag);
    Partition part = make_partition(prng, ds, cfg.teacher_frac, coords.rho);
    cell.n_train = static_cast<Index>(part.student_train_idx.size());
    cell.n_test = static_cast<Index>(part.student_test_idx.size());

    Matrix X_T = take_rows(ds.inputs, part.teacher_idx);
    std::vector<int> y_T = take_labels(ds.labels, part.teacher_idx);
    Matrix X_val = part.val_data ? part.val_data->inputs : take_rows(ds.inputs, part.val_idx);
    std::vector<int> y_val =
        part.val_data ? part.val_data->labels : take_labels(ds.labels, part.val_idx);

    RngState trng = base.fork(kTeacherTag);
    TrainResult teacher =
        train_teacher(trng, X_T, y_T, ds.c, cfg.teacher_arch.arch, cfg.teacher_arch.hidden,
                      cfg.teacher_train);

    Matrix X_tr = take_rows(ds.inputs, part.student_train_idx);
    std::vector<int> y_tr = take_labels(ds.labels, part.student_train_idx);
    Matrix X_te = take_rows(ds.inputs, part.student_test_idx);
    std::vector<int> y_te = take_labels(ds.labels, part.student_test_idx);

    Model student;
    if (cfg.mode == "pinv") {
      student = pinv_student(X_tr, forward_logits(teacher.model, X_tr));
    } else {
      SoftLabelSet soft = make_soft_labels(teacher.model, X_tr, coords.tau);
      RngState srng = base.fork(kShuffleTag);
      soft = apply_transform(srng, soft, cfg.transform, y_tr);
      RngState irng = base.fork(kStudentTag);
      EvalSets eval;
      if (cfg.record_traces) {
        eval.X_test = &X_te;
        eval.y_test = &y_te;
        eval.X_val = &X_val;
        eval.y_val = &y_val;
      }
      TrainResult st = train_student(irng, X_tr, soft, y_tr, ds.c, cfg.student_arch.arch,
                                     cfg.student_arch.hidden, cfg.student_train, eval);
      student = std::move(st.model);
      if (cfg.record_traces) cell.student_trace = std::move(st.trace);
    }

    MetricsRecord& m = cell.metrics;
    m.acc_T_star = accuracy(teacher.model, X_T, y_T);
    m.acc_T_val = accuracy(teacher.model, X_val, y_val);
    m.acc_S_train = accuracy(student, X_tr, y_tr);
    m.acc_S_test = accuracy(student, X_te, y_te);
    m.acc_S_val = accuracy(student, X_val, y_val);
    m.acc_S_match_T = match_accuracy(student, teacher.model, X_te);
    m.mse_train = logit_mse(student, teacher.model, X_tr);
    m.mse_test = logit_mse(student, teacher.model, X_te);
    cell.regime = classify_regime(m, cfg.cutoffs);
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  cell.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

const char* ResultStore::csv_header() {
  return "key,alpha,rho,tau,seed,n,d,c,n_train,n_test,status,regime,"
         "acc_T_star,acc_S_train,acc_S_test,acc_T_val,acc_S_val,acc_S_match_T,"
         "mse_train,mse_test,duration_s";
}

namespace {

std::string format_cell_row(const CellResult& c) {
  char buf[768];
  auto g = [](double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return std::string(b);
  };
  std::snprintf(buf, sizeof(buf),
                "%llu,%s,%s,%s,%llu,%lld,%lld,%d,%lld,%lld,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s",
                static_cast<unsigned long long>(c.key), g(c.coords.alpha).c_str(),
                g(c.coords.rho).c_str(), g(c.coords.tau).c_str(),
                static_cast<unsigned long long>(c.coords.seed),
                static_cast<long long>(c.n), static_cast<long long>(c.d), c.c,
                static_cast<long long>(c.n_train), static_cast<long long>(c.n_test),
                c.failed ? "failed" : "ok", regime_name(c.regime),
                g(c.metrics.acc_T_star).c_str(), g(c.metrics.acc_S_train).c_str(),
                g(c.metrics.acc_S_test).c_str(), g(c.metrics.acc_T_val).c_str(),
                g(c.metrics.acc_S_val).c_str(), g(c.metrics.acc_S_match_T).c_str(),
                g(c.metrics.mse_train).c_str(), g(c.metrics.mse_test).c_str(),
                g(c.duration_s).c_str());
  return std::string(buf);
}

}  // namespace

void ResultStore::append(const CellResult& cell) {
  for (const CellResult& existing : cells) {
    if (existing.key == cell.key) {
      if (format_cell_row(existing) != format_cell_row(cell))
        throw std::runtime_error("ResultStore: duplicate key with differing payload");
      return;
    }
  }
  cells.push_back(cell);
}

void ResultStore::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << csv_header() << "\n";
  for (const CellResult& c : cells) out << format_cell_row(c) << "\n";
}

ResultStore ResultStore::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  ResultStore store;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 21) throw std::runtime_error("malformed cells.csv row");
    CellResult c;
    c.key = std::stoull(f[0]);
    c.coords.alpha = std::stod(f[1]);
    c.coords.rho = std::stod(f[2]);
    c.coords.tau = std::stod(f[3]);
    c.coords.seed = std::stoull(f[4]);
    c.n = std::stoll(f[5]);
    c.d = std::stoll(f[6]);
    c.c = std::stoi(f[7]);
    c.n_train = std::stoll(f[8]);
    c.n_test = std::stoll(f[9]);
    c.failed = f[10] == "failed";
    c.regime = regime_from_name(f[11]);
    c.metrics.acc_T_star = std::stod(f[12]);
    c.metrics.acc_S_train = std::stod(f[13]);
    c.metrics.acc_S_test = std::stod(f[14]);
    c.metrics.acc_T_val = std::stod(f[15]);
    c.metrics.acc_S_val = std::stod(f[16]);
    c.metrics.acc_S_match_T = std::stod(f[17]);
    c.metrics.mse_train = std::stod(f[18]);
    c.metrics.mse_test = std::stod(f[19]);
    c.duration_s = std::stod(f[20]);
    store.cells.push_back(std::move(c));
  }
  return store;
}

int default_worker_count() {
  if (const char* env = std::getenv("LEAKLAB_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

ResultStore run_sweep(const SweepConfig& cfg, int workers, bool verbose) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string csv_path = cfg.output_dir + "/cells.csv";

  ResultStore store;
  if (fs::exists(csv_path)) store = ResultStore::load_csv(csv_path);

  std::vector<CellCoords> todo;
  for (double alpha : cfg.alpha_grid)
    for (double rho : cfg.rho_grid)
      for (double tau : cfg.tau_grid)
        for (std::uint64_t seed : cfg.seeds) {
          CellCoords coords{alpha, rho, tau, seed};
          std::uint64_t key = cell_key(cfg, coords);
          bool have = false;
          for (const CellResult& c : store.cells)
            if (c.key == key) { have = true; break; }
          if (!have) todo.push_back(coords);
        }

  if (workers <= 0) workers = default_worker_count();
  workers = std::min<int>(workers, std::max<std::size_t>(todo.size(), 1));

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::ofstream out(csv_path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open for writing: " + csv_path);
  if (store.cells.empty() && fs::file_size(csv_path) == 0)
    out << ResultStore::csv_header() << "\n";

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      CellResult cell = run_cell(cfg, todo[i]);
      std::lock_guard<std::mutex> lock(mu);
      store.append(cell);
      out << format_cell_row(cell) << "\n";
      out.flush();
      if (cfg.record_traces && !cell.student_trace.empty()) {
        fs::create_directories(cfg.output_dir + "/traces");
        json jt = json::array();
        for (const TracePoint& tp : cell.student_trace)
          jt.push_back({{"step", tp.step},
                        {"loss", tp.loss},
                        {"acc_train", tp.acc_train},
                        {"acc_test", tp.acc_test},
                        {"acc_val", tp.acc_val}});
        save_json(jt, cfg.output_dir + "/traces/cell_" + std::to_string(cell.key) + ".json");
      }
      if (verbose)
        std::fprintf(stderr, "[%zu/%zu] alpha=%g rho=%g tau=%g seed=%llu %s\n", i + 1,
                     todo.size(), cell.coords.alpha, cell.coords.rho, cell.coords.tau,
                     static_cast<unsigned long long>(cell.coords.seed),
                     cell.failed ? cell.error.c_str() : regime_name(cell.regime));
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json manifest{{"schema", "leaklab.manifest.v1"},
                {"config", cfg.to_json()},
                {"config_hash", cfg.hash()},
                {"n_cells", store.cells.size()}};
  save_json(manifest, cfg.output_dir + "/manifest.json");
  return store;
}

}  // namespace leaklab

#include "leaklab/thresholds.hpp"

#include <map>

namespace leaklab {

namespace {

double pick_metric(const CellResult& c, const std::string& metric) {
  if (metric == "acc_T_star") return c.metrics.acc_T_star;
  if (metric == "acc_S_train") return c.metrics.acc_S_train;
  if (metric == "acc_S_test") return c.metrics.acc_S_test;
  if (metric == "acc_T_val") return c.metrics.acc_T_val;
  if (metric == "acc_S_val") return c.metrics.acc_S_val;
  if (metric == "acc_S_match_T") return c.metrics.acc_S_match_T;
  if (metric == "mse_train") return c.metrics.mse_train;
  if (metric == "mse_test") return c.metrics.mse_test;
  throw std::invalid_argument("unknown metric: " + metric);
}

}  // namespace

ThresholdSummary threshold_over_seeds(const ResultStore& store, const std::string& metric,
                                      double cutoff, CrossDirection direction,
                                      std::optional<double> rho, std::optional<double> tau) {
  std::map<std::uint64_t, std::map<double, std::vector<double>>> by_seed;
  for (const CellResult& c : store.cells) {
    if (c.failed) continue;
    if (rho && c.coords.rho != *rho) continue;
    if (tau && c.coords.tau != *tau) continue;
    by_seed[c.coords.seed][c.coords.alpha].push_back(pick_metric(c, metric));
  }
  ThresholdSummary sum;
  sum.metric = metric;
  sum.cutoff = cutoff;
  sum.direction = direction;
  for (auto& [seed, points] : by_seed) {
    std::vector<std::pair<double, double>> curve;
    for (auto& [alpha, vals] : points) {
      double mean = 0;
      for (double v : vals) mean += v;
      curve.emplace_back(alpha, mean / static_cast<double>(vals.size()));
    }
    ++sum.n_seeds;
    ThresholdEstimate est = estimate_threshold(curve, cutoff, direction);
    if (est.crossed) {
      ++sum.n_crossed;
      sum.per_seed.push_back(est.alpha_star);
    }
  }
  sum.alpha = mean_sem(sum.per_seed);
  return sum;
}

ThresholdSummary named_threshold(const ResultStore& store, const std::string& name,
                                 const std::string& mode, const RegimeCutoffs& cutoffs,
                                 std::optional<double> rho, std::optional<double> tau) {
  ThresholdSummary sum;
  if (name == "alpha_T_label") {
    sum = threshold_over_seeds(store, "acc_T_star", cutoffs.fit, CrossDirection::falling, rho, tau);
  } else if (name == "alpha_S_label" || name == "alpha_S_shuffle_label") {
    sum = threshold_over_seeds(store, "acc_S_train", cutoffs.fit, CrossDirection::falling, rho, tau);
  } else if (name == "alpha_S_id") {
    sum = mode == "pinv"
              ? threshold_over_seeds(store, "mse_test", cutoffs.mse, CrossDirection::falling, rho, tau)
              : threshold_over_seeds(store, "acc_S_match_T", cutoffs.fit, CrossDirection::rising, rho, tau);
  } else {
    throw std::invalid_argument("unknown threshold name: " + name);
  }
  sum.name = name;
  return sum;
}

}  // namespace leaklab

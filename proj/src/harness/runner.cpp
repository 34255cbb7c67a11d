#include "covest/harness/runner.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "covest/error.hpp"
#include "covest/estimators.hpp"
#include "covest/linalg.hpp"
#include "covest/mimo.hpp"
#include "covest/quantized.hpp"
#include "covest/synth.hpp"

namespace covest::harness {

namespace {

using Meta = std::vector<std::pair<std::string, std::string>>;

// Keys the ASF draws apart from the pilot draws of the same trial.
constexpr std::uint64_t kAsfKey = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string num(double x) { return format_value(x); }

std::string join(const Meta& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ';' || c == '\n' || c == '\r' || c == ',' || c == '"') c = ' ';
  }
  return s;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------ real domain

SymMatrix make_truth(const TruthConfig& t, const GridPoint& gp, RngStream& rng) {
  const std::size_t p = gp.dim;
  SymMatrix sigma;
  if (t.model == "const_corr") {
    sigma = realize(ConstCorr{gp.corr.value_or(0.0)}, p, rng);
  } else if (t.model == "banded_toeplitz") {
    sigma = realize(BandedToeplitz{t.toeplitz_col, t.toeplitz_width}, p, rng);
  } else if (t.model == "sparse_random") {
    sigma = realize(SparseRandom{t.sparse_q, t.sparse_s, t.sparse_bound}, p, rng);
  } else if (t.model == "low_rank") {
    sigma = realize(LowRankPlusRidge{t.rank, t.ridge}, p, rng);
  } else {
    sigma = SymMatrix::identity(p);
  }
  if (t.diag_scale == "linear") {
    std::vector<double> d(p);
    for (std::size_t i = 0; i < p; ++i) d[i] = static_cast<double>(i + 1);
    sigma = diag_conjugate(sigma, d);
  }
  return sigma;
}

struct RealInputs {
  const ExperimentConfig& cfg;
  const GridPoint& gp;
  std::size_t trial;
  const SymMatrix& sigma;
  const SampleBatch& x;
};

RngStream dither_stream(const RealInputs& in, const EstimatorSpec& e) {
  return RngStream(in.cfg.seed ^ fnv1a(e.label()), in.trial);
}

double dither_level(const RealInputs& in, const EstimatorSpec& e, Meta& meta) {
  const double sinf = max_norm(in.sigma);
  if (in.gp.lambda) {
    const double lam = *in.gp.lambda * sinf;
    meta.emplace_back("lambda", num(lam));
    meta.emplace_back("lambda_rel", num(*in.gp.lambda));
    return lam;
  }
  const double c = e.number("c", 1.0);
  const double lam = dither_level_rule(sinf, static_cast<double>(in.x.rows()), c);
  meta.emplace_back("c_lambda", num(c));
  meta.emplace_back("lambda", num(lam));
  return lam;
}

SymMatrix eval_real(const EstimatorSpec& e, const RealInputs& in, Meta& meta) {
  const std::size_t n = in.x.rows();
  const std::size_t p = in.x.cols();
  if (e.id == "sample") return sample_cov(in.x);
  if (e.id == "sign") return sign_estimator(quantize_sign(in.x));
  if (e.id == "sign_psd") return psd_projected(sign_estimator(quantize_sign(in.x)));
  if (e.id == "dithered" || e.id == "dithered_psd") {
    const double lam = dither_level(in, e, meta);
    RngStream rng = dither_stream(in, e);
    SymMatrix est = dithered_estimator(quantize_dithered(in.x, lam, rng));
    return e.id == "dithered" ? est : psd_projected(est);
  }
  if (e.id == "dithered_oracle") {
    const double pts = e.number("points", 16);
    const double mx = e.number("max", 4.0);
    require(pts >= 1 && pts == std::floor(pts), ErrorCode::InvalidParam, "points must be a positive integer");
    require(mx > 0, ErrorCode::InvalidParam, "max must be positive");
    const double sinf = max_norm(in.sigma);
    SymMatrix best;
    double best_err = std::numeric_limits<double>::infinity();
    double best_lam = 0.0;
    const auto k_max = static_cast<std::size_t>(pts);
    for (std::size_t k = 1; k <= k_max; ++k) {
      const double lam = mx * sinf * static_cast<double>(k) / pts;
      // Same dither draws for every level.
      RngStream rng = dither_stream(in, e);
      SymMatrix est = dithered_estimator(quantize_dithered(in.x, lam, rng));
      const double err = operator_norm(est - in.sigma);
      if (err < best_err) {
        best_err = err;
        best = std::move(est);
        best_lam = lam;
      }
    }
    meta.emplace_back("lambda", num(best_lam));
    meta.emplace_back("lambda_points", num(pts));
    meta.emplace_back("lambda_max_rel", num(mx));
    meta.emplace_back("selection", "oracle_operator");
    return best;
  }
  if (e.id == "thresholded") {
    ThresholdRule rule = BickelRule{e.number("mprime", 1.0)};
    if (e.get("tau")) {
      rule = FixedTau{e.number("tau", 0.0)};
    } else {
      meta.emplace_back("mprime", num(std::get<BickelRule>(rule).mprime));
    }
    meta.emplace_back("tau", num(resolve_tau(rule, n, p)));
    return thresholded_cov(in.x, rule);
  }
  if (e.id == "banded") {
    const double w = e.number("width", 3);
    require(w >= 1 && w == std::floor(w), ErrorCode::InvalidParam, "width must be a positive integer");
    const auto width = std::min(static_cast<std::size_t>(w), p);
    meta.emplace_back("width", std::to_string(width));
    return band(sample_cov(in.x), width);
  }
  if (e.id == "toeplitz") return toeplitz_cov(in.x).expand();
  if (e.id == "toeplitz_thresholded") {
    const ToeplitzRule rule{e.number("C", 1.0), e.number("K", 1.0), e.number("c", 2.0), e.number("alpha", 0.5)};
    meta.emplace_back("C", num(rule.C));
    meta.emplace_back("K", num(rule.K));
    meta.emplace_back("c", num(rule.c));
    meta.emplace_back("alpha", num(rule.alpha));
    meta.emplace_back("tau", num(resolve_tau(rule, n, p)));
    meta.emplace_back("band_width", std::to_string(toeplitz_band_width(rule.alpha, p)));
    return toeplitz_thresholded_cov(in.x, rule);
  }
  if (e.id == "lasso") {
    const double C = e.number("C", 1.0);
    const SymMatrix s = sample_cov(in.x);
    const double lam = lounici_lambda(s, n, C);
    meta.emplace_back("C", num(C));
    meta.emplace_back("lambda", num(lam));
    return lasso_lowrank(s, lam);
  }
  throw Error(ErrorCode::ConfigError, "estimators: unknown estimator '" + e.id + "'");
}

double real_metric(const std::string& m, const SymMatrix& est, const SymMatrix& sigma) {
  const SymMatrix diff = est - sigma;
  return m == "operator" ? operator_norm(diff) : frobenius_norm(diff);
}

ResultRow base_row(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t trial) {
  ResultRow r;
  r.experiment = to_string(cfg.experiment);
  r.trial = trial;
  r.grid_point = gp.label(cfg.mimo);
  return r;
}

void push_failed(std::vector<ResultRow>& out, ResultRow row, const std::vector<std::string>& metrics, Meta meta,
                 const std::string& code, const std::string& what) {
  meta.emplace_back("status", "failed");
  meta.emplace_back("error", code);
  meta.emplace_back("message", sanitize(what));
  row.value = std::numeric_limits<double>::quiet_NaN();
  row.wall_time = 0.0;
  row.metadata = join(meta);
  for (const auto& m : metrics) {
    row.metric = m;
    out.push_back(row);
  }
}

template <class F>
void guarded(F&& f, std::vector<ResultRow>& out, const ResultRow& row, const std::vector<std::string>& metrics,
             const Meta& meta) {
  try {
    f();
  } catch (const Error& e) {
    push_failed(out, row, metrics, meta, std::string(covest::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    push_failed(out, row, metrics, meta, "Exception", e.what());
  }
}

std::vector<ResultRow> run_real(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t trial) {
  std::vector<ResultRow> out;
  Meta base = {{"seed", std::to_string(cfg.seed)}, {"truth", cfg.truth.describe(gp.corr)}};
  for (const auto& kv : cfg.notes) base.push_back(kv);

  RngStream rng(cfg.seed, trial);
  SymMatrix sigma;
  SampleBatch x;
  try {
    sigma = make_truth(cfg.truth, gp, rng);
    x = sample_gaussian(sigma, gp.samples, rng);
  } catch (const Error& e) {
    for (const auto& est : cfg.estimators) {
      ResultRow row = base_row(cfg, gp, trial);
      row.estimator = est.label();
      push_failed(out, row, cfg.metrics, base, std::string(covest::to_string(e.code())), e.what());
    }
    return out;
  }

  const RealInputs in{cfg, gp, trial, sigma, x};
  for (const auto& est : cfg.estimators) {
    ResultRow row = base_row(cfg, gp, trial);
    row.estimator = est.label();
    Meta meta = base;
    guarded(
        [&] {
          const auto t0 = Clock::now();
          const SymMatrix e = eval_real(est, in, meta);
          const double wt = cfg.wall_time ? seconds_since(t0) : 0.0;
          std::vector<ResultRow> rows;
          for (const auto& m : cfg.metrics) {
            ResultRow r = row;
            r.metric = m;
            r.value = real_metric(m, e, sigma);
            require(std::isfinite(r.value), ErrorCode::NonFinite, "metric is not finite");
            r.wall_time = wt;
            r.metadata = join(meta);
            rows.push_back(std::move(r));
          }
          out.insert(out.end(), rows.begin(), rows.end());
        },
        out, row, cfg.metrics, meta);
  }
  return out;
}

// ------------------------------------------------------------ mimo domain

std::vector<std::size_t> epe_dims(const ExperimentConfig& cfg, std::size_t M) {
  std::vector<std::size_t> ds;
  if (cfg.mimo_settings.epe_d.empty()) {
    for (std::size_t d = 1; d <= M / 2; d *= 2) ds.push_back(d);
  } else {
    for (std::size_t d : cfg.mimo_settings.epe_d) {
      if (d <= M) ds.push_back(d);
    }
  }
  return ds;
}

std::vector<std::string> mimo_metric_names(const ExperimentConfig& cfg, const std::vector<std::size_t>& ds) {
  std::vector<std::string> names;
  for (const auto& m : cfg.metrics) {
    if (m == "enf") {
      names.push_back("enf");
    } else {
      for (std::size_t d : ds) names.push_back("epe_d" + std::to_string(d));
    }
  }
  return names;
}

PipelineConfig pipeline_config(const EstimatorSpec& e, const UlaConfig& ula, Meta& meta) {
  PipelineConfig pc;
  pc.ula = ula;
  const std::string kind = e.get("dict").value_or("dirac");
  const auto k = dict_kind_from_string(kind);
  require(k.has_value(), ErrorCode::InvalidParam, "unknown dictionary '" + kind + "'");
  pc.kind = *k;
  const double g = e.number("G", 0);
  require(g >= 0 && g == std::floor(g), ErrorCode::InvalidParam, "G must be a non-negative integer");
  pc.dict_size = static_cast<std::size_t>(g);
  const std::string order = e.get("order").value_or("auto");
  AutoOrder rule{e.number("rho", 3.0), static_cast<std::size_t>(e.number("cap", 8))};
  if (order == "auto") {
    pc.order = rule;
    meta.emplace_back("music_order", "auto");
    meta.emplace_back("rho", num(rule.rho));
    meta.emplace_back("cap", std::to_string(rule.cap));
  } else {
    const double r = e.number("order", 0);
    require(r >= 0 && r == std::floor(r), ErrorCode::InvalidParam, "order must be auto or an integer");
    pc.order = static_cast<std::size_t>(r);
    meta.emplace_back("music_order", std::to_string(static_cast<std::size_t>(r)));
  }
  meta.emplace_back("dict", to_string(pc.kind));
  meta.emplace_back("G", std::to_string(pc.dict_size ? pc.dict_size : 2 * ula.M));
  return pc;
}

std::vector<ResultRow> run_mimo(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t trial) {
  std::vector<ResultRow> out;
  const auto& ms = cfg.mimo_settings;
  const std::size_t a = trial / ms.realizations;
  const std::size_t r = trial % ms.realizations;
  const UlaConfig ula{gp.dim, ms.spacing};
  const auto ds = epe_dims(cfg, gp.dim);
  const auto names = mimo_metric_names(cfg, ds);

  Meta base = {{"seed", std::to_string(cfg.seed)},
               {"asf", std::to_string(a)},
               {"realization", std::to_string(r)},
               {"snr_db", num(ms.snr_db)},
               {"spacing", num(ms.spacing)},
               {"alpha", num(ms.recipe.alpha)},
               {"spikes", std::to_string(ms.recipe.spikes)},
               {"rects", std::to_string(ms.recipe.rects)},
               {"gaussians", std::to_string(ms.recipe.gaussians)}};
  for (const auto& kv : cfg.notes) base.push_back(kv);

  HermMatrix truth;
  HermEigDecomp truth_eig;
  PilotSamples pilots;
  try {
    RngStream asf_rng(cfg.seed ^ kAsfKey, a);
    const AsfSpec asf = random_asf(asf_rng, ms.recipe);
    truth = true_covariance(asf, ula);
    truth_eig = eig_herm(truth);
    RngStream rng(cfg.seed, trial);
    pilots = simulate_pilots(asf, ula, gp.samples, ms.snr_db, rng);
  } catch (const Error& e) {
    for (const auto& est : cfg.estimators) {
      ResultRow row = base_row(cfg, gp, trial);
      row.estimator = est.label();
      push_failed(out, row, names, base, std::string(covest::to_string(e.code())), e.what());
    }
    return out;
  }
  base.emplace_back("n0", num(pilots.n0));

  for (const auto& est : cfg.estimators) {
    ResultRow row = base_row(cfg, gp, trial);
    row.estimator = est.label();
    Meta meta = base;
    guarded(
        [&] {
          const auto t0 = Clock::now();
          HermMatrix e;
          if (est.id == "sample") {
            e = sample_cov(pilots.y);
            for (std::size_t i = 0; i < gp.dim; ++i) e.set(i, i, e(i, i) - pilots.n0);
          } else {
            const PipelineConfig pc = pipeline_config(est, ula, meta);
            PipelineResult res = estimate_channel(pilots, pc);
            meta.emplace_back("order_selected", std::to_string(res.music.order));
            meta.emplace_back("nnls_iterations", std::to_string(res.fit.iterations));
            meta.emplace_back("nnls_converged", res.fit.converged ? "1" : "0");
            e = std::move(res.nnls);
          }
          const double wt = cfg.wall_time ? seconds_since(t0) : 0.0;
          std::vector<double> values;
          for (const auto& m : cfg.metrics) {
            if (m == "enf") {
              values.push_back(metric_enf(truth, e));
            } else {
              const auto v = metric_epe(truth, truth_eig, e, ds);
              values.insert(values.end(), v.begin(), v.end());
            }
          }
          const std::string md = join(meta);
          for (std::size_t k = 0; k < names.size(); ++k) {
            require(std::isfinite(values[k]), ErrorCode::NonFinite, "metric is not finite");
          }
          for (std::size_t k = 0; k < names.size(); ++k) {
            ResultRow rr = row;
            rr.metric = names[k];
            rr.value = values[k];
            rr.wall_time = wt;
            rr.metadata = md;
            out.push_back(std::move(rr));
          }
        },
        out, row, names, meta);
  }
  return out;
}

// ------------------------------------------------------------------- csv

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in CSV line");
  out.push_back(std::move(cur));
  return out;
}

double parse_value(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in CSV");
  }
  return v;
}

}  // namespace

bool ResultRow::failed() const {
  for (const auto& [k, v] : split_pairs(metadata)) {
    if (k == "status" && v == "failed") return true;
  }
  return false;
}

const std::vector<EstimatorInfo>& estimator_registry() {
  static const std::vector<EstimatorInfo> reg = {
      {"sample", false, {}, "sample covariance (1/n) sum x x^T"},
      {"sign", false, {}, "one-bit sign estimator sin(pi/2 * bit Gram)"},
      {"sign_psd", false, {}, "sign estimator projected onto the PSD cone"},
      {"dithered", false, {"c"}, "two-bit dithered estimator; lambda from the grid or lambda^2 = c log(n) ||Sigma||_inf"},
      {"dithered_psd", false, {"c"}, "dithered estimator projected onto the PSD cone"},
      {"dithered_oracle",
       false,
       {"points", "max"},
       "dithered estimator at the best of `points` levels on (0, max ||Sigma||_inf], chosen per trial against the truth"},
      {"thresholded", false, {"mprime", "tau"}, "hard-thresholded sample covariance, tau = mprime sqrt(log p / n)"},
      {"banded", false, {"width"}, "sample covariance restricted to a band"},
      {"toeplitz", false, {}, "diagonal averages of the sample covariance"},
      {"toeplitz_thresholded",
       false,
       {"C", "K", "c", "alpha"},
       "thresholded, banded Toeplitz average with the (C, K, c, alpha) tau rule"},
      {"lasso", false, {"C"}, "nuclear-norm penalized PSD estimate, lambda = C sqrt(tr S ||S||) sqrt(log 2p / n)"},
      {"sample", true, {}, "sample covariance of the pilots minus N0 I"},
      {"nnls",
       true,
       {"dict", "G", "order", "rho", "cap"},
       "MUSIC spikes plus dictionary NNLS fit of the denoised Toeplitz column"},
  };
  return reg;
}

const EstimatorInfo* find_estimator(const std::string& id, bool mimo) {
  for (const auto& e : estimator_registry()) {
    if (e.id == id && e.mimo == mimo) return &e;
  }
  return nullptr;
}

std::string GridPoint::label(bool mimo) const {
  std::string out = (mimo ? "M=" : "p=") + std::to_string(dim) + (mimo ? ";N=" : ";n=") + std::to_string(samples);
  if (corr) out += ";c=" + format_value(*corr);
  if (lambda) out += ";lambda=" + format_value(*lambda);
  return out;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
  std::vector<std::optional<double>> cs = {std::nullopt};
  if (!cfg.mimo && cfg.truth.model == "const_corr") cs.assign(cfg.corr.begin(), cfg.corr.end());
  std::vector<std::optional<double>> ls = {std::nullopt};
  if (!cfg.mimo && !cfg.lambda.empty()) ls.assign(cfg.lambda.begin(), cfg.lambda.end());
  std::vector<GridPoint> out;
  for (std::size_t d : cfg.dims) {
    for (const auto& c : cs) {
      for (const auto& l : ls) {
        for (std::size_t n : cfg.samples) out.push_back({d, n, c, l});
      }
    }
  }
  return out;
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t trial) {
  return cfg.mimo ? run_mimo(cfg, gp, trial) : run_real(cfg, gp, trial);
}

std::size_t workers_from_env() {
  if (const char* env = std::getenv("COVEST_WORKERS")) {
    const std::string s(env);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
      throw Error(ErrorCode::ConfigError, "COVEST_WORKERS: expected a positive integer, got '" + s + "'");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run(const ExperimentConfig& cfg, const std::function<void(const ResultRow&)>& sink, std::size_t workers) {
  cfg.validate();
  const auto grid = expand_grid(cfg);
  const std::size_t total = grid.size() * cfg.trials;
  if (workers == 0) workers = workers_from_env();
  workers = std::min(workers, total);

  auto item = [&](std::size_t i) { return run_trial(cfg, grid[i / cfg.trials], i % cfg.trials); };
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) {
      for (const auto& row : item(i)) sink(row);
    }
    return;
  }

  std::vector<std::optional<std::vector<ResultRow>>> slots(total);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr worker_error;

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= total) return;
        try {
          auto rows = item(i);
          std::lock_guard lock(mu);
          slots[i] = std::move(rows);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!worker_error) worker_error = std::current_exception();
          next = total;
        }
        cv.notify_all();
      }
    });
  }

  // Single sink: rows leave in item order whatever the completion order.
  std::exception_ptr sink_error;
  for (std::size_t i = 0; i < total && !sink_error; ++i) {
    std::vector<ResultRow> rows;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[i].has_value() || worker_error; });
      if (!slots[i]) break;
      rows = std::move(*slots[i]);
      slots[i].reset();
    }
    try {
      for (const auto& row : rows) sink(row);
    } catch (...) {
      sink_error = std::current_exception();
      next = total;
    }
  }
  for (auto& t : pool) t.join();
  if (worker_error) std::rethrow_exception(worker_error);
  if (sink_error) std::rethrow_exception(sink_error);
}

std::vector<ResultRow> run(const ExperimentConfig& cfg, std::size_t workers) {
  std::vector<ResultRow> rows;
  run(cfg, [&](const ResultRow& r) { rows.push_back(r); }, workers);
  return rows;
}

std::size_t run_to_csv(const ExperimentConfig& cfg, const std::string& path, std::size_t workers) {
  cfg.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  os << csv_header() << '\n';
  os.flush();
  std::size_t count = 0;
  run(
      cfg,
      [&](const ResultRow& r) {
        os << to_csv_line(r) << '\n';
        os.flush();
        if (!os) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
        ++count;
      },
      workers);
  return count;
}

// ------------------------------------------------------------------- csv

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"experiment", "trial", "grid_point", "estimator",
                                                "metric",     "value", "wall_time",  "metadata"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string format_value(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string to_csv_line(const ResultRow& row) {
  return csv_field(row.experiment) + "," + std::to_string(row.trial) + "," + csv_field(row.grid_point) + "," +
         csv_field(row.estimator) + "," + csv_field(row.metric) + "," + format_value(row.value) + "," +
         format_value(row.wall_time) + "," + csv_field(row.metadata);
}

ResultRow parse_csv_line(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != csv_columns().size()) {
    throw Error(ErrorCode::ParseError, "expected 8 CSV fields, got " + std::to_string(f.size()));
  }
  ResultRow r;
  r.experiment = f[0];
  std::size_t trial = 0;
  const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), trial);
  if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) throw Error(ErrorCode::ParseError, "bad trial id");
  r.trial = trial;
  r.grid_point = f[2];
  r.estimator = f[3];
  r.metric = f[4];
  r.value = parse_value(f[5]);
  r.wall_time = parse_value(f[6]);
  r.metadata = f[7];
  return r;
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header()) throw Error(ErrorCode::ParseError, "missing CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_line(line));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open '" + path + "'");
  return read_csv(in);
}

std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& s) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(';', start);
    if (end == std::string::npos) end = s.size();
    const std::string part = s.substr(start, end - start);
    if (!part.empty()) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) {
        out.emplace_back(part, "");
      } else {
        out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
      }
    }
    start = end + 1;
  }
  return out;
}

}  // namespace covest::harness

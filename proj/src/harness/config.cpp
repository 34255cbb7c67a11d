#include "covest/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "covest/error.hpp"
#include "covest/harness/runner.hpp"

namespace covest::harness {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, field + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double to_double(std::string_view s, const std::string& field) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    config_error(field, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_u64(std::string_view s, const std::string& field) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    config_error(field, "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s, const std::string& field) {
  const std::string v = lower(trim(s));
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  config_error(field, "expected on/off, got '" + v + "'");
}

// Items separated by commas or whitespace at parenthesis depth 0.
std::vector<std::string> split_items(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    const auto t = trim(cur);
    if (!t.empty()) out.emplace_back(t);
    cur.clear();
  };
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == ',' || c == ' ' || c == '\t')) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

// `a:step:b` expands to a, a+step, ..., up to b inclusive.
std::vector<double> parse_real_list(std::string_view s, const std::string& field) {
  std::vector<double> out;
  for (const auto& item : split_items(s)) {
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(to_double(item, field));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) config_error(field, "range must be start:step:stop");
    const double a = to_double(std::string_view(item).substr(0, c1), field);
    const double step = to_double(std::string_view(item).substr(c1 + 1, c2 - c1 - 1), field);
    const double b = to_double(std::string_view(item).substr(c2 + 1), field);
    if (step <= 0 || b < a) config_error(field, "range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(a + step * static_cast<double>(k));
  }
  if (out.empty()) config_error(field, "list is empty");
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view s, const std::string& field) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(s, field)) {
    if (v < 0 || v != std::floor(v)) config_error(field, "expected non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<EstimatorSpec> parse_estimator_list(std::string_view s) {
  std::vector<EstimatorSpec> out;
  for (const auto& item : split_items(s)) out.push_back(parse_estimator(item));
  if (out.empty()) config_error("estimators", "list is empty");
  return out;
}

std::vector<double> lambda_grid(std::size_t points, double lo, double hi) {
  if (points < 2) config_error("lambda_points", "need at least 2 points");
  if (!(lo > 0) || !(hi > lo)) config_error("lambda_min", "need 0 < lambda_min < lambda_max");
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k) out[k] = hi * static_cast<double>(k) / static_cast<double>(points - 1);
  out[0] = lo;
  return out;
}

void set_note(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (auto& [k, v] : cfg.notes) {
    if (k == key) {
      v = value;
      return;
    }
  }
  cfg.notes.emplace_back(key, value);
}

void drop_note(ExperimentConfig& cfg, const std::string& key) {
  std::erase_if(cfg.notes, [&](const auto& kv) { return kv.first == key; });
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

std::optional<Experiment> experiment_from_string(std::string_view s) {
  if (s == "fig3_mimo") return Experiment::Fig3Mimo;
  if (s == "fig4_correlation") return Experiment::Fig4Correlation;
  if (s == "fig5_dimension") return Experiment::Fig5Dimension;
  if (s == "fig6_lambda_sweep") return Experiment::Fig6LambdaSweep;
  if (s == "custom") return Experiment::Custom;
  return std::nullopt;
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Fig3Mimo:
      return "fig3_mimo";
    case Experiment::Fig4Correlation:
      return "fig4_correlation";
    case Experiment::Fig5Dimension:
      return "fig5_dimension";
    case Experiment::Fig6LambdaSweep:
      return "fig6_lambda_sweep";
    case Experiment::Custom:
      return "custom";
  }
  return "custom";
}

// ------------------------------------------------------------ estimators

std::string EstimatorSpec::label() const {
  if (params.empty()) return id;
  std::string out = id + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ';';
    out += params[i].first + "=" + params[i].second;
  }
  return out + ")";
}

std::optional<std::string> EstimatorSpec::get(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return std::nullopt;
}

double EstimatorSpec::number(std::string_view key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(*v, "estimators." + id + "." + std::string(key)) : fallback;
}

EstimatorSpec parse_estimator(std::string_view text) {
  text = trim(text);
  EstimatorSpec spec;
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    spec.id = std::string(text);
  } else {
    if (text.back() != ')') config_error("estimators", "unbalanced parentheses in '" + std::string(text) + "'");
    spec.id = std::string(trim(text.substr(0, open)));
    std::string_view body = text.substr(open + 1, text.size() - open - 2);
    std::string cur;
    auto flush = [&] {
      const std::string item(trim(cur));
      cur.clear();
      const std::string_view t = item;
      if (t.empty()) return;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) config_error("estimators", "parameter '" + std::string(t) + "' needs k=v");
      spec.params.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
    };
    for (char c : body) {
      if (c == ',' || c == ';') {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
  }
  if (spec.id.empty()) config_error("estimators", "empty estimator id");
  return spec;
}

// ----------------------------------------------------------------- truth

std::string TruthConfig::describe(std::optional<double> corr) const {
  std::string out;
  if (model == "const_corr") {
    out = "const_corr(c=" + fmt(corr.value_or(0.0)) + ")";
  } else if (model == "banded_toeplitz") {
    out = "banded_toeplitz(width=" + std::to_string(toeplitz_width) + ";col=";
    for (std::size_t i = 0; i < toeplitz_col.size(); ++i) out += (i ? " " : "") + fmt(toeplitz_col[i]);
    out += ")";
  } else if (model == "sparse_random") {
    out = "sparse_random(q=" + fmt(sparse_q) + ";s=" + fmt(sparse_s) + ";bound=" + fmt(sparse_bound) + ")";
  } else if (model == "low_rank") {
    out = "low_rank(rank=" + std::to_string(rank) + ";ridge=" + fmt(ridge) + ")";
  } else {
    out = model;
  }
  if (diag_scale == "linear") out += "*diag(1..p)";
  return out;
}

// ---------------------------------------------------------------- presets

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::Fig3Mimo:
      cfg.mimo = true;
      cfg.dims = {32};
      cfg.samples = {4, 8, 16, 32, 64};
      cfg.corr.clear();
      cfg.mimo_settings.asfs = 20;
      cfg.mimo_settings.realizations = 50;
      cfg.trials = cfg.mimo_settings.asfs * cfg.mimo_settings.realizations;
      cfg.estimators = {parse_estimator("sample"), parse_estimator("nnls(dict=dirac)")};
      cfg.metrics = {"enf", "epe"};
      cfg.output = "fig3_mimo.csv";
      cfg.notes = {{"full_M", "128"}, {"full_realizations", "200"}};
      break;
    case Experiment::Fig4Correlation:
      cfg.dims = {20};
      cfg.samples = {10, 50, 100, 200, 300};
      cfg.corr = {0.5, 0.9, 0.99};
      cfg.estimators = {parse_estimator("sample"), parse_estimator("sign")};
      cfg.output = "fig4_correlation.csv";
      cfg.notes = {{"trials_default", "100"}};
      break;
    case Experiment::Fig5Dimension:
      cfg.dims = {5, 10, 15, 20, 25, 30};
      cfg.samples = {200};
      cfg.corr = {0.5};
      cfg.estimators = {parse_estimator("sample"), parse_estimator("sign"), parse_estimator("dithered_oracle")};
      cfg.output = "fig5_dimension.csv";
      cfg.notes = {{"trials_default", "100"}, {"truth_default", "const_corr(0.5)"}};
      break;
    case Experiment::Fig6LambdaSweep:
      cfg.dims = {5};
      cfg.samples = {200};
      cfg.corr = {0.5};
      cfg.lambda = lambda_grid(64, 1e-3, 4.0);
      cfg.estimators = {parse_estimator("dithered"), parse_estimator("sign"), parse_estimator("sample")};
      cfg.output = "fig6_lambda_sweep.csv";
      cfg.notes = {{"trials_default", "100"}, {"truth_default", "const_corr(0.5)"}, {"lambda_grid", "64 points on (0..4]"}};
      break;
    case Experiment::Custom:
      cfg.estimators = {parse_estimator("sample")};
      cfg.output = "custom.csv";
      break;
  }
  return cfg;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "domain",        "seed",         "trials",        "dims",        "samples",
      "corr",       "lambda",        "lambda_points", "lambda_min",   "lambda_max",  "truth",
      "toeplitz_col", "toeplitz_width", "sparse_q",   "sparse_s",      "sparse_bound", "rank",
      "ridge",      "diag_scale",    "estimators",   "metrics",       "output",      "wall_time",
      "snr_db",     "spacing",       "asfs",         "realizations",  "asf_alpha",   "asf_spikes",
      "asf_rects",  "asf_gaussians", "epe_d",
  };
  return keys;
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) config_error("line " + std::to_string(lineno), "expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) config_error(key, "unknown key");
    if (kv.count(key)) config_error(key, "duplicate key");
    kv[key] = std::string(trim(t.substr(eq + 1)));
    order.push_back(key);
  }

  Experiment e = Experiment::Custom;
  if (kv.count("experiment")) {
    const auto parsed = experiment_from_string(kv["experiment"]);
    if (!parsed) config_error("experiment", "unknown experiment '" + kv["experiment"] + "'");
    e = *parsed;
  }
  ExperimentConfig cfg = default_config(e);

  std::optional<std::size_t> lambda_points;
  double lambda_min = 1e-3;
  double lambda_max = 4.0;
  bool trials_set = false;
  bool asf_counts_set = false;

  for (const auto& key : order) {
    const std::string& v = kv[key];
    if (key == "experiment") continue;
    if (key == "domain") {
      const std::string d = lower(v);
      if (d != "real" && d != "mimo") config_error(key, "expected real or mimo");
      if (cfg.experiment != Experiment::Custom && (d == "mimo") != cfg.mimo) {
        config_error(key, "conflicts with the experiment preset");
      }
      if (d == "mimo" && !cfg.mimo) {
        cfg.mimo = true;
        cfg.corr.clear();
        cfg.metrics = {"enf", "epe"};
        cfg.estimators = {parse_estimator("sample"), parse_estimator("nnls")};
        cfg.trials = cfg.mimo_settings.asfs * cfg.mimo_settings.realizations;
      }
    } else if (key == "seed") {
      cfg.seed = to_u64(v, key);
    } else if (key == "trials") {
      cfg.trials = to_u64(v, key);
      trials_set = true;
    } else if (key == "dims") {
      cfg.dims = parse_size_list(v, key);
    } else if (key == "samples") {
      cfg.samples = parse_size_list(v, key);
    } else if (key == "corr") {
      cfg.corr = parse_real_list(v, key);
    } else if (key == "lambda") {
      cfg.lambda = parse_real_list(v, key);
    } else if (key == "lambda_points") {
      lambda_points = to_u64(v, key);
    } else if (key == "lambda_min") {
      lambda_min = to_double(v, key);
    } else if (key == "lambda_max") {
      lambda_max = to_double(v, key);
    } else if (key == "truth") {
      cfg.truth.model = lower(v);
    } else if (key == "toeplitz_col") {
      cfg.truth.toeplitz_col = parse_real_list(v, key);
    } else if (key == "toeplitz_width") {
      cfg.truth.toeplitz_width = to_u64(v, key);
    } else if (key == "sparse_q") {
      cfg.truth.sparse_q = to_double(v, key);
    } else if (key == "sparse_s") {
      cfg.truth.sparse_s = to_double(v, key);
    } else if (key == "sparse_bound") {
      cfg.truth.sparse_bound = to_double(v, key);
    } else if (key == "rank") {
      cfg.truth.rank = to_u64(v, key);
    } else if (key == "ridge") {
      cfg.truth.ridge = to_double(v, key);
    } else if (key == "diag_scale") {
      cfg.truth.diag_scale = lower(v);
    } else if (key == "estimators") {
      cfg.estimators = parse_estimator_list(v);
    } else if (key == "metrics") {
      cfg.metrics.clear();
      for (const auto& m : split_items(v)) cfg.metrics.push_back(lower(m));
    } else if (key == "output") {
      cfg.output = v;
    } else if (key == "wall_time") {
      cfg.wall_time = to_bool(v, key);
    } else if (key == "snr_db") {
      cfg.mimo_settings.snr_db = to_double(v, key);
    } else if (key == "spacing") {
      cfg.mimo_settings.spacing = to_double(v, key);
    } else if (key == "asfs") {
      cfg.mimo_settings.asfs = to_u64(v, key);
      asf_counts_set = true;
    } else if (key == "realizations") {
      cfg.mimo_settings.realizations = to_u64(v, key);
      asf_counts_set = true;
    } else if (key == "asf_alpha") {
      cfg.mimo_settings.recipe.alpha = to_double(v, key);
    } else if (key == "asf_spikes") {
      cfg.mimo_settings.recipe.spikes = to_u64(v, key);
    } else if (key == "asf_rects") {
      cfg.mimo_settings.recipe.rects = to_u64(v, key);
    } else if (key == "asf_gaussians") {
      cfg.mimo_settings.recipe.gaussians = to_u64(v, key);
    } else if (key == "epe_d") {
      cfg.mimo_settings.epe_d = parse_size_list(v, key);
    }
  }

  if (lambda_points || kv.count("lambda_min") || kv.count("lambda_max")) {
    if (kv.count("lambda")) config_error("lambda_points", "give either lambda or lambda_points/min/max");
    cfg.lambda = lambda_grid(lambda_points.value_or(64), lambda_min, lambda_max);
    set_note(cfg, "lambda_grid",
             std::to_string(cfg.lambda.size()) + " points on (0.." + fmt(lambda_max) + "]");
  } else if (kv.count("lambda")) {
    drop_note(cfg, "lambda_grid");
  }
  if (cfg.mimo) {
    if (trials_set && asf_counts_set) config_error("trials", "set either trials or asfs/realizations");
    if (trials_set) {
      // trials = asfs * realizations with the preset realizations count.
      const std::size_t r = cfg.mimo_settings.realizations;
      if (r == 0 || cfg.trials % r != 0) {
        cfg.mimo_settings.realizations = 1;
        cfg.mimo_settings.asfs = cfg.trials;
      } else {
        cfg.mimo_settings.asfs = cfg.trials / r;
      }
    }
    cfg.trials = cfg.mimo_settings.asfs * cfg.mimo_settings.realizations;
  } else if (trials_set) {
    drop_note(cfg, "trials_default");
  }
  if (kv.count("truth") || kv.count("corr")) drop_note(cfg, "truth_default");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  if (trials < 1) config_error("trials", "must be at least 1");
  if (dims.empty()) config_error("dims", "grid is empty");
  if (samples.empty()) config_error("samples", "grid is empty");
  for (std::size_t d : dims) {
    if (d < (mimo ? 2u : 1u)) config_error("dims", "dimension too small");
  }
  for (std::size_t n : samples) {
    if (n < 1) config_error("samples", "need at least one sample");
  }
  if (estimators.empty()) config_error("estimators", "list is empty");
  if (metrics.empty()) config_error("metrics", "list is empty");
  if (output.empty()) config_error("output", "empty path");

  const std::vector<std::string> allowed =
      mimo ? std::vector<std::string>{"enf", "epe"} : std::vector<std::string>{"operator", "frobenius"};
  for (const auto& m : metrics) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      config_error("metrics", "metric '" + m + "' is not available for this experiment");
    }
  }
  for (const auto& e : estimators) {
    const EstimatorInfo* info = find_estimator(e.id, mimo);
    if (!info) config_error("estimators", "unknown estimator '" + e.id + "'" + (mimo ? " for mimo" : ""));
    for (const auto& [k, v] : e.params) {
      if (std::find(info->params.begin(), info->params.end(), k) == info->params.end()) {
        config_error("estimators", "estimator '" + e.id + "' has no parameter '" + k + "'");
      }
      (void)v;
    }
  }
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t j = i + 1; j < estimators.size(); ++j) {
      if (estimators[i].label() == estimators[j].label()) config_error("estimators", "duplicate estimator");
    }
  }

  if (mimo) {
    if (mimo_settings.asfs < 1 || mimo_settings.realizations < 1) config_error("asfs", "need at least one");
    if (!(mimo_settings.spacing > 0)) config_error("spacing", "must be positive");
    if (std::isnan(mimo_settings.snr_db)) config_error("snr_db", "must be a number");
    const auto& r = mimo_settings.recipe;
    if (r.alpha < 0 || r.alpha > 1) config_error("asf_alpha", "must lie in [0,1]");
    if (r.alpha > 0 && r.spikes == 0) config_error("asf_spikes", "alpha > 0 needs spikes");
    if (r.alpha < 1 && r.rects + r.gaussians == 0) config_error("asf_rects", "alpha < 1 needs a continuous part");
    for (std::size_t d : mimo_settings.epe_d) {
      if (d < 1) config_error("epe_d", "d must be at least 1");
    }
    if (!lambda.empty()) config_error("lambda", "not used by mimo experiments");
    return;
  }

  const std::vector<std::string> models = {"const_corr", "banded_toeplitz", "sparse_random", "low_rank", "identity"};
  if (std::find(models.begin(), models.end(), truth.model) == models.end()) {
    config_error("truth", "unknown model '" + truth.model + "'");
  }
  if (truth.model == "const_corr") {
    if (corr.empty()) config_error("corr", "const_corr truth needs corr values");
    for (double c : corr) {
      if (!(c > -1 && c < 1)) config_error("corr", "values must lie in (-1, 1)");
    }
  }
  if (truth.diag_scale != "none" && truth.diag_scale != "linear") config_error("diag_scale", "expected none or linear");
  for (double l : lambda) {
    if (!(l > 0)) config_error("lambda", "levels must be positive");
  }
}

}  // namespace covest::harness

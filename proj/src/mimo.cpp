#include "covest/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace covest {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double overlap(double lo, double hi, double a, double b) { return std::max(0.0, std::min(hi, b) - std::max(lo, a)); }

double gauss_mass(double mean, double sd, double a, double b) {
  const double s = sd * std::numbers::sqrt2;
  const double za = (a - mean) / s;
  const double zb = (b - mean) / s;
  if (a >= mean) return 0.5 * (std::erfc(za) - std::erfc(zb));
  if (b <= mean) return 0.5 * (std::erfc(-zb) - std::erfc(-za));
  return 0.5 * (std::erf(zb) - std::erf(za));
}

double laplace_mass(double mean, double sd, double a, double b) {
  const double scale = sd / std::numbers::sqrt2;
  auto cdf = [&](double x) {
    return x < mean ? 0.5 * std::exp((x - mean) / scale) : 1.0 - 0.5 * std::exp(-(x - mean) / scale);
  };
  if (a >= mean) return 0.5 * (std::exp(-(a - mean) / scale) - std::exp(-(b - mean) / scale));
  return cdf(b) - cdf(a);
}

double phase_step(const UlaConfig& cfg) { return 2.0 * kPi * cfg.spacing_ratio; }

std::vector<cplx> response_unchecked(double xi, std::size_t M, double theta) {
  std::vector<cplx> a(M);
  for (std::size_t m = 0; m < M; ++m) a[m] = std::polar(1.0, theta * static_cast<double>(m) * xi);
  return a;
}

cplx complex_normal(RngStream& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace

void UlaConfig::validate() const {
  require(M >= 2, ErrorCode::InvalidParam, "ULA needs M >= 2");
  require(spacing_ratio > 0 && std::isfinite(spacing_ratio), ErrorCode::InvalidParam, "spacing ratio must be > 0");
}

std::vector<cplx> array_response(double xi, const UlaConfig& cfg) {
  cfg.validate();
  require(xi >= -1.0 && xi <= 1.0, ErrorCode::OutOfRange, "xi must lie in [-1,1]");
  return response_unchecked(xi, cfg.M, phase_step(cfg));
}

// ------------------------------------------------------------------ ASF

void AsfSpec::validate() const {
  require(alpha >= 0 && alpha <= 1, ErrorCode::InvalidParam, "alpha must lie in [0,1]");
  double total = 0.0;
  for (const auto& s : spikes) {
    require(s.xi >= -1 && s.xi <= 1, ErrorCode::OutOfRange, "spike location outside [-1,1]");
    require(s.weight > 0, ErrorCode::InvalidParam, "spike weights must be > 0");
    total += s.weight;
  }
  require(std::abs(total - alpha) <= 1e-12 * std::max(1.0, alpha), ErrorCode::InvalidParam,
          "spike weights must sum to alpha");
  for (const auto& r : rects) require(r.width > 0, ErrorCode::InvalidParam, "rect width must be > 0");
  for (const auto& g : gaussians) require(g.std > 0, ErrorCode::InvalidParam, "gaussian std must be > 0");
  if (alpha < 1) require(normalizer() > 0, ErrorCode::InvalidParam, "continuous part has no mass on [-1,1]");
}

double AsfSpec::normalizer() const {
  double z = 0.0;
  for (const auto& r : rects) z += overlap(r.center - r.width / 2, r.center + r.width / 2, -1.0, 1.0);
  for (const auto& g : gaussians) z += gauss_mass(g.mean, g.std, -1.0, 1.0);
  return z;
}

double AsfSpec::continuous_mass(double a, double b) const {
  a = std::max(a, -1.0);
  b = std::min(b, 1.0);
  if (!(b > a) || alpha >= 1) return 0.0;
  double m = 0.0;
  for (const auto& r : rects) m += overlap(r.center - r.width / 2, r.center + r.width / 2, a, b);
  for (const auto& g : gaussians) m += gauss_mass(g.mean, g.std, a, b);
  return (1.0 - alpha) * m / normalizer();
}

double AsfSpec::continuous_density(double xi) const {
  if (xi < -1 || xi > 1 || alpha >= 1) return 0.0;
  double d = 0.0;
  for (const auto& r : rects) {
    if (std::abs(xi - r.center) <= r.width / 2) d += 1.0;
  }
  for (const auto& g : gaussians) {
    const double z = (xi - g.mean) / g.std;
    d += std::exp(-0.5 * z * z) / (g.std * std::sqrt(2.0 * kPi));
  }
  return (1.0 - alpha) * d / normalizer();
}

AsfSpec random_asf(RngStream& rng, const AsfRecipe& recipe) {
  require(recipe.alpha >= 0 && recipe.alpha <= 1, ErrorCode::InvalidParam, "alpha must lie in [0,1]");
  require(recipe.spikes > 0 || recipe.alpha == 0, ErrorCode::InvalidParam, "alpha > 0 needs at least one spike");
  require(recipe.alpha == 1 || recipe.rects + recipe.gaussians > 0, ErrorCode::InvalidParam,
          "alpha < 1 needs a continuous component");
  AsfSpec asf;
  asf.alpha = recipe.alpha;
  if (recipe.alpha > 0) {
    for (std::size_t k = 0; k < recipe.spikes; ++k) {
      asf.spikes.push_back({rng.uniform(-1.0, 1.0), recipe.alpha / static_cast<double>(recipe.spikes)});
    }
  }
  if (recipe.alpha < 1) {
    for (std::size_t j = 0; j < recipe.rects; ++j) {
      const double center = j % 2 == 0 ? rng.uniform(-1.0, 0.0) : rng.uniform(0.0, 1.0);
      asf.rects.push_back({center, rng.uniform(0.1, 0.3)});
    }
    for (std::size_t k = 0; k < recipe.gaussians; ++k) {
      const double mean = rng.uniform(-0.7, 0.7);
      asf.gaussians.push_back({mean, rng.uniform(0.03, 0.04)});
    }
  }
  // Weights alpha / r may not sum to alpha bit-exactly.
  if (!asf.spikes.empty()) {
    double rest = asf.alpha;
    for (std::size_t k = 0; k + 1 < asf.spikes.size(); ++k) rest -= asf.spikes[k].weight;
    asf.spikes.back().weight = rest;
  }
  asf.validate();
  return asf;
}

std::size_t quadrature_cells(std::size_t M) { return 16 * M; }

AsfGrid asf_grid(const AsfSpec& asf, std::size_t cells) {
  require(cells >= 1, ErrorCode::InvalidParam, "grid needs at least one cell");
  AsfGrid g;
  g.xi.resize(cells);
  g.mass.resize(cells);
  const double h = 2.0 / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = -1.0 + h * static_cast<double>(i);
    const double b = i + 1 == cells ? 1.0 : a + h;
    g.xi[i] = -1.0 + h * (static_cast<double>(i) + 0.5);
    g.mass[i] = asf.continuous_mass(a, b);
  }
  return g;
}

HermMatrix true_covariance(const AsfSpec& asf, const UlaConfig& cfg) {
  cfg.validate();
  asf.validate();
  const double theta = phase_step(cfg);
  CToeplitzCol t{std::vector<cplx>(cfg.M, cplx{})};
  auto add = [&](double xi, double w) {
    for (std::size_t r = 0; r < cfg.M; ++r) t.col[r] += w * std::polar(1.0, theta * static_cast<double>(r) * xi);
  };
  for (const auto& s : asf.spikes) add(s.xi, s.weight);
  const AsfGrid g = asf_grid(asf, quadrature_cells(cfg.M));
  for (std::size_t i = 0; i < g.xi.size(); ++i) {
    if (g.mass[i] > 0) add(g.xi[i], g.mass[i]);
  }
  t.col[0] = t.col[0].real();
  return t.expand();
}

// ------------------------------------------------------------ simulation

PilotSamples simulate_pilots(const AsfSpec& asf, const UlaConfig& cfg, std::size_t N, double snr_db,
                             RngStream& rng) {
  cfg.validate();
  asf.validate();
  require(N >= 1, ErrorCode::InvalidParam, "need at least one pilot");
  require(!std::isnan(snr_db), ErrorCode::InvalidParam, "snr must not be NaN");
  const std::size_t M = cfg.M;
  const double theta = phase_step(cfg);

  // Scaled steering vectors sqrt(mass) a(xi), spikes first.
  std::vector<std::vector<cplx>> atoms;
  double power = 0.0;
  auto add = [&](double xi, double w) {
    auto a = response_unchecked(xi, M, theta);
    const double s = std::sqrt(w);
    for (auto& v : a) v *= s;
    atoms.push_back(std::move(a));
    power += w;
  };
  for (const auto& s : asf.spikes) add(s.xi, s.weight);
  const AsfGrid g = asf_grid(asf, quadrature_cells(M));
  for (std::size_t i = 0; i < g.xi.size(); ++i) {
    if (g.mass[i] > 0) add(g.xi[i], g.mass[i]);
  }

  PilotSamples out;
  out.n0 = std::isinf(snr_db) && snr_db > 0 ? 0.0 : power / std::pow(10.0, snr_db / 10.0);
  out.y = ComplexBatch(N, M);
  const double noise_sd = std::sqrt(out.n0);
  for (std::size_t s = 0; s < N; ++s) {
    auto row = out.y.row(s);
    for (const auto& a : atoms) {
      const cplx gi = complex_normal(rng);
      for (std::size_t m = 0; m < M; ++m) row[m] += gi * a[m];
    }
    if (out.n0 > 0) {
      for (std::size_t m = 0; m < M; ++m) row[m] += noise_sd * complex_normal(rng);
    }
  }
  return out;
}

HermMatrix sample_cov(const ComplexBatch& y) {
  const std::size_t N = y.rows();
  const std::size_t M = y.cols();
  require(N >= 1 && M >= 1, ErrorCode::EmptyBatch, "sample covariance needs at least one sample");
  std::vector<cplx> acc(M * M, cplx{});
  for (std::size_t s = 0; s < N; ++s) {
    for (std::size_t i = 0; i < M; ++i) {
      const cplx yi = y(s, i);
      for (std::size_t j = 0; j <= i; ++j) acc[i * M + j] += yi * std::conj(y(s, j));
    }
  }
  HermMatrix h(M);
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j <= i; ++j) h.set(i, j, acc[i * M + j] * inv);
  }
  return h;
}

// ----------------------------------------------------------------- MUSIC

std::size_t music_auto_order(const std::vector<double>& ev, std::size_t M, std::size_t N, const AutoOrder& rule) {
  require(rule.rho >= 1, ErrorCode::InvalidParam, "gap factor must be >= 1");
  std::size_t cap = std::min({rule.cap, M / 4, N >= 1 ? N - 1 : 0});
  cap = std::min(cap, ev.size() >= 1 ? ev.size() - 1 : 0);
  for (std::size_t k = cap; k >= 1; --k) {
    if (ev[k - 1] > 0 && ev[k - 1] >= rule.rho * ev[k]) return k;
  }
  return 0;
}

MusicResult music_spikes(const ComplexBatch& y, const UlaConfig& cfg, const MusicOrder& order,
                         std::size_t grid_size) {
  cfg.validate();
  const std::size_t M = cfg.M;
  const std::size_t N = y.rows();
  require(y.cols() == M, ErrorCode::DimMismatch, "samples do not match the array size");
  require(N >= 1, ErrorCode::EmptyBatch, "MUSIC needs samples");

  const HermEigDecomp e = eig_herm(sample_cov(y));
  MusicResult res;
  res.order = std::visit(overloaded{
                             [&](std::size_t k) {
                               require(k < M, ErrorCode::OrderTooLarge, "model order must be < M");
                               require(N >= k + 1, ErrorCode::InvalidParam, "MUSIC needs N >= order + 1");
                               return k;
                             },
                             [&](const AutoOrder& a) { return music_auto_order(e.values, M, N, a); },
                         },
                         order);
  if (res.order == 0) return res;

  const std::size_t G = grid_size == 0 ? 32 * M : grid_size;
  require(G >= 2, ErrorCode::InvalidParam, "MUSIC grid needs at least two points");
  const double theta = phase_step(cfg);
  std::vector<double> spec(G);
  for (std::size_t g = 0; g < G; ++g) {
    const double xi = -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(G);
    const auto a = response_unchecked(xi, M, theta);
    double d = 0.0;
    for (std::size_t k = res.order; k < M; ++k) {
      cplx ip{};
      for (std::size_t m = 0; m < M; ++m) ip += std::conj(e.vectors(m, k)) * a[m];
      d += std::norm(ip);
    }
    spec[g] = 1.0 / std::max(d, std::numeric_limits<double>::min());
  }

  const double two_d = 2.0 * cfg.spacing_ratio;
  const bool circular = two_d == std::round(two_d);
  std::vector<std::size_t> peaks;
  for (std::size_t g = 0; g < G; ++g) {
    bool left_ok = true;
    bool right_ok = true;
    if (g > 0 || circular) left_ok = spec[g] > spec[g == 0 ? G - 1 : g - 1];
    if (g + 1 < G || circular) right_ok = spec[g] >= spec[g + 1 == G ? 0 : g + 1];
    if (left_ok && right_ok) peaks.push_back(g);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return spec[a] > spec[b]; });
  peaks.resize(std::min(peaks.size(), res.order));
  std::sort(peaks.begin(), peaks.end());
  for (std::size_t g : peaks) res.xi.push_back(-1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(G));
  return res;
}

// ------------------------------------------------------------ dictionary

std::optional<DictKind> dict_kind_from_string(const std::string& s) {
  if (s == "dirac") return DictKind::Dirac;
  if (s == "gaussian") return DictKind::Gaussian;
  if (s == "laplacian") return DictKind::Laplacian;
  if (s == "rect") return DictKind::Rect;
  return std::nullopt;
}

std::string to_string(DictKind k) {
  switch (k) {
    case DictKind::Dirac: return "dirac";
    case DictKind::Gaussian: return "gaussian";
    case DictKind::Laplacian: return "laplacian";
    case DictKind::Rect: return "rect";
  }
  return "?";
}

Dictionary build_dictionary(DictKind kind, std::size_t G, const UlaConfig& cfg, const std::vector<double>& spikes) {
  cfg.validate();
  require(G >= 1, ErrorCode::InvalidParam, "dictionary needs G >= 1");
  const std::size_t M = cfg.M;
  const double theta = phase_step(cfg);
  Dictionary d;
  d.kind = kind;
  d.grid_size = G;
  d.atoms = CMatrix(M, G + spikes.size());

  auto put = [&](std::size_t col, const std::vector<cplx>& t) {
    for (std::size_t r = 0; r < M; ++r) d.atoms(r, col) = t[r];
  };

  const double step = 2.0 / static_cast<double>(G);
  std::vector<double> cell_xi;
  std::vector<cplx> phases;
  std::vector<double> cell_lo;
  const std::size_t cells = quadrature_cells(M);
  if (kind != DictKind::Dirac) {
    const double h = 2.0 / static_cast<double>(cells);
    phases.resize(cells * M);
    for (std::size_t c = 0; c < cells; ++c) {
      cell_lo.push_back(-1.0 + h * static_cast<double>(c));
      cell_xi.push_back(-1.0 + h * (static_cast<double>(c) + 0.5));
      for (std::size_t r = 0; r < M; ++r) phases[c * M + r] = std::polar(1.0, theta * static_cast<double>(r) * cell_xi[c]);
    }
    cell_lo.push_back(1.0);
  }

  for (std::size_t i = 0; i < G; ++i) {
    const double xi = -1.0 + step * static_cast<double>(i);
    d.locations.push_back(xi);
    if (kind == DictKind::Dirac) {
      put(i, response_unchecked(xi, M, theta));
      continue;
    }
    std::vector<cplx> t(M, cplx{});
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double a = cell_lo[c];
      const double b = cell_lo[c + 1];
      double m = 0.0;
      switch (kind) {
        case DictKind::Gaussian: m = gauss_mass(xi, step, a, b); break;
        case DictKind::Laplacian: m = laplace_mass(xi, step, a, b); break;
        case DictKind::Rect: m = overlap(xi - step / 2, xi + step / 2, a, b) / step; break;
        case DictKind::Dirac: break;
      }
      if (m <= 0) continue;
      total += m;
      for (std::size_t r = 0; r < M; ++r) t[r] += m * phases[c * M + r];
    }
    require(total > 0, ErrorCode::InvalidParam, "dictionary kernel has no mass on [-1,1]");
    for (auto& v : t) v /= total;
    t[0] = t[0].real();
    put(i, t);
  }
  for (std::size_t k = 0; k < spikes.size(); ++k) {
    require(spikes[k] >= -1 && spikes[k] <= 1, ErrorCode::OutOfRange, "spike location outside [-1,1]");
    d.locations.push_back(spikes[k]);
    put(G + k, response_unchecked(spikes[k], M, theta));
  }

  if (M <= 16) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      CToeplitzCol t{std::vector<cplx>(M)};
      for (std::size_t r = 0; r < M; ++r) t.col[r] = d.atoms(r, j);
      const auto ev = eig_herm(t.expand()).values;
      require(ev.back() >= -1e-10 * std::max(1.0, ev.front()), ErrorCode::NotPSD, "dictionary atom is not PSD");
    }
  }
  return d;
}

// ------------------------------------------------------------------ NNLS

std::vector<double> nnls_weights(std::size_t M) {
  std::vector<double> w(M);
  w[0] = std::sqrt(static_cast<double>(M));
  for (std::size_t r = 1; r < M; ++r) w[r] = std::sqrt(2.0 * static_cast<double>(M - r));
  return w;
}

NnlsProblem make_nnls_problem(const Dictionary& dict, std::vector<cplx> sigma) {
  require(sigma.size() == dict.atoms.rows(), ErrorCode::DimMismatch, "target length differs from atom length");
  const std::size_t M = sigma.size();
  return {dict.atoms, std::move(sigma), nnls_weights(M)};
}

std::vector<cplx> toeplitz_denoise(const ComplexBatch& y, double n0) {
  require(n0 >= 0, ErrorCode::InvalidParam, "N0 must be >= 0");
  HermMatrix h = sample_cov(y);
  for (std::size_t i = 0; i < h.dim(); ++i) h.set(i, i, h(i, i) - n0);
  return toeplitz_project(h).col;
}

namespace {

struct Lifted {
  Matrix a;
  std::vector<double> b;
};

Lifted lift(const NnlsProblem& prob) {
  const std::size_t M = prob.s_tilde.rows();
  const std::size_t K = prob.s_tilde.cols();
  require(prob.sigma.size() == M && prob.w.size() == M, ErrorCode::DimMismatch, "NNLS problem has inconsistent sizes");
  require(K >= 1, ErrorCode::InvalidParam, "NNLS needs at least one atom");
  Lifted l{Matrix(2 * M, K), std::vector<double>(2 * M)};
  for (std::size_t r = 0; r < M; ++r) {
    const double w = prob.w[r];
    for (std::size_t k = 0; k < K; ++k) {
      l.a(r, k) = w * prob.s_tilde(r, k).real();
      l.a(M + r, k) = w * prob.s_tilde(r, k).imag();
    }
    l.b[r] = w * prob.sigma[r].real();
    l.b[M + r] = w * prob.sigma[r].imag();
  }
  return l;
}

double objective(const Lifted& l, const std::vector<double>& u) {
  const auto au = matvec(l.a, u);
  double s = 0.0;
  for (std::size_t i = 0; i < au.size(); ++i) s += (au[i] - l.b[i]) * (au[i] - l.b[i]);
  return s;
}

std::vector<double> solve_subset(const Lifted& l, const std::vector<std::size_t>& set) {
  Matrix sub(l.a.rows(), set.size());
  for (std::size_t i = 0; i < l.a.rows(); ++i) {
    for (std::size_t c = 0; c < set.size(); ++c) sub(i, c) = l.a(i, set[c]);
  }
  return least_squares(sub, l.b);
}

}  // namespace

std::vector<double> nnls_gradient(const NnlsProblem& prob, const std::vector<double>& u) {
  const Lifted l = lift(prob);
  require(u.size() == l.a.cols(), ErrorCode::DimMismatch, "coefficient length mismatch");
  auto r = matvec(l.a, u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= l.b[i];
  return matvec_t(l.a, r);
}

NnlsResult nnls_solve(const NnlsProblem& prob) {
  const Lifted l = lift(prob);
  const std::size_t K = l.a.cols();
  const std::size_t rows = l.a.rows();

  NnlsResult res;
  double fa = 0.0;
  for (double v : l.a.data()) fa += v * v;
  res.scale = std::sqrt(fa) * norm2(l.b);
  if (!(res.scale > 0)) res.scale = 1.0;
  const double tol = 1e-10 * res.scale;
  const std::size_t max_iter = 10 * K;

  std::vector<double> x(K, 0.0);
  std::vector<std::size_t> active;
  std::vector<bool> in_active(K, false);
  std::vector<bool> blocked(K, false);
  res.objective.push_back(objective(l, x));

  auto dual = [&]() {
    auto r = matvec(l.a, x);
    for (std::size_t i = 0; i < rows; ++i) r[i] = l.b[i] - r[i];
    return matvec_t(l.a, r);
  };
  std::vector<double> w = dual();

  res.converged = false;
  while (true) {
    std::size_t t = K;
    for (std::size_t k = 0; k < K; ++k) {
      if (!in_active[k] && !blocked[k] && (t == K || w[k] > w[t])) t = k;
    }
    if (t == K || w[t] <= tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    ++res.iterations;

    if (active.size() + 1 > rows) {
      blocked[t] = true;
      continue;
    }
    active.push_back(t);
    in_active[t] = true;
    std::vector<double> z = solve_subset(l, active);
    if (z.back() <= 0) {
      // Rounding can make the entering column useless; skip it until x moves.
      active.pop_back();
      in_active[t] = false;
      blocked[t] = true;
      continue;
    }

    for (std::size_t guard = 0; guard <= K; ++guard) {
      std::size_t worst = active.size();
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < active.size(); ++c) {
        if (z[c] <= 0) {
          const double xj = x[active[c]];
          const double step = xj / (xj - z[c]);
          if (step < alpha) {
            alpha = step;
            worst = c;
          }
        }
      }
      if (worst == active.size()) break;
      for (std::size_t c = 0; c < active.size(); ++c) x[active[c]] += alpha * (z[c] - x[active[c]]);
      x[active[worst]] = 0.0;
      std::vector<std::size_t> kept;
      for (std::size_t j : active) {
        if (x[j] > 0) {
          kept.push_back(j);
        } else {
          x[j] = 0.0;
          in_active[j] = false;
        }
      }
      active.swap(kept);
      if (active.empty()) {
        z.clear();
        break;
      }
      z = solve_subset(l, active);
    }

    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t c = 0; c < active.size(); ++c) x[active[c]] = z[c];
    std::fill(blocked.begin(), blocked.end(), false);
    w = dual();
    res.objective.push_back(objective(l, x));
  }

  res.u = x;
  res.residual = objective(l, x);
  return res;
}

HermMatrix assemble_estimate(const Dictionary& dict, const std::vector<double>& u) {
  require(u.size() == dict.size(), ErrorCode::DimMismatch, "coefficient length differs from dictionary size");
  const std::size_t M = dict.atoms.rows();
  CToeplitzCol t{std::vector<cplx>(M, cplx{})};
  for (std::size_t k = 0; k < u.size(); ++k) {
    require(u[k] >= 0 && std::isfinite(u[k]), ErrorCode::InvalidParam, "coefficients must be finite and >= 0");
    if (u[k] == 0) continue;
    for (std::size_t r = 0; r < M; ++r) t.col[r] += u[k] * dict.atoms(r, k);
  }
  return t.expand();
}

// --------------------------------------------------------------- metrics

double metric_enf(const HermMatrix& truth, const HermMatrix& est) {
  require(truth.dim() == est.dim(), ErrorCode::DimMismatch, "matrices differ in dimension");
  const double denom = frobenius_norm(truth);
  require(denom > 0, ErrorCode::ZeroMatrix, "truth is the zero matrix");
  return frobenius_norm(est - truth) / denom;
}

std::vector<double> metric_epe(const HermMatrix& truth, const HermEigDecomp& truth_eig, const HermMatrix& est,
                               const std::vector<std::size_t>& ds) {
  const std::size_t M = truth.dim();
  require(est.dim() == M, ErrorCode::DimMismatch, "matrices differ in dimension");
  for (std::size_t d : ds) require(d >= 1 && d <= M, ErrorCode::InvalidParam, "subspace dimension must lie in [1,M]");
  const HermEigDecomp e = eig_herm(est);

  // Power of the truth captured by each estimated eigenvector.
  std::vector<double> captured(M);
  std::vector<cplx> tv(M);
  for (std::size_t k = 0; k < M; ++k) {
    for (std::size_t i = 0; i < M; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < M; ++j) s += truth(i, j) * e.vectors(j, k);
      tv[i] = s;
    }
    cplx q{};
    for (std::size_t i = 0; i < M; ++i) q += std::conj(e.vectors(i, k)) * tv[i];
    captured[k] = q.real();
  }

  std::vector<double> out;
  for (std::size_t d : ds) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      num += captured[k];
      den += truth_eig.values[k];
    }
    require(den > 0, ErrorCode::ZeroMatrix, "truth has no power in its dominant subspace");
    out.push_back(1.0 - num / den);
  }
  return out;
}

double metric_epe(const HermMatrix& truth, const HermMatrix& est, std::size_t d) {
  return metric_epe(truth, eig_herm(truth), est, {d}).front();
}

// -------------------------------------------------------------- pipeline

PipelineResult estimate_channel(const PilotSamples& pilots, const PipelineConfig& cfg) {
  cfg.ula.validate();
  const std::size_t M = cfg.ula.M;
  PipelineResult res;
  res.sample = sample_cov(pilots.y);
  for (std::size_t i = 0; i < M; ++i) res.sample.set(i, i, res.sample(i, i) - pilots.n0);
  res.music = music_spikes(pilots.y, cfg.ula, cfg.order, cfg.music_grid);
  const Dictionary dict =
      build_dictionary(cfg.kind, cfg.dict_size == 0 ? 2 * M : cfg.dict_size, cfg.ula, res.music.xi);
  res.fit = nnls_solve(make_nnls_problem(dict, toeplitz_project(res.sample).col));
  res.nnls = assemble_estimate(dict, res.fit.u);
  return res;
}

}  // namespace covest

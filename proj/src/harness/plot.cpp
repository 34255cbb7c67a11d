#include "covest/harness/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "covest/error.hpp"

namespace covest::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!trim(cur).empty()) out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.emplace_back(trim(cur));
  return out;
}

bool to_bool(std::string_view v, const std::string& key) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw Error(ErrorCode::ConfigError, key + ": expected on/off");
}

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Value of a named field for one summary row; `d` comes from an epe metric name.
std::optional<std::string> field_of(const SummaryRow& r, const std::string& name) {
  if (name == "estimator") return r.estimator;
  if (name == "metric") return r.metric;
  if (name == "experiment") return r.experiment;
  if (name == "d") {
    const auto pos = r.metric.rfind("_d");
    if (pos == std::string::npos) return std::nullopt;
    return r.metric.substr(pos + 2);
  }
  for (const auto& [k, v] : split_pairs(r.grid_point)) {
    if (k == name) return v;
  }
  return std::nullopt;
}

bool same_value(const std::string& a, const std::string& b) {
  const auto x = as_number(a);
  const auto y = as_number(b);
  if (x && y) return *x == *y;
  return a == b;
}

std::string xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;
  double px0 = 0.0;
  double px1 = 1.0;

  double map(double v) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int e0 = static_cast<int>(std::floor(std::log10(lo)));
      const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
      const bool dense = e1 - e0 <= 2;
      for (int e = e0; e <= e1; ++e) {
        for (double m : dense ? std::vector<double>{1, 2, 5} : std::vector<double>{1}) {
          const double v = m * std::pow(10.0, e);
          if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
        }
      }
      return out;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }
};

Axis make_axis(double lo, double hi, bool log, const std::string& name) {
  Axis a;
  a.log = log;
  if (log) {
    require(lo > 0, ErrorCode::InvalidParam, "log scale needs positive " + name + " values");
    if (hi <= lo) {
      lo /= 2;
      hi *= 2;
    }
    a.lo = lo / std::pow(hi / lo, 0.04);
    a.hi = hi * std::pow(hi / lo, 0.04);
  } else {
    if (hi <= lo) {
      const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
    const double pad = 0.04 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
  return a;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

PlotSpec parse_plot_spec(std::string_view text) {
  PlotSpec spec;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ConfigError, "plot spec: expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    const std::string v(trim(t.substr(eq + 1)));
    if (key == "x") {
      spec.x = v;
    } else if (key == "y") {
      spec.y = v;
    } else if (key == "series") {
      spec.series = split_list(v);
    } else if (key == "panel") {
      spec.panel = v;
    } else if (key == "log_x") {
      spec.log_x = to_bool(v, key);
    } else if (key == "log_y") {
      spec.log_y = to_bool(v, key);
    } else if (key == "title") {
      spec.title = v;
    } else if (key == "xlabel") {
      spec.xlabel = v;
    } else if (key == "ylabel") {
      spec.ylabel = v;
    } else if (key == "output") {
      spec.output = v;
    } else if (key == "filter") {
      for (const auto& item : split_list(v)) {
        const auto e = item.find('=');
        if (e == std::string::npos) throw Error(ErrorCode::ConfigError, "filter: expected field=value");
        spec.filter.emplace_back(std::string(trim(item.substr(0, e))), std::string(trim(item.substr(e + 1))));
      }
    } else {
      throw Error(ErrorCode::ConfigError, key + ": unknown plot key");
    }
  }
  if (spec.series.empty()) throw Error(ErrorCode::ConfigError, "series: list is empty");
  return spec;
}

PlotSpec load_plot_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open plot spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plot_spec(ss.str());
}

std::vector<PlotPanel> build_panels(const std::vector<SummaryRow>& table, const PlotSpec& spec) {
  std::vector<PlotPanel> panels;
  std::map<std::string, std::size_t> panel_index;
  std::map<std::pair<std::size_t, std::string>, std::size_t> series_index;
  for (const auto& r : table) {
    if (r.count == 0) continue;
    if (spec.x == "d") {
      if (r.metric.rfind(spec.y + "_d", 0) != 0) continue;
    } else if (r.metric != spec.y) {
      continue;
    }
    bool keep = true;
    for (const auto& [k, v] : spec.filter) {
      const auto f = field_of(r, k);
      keep = keep && f && same_value(*f, v);
    }
    if (!keep) continue;
    const auto xs = field_of(r, spec.x);
    if (!xs) continue;
    const auto xv = as_number(*xs);
    if (!xv) continue;

    std::string pname;
    if (!spec.panel.empty()) {
      const auto p = field_of(r, spec.panel);
      if (!p) continue;
      pname = spec.panel + "=" + *p;
    }
    std::string sname;
    for (const auto& s : spec.series) {
      const auto f = field_of(r, s);
      if (!sname.empty()) sname += " ";
      sname += s == "estimator" ? f.value_or("?") : s + "=" + f.value_or("?");
    }
    auto [pit, pnew] = panel_index.try_emplace(pname, panels.size());
    if (pnew) panels.push_back({pname, {}});
    auto& panel = panels[pit->second];
    auto [sit, snew] = series_index.try_emplace({pit->second, sname}, panel.series.size());
    if (snew) panel.series.push_back({sname, {}});
    panel.series[sit->second].points.push_back({*xv, r.mean, r.std_error, r.count});
  }
  require(!panels.empty(), ErrorCode::InvalidParam, "no data matches the plot spec (empty series)");
  for (auto& p : panels) {
    for (auto& s : p.series) {
      std::stable_sort(s.points.begin(), s.points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    }
  }
  return panels;
}

std::string render_svg(const std::vector<PlotPanel>& panels, const PlotSpec& spec) {
  const double pw = 460;
  const double ph = 340;
  const double ml = 72;
  const double mr = 16;
  const double mt = 56;
  const double mb = 52;
  const double width = pw * static_cast<double>(panels.size());
  const double height = ph + 24;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << xml(spec.title)
       << "</text>\n";
  }
  const std::string xlabel = spec.xlabel.empty() ? spec.x : spec.xlabel;
  const std::string ylabel = spec.ylabel.empty() ? spec.y : spec.ylabel;

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& panel = panels[k];
    const double ox = pw * static_cast<double>(k);
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : panel.series) {
      for (const auto& p : s.points) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        const double lo = spec.log_y && p.mean - p.std_error <= 0 ? p.mean : p.mean - p.std_error;
        ylo = std::min(ylo, lo);
        yhi = std::max(yhi, p.mean + p.std_error);
      }
    }
    Axis ax = make_axis(xlo, xhi, spec.log_x, "x");
    Axis ay = make_axis(ylo, yhi, spec.log_y, "y");
    ax.px0 = ox + ml;
    ax.px1 = ox + pw - mr;
    ay.px0 = mt + (ph - mt - mb) + 8;
    ay.px1 = mt + 8;

    os << "<g>\n";
    os << "<rect x=\"" << ax.px0 << "\" y=\"" << ay.px1 << "\" width=\"" << ax.px1 - ax.px0 << "\" height=\""
       << ay.px0 - ay.px1 << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!panel.name.empty()) {
      os << "<text x=\"" << (ax.px0 + ax.px1) / 2 << "\" y=\"" << ay.px1 - 8 << "\" text-anchor=\"middle\">"
         << xml(panel.name) << "</text>\n";
    }
    for (double t : ax.ticks()) {
      const double px = ax.map(t);
      os << "<line x1=\"" << px << "\" y1=\"" << ay.px0 << "\" x2=\"" << px << "\" y2=\"" << ay.px0 + 5
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << px << "\" y=\"" << ay.px0 + 18 << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
      const double py = ay.map(t);
      os << "<line x1=\"" << ax.px0 - 5 << "\" y1=\"" << py << "\" x2=\"" << ax.px1 << "\" y2=\"" << py
         << "\" stroke=\"#dddddd\"/>\n";
      os << "<text x=\"" << ax.px0 - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    os << "<text x=\"" << (ax.px0 + ax.px1) / 2 << "\" y=\"" << ay.px0 + 38 << "\" text-anchor=\"middle\">"
       << xml(xlabel) << "</text>\n";
    const double ly = (ay.px0 + ay.px1) / 2;
    os << "<text x=\"" << ox + 18 << "\" y=\"" << ly << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
       << ox + 18 << " " << ly << ")\">" << xml(ylabel) << "</text>\n";

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const auto& series = panel.series[s];
      const char* color = kColors[s % std::size(kColors)];
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : series.points) os << ax.map(p.x) << "," << ay.map(p.mean) << " ";
      os << "\"/>\n";
      for (const auto& p : series.points) {
        const double px = ax.map(p.x);
        if (p.std_error > 0) {
          const double top = ay.map(p.mean + p.std_error);
          const double lo = p.mean - p.std_error;
          const double bot = spec.log_y && lo <= 0 ? ay.px0 : ay.map(lo);
          os << "<line x1=\"" << px << "\" y1=\"" << top << "\" x2=\"" << px << "\" y2=\"" << bot << "\" stroke=\""
             << color << "\"/>\n";
          os << "<line x1=\"" << px - 3 << "\" y1=\"" << top << "\" x2=\"" << px + 3 << "\" y2=\"" << top
             << "\" stroke=\"" << color << "\"/>\n";
          os << "<line x1=\"" << px - 3 << "\" y1=\"" << bot << "\" x2=\"" << px + 3 << "\" y2=\"" << bot
             << "\" stroke=\"" << color << "\"/>\n";
        }
        os << "<circle cx=\"" << px << "\" cy=\"" << ay.map(p.mean) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
      const double lx = ax.px1 - 150;
      const double lyy = ay.px1 + 16 + 16 * static_cast<double>(s);
      os << "<line x1=\"" << lx << "\" y1=\"" << lyy - 4 << "\" x2=\"" << lx + 18 << "\" y2=\"" << lyy - 4
         << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << lx + 24 << "\" y=\"" << lyy << "\">" << xml(series.name) << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_data_csv(const std::vector<PlotPanel>& panels) {
  std::ostringstream os;
  os << "panel,series,x,mean,stderr,count\n";
  auto q = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  for (const auto& p : panels) {
    for (const auto& s : p.series) {
      for (const auto& pt : s.points) {
        os << q(p.name) << "," << q(s.name) << "," << format_value(pt.x) << "," << format_value(pt.mean) << ","
           << format_value(pt.std_error) << "," << pt.count << "\n";
      }
    }
  }
  return os.str();
}

std::string data_path(const std::string& svg_path) {
  const std::string ext = ".svg";
  if (svg_path.size() >= ext.size() && svg_path.compare(svg_path.size() - ext.size(), ext.size(), ext) == 0) {
    return svg_path.substr(0, svg_path.size() - ext.size()) + ".data.csv";
  }
  return svg_path + ".data.csv";
}

void emit_plot(const std::vector<SummaryRow>& table, const PlotSpec& spec) {
  const auto panels = build_panels(table, spec);
  const std::string svg = render_svg(panels, spec);
  const std::string data = render_data_csv(panels);
  for (const auto& [path, body] : {std::pair{spec.output, svg}, std::pair{data_path(spec.output), data}}) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
    os << body;
    if (!os) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
  }
}

}  // namespace covest::harness

#include "leaklab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace leaklab {

namespace {

std::string rgb(int r, int g, int b) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

// compact viridis-like ramp
std::string colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  static const int stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  double x = t * 4.0;
  int i = std::min(3, static_cast<int>(x));
  double f = x - i;
  auto lerp = [&](int a, int b) { return static_cast<int>(a + f * (b - a)); };
  return rgb(lerp(stops[i][0], stops[i + 1][0]), lerp(stops[i][1], stops[i + 1][1]),
             lerp(stops[i][2], stops[i + 1][2]));
}

const char* regime_color(Regime r) {
  switch (r) {
    case Regime::trivial_leakage: return "#9e9e9e";
    case Regime::weak_leakage_memorizing: return "#4169e1";
    case Regime::weak_leakage_nonmemorizing: return "#87ceeb";
    case Regime::full_recovery: return "#2e8b57";
    case Regime::teacher_fail_student_matches: return "#ff8c00";
    case Regime::teacher_fail_no_match: return "#b22222";
  }
  return "#000000";
}

const char* class_color(int cls) {
  static const char* palette[] = {"#4169e1", "#b22222", "#e6b800", "#2e8b57", "#8a2be2",
                                  "#ff8c00", "#00ced1", "#ff69b4", "#6b8e23", "#708090",
                                  "#d2691e", "#20b2aa", "#c71585", "#556b2f", "#4682b4",
                                  "#daa520", "#7b68ee", "#dc143c", "#3cb371", "#9932cc"};
  return palette[cls % 20];
}

double axis_value(const CellResult& c, const std::string& axis) {
  if (axis == "alpha") return c.coords.alpha;
  if (axis == "rho") return c.coords.rho;
  if (axis == "tau") return c.coords.tau;
  throw std::invalid_argument("unknown axis: " + axis);
}

double metric_value(const CellResult& c, const std::string& metric) {
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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void emit_heatmap(const ResultStore& store, const std::string& metric,
                  const std::string& x_axis, const std::string& y_axis,
                  const std::string& path, std::optional<double> tau_filter,
                  std::optional<double> rho_filter) {
  const bool regime_plot = metric == "regime";

  std::set<double> xs_set, ys_set;
  std::map<std::pair<double, double>, std::vector<const CellResult*>> bucket;
  for (const CellResult& c : store.cells) {
    if (c.failed) continue;
    if (tau_filter && c.coords.tau != *tau_filter) continue;
    if (rho_filter && c.coords.rho != *rho_filter) continue;
    double x = axis_value(c, x_axis);
    double y = axis_value(c, y_axis);
    xs_set.insert(x);
    ys_set.insert(y);
    bucket[{x, y}].push_back(&c);
  }
  if (xs_set.empty()) throw std::runtime_error("emit_heatmap: no cells match the filters");
  std::vector<double> xs(xs_set.begin(), xs_set.end());
  std::vector<double> ys(ys_set.begin(), ys_set.end());

  bool incomplete = false;
  const double cw = 46, ch = 34, mx = 78, my = 40;
  const double width = mx + cw * xs.size() + 170;
  const double height = my + ch * ys.size() + 60;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  svg << "<defs><pattern id='hatch' width='6' height='6' patternTransform='rotate(45)' "
         "patternUnits='userSpaceOnUse'><line x1='0' y1='0' x2='0' y2='6' stroke='#888' "
         "stroke-width='2'/></pattern></defs>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";

  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      double px = mx + cw * ix;
      // y axis increases upward
      double py = my + ch * (ys.size() - 1 - iy);
      auto it = bucket.find({xs[ix], ys[iy]});
      std::string fill;
      if (it == bucket.end()) {
        fill = "url(#hatch)";
        incomplete = true;
      } else if (regime_plot) {
        // majority regime over seeds
        std::map<Regime, int> counts;
        for (const CellResult* c : it->second) counts[c->regime]++;
        Regime best = it->second.front()->regime;
        int best_count = -1;
        for (auto& [r, cnt] : counts)
          if (cnt > best_count) { best = r; best_count = cnt; }
        fill = regime_color(best);
      } else {
        double sum = 0;
        for (const CellResult* c : it->second) sum += metric_value(*c, metric);
        double v = sum / static_cast<double>(it->second.size());
        bool is_acc = metric.rfind("acc", 0) == 0;
        fill = colormap(is_acc ? std::clamp(v, 0.0, 1.0) : std::clamp(v, 0.0, 1.0));
      }
      svg << "<rect x='" << px << "' y='" << py << "' width='" << cw << "' height='" << ch
          << "' fill='" << fill << "' stroke='#ffffff' stroke-width='1'/>\n";
    }
  }

  // axis labels
  for (std::size_t ix = 0; ix < xs.size(); ++ix)
    svg << "<text x='" << mx + cw * ix + cw / 2 << "' y='" << my + ch * ys.size() + 16
        << "' font-size='11' text-anchor='middle'>" << fmt(xs[ix]) << "</text>\n";
  for (std::size_t iy = 0; iy < ys.size(); ++iy)
    svg << "<text x='" << mx - 6 << "' y='" << my + ch * (ys.size() - 1 - iy) + ch / 2 + 4
        << "' font-size='11' text-anchor='end'>" << fmt(ys[iy]) << "</text>\n";
  svg << "<text x='" << mx + cw * xs.size() / 2 << "' y='" << my + ch * ys.size() + 38
      << "' font-size='13' text-anchor='middle'>" << x_axis << "</text>\n";
  svg << "<text x='16' y='" << my + ch * ys.size() / 2
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << my + ch * ys.size() / 2 << ")'>" << y_axis << "</text>\n";

  double lx = mx + cw * xs.size() + 14;
  if (regime_plot) {
    for (int r = 0; r < 6; ++r) {
      double py = my + 22.0 * r;
      svg << "<rect x='" << lx << "' y='" << py << "' width='14' height='14' fill='"
          << regime_color(static_cast<Regime>(r)) << "'/>\n";
      svg << "<text x='" << lx + 20 << "' y='" << py + 11 << "' font-size='10'>"
          << regime_name(static_cast<Regime>(r)) << "</text>\n";
    }
  } else {
    // colorbar
    const int bands = 32;
    double bar_h = ch * ys.size();
    for (int b = 0; b < bands; ++b) {
      double t = 1.0 - static_cast<double>(b) / (bands - 1);
      svg << "<rect x='" << lx << "' y='" << my + bar_h * b / bands << "' width='16' height='"
          << bar_h / bands + 1 << "' fill='" << colormap(t) << "'/>\n";
    }
    svg << "<text x='" << lx + 20 << "' y='" << my + 10 << "' font-size='10'>1</text>\n";
    svg << "<text x='" << lx + 20 << "' y='" << my + bar_h << "' font-size='10'>0</text>\n";
    svg << "<text x='" << lx << "' y='" << my - 8 << "' font-size='11'>" << metric
        << "</text>\n";
  }
  if (incomplete)
    std::fprintf(stderr, "warning: incomplete grid, gaps rendered hatched (%s)\n", path.c_str());

  svg << "</svg>\n";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << svg.str();
}

std::vector<int> boundary_raster(const Model& model, double lo, double hi, int resolution) {
  if (model.input_dim() != 2)
    throw DimensionError("decision boundary requires a 2-input model");
  Matrix grid(static_cast<Index>(resolution) * resolution, 2);
  double step = (hi - lo) / (resolution - 1);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      grid(static_cast<Index>(i) * resolution + j, 0) = lo + j * step;
      grid(static_cast<Index>(i) * resolution + j, 1) = lo + i * step;
    }
  Matrix Z = forward_logits(model, grid);
  std::vector<int> cls(static_cast<std::size_t>(Z.rows()));
  for (Index r = 0; r < Z.rows(); ++r)
    cls[static_cast<std::size_t>(r)] = static_cast<int>(argmax_row(Z, r));
  return cls;
}

void emit_decision_boundary(const Model& model, const Dataset& data, double lo, double hi,
                            int resolution, const std::string& path) {
  std::vector<int> raster = boundary_raster(model, lo, hi, resolution);
  const double size = 480.0;
  const double cell = size / resolution;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size
      << "'>\n";
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      svg << "<rect x='" << j * cell << "' y='" << size - (i + 1) * cell << "' width='"
          << cell + 0.5 << "' height='" << cell + 0.5 << "' fill='"
          << class_color(raster[static_cast<std::size_t>(i) * resolution + j])
          << "' fill-opacity='0.35'/>\n";

  Matrix Z = forward_logits(model, data.inputs);
  auto to_px = [&](double v) { return (v - lo) / (hi - lo) * size; };
  for (Index r = 0; r < data.n(); ++r) {
    double x = to_px(data.inputs(r, 0));
    double y = size - to_px(data.inputs(r, 1));
    bool correct = argmax_row(Z, r) == data.labels[static_cast<std::size_t>(r)];
    const char* color = class_color(data.labels[static_cast<std::size_t>(r)]);
    if (correct) {
      svg << "<circle cx='" << x << "' cy='" << y << "' r='3.5' fill='" << color
          << "' stroke='black' stroke-width='0.6'/>\n";
    } else {
      svg << "<path d='M" << x - 3.5 << " " << y - 3.5 << " L" << x + 3.5 << " " << y + 3.5
          << " M" << x - 3.5 << " " << y + 3.5 << " L" << x + 3.5 << " " << y - 3.5
          << "' stroke='" << color << "' stroke-width='1.6'/>\n";
    }
  }
  svg << "</svg>\n";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << svg.str();
}

}  // namespace leaklab

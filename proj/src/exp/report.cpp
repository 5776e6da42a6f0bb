#include "swarmupdate/exp/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace swarmupdate::exp {

using proto::Strategy;

namespace {

constexpr Strategy kStrategies[] = {Strategy::SwarmSync, Strategy::Gossip, Strategy::Soul};

class MeanIndex {
 public:
  explicit MeanIndex(const std::vector<CellMean>& means) {
    for (const auto& m : means) cells_[{m.strategy, m.swarm_size, m.failure_rate, m.patch_packets}] = &m;
  }
  const CellMean* find(Strategy s, int n, double f, int p) const {
    auto it = cells_.find({s, n, f, p});
    return it == cells_.end() ? nullptr : it->second;
  }

 private:
  std::map<std::tuple<Strategy, int, double, int>, const CellMean*> cells_;
};

template <typename T>
std::set<T> distinct(const std::vector<CellMean>& means, T CellMean::*field) {
  std::set<T> out;
  for (const auto& m : means) out.insert(m.*field);
  return out;
}

int main_packets(const std::vector<CellMean>& means) {
  const auto p = distinct(means, &CellMean::patch_packets);
  if (p.contains(240)) return 240;
  return p.empty() ? 0 : *p.rbegin();
}

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::string join_names(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

}  // namespace

std::vector<OrderingCheck> evaluate_orderings(const std::vector<CellMean>& means) {
  std::vector<OrderingCheck> out;
  const MeanIndex idx(means);
  const auto sizes = distinct(means, &CellMean::swarm_size);
  const auto rates = distinct(means, &CellMean::failure_rate);
  const int p = main_packets(means);

  // Convergence time: swarmsync < gossip < soul, sizes >= 100.
  {
    OrderingCheck c{"steps per drone: swarmsync < gossip < soul (size >= 100)", false, true, ""};
    std::vector<std::string> bad;
    for (int n : sizes) {
      if (n < 100) continue;
      for (double f : rates) {
        const auto* a = idx.find(Strategy::SwarmSync, n, f, p);
        const auto* g = idx.find(Strategy::Gossip, n, f, p);
        const auto* s = idx.find(Strategy::Soul, n, f, p);
        if (!a || !g || !s) continue;
        c.populated = true;
        if (!(a->steps_per_drone < g->steps_per_drone && g->steps_per_drone < s->steps_per_drone)) {
          bad.push_back(fmt::format("n={} f={:.2f} ({:.3f}/{:.3f}/{:.3f})", n, f, a->steps_per_drone,
                                    g->steps_per_drone, s->steps_per_drone));
        }
      }
    }
    c.pass = c.populated && bad.empty();
    c.detail = bad.empty() ? "all cells ordered" : "violations: " + join_names(bad);
    out.push_back(c);
  }

  // SwarmSync scaling from 100 to 500 drones at f = 0.
  {
    OrderingCheck c{"swarmsync steps per drone, size 100 / size 500 at f=0 in [3, 8]", false, false, ""};
    const auto* a = idx.find(Strategy::SwarmSync, 100, 0.0, p);
    const auto* b = idx.find(Strategy::SwarmSync, 500, 0.0, p);
    if (a && b && b->steps_per_drone > 0) {
      c.populated = true;
      const double factor = a->steps_per_drone / b->steps_per_drone;
      c.pass = in_window(factor, 3.0, 8.0);
      c.detail = fmt::format("{:.3f} / {:.3f} = {:.3f}", a->steps_per_drone, b->steps_per_drone, factor);
    }
    out.push_back(c);
  }

  // Overhead: soul < swarmsync < gossip at size 500.
  {
    OrderingCheck c{"overhead per drone: soul < swarmsync < gossip (size 500)", false, true, ""};
    std::vector<std::string> bad;
    for (double f : rates) {
      const auto* a = idx.find(Strategy::SwarmSync, 500, f, p);
      const auto* g = idx.find(Strategy::Gossip, 500, f, p);
      const auto* s = idx.find(Strategy::Soul, 500, f, p);
      if (!a || !g || !s) continue;
      c.populated = true;
      if (!(s->overhead_per_drone_bytes < a->overhead_per_drone_bytes &&
            a->overhead_per_drone_bytes < g->overhead_per_drone_bytes)) {
        bad.push_back(fmt::format("f={:.2f} ({:.0f}/{:.0f}/{:.0f})", f, s->overhead_per_drone_bytes,
                                  a->overhead_per_drone_bytes, g->overhead_per_drone_bytes));
      }
    }
    c.pass = c.populated && bad.empty();
    c.detail = bad.empty() ? "all cells ordered" : "violations: " + join_names(bad);
    out.push_back(c);
  }

  // Overhead growth with loss at size 20.
  for (Strategy s : {Strategy::SwarmSync, Strategy::Soul}) {
    OrderingCheck c{fmt::format("{} overhead growth f=0 -> f=0.75 at size 20 in [5, 15]", proto::to_string(s)), false,
                    false, ""};
    const auto* lo = idx.find(s, 20, 0.0, p);
    const auto* hi = idx.find(s, 20, 0.75, p);
    if (lo && hi && lo->overhead_bytes > 0) {
      c.populated = true;
      const double factor = hi->overhead_bytes / lo->overhead_bytes;
      c.pass = in_window(factor, 5.0, 15.0);
      c.detail = fmt::format("{:.0f} -> {:.0f} bytes, x{:.3f}", lo->overhead_bytes, hi->overhead_bytes, factor);
    }
    out.push_back(c);
  }

  // Patch size proportionality at size 200, f = 0.25.
  for (Strategy s : kStrategies) {
    OrderingCheck c{fmt::format("{} reduction 240 -> 64 packets at size 200, f=0.25 in [65%, 80%]",
                                proto::to_string(s)),
                    false, false, ""};
    const auto* big = idx.find(s, 200, 0.25, 240);
    const auto* small = idx.find(s, 200, 0.25, 64);
    if (big && small && big->convergence_steps > 0 && big->overhead_bytes > 0) {
      c.populated = true;
      const double steps = 1.0 - small->convergence_steps / big->convergence_steps;
      const double bytes = 1.0 - small->overhead_bytes / big->overhead_bytes;
      c.pass = in_window(steps, 0.65, 0.80) && in_window(bytes, 0.65, 0.80);
      c.detail = fmt::format("steps -{:.1f}%, overhead -{:.1f}%", 100 * steps, 100 * bytes);
    }
    out.push_back(c);
  }
  return out;
}

std::string summary_table(const std::vector<CellMean>& means) {
  std::string out = fmt::format("{:<10} {:>6} {:>6} {:>7} {:>4} {:>16} {:>22} {:>10}\n", "strategy", "size", "f",
                                "packets", "reps", "steps/drone", "overhead/drone (B)", "converged");
  for (const auto& m : means) {
    out += fmt::format("{:<10} {:>6} {:>6.2f} {:>7} {:>4} {:>16.3f} {:>22.1f} {:>10.2f}\n",
                       proto::to_string(m.strategy), m.swarm_size, m.failure_rate, m.patch_packets, m.reps,
                       m.steps_per_drone, m.overhead_per_drone_bytes, m.converged_fraction);
  }
  return out;
}

std::string orderings_table(const std::vector<OrderingCheck>& checks) {
  std::string out;
  for (const auto& c : checks) {
    const char* verdict = !c.populated ? "N/A " : (c.pass ? "PASS" : "FAIL");
    out += fmt::format("{}  {}{}\n", verdict, c.name, c.detail.empty() ? "" : "  [" + c.detail + "]");
  }
  return out;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                    "#393b79", "#637939"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Round step for about five ticks over [lo, hi].
double tick_step(double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

std::string tick_label(double v) {
  if (std::abs(v) >= 1e6) return fmt::format("{:.3g}", v);
  if (std::abs(v - std::round(v)) < 1e-9) return fmt::format("{:.0f}", v);
  return fmt::format("{:g}", v);
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<ChartPanel>& panels) {
  constexpr double kPanelW = 420, kPanelH = 320, kLeft = 70, kRight = 20, kTop = 50, kBottom = 55, kLegend = 130;
  const double width = std::max<std::size_t>(panels.size(), 1) * (kPanelW + kLegend);
  const double height = kPanelH + 30;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2:.0f}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      width, height, width / 2, escape(title));

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const double ox = pi * (kPanelW + kLegend);
    const double oy = 20;
    const double pw = kPanelW - kLeft - kRight;
    const double ph = kPanelH - kTop - kBottom;

    double x0 = 1e300, x1 = -1e300, y0 = 0, y1 = -1e300;
    for (const auto& s : panel.series) {
      for (auto [x, y] : s.points) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
    if (x0 > x1) x0 = 0, x1 = 1;  // no data
    if (y1 <= y0) y1 = y0 + 1;
    if (x1 == x0) {
      x0 -= 1;
      x1 += 1;
    }
    const double ys = tick_step(y0, y1);
    y1 = std::ceil(y1 / ys) * ys;
    auto px = [&](double x) { return ox + kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return oy + kTop + ph - (y - y0) / (y1 - y0) * ph; };

    svg += fmt::format("<g>\n<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                       ox + kLeft + pw / 2, oy + kTop - 12, escape(panel.title));
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                       "stroke=\"#444\"/>\n",
                       ox + kLeft, oy + kTop, pw, ph);
    for (double y = y0; y <= y1 + ys / 2; y += ys) {
      svg += fmt::format("<line x1=\"{0:.1f}\" x2=\"{1:.1f}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" stroke=\"#ddd\"/>"
                         "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\">{5}</text>\n",
                         ox + kLeft, ox + kLeft + pw, py(y), ox + kLeft - 5, py(y) + 4, tick_label(y));
    }
    std::set<double> xs;
    for (const auto& s : panel.series) {
      for (auto [x, y] : s.points) xs.insert(x);
    }
    for (double x : xs) {
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(x),
                         oy + kTop + ph + 15, tick_label(x));
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", ox + kLeft + pw / 2,
                       oy + kTop + ph + 35, escape(panel.x_label));
    svg += fmt::format("<text transform=\"translate({:.1f},{:.1f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                       ox + 15, oy + kTop + ph / 2, escape(panel.y_label));

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const auto& s = panel.series[si];
      const char* color = kPalette[si % std::size(kPalette)];
      std::string pts;
      for (auto [x, y] : s.points) pts += fmt::format("{:.1f},{:.1f} ", px(x), py(y));
      if (s.points.size() > 1) {
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, pts);
      }
      for (auto [x, y] : s.points) {
        svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(x), py(y), color);
      }
      const double ly = oy + kTop + 14 * si;
      svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>"
                         "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
                         ox + kPanelW, ly, color, ox + kPanelW + 14, ly + 9, escape(s.label));
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<ChartPanel> versus_size(const std::vector<CellMean>& means, double CellMean::*metric,
                                    const std::string& y_label) {
  const int p = main_packets(means);
  std::vector<ChartPanel> panels;
  for (double f : distinct(means, &CellMean::failure_rate)) {
    ChartPanel panel{fmt::format("f = {:.2f}, {} packets", f, p), "swarm size", y_label, {}};
    for (Strategy s : kStrategies) {
      ChartSeries series{proto::to_string(s), {}};
      for (const auto& m : means) {
        if (m.strategy == s && m.failure_rate == f && m.patch_packets == p) {
          series.points.emplace_back(m.swarm_size, m.*metric);
        }
      }
      std::sort(series.points.begin(), series.points.end());
      if (!series.points.empty()) panel.series.push_back(std::move(series));
    }
    if (!panel.series.empty()) panels.push_back(std::move(panel));
  }
  return panels;
}

std::vector<ChartPanel> versus_packets(const std::vector<CellMean>& means) {
  // Use the (size, f) cell with the most packet variants; prefer 200 / 0.25.
  std::map<std::pair<int, double>, std::set<int>> variants;
  for (const auto& m : means) variants[{m.swarm_size, m.failure_rate}].insert(m.patch_packets);
  std::pair<int, double> pick{0, 0.0};
  std::size_t best = 0;
  for (const auto& [key, packets] : variants) {
    const bool preferred = key == std::pair<int, double>{200, 0.25};
    if (packets.size() > best || (packets.size() == best && preferred)) {
      best = packets.size();
      pick = key;
    }
  }
  std::vector<ChartPanel> panels{
      {fmt::format("convergence, size {}, f = {:.2f}", pick.first, pick.second), "patch packets", "control steps", {}},
      {fmt::format("overhead, size {}, f = {:.2f}", pick.first, pick.second), "patch packets", "bytes", {}}};
  for (Strategy s : kStrategies) {
    ChartSeries steps{proto::to_string(s), {}};
    ChartSeries bytes{proto::to_string(s), {}};
    for (const auto& m : means) {
      if (m.strategy == s && m.swarm_size == pick.first && m.failure_rate == pick.second) {
        steps.points.emplace_back(m.patch_packets, m.convergence_steps);
        bytes.points.emplace_back(m.patch_packets, m.overhead_bytes);
      }
    }
    std::sort(steps.points.begin(), steps.points.end());
    std::sort(bytes.points.begin(), bytes.points.end());
    if (!steps.points.empty()) {
      panels[0].series.push_back(std::move(steps));
      panels[1].series.push_back(std::move(bytes));
    }
  }
  return panels;
}

}  // namespace

ReportFiles write_report(const std::vector<SweepRow>& rows, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto means = cell_means(rows);
  ReportFiles files;
  files.checks = evaluate_orderings(means);

  files.summary = out_dir / "summary.txt";
  write_text(files.summary, "Mean per cell\n\n" + summary_table(means) + "\nOrderings\n\n" +
                                orderings_table(files.checks));
  files.orderings = out_dir / "orderings.txt";
  write_text(files.orderings, orderings_table(files.checks));
  files.means_csv = out_dir / "means.csv";
  {
    std::ofstream out(files.means_csv, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + files.means_csv.string() + "'");
    write_means_csv(out, means);
  }

  const std::pair<std::string, std::string> charts[] = {
      {"steps_per_drone_vs_size.svg",
       render_svg("Convergence steps per drone vs swarm size",
                  versus_size(means, &CellMean::steps_per_drone, "steps per drone"))},
      {"overhead_vs_size.svg", render_svg("Overhead per drone vs swarm size",
                                          versus_size(means, &CellMean::overhead_per_drone_bytes, "bytes per drone"))},
      {"patch_size.svg", render_svg("Convergence and overhead vs patch packets", versus_packets(means))},
  };
  for (const auto& [name, svg] : charts) {
    files.charts.push_back(out_dir / name);
    write_text(files.charts.back(), svg);
  }
  return files;
}

}  // namespace swarmupdate::exp

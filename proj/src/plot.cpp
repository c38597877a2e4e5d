//
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qubo/bench.hpp"
#include "qubo/error.hpp"

namespace qubo::bench {

namespace fs = std::filesystem;

std::map<EnergyKey, double>
aggregate_energy(const std::vector<BenchRecord> &records) {
  std::map<EnergyKey, double> out;
  for (const auto &r : records) {
    if (!std::isfinite(r.energy))
      continue;
    const EnergyKey key{r.n, r.instance_id, r.backend, r.threshold};
    const auto [it, inserted] = out.emplace(key, r.energy);
    if (!inserted)
      it->second = std::min(it->second, r.energy);
  }
  return out;
}

std::map<RuntimeKey, double>
aggregate_runtime(const std::vector<BenchRecord> &records) {
  std::map<RuntimeKey, std::pair<double, std::size_t>> sums;
  for (const auto &r : records) {
    auto &[sum, count] = sums[RuntimeKey{r.n, r.backend, r.threshold}];
    sum += r.wall_time_s;
    ++count;
  }
  std::map<RuntimeKey, double> out;
  for (const auto &[key, acc] : sums)
    out.emplace(key, acc.first / static_cast<double>(acc.second));
  return out;
}

namespace {

const char *series_color(Backend backend) {
  switch (backend) {
  case Backend::kSa:
    return "#000000";
  case Backend::kAdam:
    return "#1f77b4";
  case Backend::kAdamW:
    return "#ff7f0e";
  case Backend::kLbfgs:
    return "#d62728";
  }
  return "#808080";
}

struct Series {
  Backend backend;
  std::vector<std::pair<double, double>> points; // (threshold, value)
};

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 150.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

std::string fmt_px(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << v;
  return out.str();
}

std::string fmt_label(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

// Log10 x axis (thresholds, largest on the left) and linear y axis.
std::string render_svg(const std::string &title, const std::string &y_label,
                       const std::vector<Series> &series) {
  std::set<double> xs;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const auto &s : series) {
    for (const auto &[x, y] : s.points) {
      xs.insert(x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  const double lx_max = std::log10(*xs.rbegin());
  const double lx_min = std::log10(*xs.begin());
  const double x_span = lx_max > lx_min ? lx_max - lx_min : 1.0;
  if (y_max == y_min) {
    const double pad = std::max(1.0, std::abs(y_min) * 0.05);
    y_min -= pad;
    y_max += pad;
  } else {
    const double pad = (y_max - y_min) * 0.05;
    y_min -= pad;
    y_max += pad;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) {
    if (lx_max == lx_min)
      return kLeft + plot_w / 2.0;
    return kLeft + (lx_max - std::log10(x)) / x_span * plot_w;
  };
  const auto py = [&](double y) {
    return kTop + (y_max - y) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (const double x : xs) {
    const std::string xp = fmt_px(px(x));
    svg << "<line class=\"xtick\" x1=\"" << xp << "\" x2=\"" << xp
        << "\" y1=\"" << kTop + plot_h << "\" y2=\"" << kTop + plot_h + 5
        << "\" stroke=\"#444\"/>\n";
    const int exponent = static_cast<int>(std::lround(std::log10(x)));
    const bool decade = std::abs(std::log10(x) - exponent) < 1e-9;
    svg << "<text x=\"" << xp << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\">";
    if (decade)
      svg << "1e" << exponent;
    else
      svg << fmt_label(x);
    svg << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_min + (y_max - y_min) * k / 4.0;
    const std::string yp = fmt_px(py(y));
    svg << "<line x1=\"" << kLeft - 5 << "\" x2=\"" << kLeft << "\" y1=\""
        << yp << "\" y2=\"" << yp << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << yp
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
        << fmt_label(y) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">stopping threshold (log scale)</text>\n";
  svg << "<text transform=\"translate(20," << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto &s : series) {
    const char *color = series_color(s.backend);
    const auto name = to_string(s.backend);
    svg << "<g class=\"series\" data-backend=\"" << name << "\">\n";
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        svg << (k ? " " : "") << fmt_px(px(s.points[k].first)) << ','
            << fmt_px(py(s.points[k].second));
      }
      svg << "\"/>\n";
    }
    for (const auto &[x, y] : s.points) {
      svg << "<circle class=\"point\" data-backend=\"" << name
          << "\" data-threshold=\"" << format_double(x) << "\" data-value=\""
          << format_double(y) << "\" cx=\"" << fmt_px(px(x)) << "\" cy=\""
          << fmt_px(py(y)) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    }
    svg << "</g>\n";
    const double lx = kWidth - kRight + 15;
    svg << "<line x1=\"" << lx << "\" x2=\"" << lx + 24 << "\" y1=\""
        << legend_y << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y
        << "\" dominant-baseline=\"middle\">" << name << "</text>\n";
    legend_y += 20;
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out)
    throw IoError("write failed: " + path.string());
}

// Series in backend enum order, points with decreasing threshold.
template <typename Map, typename Match>
std::vector<Series> collect(const Map &values, Match match,
                            auto backend_of, auto threshold_of) {
  std::vector<Series> series;
  for (const Backend b : kAllBackends) {
    Series s{b, {}};
    for (const auto &[key, value] : values)
      if (match(key) && backend_of(key) == b)
        s.points.emplace_back(threshold_of(key), value);
    if (s.points.empty())
      continue;
    std::sort(s.points.begin(), s.points.end(),
              [](const auto &a, const auto &b) { return a.first > b.first; });
    series.push_back(std::move(s));
  }
  return series;
}

} // namespace

std::vector<fs::path> emit_plots(const std::vector<BenchRecord> &records,
                                 const fs::path &output_dir) {
  if (records.empty())
    throw ValidationError("no records to plot");
  const fs::path dir = output_dir / "plots";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const auto energy = aggregate_energy(records);
  const auto runtime = aggregate_runtime(records);

  std::set<std::pair<std::size_t, std::size_t>> instances;
  std::set<std::size_t> sizes;
  for (const auto &r : records) {
    instances.emplace(r.n, r.instance_id);
    sizes.insert(r.n);
  }

  std::vector<fs::path> written;
  for (const auto &[n, inst] : instances) {
    auto series = collect(
        energy,
        [n = n, inst = inst](const EnergyKey &k) {
          return std::get<0>(k) == n && std::get<1>(k) == inst;
        },
        [](const EnergyKey &k) { return std::get<2>(k); },
        [](const EnergyKey &k) { return std::get<3>(k); });
    if (series.empty())
      continue;
    const fs::path path = dir / ("energy_n" + std::to_string(n) + "_i" +
                                 std::to_string(inst) + ".svg");
    write_text(path, render_svg("Best energy, n = " + std::to_string(n) +
                                    ", instance " + std::to_string(inst),
                                "energy (best of repeats)", series));
    written.push_back(path);
  }
  for (const std::size_t n : sizes) {
    auto series = collect(
        runtime, [n](const RuntimeKey &k) { return std::get<0>(k) == n; },
        [](const RuntimeKey &k) { return std::get<1>(k); },
        [](const RuntimeKey &k) { return std::get<2>(k); });
    const fs::path path = dir / ("runtime_n" + std::to_string(n) + ".svg");
    write_text(path, render_svg("Mean runtime, n = " + std::to_string(n),
                                "wall time (s)", series));
    written.push_back(path);
  }
  return written;
}

} // namespace qubo::bench

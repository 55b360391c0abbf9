#include "rowsim/svg_chart.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "rowsim/sweep.hpp"

namespace rowsim {

namespace {

constexpr int kW = 640, kH = 420;
constexpr int kL = 70, kR = 30, kT = 40, kB = 60;

const char* color_for(StrategyKind k) {
    switch (k) {
        case StrategyKind::Rss: return "#c0392b";
        case StrategyKind::Rwa: return "#2471a3";
        case StrategyKind::Coop: return "#1e8449";
    }
    return "#555555";
}

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (lambda, value)
    std::vector<double> err;                        // optional, same size
};

void write_chart(const std::string& file, const std::string& title,
                 const std::string& y_label, const std::vector<Series>& series) {
    double xmax = 0, ymax = 0;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            xmax = std::max(xmax, s.points[i].first);
            const double e = i < s.err.size() ? s.err[i] : 0.0;
            ymax = std::max(ymax, s.points[i].second + e);
        }
    if (xmax <= 0) xmax = 1;
    if (ymax <= 0) ymax = 1;
    ymax *= 1.08;
    auto px = [&](double x) { return kL + (kW - kL - kR) * (x / xmax); };
    auto py = [&](double y) { return kH - kB - (kH - kT - kB) * (y / ymax); };

    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
        << "' font-family='sans-serif' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kW / 2 << "' y='22' text-anchor='middle' font-size='15'>"
        << title << "</text>\n";
    out << "<line x1='" << kL << "' y1='" << kH - kB << "' x2='" << kW - kR << "' y2='"
        << kH - kB << "' stroke='black'/>\n";
    out << "<line x1='" << kL << "' y1='" << kT << "' x2='" << kL << "' y2='" << kH - kB
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = ymax * i / 4.0;
        out << "<text x='" << kL - 8 << "' y='" << py(yv) + 4
            << "' text-anchor='end'>" << static_cast<long>(yv) << "</text>\n";
        out << "<line x1='" << kL << "' x2='" << kW - kR << "' y1='" << py(yv)
            << "' y2='" << py(yv) << "' stroke='#dddddd'/>\n";
    }
    std::vector<double> xticks;
    for (const Series& s : series)
        for (const auto& p : s.points) xticks.push_back(p.first);
    std::sort(xticks.begin(), xticks.end());
    xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
    for (double xv : xticks)
        out << "<text x='" << px(xv) << "' y='" << kH - kB + 18
            << "' text-anchor='middle'>" << static_cast<long>(xv) << "</text>\n";
    out << "<text x='" << kW / 2 << "' y='" << kH - 16
        << "' text-anchor='middle'>arrival rate [veh/(lane.h)]</text>\n";
    out << "<text x='18' y='" << (kT + kH - kB) / 2
        << "' text-anchor='middle' transform='rotate(-90 18 " << (kT + kH - kB) / 2
        << ")'>" << y_label << "</text>\n";

    int legend_y = kT + 6;
    for (const Series& s : series) {
        std::ostringstream pts;
        for (const auto& p : s.points) pts << px(p.first) << ',' << py(p.second) << ' ';
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='2' points='"
            << pts.str() << "'/>\n";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            out << "<circle cx='" << px(p.first) << "' cy='" << py(p.second)
                << "' r='3' fill='" << s.color << "'/>\n";
            if (i < s.err.size() && s.err[i] > 0) {
                out << "<line x1='" << px(p.first) << "' x2='" << px(p.first) << "' y1='"
                    << py(p.second - s.err[i]) << "' y2='" << py(p.second + s.err[i])
                    << "' stroke='" << s.color << "'/>\n";
            }
        }
        out << "<rect x='" << kL + 12 << "' y='" << legend_y << "' width='14' height='4' fill='"
            << s.color << "'/>\n";
        out << "<text x='" << kL + 32 << "' y='" << legend_y + 6 << "'>" << s.label
            << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";

    std::ofstream f(file);
    f << out.str();
}

}  // namespace

void write_sweep_charts(const std::string& dir, const std::vector<Aggregate>& aggs) {
    std::map<StrategyKind, Series> delay, thr;
    Series ideal;
    ideal.label = "ideal";
    ideal.color = "#7f8c8d";
    for (const Aggregate& a : aggs) {
        auto& d = delay[a.strategy];
        d.label = to_string(a.strategy);
        d.color = color_for(a.strategy);
        d.points.push_back({a.lambda, a.delay_mean});
        d.err.push_back(a.delay_sd);
        auto& t = thr[a.strategy];
        t.label = to_string(a.strategy);
        t.color = color_for(a.strategy);
        t.points.push_back({a.lambda, a.throughput_mean});
        t.err.push_back(a.throughput_sd);
        bool seen = false;
        for (auto& p : ideal.points)
            if (p.first == a.lambda) seen = true;
        if (!seen) ideal.points.push_back({a.lambda, a.ideal_mean});
    }
    std::vector<Series> ds, ts;
    for (auto& [k, s] : delay) {
        std::sort(s.points.begin(), s.points.end());
        ds.push_back(s);
    }
    for (auto& [k, s] : thr) {
        std::sort(s.points.begin(), s.points.end());
        ts.push_back(s);
    }
    std::sort(ideal.points.begin(), ideal.points.end());
    ts.push_back(ideal);
    write_chart(dir + "/fig6_delay.svg", "Average delay by strategy", "average delay [s]",
                ds);
    write_chart(dir + "/fig7_throughput.svg", "Throughput by strategy",
                "throughput [veh/20 min]", ts);
}

}  // namespace rowsim

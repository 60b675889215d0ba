#include "surfer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace surfer {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 40, kTop = 40, kBottom = 50;

double x_of(double n, double n_max) {
    return kLeft + (kWidth - kLeft - kRight) * (n_max > 0 ? n / n_max : 0.0);
}

std::string polyline(const ConvergenceTrace& trace, double n_max,
                     double (*value)(const TraceRow&), double lo, double hi,
                     const char* color) {
    std::ostringstream out;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const TraceRow& row : trace.rows) {
        const double v = value(row);
        if (std::isnan(v)) continue;
        const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        out << x_of(static_cast<double>(row.n), n_max) << ','
            << (kHeight - kBottom) - t * (kHeight - kTop - kBottom) << ' ';
    }
    out << "\"/>\n";
    return out.str();
}

double log_l1(const TraceRow& r) {
    return r.l1_distance > 0 ? std::log10(r.l1_distance)
                             : std::numeric_limits<double>::quiet_NaN();
}
double miss(const TraceRow& r) { return r.rank_miss_pct; }

}  // namespace

void write_trace_svg(const std::filesystem::path& path, const ConvergenceTrace& trace,
                     const std::string& title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    double n_max = 1, l1_lo = 0, l1_hi = 1;
    bool any_l1 = false;
    for (const TraceRow& row : trace.rows) {
        n_max = std::max(n_max, static_cast<double>(row.n));
        const double v = log_l1(row);
        if (std::isnan(v)) continue;
        if (!any_l1) {
            l1_lo = l1_hi = v;
            any_l1 = true;
        }
        l1_lo = std::min(l1_lo, v);
        l1_hi = std::max(l1_hi, v);
    }
    if (l1_hi - l1_lo < 1e-9) l1_hi = l1_lo + 1;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
        << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";

    if (trace.has_oracle)
        out << polyline(trace, n_max, log_l1, l1_lo, l1_hi, "#1f77b4");
    if (trace.has_criterion)
        out << polyline(trace, n_max, miss, 0.0, 100.0, "#d62728");

    out << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           "iterations</text>\n"
        << "<text x=\"" << kLeft << "\" y=\"" << kTop - 8
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#1f77b4\">"
           "log10 L1 distance</text>\n"
        << "<text x=\"" << kWidth - kRight << "\" y=\"" << kTop - 8
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#d62728\">rank miss %</text>\n"
        << "</svg>\n";
}

}  // namespace surfer

#include "lidargait/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lidargait/skeleton.hpp"

namespace lidargait {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

std::string track_panels_svg(const std::string& title, const std::vector<TrackPanel>& panels) {
    constexpr double width = 720, panel_h = 160, left = 60, right = 20, top = 40, gap = 30;
    const double height = top + static_cast<double>(panels.size()) * (panel_h + gap);
    std::ostringstream os;
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
       << R"(" font-family="sans-serif" font-size="11">)" << '\n';
    os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    os << R"(<text x=")" << width / 2 << R"(" y="20" text-anchor="middle" font-size="14">)" << escape(title)
       << "</text>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const Eigen::VectorXd& v = panel.values;
        const double y0 = top + static_cast<double>(p) * (panel_h + gap);
        const double plot_w = width - left - right;
        os << R"(<rect x=")" << left << R"(" y=")" << y0 << R"(" width=")" << plot_w << R"(" height=")" << panel_h
           << R"(" fill="none" stroke="#888"/>)" << '\n';
        os << R"(<text x=")" << left << R"(" y=")" << y0 - 4 << R"(">)" << escape(panel.title) << "</text>\n";
        if (v.size() == 0)
            continue;

        double lo = 0, hi = 0;
        bool any = false;
        for (Index t = 0; t < v.size(); ++t) {
            if (panel.zero_is_missing && v(t) == 0.0)
                continue;
            lo = any ? std::min(lo, v(t)) : v(t);
            hi = any ? std::max(hi, v(t)) : v(t);
            any = true;
        }
        if (!any)
            lo = -1, hi = 1;
        if (hi - lo < 1e-9)
            lo -= 0.5, hi += 0.5;
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
        const double n = static_cast<double>(std::max<Index>(v.size() - 1, 1));
        auto px = [&](Index t) { return left + plot_w * static_cast<double>(t) / n; };
        auto py = [&](double y) { return y0 + panel_h * (hi - y) / (hi - lo); };

        os << R"(<text x=")" << left - 4 << R"(" y=")" << y0 + 10 << R"(" text-anchor="end">)" << fixed(hi)
           << "</text>\n";
        os << R"(<text x=")" << left - 4 << R"(" y=")" << y0 + panel_h << R"(" text-anchor="end">)" << fixed(lo)
           << "</text>\n";

        std::string path;
        bool pen = false;
        for (Index t = 0; t < v.size(); ++t) {
            if (panel.zero_is_missing && v(t) == 0.0) {
                os << R"(<circle cx=")" << fixed(px(t)) << R"(" cy=")" << y0 + panel_h - 3
                   << R"(" r="2.5" fill="#d62728"/>)" << '\n';
                pen = false;
                continue;
            }
            path += (pen ? " L" : " M") + fixed(px(t)) + "," + fixed(py(v(t)));
            pen = true;
        }
        os << R"(<path fill="none" stroke="#1f77b4" stroke-width="1.3" d=")" << path << R"("/>)" << '\n';
    }
    os << R"(<text x=")" << width / 2 << R"(" y=")" << height - 6 << R"(" text-anchor="middle">frame</text>)"
       << '\n';
    os << "</svg>\n";
    return os.str();
}

std::string confusion_svg(const std::string& title, const std::vector<std::string>& labels,
                          const Eigen::MatrixXi& confusion) {
    const double cell = 36, left = 90, top = 70;
    const auto n = static_cast<double>(labels.size());
    const double width = left + n * cell + 20;
    const double height = top + n * cell + 40;
    const int peak = confusion.size() ? std::max(confusion.maxCoeff(), 1) : 1;

    std::ostringstream os;
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
       << R"(" font-family="sans-serif" font-size="11">)" << '\n';
    os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    os << R"(<text x=")" << width / 2 << R"(" y="18" text-anchor="middle" font-size="14">)" << escape(title)
       << "</text>\n";
    os << R"(<text x=")" << left + n * cell / 2 << R"(" y="38" text-anchor="middle">predicted</text>)" << '\n';
    os << "<text x=\"12\" y=\"" << top + n * cell / 2 << "\" transform=\"rotate(-90 12 " << top + n * cell / 2
       << ")\" text-anchor=\"middle\">truth</text>\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double offset = static_cast<double>(i) * cell + cell / 2;
        os << R"(<text x=")" << left + offset << R"(" y=")" << top - 6 << R"(" text-anchor="middle">)"
           << escape(labels[i]) << "</text>\n";
        os << R"(<text x=")" << left - 6 << R"(" y=")" << top + offset + 4 << R"(" text-anchor="end">)"
           << escape(labels[i]) << "</text>\n";
    }
    for (Index r = 0; r < confusion.rows(); ++r) {
        for (Index c = 0; c < confusion.cols(); ++c) {
            const double share = static_cast<double>(confusion(r, c)) / peak;
            const int shade = static_cast<int>(255 - 200 * share);
            const double x = left + static_cast<double>(c) * cell;
            const double y = top + static_cast<double>(r) * cell;
            os << R"(<rect x=")" << x << R"(" y=")" << y << R"(" width=")" << cell << R"(" height=")" << cell
               << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#999\"/>\n";
            os << R"(<text x=")" << x + cell / 2 << R"(" y=")" << y + cell / 2 + 4 << R"(" text-anchor="middle" fill=")"
               << (share > 0.6 ? "white" : "black") << R"(">)" << confusion(r, c) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace lidargait

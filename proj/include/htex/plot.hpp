#pragma once

#include <htex/ordinal.hpp>
#include <htex/quantifiers.hpp>
#include <htex/report.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace htex {

enum class Plane { cecp, fecp };

inline std::optional<Plane> parse_plane(std::string_view s) {
    if (s == "cecp") return Plane::cecp;
    if (s == "fecp") return Plane::fecp;
    return std::nullopt;
}

/// Maps a row to its group name. Accepts a CSV column name (label, source,
/// method, D, tau, transform) or "label:<regex>", in which case the first
/// capture group (or the whole match) of the label names the group.
class GroupKey {
public:
    explicit GroupKey(std::string spec) : spec_(std::move(spec)) {
        static const std::set<std::string, std::less<>> columns = {"label", "source", "method",
                                                                  "D",     "tau",    "transform"};
        if (spec_.starts_with("label:")) {
            pattern_ = std::regex(spec_.substr(6));
        } else if (!columns.contains(spec_)) {
            throw std::invalid_argument("cannot group by '" + spec_ + "'");
        }
    }

    std::string operator()(const AnalysisRow& r) const {
        if (pattern_) {
            std::smatch m;
            if (std::regex_search(r.label, m, *pattern_)) return m.size() > 1 ? m[1].str() : m[0].str();
            return r.label;
        }
        if (spec_ == "label") return r.label;
        if (spec_ == "source") return r.source;
        if (spec_ == "method") return r.method;
        if (spec_ == "D") return std::to_string(r.dim);
        if (spec_ == "tau") return std::to_string(r.tau);
        return r.transform;
    }

private:
    std::string spec_;
    std::optional<std::regex> pattern_;
};

struct GroupSummary {
    std::string name;
    std::size_t count = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double std_x = 0.0;  // sample standard deviation, 0 for a single member
    double std_y = 0.0;
};

inline double plane_y(const AnalysisRow& r, Plane plane) {
    return plane == Plane::cecp ? r.triple.complexity : r.triple.fisher;
}

/// Per-group mean and standard deviation of (H, C) or (H, F), groups in
/// order of first appearance.
inline std::vector<GroupSummary> summarize_groups(const std::vector<AnalysisRow>& rows,
                                                  Plane plane, const GroupKey& key) {
    std::vector<GroupSummary> out;
    std::map<std::string, std::vector<const AnalysisRow*>> members;
    for (const auto& r : rows) {
        const std::string g = key(r);
        if (!members.contains(g)) out.push_back({g});
        members[g].push_back(&r);
    }
    for (auto& s : out) {
        const auto& m = members[s.name];
        s.count = m.size();
        for (const auto* r : m) {
            s.mean_x += r->triple.entropy;
            s.mean_y += plane_y(*r, plane);
        }
        s.mean_x /= static_cast<double>(s.count);
        s.mean_y /= static_cast<double>(s.count);
        if (s.count > 1) {
            double vx = 0.0;
            double vy = 0.0;
            for (const auto* r : m) {
                vx += std::pow(r->triple.entropy - s.mean_x, 2);
                vy += std::pow(plane_y(*r, plane) - s.mean_y, 2);
            }
            s.std_x = std::sqrt(vx / static_cast<double>(s.count - 1));
            s.std_y = std::sqrt(vy / static_cast<double>(s.count - 1));
        }
    }
    return out;
}

struct PlotOptions {
    Plane plane = Plane::cecp;
    std::optional<std::string> group_by;
    std::string title;
    std::size_t bound_samples = 201;
};

namespace detail {

inline std::string fixed2(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::fixed, 2);
    return std::string(buf.data(), res.ptr);
}

inline std::string xml_escape(std::string_view s) {
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

constexpr std::array<std::string_view, 10> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

/// Scatter plot of the rows on the complexity-entropy or Fisher-entropy
/// plane, both axes spanning [0, 1]. CECP plots overlay the limit curves for
/// every embedding dimension present.
inline std::string render_svg(const std::vector<AnalysisRow>& rows, const PlotOptions& opt) {
    constexpr double left = 70.0;
    constexpr double top = 40.0;
    constexpr double size = 500.0;
    const auto px = [&](double h) { return detail::fixed2(left + size * std::clamp(h, 0.0, 1.0)); };
    const auto py = [&](double v) {
        return detail::fixed2(top + size * (1.0 - std::clamp(v, 0.0, 1.0)));
    };
    const std::string y_name = opt.plane == Plane::cecp ? "C" : "F";

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"600\" "
         "viewBox=\"0 0 760 600\">\n";
    s += "<rect width=\"760\" height=\"600\" fill=\"white\"/>\n";
    if (!opt.title.empty()) {
        s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"15\">" + detail::xml_escape(opt.title) + "</text>\n";
    }

    // axes, ticks and grid
    s += "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
    s += "<rect x=\"" + px(0) + "\" y=\"" + py(1) + "\" width=\"500\" height=\"500\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = i / 5.0;
        s += "<line x1=\"" + px(t) + "\" y1=\"" + py(0) + "\" x2=\"" + px(t) + "\" y2=\"" +
             detail::fixed2(top + size + 6) + "\"/>\n";
        s += "<line x1=\"" + detail::fixed2(left - 6) + "\" y1=\"" + py(t) + "\" x2=\"" + px(0) +
             "\" y2=\"" + py(t) + "\"/>\n";
    }
    s += "</g>\n<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = i / 5.0;
        s += "<text x=\"" + px(t) + "\" y=\"" + detail::fixed2(top + size + 20) +
             "\" text-anchor=\"middle\">" + detail::fixed2(t).substr(0, 3) + "</text>\n";
        s += "<text x=\"" + detail::fixed2(left - 10) + "\" y=\"" + detail::fixed2(top + size * (1 - t) + 4) +
             "\" text-anchor=\"end\">" + detail::fixed2(t).substr(0, 3) + "</text>\n";
    }
    s += "<text x=\"" + px(0.5) + "\" y=\"" + detail::fixed2(top + size + 42) +
         "\" text-anchor=\"middle\" font-size=\"14\">H</text>\n";
    s += "<text x=\"20\" y=\"" + py(0.5) + "\" text-anchor=\"middle\" font-size=\"14\">" + y_name +
         "</text>\n</g>\n";

    // limit curves
    if (opt.plane == Plane::cecp) {
        std::set<int> dims;
        for (const auto& r : rows) {
            if (r.dim >= kMinOrder && r.dim <= kMaxOrder) dims.insert(r.dim);
        }
        for (int d : dims) {
            const auto b = cecp_bounds(factorial(d), opt.bound_samples);
            for (const auto* curve : {&b.lower, &b.upper}) {
                s += "<polyline class=\"bound\" data-D=\"" + std::to_string(d) +
                     "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\" points=\"";
                for (const auto& p : *curve) s += px(p.entropy) + "," + py(p.complexity) + " ";
                s += "\"/>\n";
            }
        }
    }

    // points, coloured by group when grouping
    std::optional<GroupKey> key;
    if (opt.group_by) key.emplace(*opt.group_by);
    std::map<std::string, std::size_t> colour_of;
    std::vector<GroupSummary> groups;
    if (key) {
        groups = summarize_groups(rows, opt.plane, *key);
        for (std::size_t i = 0; i < groups.size(); ++i) colour_of[groups[i].name] = i;
    }
    s += "<g id=\"points\">\n";
    for (const auto& r : rows) {
        const std::size_t c = key ? colour_of[(*key)(r)] : 0;
        s += "<circle class=\"point\" cx=\"" + px(r.triple.entropy) + "\" cy=\"" +
             py(plane_y(r, opt.plane)) + "\" r=\"2.5\" fill=\"" +
             std::string(detail::kPalette[c % detail::kPalette.size()]) + "\" fill-opacity=\"0.6\"><title>" +
             detail::xml_escape(r.label + " " + r.transform) + "</title></circle>\n";
    }
    s += "</g>\n";

    if (key) {
        s += "<g id=\"groups\" stroke-width=\"1.5\">\n";
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const auto& g = groups[i];
            const std::string col(detail::kPalette[i % detail::kPalette.size()]);
            s += "<g class=\"errorbar\" stroke=\"" + col + "\">";
            s += "<line x1=\"" + px(g.mean_x - g.std_x) + "\" y1=\"" + py(g.mean_y) + "\" x2=\"" +
                 px(g.mean_x + g.std_x) + "\" y2=\"" + py(g.mean_y) + "\"/>";
            s += "<line x1=\"" + px(g.mean_x) + "\" y1=\"" + py(g.mean_y - g.std_y) + "\" x2=\"" +
                 px(g.mean_x) + "\" y2=\"" + py(g.mean_y + g.std_y) + "\"/>";
            s += "<rect x=\"" + detail::fixed2(left + size * std::clamp(g.mean_x, 0.0, 1.0) - 3) +
                 "\" y=\"" + detail::fixed2(top + size * (1 - std::clamp(g.mean_y, 0.0, 1.0)) - 3) +
                 "\" width=\"6\" height=\"6\" fill=\"" + col + "\"/></g>\n";
            const double ly = top + 10 + 18.0 * static_cast<double>(i);
            s += "<text x=\"600\" y=\"" + detail::fixed2(ly + 4) +
                 "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + col + "\">" +
                 detail::xml_escape(g.name) + " (n=" + std::to_string(g.count) + ")</text>\n";
        }
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace htex

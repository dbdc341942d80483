#ifndef FOLDCHECK_SVG_HPP
#define FOLDCHECK_SVG_HPP

// SVG rendering of an arrangement dump (the output of arrangement_to_json):
// bounded cells shaded by ply, crease images stroked by label.

#include "foldcheck/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace foldcheck {

namespace detail {

inline double to_double(const nlohmann::ordered_json& v) {
  return parse_rat(v.get<std::string>()).convert_to<double>();
}

inline std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace detail

inline std::string render_svg(const nlohmann::ordered_json& arr) {
  const double size = 400, margin = 20;
  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (const auto& c : arr.at("cells")) {
    for (const auto& p : c.at("boundary")) {
      double x = detail::to_double(p[0]), y = detail::to_double(p[1]);
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
  }
  if (!(minx <= maxx)) minx = miny = 0, maxx = maxy = 1;
  double span = std::max({maxx - minx, maxy - miny, 1e-9});
  double scale = size / span;
  auto px = [&](const nlohmann::ordered_json& p) {
    return detail::fixed(margin + (detail::to_double(p[0]) - minx) * scale) + "," +
           detail::fixed(margin + (maxy - detail::to_double(p[1])) * scale);
  };
  double width = (maxx - minx) * scale + 2 * margin;
  double height = (maxy - miny) * scale + 2 * margin + 20;
  std::size_t max_ply = arr.at("max_ply").get<std::size_t>();

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::fixed(width) << "\" height=\""
     << detail::fixed(height) << "\" viewBox=\"0 0 " << detail::fixed(width) << " " << detail::fixed(height) << "\">\n";
  os << "<g id=\"cells\" stroke=\"#555555\" stroke-width=\"0.5\">\n";
  for (const auto& c : arr.at("cells")) {
    if (c.at("outer").get<bool>()) continue;
    double opacity = max_ply == 0 ? 0 : static_cast<double>(c.at("ply").get<std::size_t>()) / max_ply;
    os << "<polygon data-cell=\"" << c.at("id").get<std::size_t>() << "\" data-ply=\"" << c.at("ply").get<std::size_t>()
       << "\" fill=\"#1f4e9c\" fill-opacity=\"" << detail::fixed(opacity) << "\" points=\"";
    bool first = true;
    for (const auto& p : c.at("boundary")) {
      if (!first) os << ' ';
      os << px(p);
      first = false;
    }
    os << "\"/>\n";
  }
  os << "</g>\n<g id=\"creases\" stroke-width=\"1.5\">\n";
  for (const auto& ci : arr.at("crease_images")) {
    std::string label = ci.at("label").get<std::string>();
    const char* color = label == "M" ? "#c0392b" : label == "V" ? "#2471a3" : "#7f8c8d";
    std::string a = px(ci.at("from")), b = px(ci.at("to"));
    auto comma_a = a.find(','), comma_b = b.find(',');
    os << "<line data-crease=\"" << ci.at("crease").get<std::size_t>() << "\" data-label=\"" << label << "\" stroke=\""
       << color << "\"" << (label == "V" ? " stroke-dasharray=\"6,3\"" : "") << " x1=\"" << a.substr(0, comma_a)
       << "\" y1=\"" << a.substr(comma_a + 1) << "\" x2=\"" << b.substr(0, comma_b) << "\" y2=\"" << b.substr(comma_b + 1)
       << "\"/>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << detail::fixed(margin) << "\" y=\"" << detail::fixed(height - 8)
     << "\" font-family=\"sans-serif\" font-size=\"12\">max ply " << max_ply << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace foldcheck

#endif  // FOLDCHECK_SVG_HPP

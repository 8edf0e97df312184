#include "erodewave/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace erodewave {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string profile_csv(const QProfile& p) {
  std::string out = "q,zeta\n";
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    out += format_number(p.q[i]) + "," + format_number(p.zeta[i]) + "\n";
  }
  return out;
}

std::string series_csv(const std::vector<SeriesPoint>& series) {
  std::string out = "t,l1_distance,shock_front,speed_estimate\n";
  for (const SeriesPoint& s : series) {
    out += format_number(s.t) + "," + format_number(s.l1_distance) + "," + format_number(s.shock_front) + "," +
           format_number(s.speed_estimate) + "\n";
  }
  return out;
}

std::string physical_csv(const HeightCurve& curve) {
  std::string out = "x,u,w,jump_flag\n";
  for (const HeightVertex& v : curve.vertices) {
    out += format_number(v.x) + "," + format_number(v.u) + "," + format_number(v.w) + "," + (v.jump ? "1" : "0") +
           "\n";
  }
  return out;
}

json profile_json(const QProfile& p) {
  json q = json::array(), z = json::array();
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    q.push_back(number_json(p.q[i]));
    z.push_back(number_json(p.zeta[i]));
  }
  return {{"total_drop", p.total_drop}, {"q", q}, {"zeta", z}};
}

json series_json(const std::vector<SeriesPoint>& series) {
  json arr = json::array();
  for (const SeriesPoint& s : series) {
    arr.push_back({{"t", s.t},
                   {"l1_distance", number_json(s.l1_distance)},
                   {"shock_front", number_json(s.shock_front)},
                   {"speed_estimate", number_json(s.speed_estimate)},
                   {"level_position", number_json(s.level_position)},
                   {"total_variation", number_json(s.total_variation)}});
  }
  return arr;
}

json physical_json(const HeightCurve& curve) {
  json arr = json::array();
  for (const HeightVertex& v : curve.vertices) {
    arr.push_back({{"x", number_json(v.x)}, {"u", number_json(v.u)}, {"w", number_json(v.w)}, {"jump", v.jump}});
  }
  return {{"total_drop", curve.total_drop},
          {"right_offset", curve.right_offset},
          {"left_offset", curve.left_offset},
          {"vertices", arr}};
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace erodewave

#include "gravpano/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "gravpano/errors.hpp"

namespace gravpano {

namespace {

std::string_view strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(std::string_view s, std::size_t line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = s.find(',', pos);
    const std::string field(strip(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (field.empty()) throw ParseError("empty field", line);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) throw ParseError("not a number: '" + field + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite value", line);
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::vector<Correspondence> CorrespondenceFile::correspondences() const {
  const GravityPrior g1 = gravity_alignment(gravity1);
  const GravityPrior g2 = gravity_alignment(gravity2);
  std::vector<Correspondence> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({{r[0], r[1], norm_scale}, {r[2], r[3], norm_scale}, g1, g2});
  }
  return out;
}

CorrespondenceFile read_correspondence_file(std::istream& is) {
  CorrespondenceFile f;
  bool have_gravity = false, have_scale = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string_view s = strip(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string_view body = strip(s.substr(1));
      const auto colon = body.find(':');
      const std::string_view key = colon == body.npos ? std::string_view{} : strip(body.substr(0, colon));
      if (key == "gravity") {
        const auto v = parse_numbers(body.substr(colon + 1), line);
        if (v.size() != 6) throw ParseError("gravity header needs 6 values", line);
        f.gravity1 = {v[0], v[1], v[2]};
        f.gravity2 = {v[3], v[4], v[5]};
        if (f.gravity1.norm() == 0.0 || f.gravity2.norm() == 0.0) {
          throw ParseError("gravity vectors must be nonzero", line);
        }
        have_gravity = true;
      } else if (key == "norm_scale") {
        const auto v = parse_numbers(body.substr(colon + 1), line);
        if (v.size() != 1 || !(v[0] > 0.0)) throw ParseError("norm_scale must be one positive value", line);
        f.norm_scale = v[0];
        have_scale = true;
      } else {
        f.comments.emplace_back(body);
      }
      continue;
    }
    const auto v = parse_numbers(s, line);
    if (v.size() != 4) throw ParseError("expected 4 values u1,v1,u2,v2", line);
    f.rows.push_back({v[0], v[1], v[2], v[3]});
  }
  if (!have_gravity) throw ParseError("missing '# gravity:' header", line + 1);
  if (!have_scale) throw ParseError("missing '# norm_scale:' header", line + 1);
  if (f.rows.empty()) throw ParseError("no correspondence rows", line + 1);
  return f;
}

CorrespondenceFile read_correspondence_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  return read_correspondence_file(is);
}

void write_correspondence_file(std::ostream& os, const CorrespondenceFile& f) {
  os << "# gravity: " << format(f.gravity1.x()) << ',' << format(f.gravity1.y()) << ','
     << format(f.gravity1.z()) << ',' << format(f.gravity2.x()) << ',' << format(f.gravity2.y())
     << ',' << format(f.gravity2.z()) << '\n';
  os << "# norm_scale: " << format(f.norm_scale) << '\n';
  for (const auto& c : f.comments) os << "# " << c << '\n';
  for (const auto& r : f.rows) {
    os << format(r[0]) << ',' << format(r[1]) << ',' << format(r[2]) << ',' << format(r[3]) << '\n';
  }
}

}  // namespace gravpano

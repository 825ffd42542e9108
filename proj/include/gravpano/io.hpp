#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravpano/geometry.hpp"

namespace gravpano {

/// Correspondence file contents.
///
///   # gravity: g1x,g1y,g1z,g2x,g2y,g2z
///   # norm_scale: 1000
///   u1,v1,u2,v2
///   ...
///
/// Pixel coordinates are relative to the principal point. Other lines
/// starting with '#' are comments and are kept verbatim in `comments`.
struct CorrespondenceFile {
  Vec3 gravity1{0.0, -1.0, 0.0};
  Vec3 gravity2{0.0, -1.0, 0.0};
  double norm_scale = 1.0;
  std::vector<std::array<double, 4>> rows;
  std::vector<std::string> comments;

  /// Rows with the gravity priors and norm_scale attached.
  std::vector<Correspondence> correspondences() const;
};

/// Throws ParseError (with a 1-based line number) on malformed input, a
/// missing header, zero rows or a zero gravity vector.
CorrespondenceFile read_correspondence_file(std::istream& is);
CorrespondenceFile read_correspondence_file(const std::string& path);

void write_correspondence_file(std::ostream& os, const CorrespondenceFile& f);

}  // namespace gravpano

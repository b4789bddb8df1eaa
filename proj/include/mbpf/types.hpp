#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mbpf {

// Planar position in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct Channel {
  std::string id;
  double center_mhz = 0.0;
  double bandwidth_mhz = 0.0;

  friend bool operator==(const Channel&, const Channel&) = default;
};

struct AccessPoint {
  std::string id;
  Point position;
  int radio_count = 1;

  friend bool operator==(const AccessPoint&, const AccessPoint&) = default;
};

struct Client {
  std::string id;
  Point position;
  double weight = 1.0;

  friend bool operator==(const Client&, const Client&) = default;
};

// Raised for semantically invalid scenarios: bad parameters, duplicate ids,
// clients that cannot reach any AP.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { ServerCentric, ClientContention };

inline const char* to_string(Scheme s) noexcept {
  return s == Scheme::ServerCentric ? "server" : "client";
}

}  // namespace mbpf

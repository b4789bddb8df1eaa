#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mbpf/annealing.hpp"
#include "mbpf/model.hpp"
#include "mbpf/radio.hpp"
#include "mbpf/rng.hpp"

namespace mbpf {

struct InitialChannel {
  std::string vap_id;
  std::string channel_id;

  friend bool operator==(const InitialChannel&, const InitialChannel&) = default;
};

/// A complete experiment input. Clients are always materialized; generator
/// specs are expanded when the scenario is built or loaded.
struct Scenario {
  std::string name;
  RadioModel radio;
  std::vector<Channel> channels;
  std::vector<AccessPoint> aps;
  std::vector<Client> clients;
  std::vector<InitialChannel> initial_channels;  // optional pinned starting channels

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline Network to_network(const Scenario& s) { return Network(s.channels, s.aps, s.clients, s.radio); }

// Starting channel per virtual AP, or nullopt where the scenario leaves it random.
inline std::vector<std::optional<ChannelIndex>> pinned_channels(const Scenario& s, const Network& net) {
  std::vector<std::optional<ChannelIndex>> out(net.num_vaps());
  for (const auto& ic : s.initial_channels) {
    std::optional<ApIndex> n;
    std::optional<ChannelIndex> c;
    for (std::size_t k = 0; k < net.num_vaps(); ++k)
      if (net.vaps()[k].id == ic.vap_id) n = k;
    for (std::size_t k = 0; k < net.num_channels(); ++k)
      if (net.channels()[k].id == ic.channel_id) c = k;
    if (!n) throw ScenarioError("initial channel for unknown access point '" + ic.vap_id + "'");
    if (!c) throw ScenarioError("initial channel references unknown channel '" + ic.channel_id + "'");
    out[*n] = c;
  }
  return out;
}

// Uniform client placement over a rectangle, bounds inclusive.
struct RegionSpec {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  int count = 0;
  double weight = 1.0;
};

// Regions are drawn in order, each client x then y, so a seed gives the same
// positions on every platform. Ids continue from `first_index`.
inline std::vector<Client> generate_clients(std::span<const RegionSpec> regions, std::uint64_t seed,
                                            std::size_t first_index = 1) {
  Rng rng(seed);
  std::vector<Client> out;
  std::size_t k = first_index;
  for (const auto& r : regions) {
    if (r.count < 0) throw ScenarioError("region client count must be non-negative");
    if (!(r.x1 >= r.x0) || !(r.y1 >= r.y0)) throw ScenarioError("region bounds must satisfy x0 <= x1 and y0 <= y1");
    for (int c = 0; c < r.count; ++c) {
      char id[32];
      std::snprintf(id, sizeof id, "c%02zu", k++);
      const double x = rng.uniform_closed(r.x0, r.x1);
      const double y = rng.uniform_closed(r.y0, r.y1);
      out.push_back({id, {x, y}, r.weight});
    }
  }
  return out;
}

namespace builtin {

inline Channel ieee80211b() { return {"11b", 2400.0, 22.0}; }
inline Channel band16ghz() { return {"16g", 16000.0, 50.0}; }

// White spaces available in New York City, channels A-G.
inline std::vector<Channel> nyc_white_spaces() {
  return {{"A", 524.0, 12.0}, {"B", 593.0, 6.0}, {"C", 608.0, 12.0}, {"D", 641.0, 6.0},
          {"E", 659.0, 6.0},  {"F", 671.0, 6.0}, {"G", 683.0, 6.0}};
}

enum class Line3Variant { OneChannel, TwoChannel };

// Three single-radio APs 75 m apart; client k (k = 1..16) sits at
// (35 + 5k, 0), so clients span x = 40..115 and cluster around the middle AP.
inline Scenario line3(Line3Variant variant) {
  Scenario s;
  s.name = variant == Line3Variant::OneChannel ? "line3-1ch" : "line3-2ch";
  s.channels.push_back(ieee80211b());
  if (variant == Line3Variant::TwoChannel) s.channels.push_back(band16ghz());
  s.aps = {{"ap0", {0.0, 0.0}, 1}, {"ap1", {75.0, 0.0}, 1}, {"ap2", {150.0, 0.0}, 1}};
  for (int k = 1; k <= 16; ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "c%02d", k);
    s.clients.push_back({id, {35.0 + 5.0 * k, 0.0}, 1.0});
  }
  return s;
}

enum class Weighting { Unweighted, Weighted };

inline std::vector<RegionSpec> grid16_regions(Weighting weighting) {
  // Weighted: clients with x in [0, 300] get 1.5, the rest 0.5.
  const double west = weighting == Weighting::Weighted ? 1.5 : 1.0;
  const double east = weighting == Weighting::Weighted ? 0.5 : 1.0;
  return {{0, 300, 0, 300, 16, west}, {600, 900, 600, 900, 16, east},
          {0, 300, 600, 900, 9, west}, {600, 900, 0, 300, 9, east}};
}

// 4x4 grid of dual-radio APs 300 m apart on the NYC white-space channels,
// 50 clients drawn from `seed`.
inline Scenario grid16(Weighting weighting, std::uint64_t seed) {
  Scenario s;
  s.name = weighting == Weighting::Weighted ? "grid16-weighted" : "grid16-unweighted";
  s.channels = nyc_white_spaces();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      s.aps.push_back({"ap" + std::to_string(i) + std::to_string(j), {300.0 * i, 300.0 * j}, 2});
  const auto regions = grid16_regions(weighting);
  s.clients = generate_clients(regions, seed);
  return s;
}

// Two APs 150 m apart, three clients, 802.11b plus the 16 GHz band; small
// enough for exhaustive enumeration.
inline Scenario micro() {
  Scenario s;
  s.name = "micro";
  s.channels = {ieee80211b(), band16ghz()};
  s.aps = {{"ap0", {0.0, 0.0}, 1}, {"ap1", {150.0, 0.0}, 1}};
  s.clients = {{"c1", {20.0, 0.0}, 1.0}, {"c2", {80.0, 0.0}, 1.0}, {"c3", {90.0, 0.0}, 1.0}};
  return s;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"line3-1ch", "line3-2ch", "grid16-unweighted", "grid16-weighted", "micro"};
  return n;
}

// Built-in by name. Grid scenarios draw their clients from `seed`; the others ignore it.
inline std::optional<Scenario> by_name(std::string_view name, std::uint64_t seed) {
  if (name == "line3-1ch") return line3(Line3Variant::OneChannel);
  if (name == "line3-2ch") return line3(Line3Variant::TwoChannel);
  if (name == "grid16-unweighted") return grid16(Weighting::Unweighted, seed);
  if (name == "grid16-weighted") return grid16(Weighting::Weighted, seed);
  if (name == "micro") return micro();
  return std::nullopt;
}

}  // namespace builtin

// ---------------------------------------------------------------------------
// Scenario files
//
//   mbpf-scenario 1
//   name <text>
//   [radio]      path_loss_alpha | base_frequency_mhz | base_bandwidth_mhz |
//                carrier_sense_factor | round_interference_range <value>;
//                tier <rate_mbps> <range_m>
//   [channels]   <id> <center_mhz> <bandwidth_mhz>
//   [aps]        <id> <x> <y> <radios>
//   [clients]    <id> <x> <y> <weight>
//   [generate]   seed <n>;  rect <x0> <x1> <y0> <y1> <count> <weight>
//   [initial]    <virtual-ap-id> <channel-id>
//
// '#' starts a comment. Tier lines replace the default tier table.

inline constexpr std::string_view kScenarioMagic = "mbpf-scenario";
inline constexpr int kScenarioVersion = 1;

class ParseError : public ScenarioError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& field, const std::string& msg)
      : ScenarioError(source + ":" + std::to_string(line) + ": " + field + ": " + msg), line_(line), field_(field) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string scenario_to_text(const Scenario& s) {
  using detail::format_double;
  std::ostringstream os;
  os << kScenarioMagic << ' ' << kScenarioVersion << '\n';
  if (!s.name.empty()) os << "name " << s.name << '\n';
  os << "\n[radio]\n"
     << "path_loss_alpha " << format_double(s.radio.path_loss_alpha) << '\n'
     << "base_frequency_mhz " << format_double(s.radio.base_frequency_mhz) << '\n'
     << "base_bandwidth_mhz " << format_double(s.radio.base_bandwidth_mhz) << '\n'
     << "carrier_sense_factor " << format_double(s.radio.carrier_sense_factor) << '\n'
     << "round_interference_range " << (s.radio.round_interference_range ? 1 : 0) << '\n';
  for (const auto& t : s.radio.base_tiers)
    os << "tier " << format_double(t.rate_mbps) << ' ' << format_double(t.range_m) << '\n';
  os << "\n[channels]\n# id center_mhz bandwidth_mhz\n";
  for (const auto& c : s.channels)
    os << c.id << ' ' << format_double(c.center_mhz) << ' ' << format_double(c.bandwidth_mhz) << '\n';
  os << "\n[aps]\n# id x y radios\n";
  for (const auto& a : s.aps)
    os << a.id << ' ' << format_double(a.position.x) << ' ' << format_double(a.position.y) << ' ' << a.radio_count
       << '\n';
  os << "\n[clients]\n# id x y weight\n";
  for (const auto& c : s.clients)
    os << c.id << ' ' << format_double(c.position.x) << ' ' << format_double(c.position.y) << ' '
       << format_double(c.weight) << '\n';
  if (!s.initial_channels.empty()) {
    os << "\n[initial]\n";
    for (const auto& ic : s.initial_channels) os << ic.vap_id << ' ' << ic.channel_id << '\n';
  }
  return os.str();
}

inline std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : scenario_to_text(s)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Parses a scenario. Syntax errors carry the line and field; semantic
/// errors (duplicate ids, non-positive weights, dangling references) are
/// rejected as well.
inline Scenario parse_scenario(std::istream& in, const std::string& source = "<input>") {
  Scenario s;
  bool custom_tiers = false;
  std::vector<RegionSpec> regions;
  std::optional<std::uint64_t> gen_seed;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  bool saw_header = false;

  auto fail = [&](const std::string& field, const std::string& msg) -> void {
    throw ParseError(source, lineno, field, msg);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    auto num = [&](std::size_t k, const std::string& field) {
      if (k >= tok.size()) fail(field, "missing value");
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tok[k].size() || !std::isfinite(v)) fail(field, "expected a number, got '" + tok[k] + "'");
      return v;
    };
    auto integer = [&](std::size_t k, const std::string& field) {
      const double v = num(k, field);
      if (v != std::floor(v) || std::fabs(v) > 1e15) fail(field, "expected an integer, got '" + tok[k] + "'");
      return static_cast<long long>(v);
    };
    auto arity = [&](std::size_t n, const std::string& what) {
      if (tok.size() != n) fail(what, "expected " + std::to_string(n) + " fields, got " + std::to_string(tok.size()));
    };

    if (!saw_header) {
      if (tok[0] != kScenarioMagic) fail("header", "file must start with '" + std::string(kScenarioMagic) + " <version>'");
      if (tok.size() != 2 || integer(1, "version") != kScenarioVersion)
        fail("version", "unsupported scenario version");
      saw_header = true;
      continue;
    }
    if (tok[0].front() == '[') {
      if (tok.size() != 1 || tok[0].back() != ']') fail("section", "malformed section header");
      section = tok[0].substr(1, tok[0].size() - 2);
      if (section != "radio" && section != "channels" && section != "aps" && section != "clients" &&
          section != "generate" && section != "initial")
        fail("section", "unknown section '" + section + "'");
      continue;
    }
    if (section.empty()) {
      if (tok[0] == "name") {
        s.name = raw.substr(raw.find("name") + 4);
        s.name.erase(0, s.name.find_first_not_of(" \t"));
        s.name.erase(s.name.find_last_not_of(" \t\r") + 1);
        continue;
      }
      fail(tok[0], "unexpected entry outside a section");
    }
    if (section == "radio") {
      if (tok[0] == "tier") {
        arity(3, "tier");
        if (!custom_tiers) s.radio.base_tiers.clear();
        custom_tiers = true;
        s.radio.base_tiers.push_back({num(1, "tier.rate_mbps"), num(2, "tier.range_m")});
        continue;
      }
      arity(2, tok[0]);
      const double v = num(1, tok[0]);
      if (tok[0] == "path_loss_alpha")
        s.radio.path_loss_alpha = v;
      else if (tok[0] == "base_frequency_mhz")
        s.radio.base_frequency_mhz = v;
      else if (tok[0] == "base_bandwidth_mhz")
        s.radio.base_bandwidth_mhz = v;
      else if (tok[0] == "carrier_sense_factor")
        s.radio.carrier_sense_factor = v;
      else if (tok[0] == "round_interference_range") {
        if (v != 0.0 && v != 1.0) fail(tok[0], "must be 0 or 1");
        s.radio.round_interference_range = v == 1.0;
      }
      else
        fail(tok[0], "unknown radio parameter");
    } else if (section == "channels") {
      arity(3, "channel");
      Channel c{tok[0], num(1, "center_mhz"), num(2, "bandwidth_mhz")};
      if (!(c.center_mhz > 0.0)) fail("center_mhz", "must be positive");
      if (!(c.bandwidth_mhz > 0.0)) fail("bandwidth_mhz", "must be positive");
      s.channels.push_back(std::move(c));
    } else if (section == "aps") {
      arity(4, "ap");
      const long long radios = integer(3, "radios");
      if (radios < 1) fail("radios", "must be at least 1");
      s.aps.push_back({tok[0], {num(1, "x"), num(2, "y")}, static_cast<int>(radios)});
    } else if (section == "clients") {
      arity(4, "client");
      const double w = num(3, "weight");
      if (!(w > 0.0)) fail("weight", "must be positive, got " + tok[3]);
      s.clients.push_back({tok[0], {num(1, "x"), num(2, "y")}, w});
    } else if (section == "generate") {
      if (tok[0] == "seed") {
        arity(2, "seed");
        const long long v = integer(1, "seed");
        if (v < 0) fail("seed", "must be non-negative");
        gen_seed = static_cast<std::uint64_t>(v);
      } else if (tok[0] == "rect") {
        arity(7, "rect");
        RegionSpec r{num(1, "x0"), num(2, "x1"), num(3, "y0"), num(4, "y1"), 0, num(6, "weight")};
        const long long count = integer(5, "count");
        if (count < 0) fail("count", "must be non-negative");
        r.count = static_cast<int>(count);
        if (!(r.weight > 0.0)) fail("weight", "must be positive, got " + tok[6]);
        if (!(r.x1 >= r.x0) || !(r.y1 >= r.y0)) fail("rect", "bounds must satisfy x0 <= x1 and y0 <= y1");
        regions.push_back(r);
      } else {
        fail(tok[0], "unknown generator entry");
      }
    } else if (section == "initial") {
      arity(2, "initial");
      s.initial_channels.push_back({tok[0], tok[1]});
    }
  }
  if (!saw_header) throw ParseError(source, lineno, "header", "empty scenario file");
  if (!regions.empty()) {
    if (!gen_seed) throw ParseError(source, lineno, "seed", "[generate] needs a seed");
    auto extra = generate_clients(regions, *gen_seed, s.clients.size() + 1);
    s.clients.insert(s.clients.end(), extra.begin(), extra.end());
  }
  try {
    const Network net = to_network(s);
    (void)pinned_channels(s, net);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  return parse_scenario(in, source);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

inline void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
  out << scenario_to_text(s);
}

}  // namespace mbpf

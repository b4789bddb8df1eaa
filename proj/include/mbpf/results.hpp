#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mbpf/annealing.hpp"
#include "mbpf/model.hpp"

namespace mbpf {

inline constexpr std::string_view kTrajectoryCsvHeader = "run_id,policy,scheme,t,T,U,weighted_throughput";

inline std::string format_metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// One row per recorded iteration. Infeasible energies print as -inf.
inline void write_trajectory_csv(std::ostream& os, std::string_view run_id, const RunResult& res) {
  for (const auto& pt : res.trajectory)
    os << run_id << ',' << res.policy << ',' << to_string(res.scheme) << ',' << pt.t << ','
       << format_metric(pt.temperature) << ',' << (pt.energy ? format_metric(pt.energy.value()) : "-inf") << ','
       << format_metric(pt.weighted_throughput) << '\n';
}

inline nlohmann::ordered_json energy_json(const Energy& e) {
  return e ? nlohmann::ordered_json(e.value()) : nlohmann::ordered_json(nullptr);
}

// Final configuration and allocation of a run, keyed by scenario ids.
inline nlohmann::ordered_json result_json(const Network& net, const RunResult& res) {
  nlohmann::ordered_json j;
  j["policy"] = res.policy;
  j["scheme"] = to_string(res.scheme);
  j["seed"] = res.seed;
  j["iterations"] = res.iterations_run;
  j["converged"] = res.converged;
  j["energy"] = energy_json(res.energy);
  j["weighted_throughput"] = res.report.weighted_throughput;
  auto& channels = j["channels"] = nlohmann::ordered_json::object();
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    channels[net.vaps()[n].id] = net.channels()[res.final_config.channel[n]].id;
  if (res.scheme == Scheme::ServerCentric) {
    auto& access = j["access"] = nlohmann::ordered_json::object();
    for (std::size_t n = 0; n < net.num_vaps(); ++n) access[net.vaps()[n].id] = res.allocation.access[n];
  }
  auto& clients = j["clients"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    nlohmann::ordered_json c;
    c["id"] = net.clients()[i].id;
    c["weight"] = net.weight(i);
    c["ap"] = net.vaps()[res.final_config.association[i]].id;
    c["rate"] = res.report.rates[i];
    c["phi"] = res.allocation.schedule[i];
    if (res.scheme == Scheme::ClientContention) c["p"] = res.allocation.access[i];
    clients.push_back(std::move(c));
  }
  return j;
}

inline void save_result(const std::string& path, const Network& net, const RunResult& res) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write result file '" + path + "'");
  out << result_json(net, res).dump(2) << '\n';
}

}  // namespace mbpf

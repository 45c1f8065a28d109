#include "ptc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ptc {

using nlohmann::json;

namespace {

json pair_of(cplx z) { return json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())}); }

cplx cplx_of(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0};
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

json report_json(const BoundReport& r) {
  return {{"kind", to_string(r.kind)},
          {"x", static_cast<double>(r.x)},
          {"R", static_cast<double>(r.R)},
          {"value", static_cast<double>(r.value)},
          {"full_value", static_cast<double>(r.full_value)},
          {"valid", r.valid},
          {"capacity", static_cast<double>(r.capacity)},
          {"residual_norm", static_cast<double>(r.residual_norm)},
          {"inradius_margin", static_cast<double>(r.inradius_margin)},
          {"area_deviation", static_cast<double>(r.area_deviation)},
          {"fourier_difference", static_cast<double>(r.fourier_difference)},
          {"coefficient_count", r.coefficient_count},
          {"delta_count", r.delta_count},
          {"detail", r.detail},
          {"version", format_version}};
}

}  // namespace

std::string solution_to_json(const PTSolution& s, real tol) {
  json j;
  j["config"] = to_string(s.problem.config);
  j["topology"] = s.problem.topology;
  j["anchors"] = json::array();
  for (cplx a : s.problem.anchors) j["anchors"].push_back(pair_of(a));
  j["b_points"] = json::array();
  for (cplx b : s.map.b_points) j["b_points"].push_back(pair_of(b));
  j["lead"] = pair_of(s.map.lead);
  j["angles"] = json::object();
  for (const auto& [name, a] : s.map.angles) j["angles"][name] = static_cast<double>(a);
  j["unknowns"] = json::array();
  for (Eigen::Index i = 0; i < s.unknowns.size(); ++i) j["unknowns"].push_back(static_cast<double>(s.unknowns[i]));
  j["residual_norm"] = static_cast<double>(s.residual_norm);
  j["converged"] = s.converged;
  j["tolerances"] = {{"residual", static_cast<double>(tol)}, {"verified_residual", static_cast<double>(s.verified_residual)}};
  j["version"] = format_version;
  return j.dump(2) + "\n";
}

PTSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solution JSON: ") + e.what());
  }
  try {
    std::vector<cplx> anchors;
    for (const auto& a : j.at("anchors")) anchors.push_back(cplx_of(a));
    PTSolution s;
    s.problem = PTProblem::make(config_from_string(j.at("config").get<std::string>()), anchors,
                                j.value("topology", 1));
    const auto& u = j.at("unknowns");
    s.unknowns.resize(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) s.unknowns[static_cast<Eigen::Index>(i)] = u[i].get<double>();
    if (static_cast<std::size_t>(s.unknowns.size()) != unknown_count(s.problem.config, s.problem.topology))
      throw std::invalid_argument("solution JSON: wrong number of unknowns");
    s.map = decode(s.problem, s.unknowns);
    s.residual_norm = j.at("residual_norm").get<double>();
    s.converged = j.value("converged", true);
    if (j.contains("tolerances")) s.verified_residual = j["tolerances"].value("verified_residual", 0.0);
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solution JSON: ") + e.what());
  }
}

std::string bound_report_to_json(const BoundReport& r) { return report_json(r).dump(2) + "\n"; }

std::string scan_result_to_json(const ScanResult& r) {
  json j;
  j["best"] = report_json(r.best);
  j["grid"] = json::array();
  for (const auto& g : r.grid) j["grid"].push_back(report_json(g));
  j["refinement"] = json::array();
  for (const auto& g : r.refinement) j["refinement"].push_back(report_json(g));
  j["version"] = format_version;
  return j.dump(2) + "\n";
}

NestedPartition partition_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    NestedPartition p;
    for (const auto& pr : j.at("pairs")) {
      if (pr.size() != 2) throw std::invalid_argument("partition JSON: each pair needs two arcs");
      IntervalPair ip;
      ip.first = {pr[0].at(0).get<double>(), pr[0].at(1).get<double>()};
      ip.second = {pr[1].at(0).get<double>(), pr[1].at(1).get<double>()};
      p.pairs.push_back(ip);
    }
    p.marked_pair = j.value("marked_pair", std::size_t{0});
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("partition JSON: ") + e.what());
  }
}

std::string partition_to_json(const NestedPartition& p) {
  json j;
  j["pairs"] = json::array();
  for (const auto& ip : p.pairs)
    j["pairs"].push_back({{static_cast<double>(ip.first.start), static_cast<double>(ip.first.length)},
                          {static_cast<double>(ip.second.start), static_cast<double>(ip.second.length)}});
  j["marked_pair"] = p.marked_pair;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace ptc

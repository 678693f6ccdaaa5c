#include "ocbf/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace ocbf::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void indexed(std::vector<std::string>& cols, const std::string& prefix, Eigen::Index count) {
  for (Eigen::Index i = 1; i <= count; ++i) cols.push_back(prefix + "_" + std::to_string(i));
}

void put(std::ostream& os, const Eigen::VectorXd& v) {
  for (double x : v) os << ',' << fmt(x);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::vector<std::string> trajectory_columns(const ModelDims& dims) {
  std::vector<std::string> cols{"t"};
  indexed(cols, "x", dims.n);
  indexed(cols, "xhat", dims.n);
  indexed(cols, "y", dims.ny);
  indexed(cols, "u", dims.m);
  for (const char* c : {"h_x", "h_xhat", "bound_level", "slack", "qp_status"}) cols.emplace_back(c);
  return cols;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  const auto cols = trajectory_columns(trajectory.dims);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : trajectory.records) {
    os << fmt(r.t);
    put(os, r.x);
    put(os, r.xhat);
    put(os, r.y);
    put(os, r.u);
    os << ',' << fmt(r.h_x) << ',' << fmt(r.h_xhat) << ',' << fmt(r.bound_level) << ','
       << fmt(r.slack) << ',' << to_string(r.qp_status) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_trajectory_csv(os, trajectory);
}

void write_summary(std::ostream& os, const Scenario& scenario, const Trajectory& trajectory) {
  os << "scenario: " << scenario.name << '\n'
     << "controller: " << to_string(scenario.controller.kind) << '\n'
     << "seed: " << scenario.seed << '\n'
     << "status: " << to_string(trajectory.status) << '\n';
  if (!trajectory.message.empty()) os << "message: " << trajectory.message << '\n';
  os << "steps: " << trajectory.records.size() << '\n'
     << "min_h: " << fmt(trajectory.min_h()) << '\n'
     << "min_safety: " << fmt(trajectory.min_safety()) << '\n'
     << "containment_rate: " << fmt(trajectory.containment_rate()) << '\n'
     << "containment_violations: " << trajectory.containment_violations() << '\n'
     << "wall_time_s: " << fmt(trajectory.wall_time_s) << '\n';
}

void write_batch_csv(std::ostream& os, const std::vector<BatchRow>& rows) {
  os << "scenario,seed,status,failed,min_h,min_safety,containment_rate,max_lipschitz_ratio,"
        "runtime_s,message\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.seed << ',' << to_string(r.status) << ',' << (r.failed ? 1 : 0)
       << ',' << fmt(r.min_h) << ',' << fmt(r.min_safety) << ',' << fmt(r.containment_rate) << ','
       << fmt(r.max_lipschitz_ratio) << ',' << fmt(r.runtime_s) << ',' << quoted(r.message) << '\n';
  }
}

}  // namespace ocbf::io

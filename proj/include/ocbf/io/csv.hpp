#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ocbf/sim.hpp"

namespace ocbf::io {

/// t, x_1..x_n, xhat_1..xhat_n, y_1..y_ny, u_1..u_m, h_x, h_xhat, bound_level, slack, qp_status
std::vector<std::string> trajectory_columns(const ModelDims& dims);

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// key: value lines (min_h, containment_rate, wall_time_s, ...).
void write_summary(std::ostream& os, const Scenario& scenario, const Trajectory& trajectory);

void write_batch_csv(std::ostream& os, const std::vector<BatchRow>& rows);

}  // namespace ocbf::io

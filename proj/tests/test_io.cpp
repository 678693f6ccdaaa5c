#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ocbf/io/builtin.hpp"
#include "ocbf/io/csv.hpp"
#include "ocbf/io/scenario_file.hpp"
#include "ocbf/sim.hpp"

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::string drop_line(const std::string& text, const std::string& prefix) {
  std::stringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) out += line + '\n';
  }
  return out;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw std::runtime_error("pattern not found: " + from);
  return text.replace(pos, from.size(), to);
}

ocbf::Scenario di() { return *ocbf::io::find_builtin("di_approach2"); }

}  // namespace

TEST(Csv, ColumnLayout) {
  const ocbf::ModelDims di_dims{2, 1, 1, 1, 1};
  const auto cols = ocbf::io::trajectory_columns(di_dims);
  const std::vector<std::string> expected{"t",      "x_1",    "x_2",         "xhat_1",
                                          "xhat_2", "y_1",    "u_1",         "h_x",
                                          "h_xhat", "bound_level", "slack", "qp_status"};
  EXPECT_EQ(cols, expected);
  const ocbf::ModelDims quad{6, 2, 3, 2, 3};
  EXPECT_EQ(ocbf::io::trajectory_columns(quad).size(), 1u + 2 * 6 + 3 + 2 + 5);
}

TEST(Csv, TrajectoryRoundTrip) {
  auto s = di();
  s.horizon = 0.05;
  const auto traj = ocbf::simulate(s);
  std::stringstream ss;
  ocbf::io::write_trajectory_csv(ss, traj);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "t,x_1,x_2,xhat_1,xhat_2,y_1,u_1,h_x,h_xhat,bound_level,slack,qp_status");
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    const auto f = split(line);
    ASSERT_EQ(f.size(), 12u);
    const auto& r = traj.records[rows];
    EXPECT_EQ(std::stod(f[0]), r.t);
    EXPECT_EQ(std::stod(f[1]), r.x(0));
    EXPECT_EQ(std::stod(f[6]), r.u(0));
    EXPECT_EQ(std::stod(f[7]), r.h_x);
    EXPECT_EQ(f[11], "optimal");
    ++rows;
  }
  EXPECT_EQ(rows, traj.records.size());
}

TEST(Csv, SummaryAndBatch) {
  auto s = di();
  s.horizon = 0.05;
  const auto traj = ocbf::simulate(s);
  std::stringstream sum;
  ocbf::io::write_summary(sum, s, traj);
  for (const char* key : {"scenario: di_approach2", "status: completed", "min_h: ",
                          "containment_rate: 1", "wall_time_s: "}) {
    EXPECT_NE(sum.str().find(key), std::string::npos) << key;
  }

  ocbf::BatchRow row;
  row.scenario = "x";
  row.message = "bad \"thing\", here";
  std::stringstream batch;
  ocbf::io::write_batch_csv(batch, {row});
  std::string header, line;
  std::getline(batch, header);
  std::getline(batch, line);
  EXPECT_EQ(header.rfind("scenario,seed,status,failed,min_h", 0), 0u);
  EXPECT_NE(line.find("\"bad \"\"thing\"\", here\""), std::string::npos);
}

TEST(ScenarioFile, BuiltinsRoundTrip) {
  const auto& all = ocbf::io::builtin_scenarios();
  std::set<std::string> names;
  for (const auto& s : all) {
    names.insert(s.name);
    const std::string text = ocbf::io::serialize_scenario(s);
    const auto back = ocbf::io::parse_scenario(text);
    EXPECT_TRUE(back == s) << s.name;
    EXPECT_EQ(ocbf::io::serialize_scenario(back), text);
  }
  EXPECT_GE(names.size(), 5u);
  EXPECT_EQ(names.size(), all.size());
  EXPECT_FALSE(ocbf::io::find_builtin("no_such_scenario").has_value());
}

TEST(ScenarioFile, SaveAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "ocbf_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.yaml";
  ocbf::io::save_scenario(di(), path);
  EXPECT_TRUE(ocbf::io::load_scenario(path) == di());
  std::ofstream(dir / "bad.yaml") << "schema_version: 1\nname: [unterminated\n";
  try {
    (void)ocbf::io::load_scenario(dir / "bad.yaml");
    FAIL();
  } catch (const ocbf::io::ScenarioFileError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.yaml"), std::string::npos);
    EXPECT_GT(e.line(), 0);
  }
  EXPECT_THROW((void)ocbf::io::load_scenario(dir / "missing.yaml"), ocbf::io::ScenarioFileError);
  std::filesystem::remove_all(dir);
}

TEST(ScenarioFile, MissingKeyIsNamed) {
  const std::string text = drop_line(ocbf::io::serialize_scenario(di()), "dt:");
  try {
    (void)ocbf::io::parse_scenario(text);
    FAIL();
  } catch (const ocbf::io::ScenarioFileError& e) {
    EXPECT_NE(e.detail().find("'dt'"), std::string::npos) << e.what();
    EXPECT_GT(e.line(), 0);
  }
}

TEST(ScenarioFile, UnknownKeyIsRejectedWithItsLine) {
  const std::string text =
      replace(ocbf::io::serialize_scenario(di()), "  theta:", "  thetta:");
  try {
    (void)ocbf::io::parse_scenario(text);
    FAIL();
  } catch (const ocbf::io::ScenarioFileError& e) {
    EXPECT_NE(e.detail().find("observer.thetta"), std::string::npos) << e.what();
    std::stringstream in(text);
    std::string line;
    for (int k = 0; k < e.line(); ++k) std::getline(in, line);
    EXPECT_EQ(line.rfind("  thetta:", 0), 0u);
  }
}

TEST(ScenarioFile, ValidationErrors) {
  const std::string base = ocbf::io::serialize_scenario(di());
  const std::vector<std::pair<std::string, std::string>> edits{
      {"schema_version: 1", "schema_version: 2"},
      {"dt: 0.001", "dt: 0"},
      {"horizon: 10", "horizon: 0.0001"},
      {"x_ref: [3, 0]", "x_ref: [3]"},
      {"kind: approach2", "kind: mpc"},
      {"alpha: {kind: linear, gain: 1}", "alpha: {kind: quintic, gain: 1}"},
      {"x0: [0.3, 0.4]", "x0: [0.3, fast]"},
  };
  for (const auto& [from, to] : edits) {
    EXPECT_THROW((void)ocbf::io::parse_scenario(replace(base, from, to)),
                 ocbf::io::ScenarioFileError)
        << to;
  }
  EXPECT_THROW((void)ocbf::io::parse_scenario("- just\n- a list\n"), ocbf::io::ScenarioFileError);
}

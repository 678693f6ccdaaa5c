#include "ocbf/io/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ocbf::io {

namespace {

std::string located(int line, const std::string& message, const std::string& source) {
  std::string where = source;
  if (line > 0) where += (where.empty() ? "line " : ":") + std::to_string(line);
  return where.empty() ? message : where + ": " + message;
}

}  // namespace

ScenarioFileError::ScenarioFileError(int line, const std::string& message, const std::string& source)
    : std::runtime_error(located(line, message, source)), line_(line), detail_(message) {}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

// A YAML mapping whose keys must all be consumed.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, "'" + label() + "' must be a mapping");
  }

  [[nodiscard]] bool has(const std::string& key) const { return bool(node_[key]); }

  YAML::Node get(const std::string& key) {
    const YAML::Node child = node_[key];
    if (!child) {
      fail(node_, "missing required key '" + qualified(key) + "'");
    }
    used_.insert(key);
    return child;
  }

  template <typename T>
  T require(const std::string& key) {
    return convert<T>(get(key), key);
  }

  template <typename T>
  void optional(const std::string& key, T& out) {
    if (has(key)) out = require<T>(key);
  }

  Section child(const std::string& key) { return {get(key), qualified(key)}; }

  Eigen::VectorXd vector(const std::string& key) {
    const YAML::Node n = get(key);
    if (!n.IsSequence()) fail(n, "'" + qualified(key) + "' must be a sequence of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = convert<double>(n[i], key);
    return v;
  }

  Eigen::VectorXd vector(const std::string& key, Eigen::Index size) {
    Eigen::VectorXd v = vector(key);
    if (v.size() != size) {
      fail(node_[key], "'" + qualified(key) + "' must have " + std::to_string(size) + " entries, got " +
                           std::to_string(v.size()));
    }
    return v;
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.contains(key)) fail(kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

  [[noreturn]] static void fail(const YAML::Node& at, const std::string& message) {
    throw ScenarioFileError(line_of(at), message);
  }

  [[nodiscard]] const YAML::Node& node() const { return node_; }
  [[nodiscard]] std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  [[nodiscard]] std::string label() const { return path_.empty() ? "document" : path_; }

  template <typename T>
  T convert(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, "'" + qualified(key) + "' must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      std::string kind = "a string";
      if constexpr (std::is_floating_point_v<T>) kind = "a number";
      else if constexpr (std::is_integral_v<T>) kind = "an integer";
      fail(n, "'" + qualified(key) + "' must be " + kind + ", got '" + n.Scalar() + "'");
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

ClassK::Kind class_k_kind(const YAML::Node& at, const std::string& s) {
  if (s == "linear") return ClassK::Kind::kLinear;
  if (s == "cubic") return ClassK::Kind::kCubic;
  Section::fail(at, "unknown class-K kind '" + s + "' (linear | cubic)");
}

Tuning::Kind tuning_kind(const YAML::Node& at, const std::string& s) {
  if (s == "one") return Tuning::Kind::kOne;
  if (s == "logistic") return Tuning::Kind::kLogistic;
  Section::fail(at, "unknown tuning kind '" + s + "' (one | logistic)");
}

Eigen::Index state_dim(const std::string& model_type) {
  return model_type == "planar_quadrotor" ? 6 : 2;
}

DisturbanceSpec parse_disturbance(Section s) {
  DisturbanceSpec d;
  const YAML::Node kind_node = s.get("kind");
  try {
    d.kind = disturbance_kind_from_string(kind_node.as<std::string>());
  } catch (const std::exception& e) {
    Section::fail(kind_node, e.what());
  }
  s.optional("magnitude", d.magnitude);
  if (s.has("direction")) d.direction = s.vector("direction");
  s.optional("frequency", d.frequency);
  s.optional("phase", d.phase);
  s.optional("dwell", d.dwell);
  s.optional("seed", d.seed);
  if (s.has("scale")) d.scale = s.vector("scale");
  if (d.magnitude < 0.0) Section::fail(s.node()["magnitude"], "magnitude must be non-negative");
  if (!(d.dwell > 0.0)) Section::fail(s.node()["dwell"], "dwell must be positive");
  s.finish();
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioFileError(e.mark.line + 1, e.msg);
  }
  if (!root || root.IsNull()) throw ScenarioFileError(1, "empty scenario document");

  Section doc(root, "");
  Scenario s;
  const YAML::Node version = doc.get("schema_version");
  s.schema_version = doc.require<int>("schema_version");
  if (s.schema_version != kScenarioSchemaVersion) {
    Section::fail(version, "unsupported schema_version " + std::to_string(s.schema_version) +
                               " (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }
  s.name = doc.require<std::string>("name");
  doc.optional("description", s.description);

  {
    Section m = doc.child("model");
    const YAML::Node type = m.get("type");
    s.model.type = m.require<std::string>("type");
    if (s.model.type != "double_integrator" && s.model.type != "planar_quadrotor") {
      Section::fail(type, "unknown model type '" + s.model.type + "'");
    }
    m.optional("d_bar", s.model.d_bar);
    m.optional("v_bar", s.model.v_bar);
    if (m.has("quad")) {
      Section q = m.child("quad");
      q.optional("mass", s.model.quad.mass);
      q.optional("inertia", s.model.quad.inertia);
      q.optional("gravity", s.model.quad.gravity);
      q.optional("d_bar", s.model.quad.d_bar);
      if (q.has("v_channel_bounds")) s.model.quad.v_channel_bounds = q.vector("v_channel_bounds", 3);
      q.finish();
    }
    m.finish();
  }
  const Eigen::Index n = state_dim(s.model.type);

  {
    Section b = doc.child("barrier");
    const YAML::Node type = b.get("type");
    s.barrier.type = b.require<std::string>("type");
    if (s.barrier.type != "di_halfspace" && s.barrier.type != "quad_obstacle") {
      Section::fail(type, "unknown barrier type '" + s.barrier.type + "'");
    }
    b.optional("alpha0", s.barrier.alpha0);
    b.optional("x_max", s.barrier.x_max);
    if (b.has("center")) s.barrier.center = b.vector("center", 2);
    b.optional("radius", s.barrier.radius);
    b.optional("sigma", s.barrier.sigma);
    if (b.has("alpha")) {
      Section a = b.child("alpha");
      const YAML::Node kind = a.get("kind");
      s.barrier.alpha.kind = class_k_kind(kind, a.require<std::string>("kind"));
      a.optional("gain", s.barrier.alpha.gain);
      a.finish();
    }
    if (b.has("kappa")) {
      const YAML::Node kind = b.get("kappa");
      s.barrier.kappa.kind = tuning_kind(kind, b.require<std::string>("kappa"));
    }
    b.finish();
  }

  {
    Section o = doc.child("observer");
    const YAML::Node type = o.get("type");
    s.observer.type = o.require<std::string>("type");
    if (s.observer.type != "luenberger" && s.observer.type != "dekf") {
      Section::fail(type, "unknown observer type '" + s.observer.type + "'");
    }
    o.optional("theta", s.observer.theta);
    o.optional("delta", s.observer.delta);
    if (o.has("Q_diag")) s.observer.Q_diag = o.vector("Q_diag");
    if (o.has("R_diag")) s.observer.R_diag = o.vector("R_diag");
    if (o.has("P0_diag")) s.observer.P0_diag = o.vector("P0_diag");
    o.optional("V0", s.observer.V0);
    o.optional("p_min", s.observer.p_min);
    o.optional("p_max", s.observer.p_max);
    o.finish();
  }

  {
    Section c = doc.child("controller");
    const YAML::Node kind = c.get("kind");
    try {
      s.controller.kind = controller_kind_from_string(c.require<std::string>("kind"));
    } catch (const ScenarioFileError&) {
      throw;
    } catch (const std::exception& e) {
      Section::fail(kind, e.what());
    }
    c.optional("baseline_d_bar", s.controller.baseline_d_bar);
    c.optional("qp_iteration_cap", s.controller.qp_iteration_cap);
    c.optional("initial_check_samples", s.controller.initial_check_samples);
    Section nom = c.child("nominal");
    s.controller.nominal.Q_diag = nom.vector("Q_diag");
    s.controller.nominal.R_diag = nom.vector("R_diag");
    s.controller.nominal.x_ref = nom.vector("x_ref", n);
    nom.finish();
    c.finish();
  }

  s.x0 = doc.vector("x0", n);
  s.xhat0 = doc.vector("xhat0", n);
  if (doc.has("d")) s.d = parse_disturbance(doc.child("d"));
  if (doc.has("v")) s.v = parse_disturbance(doc.child("v"));

  const YAML::Node horizon = doc.get("horizon");
  s.horizon = doc.require<double>("horizon");
  const YAML::Node dt = doc.get("dt");
  s.dt = doc.require<double>("dt");
  if (!(s.dt > 0.0)) Section::fail(dt, "dt must be positive");
  if (!(s.horizon >= s.dt)) Section::fail(horizon, "horizon must be at least dt");
  doc.optional("seed", s.seed);
  doc.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFileError(0, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioFileError& e) {
    throw ScenarioFileError(e.line(), e.detail(), path.string());
  }
}

namespace {

// Shortest representation that round-trips exactly.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

YAML::Emitter& put(YAML::Emitter& out, const char* key, double v) {
  return out << YAML::Key << key << YAML::Value << fmt(v);
}

YAML::Emitter& put(YAML::Emitter& out, const char* key, const Eigen::VectorXd& v) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << fmt(x);
  return out << YAML::EndSeq;
}

void put_disturbance(YAML::Emitter& out, const char* key, const DisturbanceSpec& d) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(d.kind);
  put(out, "magnitude", d.magnitude);
  put(out, "direction", d.direction);
  put(out, "frequency", d.frequency);
  put(out, "phase", d.phase);
  put(out, "dwell", d.dwell);
  out << YAML::Key << "seed" << YAML::Value << d.seed;
  put(out, "scale", d.scale);
  out << YAML::EndMap;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << s.schema_version;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "description" << YAML::Value << s.description;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << s.model.type;
  put(out, "d_bar", s.model.d_bar);
  put(out, "v_bar", s.model.v_bar);
  out << YAML::Key << "quad" << YAML::Value << YAML::BeginMap;
  put(out, "mass", s.model.quad.mass);
  put(out, "inertia", s.model.quad.inertia);
  put(out, "gravity", s.model.quad.gravity);
  put(out, "d_bar", s.model.quad.d_bar);
  put(out, "v_channel_bounds", Eigen::VectorXd(s.model.quad.v_channel_bounds));
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "barrier" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << s.barrier.type;
  put(out, "alpha0", s.barrier.alpha0);
  put(out, "x_max", s.barrier.x_max);
  put(out, "center", Eigen::VectorXd(s.barrier.center));
  put(out, "radius", s.barrier.radius);
  put(out, "sigma", s.barrier.sigma);
  out << YAML::Key << "alpha" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value
      << (s.barrier.alpha.kind == ClassK::Kind::kLinear ? "linear" : "cubic");
  put(out, "gain", s.barrier.alpha.gain);
  out << YAML::EndMap;
  out << YAML::Key << "kappa" << YAML::Value
      << (s.barrier.kappa.kind == Tuning::Kind::kOne ? "one" : "logistic");
  out << YAML::EndMap;

  out << YAML::Key << "observer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << s.observer.type;
  put(out, "theta", s.observer.theta);
  put(out, "delta", s.observer.delta);
  put(out, "Q_diag", s.observer.Q_diag);
  put(out, "R_diag", s.observer.R_diag);
  put(out, "P0_diag", s.observer.P0_diag);
  put(out, "V0", s.observer.V0);
  put(out, "p_min", s.observer.p_min);
  put(out, "p_max", s.observer.p_max);
  out << YAML::EndMap;

  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(s.controller.kind);
  put(out, "baseline_d_bar", s.controller.baseline_d_bar);
  out << YAML::Key << "qp_iteration_cap" << YAML::Value << s.controller.qp_iteration_cap;
  out << YAML::Key << "initial_check_samples" << YAML::Value << s.controller.initial_check_samples;
  out << YAML::Key << "nominal" << YAML::Value << YAML::BeginMap;
  put(out, "Q_diag", s.controller.nominal.Q_diag);
  put(out, "R_diag", s.controller.nominal.R_diag);
  put(out, "x_ref", s.controller.nominal.x_ref);
  out << YAML::EndMap << YAML::EndMap;

  put(out, "x0", s.x0);
  put(out, "xhat0", s.xhat0);
  put_disturbance(out, "d", s.d);
  put_disturbance(out, "v", s.v);
  put(out, "horizon", s.horizon);
  put(out, "dt", s.dt);
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << serialize_scenario(scenario);
}

}  // namespace ocbf::io

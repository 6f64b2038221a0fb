#include "evoclust/config.hpp"

#include <fstream>
#include <set>

#include "evoclust/errors.hpp"

namespace evoclust {

using nlohmann::json;

namespace {

// Strict object reader: every key must be consumed, otherwise finish() names the stray one.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError("config: " + field(key) + ": " + msg);
  }

  std::string field(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) return fallback;
    return value<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) fail(key, "missing required key");
    return value<T>(key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), field(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  template <class T>
  T value(const std::string& key) {
    const json& v = raw(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) fail(key, "expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "expected a number");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail(key, "malformed value");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> numbers(Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  if (!v.is_array()) r.fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) r.fail(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::array<double, 3> triple(Reader& r, const std::string& key, const std::array<double, 3>& fallback) {
  if (!r.has(key)) return fallback;
  const std::vector<double> v = numbers(r, key);
  if (v.size() != 3) r.fail(key, "expected three entries");
  return {v[0], v[1], v[2]};
}

std::vector<Interval> parse_bounds(Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  if (!v.is_array() || v.empty() || v.size() > 2) r.fail(key, "expected one or two [lower, upper] pairs");
  std::vector<Interval> out;
  for (const json& pair : v) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      r.fail(key, "expected [lower, upper] pairs");
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

Vec parse_vec(Reader& r, const std::string& key, int dim) {
  const std::vector<double> v = numbers(r, key);
  if (static_cast<int>(v.size()) != dim) r.fail(key, "expected " + std::to_string(dim) + " entries");
  Vec out = zero_vec(dim);
  for (int a = 0; a < dim; ++a) out(a) = v[a];
  return out;
}

Mat parse_mat(Reader& r, const std::string& key, int dim) {
  const json& v = r.raw(key);
  if (!v.is_array() || static_cast<int>(v.size()) != dim) r.fail(key, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  Mat out = zero_mat(dim);
  for (int a = 0; a < dim; ++a) {
    if (!v[a].is_array() || static_cast<int>(v[a].size()) != dim) r.fail(key, "expected a square matrix");
    for (int b = 0; b < dim; ++b) {
      if (!v[a][b].is_number()) r.fail(key, "expected numbers");
      out(a, b) = v[a][b].get<double>();
    }
  }
  return out;
}

const char* kind_name(DataKind k) {
  switch (k) {
    case DataKind::test1: return "test1";
    case DataKind::test2: return "test2";
    case DataKind::gridded: return "gridded";
  }
  return "?";
}

void check_version(Reader& r) {
  const int version = r.require<int>("schema_version");
  if (version != kSchemaVersion) r.fail("schema_version", "unsupported version " + std::to_string(version));
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? p : (base / path).string();
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
}

RunFile parse_run_file(const json& j, const std::filesystem::path& base_dir) {
  RunFile out;
  RunConfig& c = out.config;
  Reader root(j, "");
  check_version(root);
  if (root.has("metadata")) {
    out.metadata = root.raw("metadata");
    if (!out.metadata.is_object()) root.fail("metadata", "expected an object");
  }
  const std::string model = root.require<std::string>("model");
  try {
    c.model = parse_model(model);
  } catch (const ConfigError&) {
    root.fail("model", "unknown model '" + model + "'");
  }
  c.components = root.get("components", c.components);
  c.final_time = root.get("final_time", c.final_time);
  c.dt = root.get("dt", c.dt);
  c.epsilon = root.get("epsilon", c.epsilon);
  c.tau = root.get("tau", c.tau);
  c.seed = root.get<std::uint64_t>("seed", c.seed);
  if (root.has("snapshots")) out.snapshots = numbers(root, "snapshots");
  if (root.has("kernel")) {
    const std::string kernel = root.require<std::string>("kernel");
    if (kernel == "dirac") c.kernel = KernelKind::dirac;
    else if (kernel == "asymmetric") c.kernel = KernelKind::asymmetric;
    else if (kernel == "symmetric") c.kernel = KernelKind::symmetric;
    else root.fail("kernel", "expected 'dirac', 'asymmetric' or 'symmetric'");
  }

  if (root.has("grid")) {
    Reader g = root.child("grid");
    if (g.has("bounds")) c.grid.bounds = parse_bounds(g, "bounds");
    if (g.has("nodes")) {
      const json& v = g.raw("nodes");
      if (!v.is_array()) g.fail("nodes", "expected an array of integers");
      c.grid.nodes.clear();
      for (const json& x : v) {
        if (!x.is_number_integer()) g.fail("nodes", "expected an array of integers");
        c.grid.nodes.push_back(x.get<int>());
      }
      if (c.grid.nodes.size() != c.grid.bounds.size()) g.fail("nodes", "needs one count per axis");
    }
    c.grid.spacing = g.get("spacing", c.grid.spacing);
    g.finish();
  }

  if (root.has("dataset")) {
    Reader d = root.child("dataset");
    const std::string kind = d.require<std::string>("kind");
    if (kind == "test1") {
      c.dataset.kind = DataKind::test1;
      if (d.has("test1")) {
        Reader p = d.child("test1");
        Test1Params& t = c.dataset.test1;
        t.a = triple(p, "a", t.a);
        t.b = triple(p, "b", t.b);
        t.c = triple(p, "c", t.c);
        t.v = triple(p, "v", t.v);
        t.normalization = p.get("normalization", t.normalization);
        p.finish();
      }
    } else if (kind == "test2") {
      c.dataset.kind = DataKind::test2;
      if (d.has("test2")) {
        Reader p = d.child("test2");
        Test2Params& t = c.dataset.test2;
        t.c = triple(p, "c", t.c);
        t.radii = triple(p, "radii", t.radii);
        p.finish();
      }
    } else if (kind == "gridded") {
      c.dataset.kind = DataKind::gridded;
      c.dataset.csv = resolve(d.require<std::string>("csv"), base_dir);
      c.dataset.sidecar = resolve(d.require<std::string>("sidecar"), base_dir);
    } else {
      d.fail("kind", "unknown dataset '" + kind + "'");
    }
    d.finish();
  }

  if (root.has("solver")) {
    Reader s = root.child("solver");
    SolverOptions& o = c.solver;
    o.fp.cfl_max = s.get("cfl_max", o.fp.cfl_max);
    o.fp.support_cutoff = s.get("support_cutoff", o.fp.support_cutoff);
    o.fp.max_substeps = s.get("max_substeps", o.fp.max_substeps);
    o.fp.moment_matched = s.get("moment_matched", o.fp.moment_matched);
    o.estep.alpha_floor = s.get("alpha_floor", o.estep.alpha_floor);
    o.estep.cov_floor = s.get("cov_floor", o.estep.cov_floor);
    o.v_floor = s.get("v_floor", o.v_floor);
    if (s.has("derivative")) {
      const std::string scheme = s.require<std::string>("derivative");
      if (scheme == "backward") o.derivative = DerivativeScheme::backward;
      else if (scheme == "centered") o.derivative = DerivativeScheme::centered;
      else s.fail("derivative", "expected 'backward' or 'centered'");
    }
    s.finish();
  }

  if (root.has("fixed_point")) {
    Reader f = root.child("fixed_point");
    FixedPointOptions& o = c.fixed_point;
    o.tol = f.get("tol", o.tol);
    o.max_iterations = f.get("max_iterations", o.max_iterations);
    o.damping = f.get("damping", o.damping);
    o.auto_damping = f.get("auto_damping", o.auto_damping);
    o.anderson_depth = f.get("anderson_depth", o.anderson_depth);
    o.gauss_seidel = f.get("gauss_seidel", o.gauss_seidel);
    f.finish();
  }
  root.finish();

  for (double t : out.snapshots)
    if (!(t >= 0.0) || t > c.final_time) throw ConfigError("config: snapshots: times must lie in [0, final_time]");
  validate(c);
  return out;
}

RunFile load_run_file(const std::filesystem::path& path) {
  return parse_run_file(read_json(path), path.parent_path());
}

json to_json(const RunFile& f) {
  const RunConfig& c = f.config;
  json j;
  j["schema_version"] = kSchemaVersion;
  if (!f.metadata.empty()) j["metadata"] = f.metadata;
  j["model"] = model_name(c.model);
  j["components"] = c.components;
  j["final_time"] = c.final_time;
  j["dt"] = c.dt;
  j["epsilon"] = c.epsilon;
  j["tau"] = c.tau;
  j["seed"] = c.seed;
  j["snapshots"] = f.snapshots;
  if (c.kernel) {
    static constexpr const char* names[] = {"dirac", "asymmetric", "symmetric"};
    j["kernel"] = names[static_cast<int>(*c.kernel)];
  }

  json grid;
  json bounds = json::array();
  for (const Interval& b : c.grid.bounds) bounds.push_back({b.lower, b.upper});
  grid["bounds"] = bounds;
  if (!c.grid.nodes.empty()) grid["nodes"] = c.grid.nodes;
  grid["spacing"] = c.grid.spacing;
  j["grid"] = grid;

  json data;
  data["kind"] = kind_name(c.dataset.kind);
  switch (c.dataset.kind) {
    case DataKind::test1: {
      const Test1Params& t = c.dataset.test1;
      data["test1"] = {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"v", t.v}, {"normalization", t.normalization}};
      break;
    }
    case DataKind::test2:
      data["test2"] = {{"c", c.dataset.test2.c}, {"radii", c.dataset.test2.radii}};
      break;
    case DataKind::gridded:
      data["csv"] = c.dataset.csv;
      data["sidecar"] = c.dataset.sidecar;
      break;
  }
  j["dataset"] = data;

  const SolverOptions& s = c.solver;
  j["solver"] = {{"cfl_max", s.fp.cfl_max},
                 {"support_cutoff", s.fp.support_cutoff},
                 {"max_substeps", s.fp.max_substeps},
                 {"moment_matched", s.fp.moment_matched},
                 {"alpha_floor", s.estep.alpha_floor},
                 {"cov_floor", s.estep.cov_floor},
                 {"v_floor", s.v_floor},
                 {"derivative", s.derivative == DerivativeScheme::backward ? "backward" : "centered"}};
  const FixedPointOptions& p = c.fixed_point;
  j["fixed_point"] = {{"tol", p.tol},
                      {"max_iterations", p.max_iterations},
                      {"damping", p.damping},
                      {"auto_damping", p.auto_damping},
                      {"anderson_depth", p.anderson_depth},
                      {"gauss_seidel", p.gauss_seidel}};
  return j;
}

OracleScenario parse_oracle_scenario(const json& j) {
  OracleScenario o;
  Reader root(j, "");
  check_version(root);
  if (root.has("metadata")) root.raw("metadata");
  Reader r = root.child("oracle");
  if (r.has("bounds")) o.bounds = parse_bounds(r, "bounds");
  const int d = static_cast<int>(o.bounds.size());
  o.epsilon = r.get("epsilon", o.epsilon);
  o.rate = parse_mat(r, "rate", d);
  o.attractor = parse_vec(r, "attractor", d);
  o.mean0 = parse_vec(r, "mean0", d);
  o.cov0 = parse_mat(r, "cov0", d);
  o.final_time = r.get("final_time", o.final_time);
  o.spacing = r.get("spacing", o.spacing);
  o.dt = r.get("dt", o.dt);
  o.refinements = r.get("refinements", o.refinements);
  o.fp.cfl_max = r.get("cfl_max", o.fp.cfl_max);
  o.fp.moment_matched = r.get("moment_matched", o.fp.moment_matched);
  r.finish();
  root.finish();
  if (!(o.epsilon > 0.0)) throw ConfigError("config: oracle.epsilon: must be positive");
  if (!(o.final_time > 0.0)) throw ConfigError("config: oracle.final_time: must be positive");
  if (!(o.spacing > 0.0)) throw ConfigError("config: oracle.spacing: must be positive");
  if (!(o.dt > 0.0)) throw ConfigError("config: oracle.dt: must be positive");
  if (o.refinements < 1 || o.refinements > 6) throw ConfigError("config: oracle.refinements: must lie in [1, 6]");
  if (!is_spd(o.cov0)) throw ConfigError("config: oracle.cov0: must be symmetric positive definite");
  for (const Interval& b : o.bounds)
    if (!(b.upper > b.lower)) throw ConfigError("config: oracle.bounds: empty interval");
  return o;
}

OracleScenario load_oracle_scenario(const std::filesystem::path& path) { return parse_oracle_scenario(read_json(path)); }

}  // namespace evoclust

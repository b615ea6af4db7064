#include "multifluid/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace multifluid::io {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

/// Reads the members of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() || it->is_null() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* value = find(key);
    if (!value) throw ConfigError(path(key), "required key is missing");
    return *value;
  }

  double number(const std::string& key, double fallback) {
    const json* value = find(key);
    return value ? as_number(*value, path(key)) : fallback;
  }

  double required_number(const std::string& key) { return as_number(require(key), path(key)); }

  int integer(const std::string& key, int fallback) {
    const json* value = find(key);
    return value ? as_integer(*value, path(key)) : fallback;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* value = find(key);
    if (!value) return fallback;
    if (!value->is_string()) throw ConfigError(path(key), "expected a string");
    return value->get<std::string>();
  }

  /// Throws on the first key that was never read.
  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
    }
  }

  static double as_number(const json& value, const std::string& path) {
    if (!value.is_number()) throw ConfigError(path, "expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
  }

  static int as_integer(const json& value, const std::string& path) {
    if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
    return value.get<int>();
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::MatrixXd read_matrix(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t n = value.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = value[i];
    if (!row.is_array() || row.size() != n) throw ConfigError(index(path, i), "expected a row of " + std::to_string(n) + " numbers");
    for (std::size_t j = 0; j < n; ++j) m(Eigen::Index(i), Eigen::Index(j)) = ObjectReader::as_number(row[j], index(index(path, i), j));
  }
  return m;
}

Eigen::RowVectorXd read_vector(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  Eigen::RowVectorXd v(value.size());
  for (std::size_t k = 0; k < value.size(); ++k) v[Eigen::Index(k)] = ObjectReader::as_number(value[k], index(path, k));
  return v;
}

ProfileSpec read_profile(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  ProfileSpec p;
  p.kind = r.string("profile", "");
  if (p.kind == "uniform") {
    p.value = r.required_number("value");
  } else if (p.kind == "sine") {
    p.offset = r.number("offset", 0.0);
    p.amplitude = r.required_number("amplitude");
    p.mode = r.number("mode", 1.0);
    p.phase = r.number("phase", 0.0);
  } else if (p.kind == "bump") {
    p.offset = r.number("offset", 0.0);
    p.amplitude = r.required_number("amplitude");
    p.center = r.number("center", 0.5);
    p.width = r.required_number("width");
    if (!(p.width > 0.0)) throw ConfigError(r.path("width"), "must be positive");
  } else {
    throw ConfigError(r.path("profile"), "expected \"uniform\", \"sine\" or \"bump\"");
  }
  r.finish();
  return p;
}

std::vector<ProfileSpec> read_profiles(const json& value, const std::string& path) {
  if (!value.is_array()) throw ConfigError(path, "expected an array with one profile per constituent");
  std::vector<ProfileSpec> out;
  for (std::size_t k = 0; k < value.size(); ++k) out.push_back(read_profile(value[k], index(path, k)));
  return out;
}

json profile_to_json(const ProfileSpec& p) {
  if (p.kind == "uniform") return {{"profile", "uniform"}, {"value", p.value}};
  if (p.kind == "sine") {
    return {{"profile", "sine"}, {"offset", p.offset}, {"amplitude", p.amplitude}, {"mode", p.mode}, {"phase", p.phase}};
  }
  return {{"profile", "bump"}, {"offset", p.offset}, {"amplitude", p.amplitude}, {"center", p.center}, {"width", p.width}};
}

void read_tolerances(ObjectReader& r, Tolerances& t, StudyThresholds& s) {
  t.energy_coeff = r.number("energy_coeff", t.energy_coeff);
  t.dissipation_epsilon = r.number("dissipation_epsilon", t.dissipation_epsilon);
  t.concentration = r.number("concentration", t.concentration);
  t.mass_drift = r.number("mass_drift", t.mass_drift);
  t.density_floor = r.number("density_floor", t.density_floor);
  t.density_ceiling = r.number("density_ceiling", t.density_ceiling);
  t.flux_coeff = r.number("flux_coeff", t.flux_coeff);
  t.alpha_quadrature = r.number("alpha_quadrature", t.alpha_quadrature);
  t.volume_consistency = r.number("volume_consistency", t.volume_consistency);
  t.density_rate_slack = r.number("density_rate_slack", t.density_rate_slack);
  t.refinement = r.number("refinement", t.refinement);
  t.n_paths = r.integer("n_paths", t.n_paths);
  s.velocity_order = r.number("velocity_order", s.velocity_order);
  s.density_order = r.number("density_order", s.density_order);
  s.stability_spread = r.number("stability_spread", s.stability_spread);
  s.cross_reduction = r.number("cross_reduction", s.cross_reduction);
  r.finish();

  const std::pair<const char*, double> nonnegative[] = {
      {"energy_coeff", t.energy_coeff},         {"concentration", t.concentration},
      {"mass_drift", t.mass_drift},             {"density_floor", t.density_floor},
      {"flux_coeff", t.flux_coeff},             {"alpha_quadrature", t.alpha_quadrature},
      {"volume_consistency", t.volume_consistency}, {"density_rate_slack", t.density_rate_slack},
      {"refinement", t.refinement},             {"stability_spread", s.stability_spread}};
  for (const auto& [key, value] : nonnegative) {
    if (!(value >= 0.0)) throw ConfigError(r.path(key), "must be nonnegative");
  }
  if (!(t.dissipation_epsilon >= 0.0 && t.dissipation_epsilon < 1.0)) {
    throw ConfigError(r.path("dissipation_epsilon"), "must lie in [0, 1)");
  }
  if (!(t.density_ceiling > t.density_floor)) throw ConfigError(r.path("density_ceiling"), "must exceed density_floor");
  if (t.n_paths < 1) throw ConfigError(r.path("n_paths"), "must be at least 1");
}

ManufacturedParams read_mms(ObjectReader& r, int n_components) {
  ManufacturedParams m;
  if (const json* c = r.find("concentrations")) {
    m.concentrations = read_vector(*c, r.path("concentrations"));
  } else {
    m.concentrations = Eigen::RowVectorXd::Constant(n_components, 1.0 / n_components);
  }
  m.base_density = r.number("base_density", m.base_density);
  m.density_amplitude = r.number("density_amplitude", m.density_amplitude);
  m.velocity_amplitude = r.number("velocity_amplitude", m.velocity_amplitude);
  const std::string profile = r.string("profile", "trigonometric");
  if (profile == "trigonometric") {
    m.profile = ManufacturedProfile::trigonometric;
  } else if (profile == "polynomial") {
    m.profile = ManufacturedProfile::polynomial;
  } else {
    throw ConfigError(r.path("profile"), "expected \"trigonometric\" or \"polynomial\"");
  }
  r.finish();
  return m;
}

}  // namespace

std::string to_string(Coordinates c) {
  switch (c) {
    case Coordinates::euler: return "euler";
    case Coordinates::lagrange: return "lagrange";
    case Coordinates::both: return "both";
  }
  return "euler";
}

Coordinates parse_coordinates(const std::string& text, const std::string& path) {
  if (text == "euler") return Coordinates::euler;
  if (text == "lagrange") return Coordinates::lagrange;
  if (text == "both") return Coordinates::both;
  throw ConfigError(path, "expected \"euler\", \"lagrange\" or \"both\", got \"" + text + "\"");
}

double ProfileSpec::operator()(double x) const {
  if (kind == "uniform") return value;
  if (kind == "sine") return offset + amplitude * std::sin(mode * M_PI * x + phase);
  const double z = (x - center) / width;
  return offset + amplitude * std::exp(-z * z);
}

Physics RunConfig::physics() const {
  try {
    return Physics(params, ViscosityMatrix(viscosity));
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.path(), e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("viscosity", e.what());
  }
}

TimeControl RunConfig::time_control(int cells) const {
  TimeControl control;
  control.final_time = final_time;
  control.cfl = cfl;
  control.dt_max = dt_max ? *dt_max : dt_max_per_h / cells;
  control.dt_min = dt_min;
  control.snapshot_stride = snapshot_stride;
  return control;
}

EulerState RunConfig::initial_state(int cells) const {
  const Grid grid(cells, 1.0);
  const int n = params.n_components();
  ComponentFields rho(grid.n_nodes(), n);
  ComponentFields u(grid.n_nodes(), n);
  if (!initial.csv.empty()) {
    detail::Table table;
    try {
      table = detail::read_csv(initial.csv);
    } catch (const std::exception& e) {
      throw ConfigError("initial_data.csv", e.what());
    }
    const Eigen::Index x = table.column("x");
    if (x < 0) throw ConfigError("initial_data.csv", "missing column x");
    if (table.values.rows() < 2) throw ConfigError("initial_data.csv", "needs at least two rows");
    const Field at = table.values.col(x);
    for (Eigen::Index k = 1; k < at.size(); ++k) {
      if (!(at[k] > at[k - 1])) throw ConfigError("initial_data.csv", "x must be strictly increasing");
    }
    if (at[0] != 0.0 || at[at.size() - 1] != 1.0) throw ConfigError("initial_data.csv", "x must span [0, 1]");
    for (int i = 0; i < n; ++i) {
      for (const char* prefix : {"rho_", "u_"}) {
        const std::string name = prefix + std::to_string(i + 1);
        const Eigen::Index c = table.column(name);
        if (c < 0) throw ConfigError("initial_data.csv", "missing column " + name);
        const Eigen::MatrixXd sampled = interpolate_linear<double>(at, table.values.col(c), grid.nodes());
        (prefix[0] == 'r' ? rho : u).col(i) = sampled.col(0);
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
        rho(k, i) = initial.density[std::size_t(i)](grid.node(k));
        u(k, i) = initial.velocity[std::size_t(i)](grid.node(k));
      }
    }
  }
  const InitialDataReport report = validate_initial_data(grid, rho, u);
  if (!report.accepted()) {
    std::string message;
    for (const auto& v : report.violations) message += (message.empty() ? "" : "; ") + v;
    throw ConfigError("initial_data", message);
  }
  return make_euler_state(grid, std::move(rho), std::move(u));
}

json to_json(const RunConfig& c) {
  json viscosity = json::array();
  for (Eigen::Index i = 0; i < c.viscosity.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < c.viscosity.cols(); ++j) row.push_back(c.viscosity(i, j));
    viscosity.push_back(row);
  }
  json initial;
  if (!c.initial.csv.empty()) {
    initial["csv"] = c.initial.csv.string();
  } else {
    for (const auto& p : c.initial.density) initial["density"].push_back(profile_to_json(p));
    for (const auto& p : c.initial.velocity) initial["velocity"].push_back(profile_to_json(p));
  }
  const Tolerances& t = c.tolerances;
  const StudyThresholds& s = c.thresholds;
  json out = {
      {"n_components", c.params.n_components()},
      {"pressure_const", c.params.pressure_const()},
      {"polytropic_index", c.params.polytropic_index()},
      {"viscosity", viscosity},
      {"n_cells", c.n_cells},
      {"final_time", c.final_time},
      {"cfl", c.cfl},
      {"dt_min", c.dt_min},
      {"snapshot_stride", c.snapshot_stride},
      {"coords", to_string(c.coords)},
      {"initial_data", initial},
      {"tolerances",
       {{"energy_coeff", t.energy_coeff},
        {"dissipation_epsilon", t.dissipation_epsilon},
        {"concentration", t.concentration},
        {"mass_drift", t.mass_drift},
        {"density_floor", t.density_floor},
        {"density_ceiling", t.density_ceiling},
        {"flux_coeff", t.flux_coeff},
        {"alpha_quadrature", t.alpha_quadrature},
        {"volume_consistency", t.volume_consistency},
        {"density_rate_slack", t.density_rate_slack},
        {"refinement", t.refinement},
        {"n_paths", t.n_paths},
        {"velocity_order", s.velocity_order},
        {"density_order", s.density_order},
        {"stability_spread", s.stability_spread},
        {"cross_reduction", s.cross_reduction}}},
  };
  if (c.dt_max) {
    out["dt_max"] = *c.dt_max;
  } else {
    out["dt_max_per_h"] = c.dt_max_per_h;
  }
  if (c.mms) {
    json conc = json::array();
    for (Eigen::Index i = 0; i < c.mms->concentrations.size(); ++i) conc.push_back(c.mms->concentrations[i]);
    out["mms"] = {{"concentrations", conc},
                  {"base_density", c.mms->base_density},
                  {"density_amplitude", c.mms->density_amplitude},
                  {"velocity_amplitude", c.mms->velocity_amplitude},
                  {"profile", c.mms->profile == ManufacturedProfile::polynomial ? "polynomial" : "trigonometric"}};
  }
  return out;
}

RunConfig parse_config(const json& document, const std::filesystem::path& base_dir) {
  ObjectReader r(document, "");
  RunConfig c;

  c.viscosity = read_matrix(r.require("viscosity"), "viscosity");
  const int inferred = int(c.viscosity.rows());
  const int n = r.integer("n_components", inferred);
  if (n != inferred) {
    throw ConfigError("n_components", "is " + std::to_string(n) + " but viscosity is " + std::to_string(inferred) +
                                          " x " + std::to_string(inferred));
  }
  try {
    c.params = FluidParams(n, r.required_number("pressure_const"), r.required_number("polytropic_index"));
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.path(), e.what());
  }
  (void)c.physics();

  c.n_cells = r.integer("n_cells", c.n_cells);
  if (c.n_cells < 8) throw ConfigError("n_cells", "must be at least 8");
  c.final_time = r.number("final_time", c.final_time);
  if (!(c.final_time >= 0.0)) throw ConfigError("final_time", "must be nonnegative");
  c.cfl = r.number("cfl", c.cfl);
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl", "must lie in (0, 1]");

  const json* dt_max = r.find("dt_max");
  const json* dt_max_per_h = r.find("dt_max_per_h");
  if (dt_max && dt_max_per_h) throw ConfigError("dt_max", "give either dt_max or dt_max_per_h, not both");
  if (dt_max) {
    c.dt_max = ObjectReader::as_number(*dt_max, "dt_max");
    if (!(*c.dt_max > 0.0)) throw ConfigError("dt_max", "must be positive");
  }
  if (dt_max_per_h) {
    c.dt_max_per_h = ObjectReader::as_number(*dt_max_per_h, "dt_max_per_h");
    if (!(c.dt_max_per_h > 0.0)) throw ConfigError("dt_max_per_h", "must be positive");
  }
  c.dt_min = r.number("dt_min", c.dt_min);
  if (!(c.dt_min >= 0.0)) throw ConfigError("dt_min", "must be nonnegative");
  c.snapshot_stride = r.integer("snapshot_stride", c.snapshot_stride);
  if (c.snapshot_stride < 1) throw ConfigError("snapshot_stride", "must be at least 1");
  c.coords = parse_coordinates(r.string("coords", "euler"));

  {
    ObjectReader init(r.require("initial_data"), "initial_data");
    if (const json* csv = init.find("csv")) {
      if (!csv->is_string()) throw ConfigError("initial_data.csv", "expected a path");
      std::filesystem::path path = csv->get<std::string>();
      c.initial.csv = path.is_absolute() ? path : base_dir / path;
      if (init.find("density") || init.find("velocity")) {
        throw ConfigError("initial_data", "give either csv or density/velocity profiles");
      }
    } else {
      c.initial.density = read_profiles(init.require("density"), "initial_data.density");
      c.initial.velocity = read_profiles(init.require("velocity"), "initial_data.velocity");
      if (int(c.initial.density.size()) != n) {
        throw ConfigError("initial_data.density", "expected " + std::to_string(n) + " profiles");
      }
      if (int(c.initial.velocity.size()) != n) {
        throw ConfigError("initial_data.velocity", "expected " + std::to_string(n) + " profiles");
      }
    }
    init.finish();
  }

  if (const json* tol = r.find("tolerances")) {
    ObjectReader t(*tol, "tolerances");
    read_tolerances(t, c.tolerances, c.thresholds);
  }
  if (const json* mms = r.find("mms")) {
    ObjectReader m(*mms, "mms");
    c.mms = read_mms(m, n);
    try {
      (void)ManufacturedSolution(c.physics(), *c.mms);
    } catch (const ConfigError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ConfigError(e.path(), e.what());
    }
  }
  r.finish();

  (void)c.initial_state();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("", e.what());
  }
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": parse error: " + e.what());
  }
  return parse_config(document, path.parent_path());
}

}  // namespace multifluid::io

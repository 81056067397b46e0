#include "aniso/experiment.hpp"

#include "aniso/quality.hpp"
#include "aniso/vtk.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace aniso {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("option '" + key + "': not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("option '" + key + "': not an integer: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string t = text;
  for (char& ch : t)
    if (ch == ',') ch = ' ';
  std::istringstream is(t);
  std::vector<double> out;
  std::string item;
  while (is >> item) out.push_back(parse_double(key, item));
  return out;
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Reconstruction parse_method(const std::string& name) {
  if (name == "cr") return Reconstruction::kNone;
  if (name == "cr-rt") return Reconstruction::kRaviartThomas;
  if (name == "cr-bdm") return Reconstruction::kBdm;
  throw InvalidArgument("unknown method '" + name + "' (expected cr, cr-rt or cr-bdm)");
}

const char* method_name(Reconstruction mode) {
  switch (mode) {
    case Reconstruction::kNone: return "cr";
    case Reconstruction::kRaviartThomas: return "cr-rt";
    case Reconstruction::kBdm: return "cr-bdm";
  }
  return "?";
}

QuadratureDegrees ExperimentConfig::degrees() const {
  QuadratureDegrees d;
  d.volume = degree_volume;
  d.facet = degree_facet >= 0 ? degree_facet : (dim() == 3 ? 6 : 4);
  d.rhs = degree_rhs >= 0 ? degree_rhs : (dim() == 3 ? 10 : 5);
  return d;
}

int ExperimentConfig::error_degree() const { return degree_error >= 0 ? degree_error : (dim() == 3 ? 10 : 6); }

void set_option(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "case") {
    if (value != "bl2d" && value != "edge3d") throw InvalidArgument("unknown case '" + value + "' (expected bl2d or edge3d)");
    c.case_name = value;
  } else if (key == "method") {
    c.method = parse_method(value);
  } else if (key == "nu") {
    c.nu = parse_double(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, value);
  } else if (key == "mu") {
    c.mu = parse_double(key, value);
  } else if (key == "omega") {
    c.omega = parse_double(key, value);
  } else if (key == "mesh") {
    if (value != "shishkin" && value != "uniform")
      throw InvalidArgument("unknown mesh family '" + value + "' (expected shishkin or uniform)");
    c.mesh = value;
  } else if (key == "levels") {
    c.levels = parse_list(key, value);
  } else if (key == "degree_volume") {
    c.degree_volume = parse_int(key, value);
  } else if (key == "degree_facet") {
    c.degree_facet = parse_int(key, value);
  } else if (key == "degree_rhs") {
    c.degree_rhs = parse_int(key, value);
  } else if (key == "degree_error") {
    c.degree_error = parse_int(key, value);
  } else if (key == "solver") {
    if (value == "auto")
      c.solver = SolverKind::kAuto;
    else if (value == "direct")
      c.solver = SolverKind::kDirect;
    else if (value == "schur")
      c.solver = SolverKind::kSchurComplement;
    else
      throw InvalidArgument("unknown solver '" + value + "' (expected auto, direct or schur)");
  } else if (key == "load") {
    if (value != "split" && value != "direct") throw InvalidArgument("unknown load '" + value + "' (expected split or direct)");
    c.split_load = value == "split";
  } else if (key == "out") {
    c.out = value;
  } else if (key == "vtk") {
    c.vtk = value;
  } else {
    throw InvalidArgument("unknown option '" + key + "'");
  }
}

void validate(const ExperimentConfig& c) {
  if (!(c.nu > 0.0)) throw InvalidArgument("nu must be positive");
  if (c.levels.empty()) throw InvalidArgument("no refinement levels given");
  if (c.case_name == "bl2d") {
    if (!(c.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    for (double n : c.levels)
      if (n < 2 || n != std::floor(n) || static_cast<long>(n) % 2 != 0)
        throw InvalidArgument("bl2d levels must be even integers N >= 2, got " + format(n));
  } else {
    if (!(c.mu > 0.0 && c.mu <= 1.0)) throw InvalidArgument("mu must lie in (0, 1]");
    if (!(c.omega > 0.0 && c.omega < 2 * kPi)) throw InvalidArgument("omega must lie in (0, 2 pi)");
    for (double h : c.levels)
      if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("edge3d levels must be mesh sizes h in (0, 1], got " + format(h));
  }
  const QuadratureDegrees d = c.degrees();
  for (int deg : {d.volume, d.facet, d.rhs, c.error_degree()})
    if (deg > kMaxQuadratureDegree)
      throw InvalidArgument("quadrature degree " + std::to_string(deg) + " exceeds the maximum " +
                            std::to_string(kMaxQuadratureDegree));
}

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
  ExperimentConfig c;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(source + ":" + std::to_string(number) + ": expected 'key = value'");
    try {
      set_option(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InvalidArgument& ex) {
      throw InvalidArgument(source + ":" + std::to_string(number) + ": " + ex.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open config file " + path);
  return parse_config(is, path);
}

ManufacturedCase make_case(const ExperimentConfig& c) {
  if (c.case_name == "bl2d") return case_boundary_layer_2d(c.epsilon, c.nu);
  return case_singular_edge_3d(c.nu, c.omega);
}

Triangulation make_mesh(const ExperimentConfig& c, double level) {
  if (c.case_name == "bl2d") {
    const int n = static_cast<int>(level);
    const double tau = c.mesh == "uniform" ? 0.5 : shishkin_tau(c.epsilon);
    return build_shishkin_2d(n, tau);
  }
  return build_graded_wedge_3d(level, c.mu, c.omega);
}

LevelSolution solve_level(const ExperimentConfig& config, const Triangulation& mesh, const ManufacturedCase& c,
                          int level, double level_value) {
  StokesProblem problem;
  problem.mesh = &mesh;
  problem.nu = config.nu;
  if (config.split_load) {
    problem.forcing = c.f_rest;
    problem.potential = c.f_potential;
  } else {
    problem.forcing = c.f;
  }
  problem.dirichlet = c.g;
  problem.mode = config.method;
  problem.degrees = config.degrees();
  const SparseSystem system = assemble_constrained(problem);
  SolverOptions options;
  options.kind = config.solver;
  LevelSolution out;
  out.solution = solve(system, options);

  const Space cr = Space::crouzeix_raviart(mesh);
  const Space p0 = Space::piecewise_constant(mesh);
  const FieldFunction uh(cr, out.solution.velocity);
  const FieldFunction ph(p0, out.solution.pressure);
  LevelResult& r = out.result;
  r.level = level;
  r.n_or_h = level_value;
  r.n_elem = mesh.num_elements();
  r.n_dof = system.velocity_size() + system.pressure_size();
  r.h = mesh.dim() == 2 && config.case_name == "bl2d" ? 1.0 / level_value : h_from_elements(r.n_elem, mesh.dim());
  r.errors = error_norms(uh, ph, c, config.error_degree());
  return out;
}

void write_csv_header(std::ostream& os) {
  os << "level,N_or_h,n_elem,n_dof,err_h1,err_l2_u,err_l2_p,err_pi_p,eoc_h1,eoc_l2_u,eoc_l2_p,eoc_pi_p\n";
}

void write_csv_row(std::ostream& os, const ConvergenceRecord& record, std::size_t index) {
  const LevelResult& l = record.levels.at(index);
  os << l.level << "," << format(l.n_or_h) << "," << l.n_elem << "," << l.n_dof << "," << format(l.errors.h1_u) << ","
     << format(l.errors.l2_u) << "," << format(l.errors.l2_p) << "," << format(l.errors.l2_pi_p);
  for (auto member : {&ErrorNorms::h1_u, &ErrorNorms::l2_u, &ErrorNorms::l2_p, &ErrorNorms::l2_pi_p}) {
    os << ",";
    if (index == 0) continue;
    const LevelResult& prev = record.levels[index - 1];
    const auto rate = eoc(prev.errors.*member, l.errors.*member, prev.h, l.h);
    if (rate)
      os << format(*rate);
    else
      os << "undefined";
  }
  os << "\n";
}

namespace {

std::vector<VtkField> quality_fields(const Triangulation& mesh) {
  const QualityReport q = audit_mesh(mesh, 170.0 * kPi / 180.0, 0.1);
  return {{"max_angle", 1, q.element_max_angle},
          {"rvp_determinant", 1, q.element_rvp},
          {"aspect_ratio", 1, q.element_aspect_ratio}};
}

std::string level_path(const std::string& prefix, int level) { return prefix + "_level" + std::to_string(level) + ".vtk"; }

void write_solution_vtk(const std::string& path, const Triangulation& mesh, const ManufacturedCase& c,
                        const SaddleSolution& s) {
  const Space cr = Space::crouzeix_raviart(mesh);
  const FieldFunction uh(cr, s.velocity);
  const int d = mesh.dim();
  std::vector<VtkField> fields = quality_fields(mesh);
  VtkField u{"velocity", d, {}}, p{"pressure", 1, {}}, ue{"velocity_exact", d, {}}, pe{"pressure_exact", 1, {}};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec x = mesh.element_barycenter(e);
    const Vec v = uh.value(e, x);
    const Vec w = c.u(x);
    for (int k = 0; k < d; ++k) {
      u.values.push_back(v(k));
      ue.values.push_back(w(k));
    }
    p.values.push_back(s.pressure(e));
    pe.values.push_back(c.p(x));
  }
  fields.push_back(u);
  fields.push_back(p);
  fields.push_back(ue);
  fields.push_back(pe);
  write_vtk(path, mesh, fields);
}

}  // namespace

ConvergenceRecord run_experiment(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const ManufacturedCase c = make_case(config);
  std::ofstream csv(config.out);
  if (!csv) throw InvalidArgument("cannot open output file " + config.out);
  write_csv_header(csv);
  csv.flush();
  ConvergenceRecord record;
  log << "case=" << config.case_name << " method=" << method_name(config.method) << " nu=" << format(config.nu)
      << "\n";
  for (std::size_t k = 0; k < config.levels.size(); ++k) {
    const int level = static_cast<int>(k);
    try {
      const Triangulation mesh = make_mesh(config, config.levels[k]);
      LevelSolution s = solve_level(config, mesh, c, level, config.levels[k]);
      record.levels.push_back(s.result);
      write_csv_row(csv, record, k);
      csv.flush();
      log << "level " << level << ": n_elem=" << s.result.n_elem << " n_dof=" << s.result.n_dof
          << " err_h1=" << format(s.result.errors.h1_u) << " err_l2_u=" << format(s.result.errors.l2_u)
          << " solver=" << s.solution.method << " residual=" << s.solution.residual << "\n";
      if (!config.vtk.empty()) write_solution_vtk(level_path(config.vtk, level), mesh, c, s.solution);
    } catch (const std::exception& ex) {
      csv << "FAILED," << level << ",\"" << ex.what() << "\"\n";
      csv.flush();
      throw NumericalError("level " + std::to_string(level) + ": " + ex.what());
    }
  }
  return record;
}

void audit_levels(const ExperimentConfig& config, std::ostream& os) {
  validate(config);
  for (std::size_t k = 0; k < config.levels.size(); ++k) {
    const Triangulation mesh = make_mesh(config, config.levels[k]);
    os << "level " << k << " (" << (config.dim() == 2 ? "N=" : "h=") << format(config.levels[k])
       << "): " << mesh.num_elements() << " elements, " << mesh.num_vertices() << " vertices\n";
    print_report(os, audit_mesh(mesh, 170.0 * kPi / 180.0, 0.1));
    if (config.case_name == "bl2d" && config.mesh == "shishkin")
      os << "  closed-form Shishkin aspect ratio: " << format(shishkin_aspect_ratio(shishkin_tau(config.epsilon)))
         << "\n";
  }
}

std::vector<std::string> export_levels(const ExperimentConfig& config) {
  validate(config);
  const ManufacturedCase c = make_case(config);
  const std::string prefix = config.vtk.empty() ? "mesh" : config.vtk;
  std::vector<std::string> paths;
  for (std::size_t k = 0; k < config.levels.size(); ++k) {
    const Triangulation mesh = make_mesh(config, config.levels[k]);
    std::vector<VtkField> fields = quality_fields(mesh);
    const int d = mesh.dim();
    VtkField u{"velocity_exact", d, {}}, p{"pressure_exact", 1, {}};
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Vec x = mesh.element_barycenter(e);
      const Vec w = c.u(x);
      for (int i = 0; i < d; ++i) u.values.push_back(w(i));
      p.values.push_back(c.p(x));
    }
    fields.push_back(u);
    fields.push_back(p);
    paths.push_back(level_path(prefix, static_cast<int>(k)));
    write_vtk(paths.back(), mesh, fields);
  }
  return paths;
}

}  // namespace aniso

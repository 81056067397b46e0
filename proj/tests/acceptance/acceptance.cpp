// Acceptance checks. Usage: acceptance [1-9 ...]; no arguments runs all.
// Prints one PASS/FAIL line per criterion, exit code 1 if any failed.

#include "aniso/experiment.hpp"
#include "aniso/quality.hpp"

#include "../common/test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace aniso;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> rates(const ConvergenceRecord& r, double ErrorNorms::*member) {
  std::vector<double> out;
  for (const auto& x : r.rates(member))
    if (x) out.push_back(*x);
  return out;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + num(x);
  return s;
}

double commutation_scale(const Triangulation& mesh, const FieldFunction& field) {
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto g = mesh.geometry(e);
    double area = 0.0;
    for (int i = 0; i <= mesh.dim(); ++i) area += g.facet_area[i];
    s = std::max(s, field.local(e).cwiseAbs().maxCoeff() * area / g.volume);
  }
  return s;
}

const std::vector<Triangulation>& pool() {
  static const std::vector<Triangulation> meshes = testing::mac_mesh_pool(50, 2024);
  return meshes;
}

void criterion_1(Outcome& o) {
  std::mt19937 rng(101);
  double worst = 0.0, sigma = 0.0;
  int dims[4] = {0, 0, 0, 0};
  for (const auto& mesh : pool()) {
    o.require(testing::passes_mac(mesh), "pool mesh violates MAC(170)");
    ++dims[mesh.dim()];
    sigma = std::max(sigma, mesh.max_aspect_ratio());
    auto field = testing::PolynomialField::random(rng, mesh.dim(), 3);
    auto v = field.function();
    auto icr = interpolate_cr(Space::crouzeix_raviart(mesh), v);
    auto irt = interpolate_rt(Space::raviart_thomas(mesh), v);
    auto ibdm = interpolate_bdm(Space::bdm(mesh), v);
    auto pi = project_p0(Space::piecewise_constant(mesh), field.divergence_function(), 4);
    const double scale = commutation_scale(mesh, icr);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (const FieldFunction* f : {&icr, &irt, &ibdm})
        worst = std::max(worst, std::abs(f->divergence(e) - pi.coefficients()(e)) / scale);
  }
  o.require(worst <= 1e-10, "max |div I v - pi div v| / scale <= 1e-10");
  o.require(dims[2] > 0 && dims[3] > 0, "pool covers 2D and 3D");
  o.require(sigma >= 1e2, "pool contains stretched elements");
  o.detail << pool().size() << " meshes (" << dims[2] << " 2D, " << dims[3] << " 3D, max sigma " << num(sigma)
           << "), max relative commutation defect " << num(worst);
}

void criterion_2(Outcome& o) {
  std::mt19937 rng(202);
  double worst = 0.0;
  int fields = 0;
  for (const auto& mesh : pool())
    for (int k = 0; k < 2; ++k, ++fields) {
      auto t = testing::TrigField::random(rng, mesh.dim());
      auto icr = interpolate_cr(Space::crouzeix_raviart(mesh), t.function(), 10);
      const double ratio = broken_h1_norm(icr) / h1_seminorm(mesh, t.gradient_function(), 10);
      worst = std::max(worst, ratio);
    }
  o.require(fields == 100, "100 fields");
  o.require(worst <= 1.0 + 1e-10, "|I_CR v|_1,h <= (1 + 1e-10) |v|_1");
  o.detail << fields << " fields, max |I_CR v|_1,h / |v|_1 = " << std::to_string(worst);
}

double velocity_norm(const Triangulation& mesh, const ManufacturedCase& c, Reconstruction mode, double nu) {
  StokesProblem pr;
  pr.mesh = &mesh;
  pr.nu = nu;
  pr.forcing = c.f_rest;
  pr.potential = c.f_potential;
  pr.mode = mode;
  const auto sol = solve(assemble_constrained(pr));
  return broken_h1_norm(FieldFunction(Space::crouzeix_raviart(mesh), sol.velocity));
}

void criterion_3(Outcome& o) {
  const double nu = 1e-3;
  const auto m2 = build_shishkin_2d(32, 0.5);
  const std::vector<double> z = shishkin_points(8, 0.5);
  const auto m3 = build_tensor_3d(z, z, z);
  for (const Triangulation* mesh : {&m2, &m3}) {
    const auto c = case_no_flow(mesh->dim(), nu);
    const double cr = velocity_norm(*mesh, c, Reconstruction::kNone, nu);
    const double rt = velocity_norm(*mesh, c, Reconstruction::kRaviartThomas, nu);
    const double bdm = velocity_norm(*mesh, c, Reconstruction::kBdm, nu);
    const std::string tag = std::to_string(mesh->dim()) + "D";
    o.require(rt <= 1e-9 && bdm <= 1e-9, tag + " reconstructed |u_h|_1,h <= 1e-9");
    o.require(cr >= 1e3 * std::max({rt, bdm, 1e-9}), tag + " cr |u_h|_1,h >= 1e3 x reconstructed");
    o.detail << tag << " (" << mesh->num_elements() << " elements): cr " << num(cr) << ", cr-rt " << num(rt)
             << ", cr-bdm " << num(bdm) << "; ";
  }
}

void criterion_4(Outcome& o) {
  double worst = 0.0;
  for (int n : {16, 64}) {
    ExperimentConfig c;
    c.case_name = "bl2d";
    c.epsilon = 1e-2;
    const auto mesh = make_mesh(c, n);
    for (auto mode : {Reconstruction::kRaviartThomas, Reconstruction::kBdm}) {
      c.method = mode;
      c.nu = 1.0;
      const auto a = solve_level(c, mesh, make_case(c), 0, n).solution.velocity;
      c.nu = 1e-3;
      const auto b = solve_level(c, mesh, make_case(c), 0, n).solution.velocity;
      worst = std::max(worst, (a - b).norm() / a.norm());
    }
  }
  o.require(worst <= 1e-8, "relative velocity difference <= 1e-8");
  o.detail << "bl2d eps=1e-2, N in {16, 64}, cr-rt and cr-bdm: max relative difference nu=1 vs nu=1e-3 "
           << num(worst);
}

ConvergenceRecord run_bl2d(const std::string& method, const std::string& mesh) {
  ExperimentConfig c;
  set_option(c, "case", "bl2d");
  set_option(c, "method", method);
  set_option(c, "epsilon", "1e-2");
  set_option(c, "mesh", mesh);
  set_option(c, "levels", "4 8 16 32 64");
  c.out = "acceptance_bl2d_" + method + "_" + mesh + ".csv";
  std::ostringstream log;
  return run_experiment(c, log);
}

const std::map<std::string, ConvergenceRecord>& bl2d_runs() {
  static const std::map<std::string, ConvergenceRecord> runs = [] {
    std::map<std::string, ConvergenceRecord> r;
    for (const char* m : {"cr", "cr-rt", "cr-bdm"}) r[m] = run_bl2d(m, "shishkin");
    r["uniform"] = run_bl2d("cr-bdm", "uniform");
    return r;
  }();
  return runs;
}

void criterion_5(Outcome& o) {
  const auto& bdm = bl2d_runs().at("cr-bdm");
  const auto h1 = rates(bdm, &ErrorNorms::h1_u), l2 = rates(bdm, &ErrorNorms::l2_u),
             pp = rates(bdm, &ErrorNorms::l2_pi_p);
  o.require(median(h1) >= 0.85 && median(h1) <= 1.15, "median H1 EOC in [0.85, 1.15]");
  o.require(median(l2) >= 1.8 && median(l2) <= 2.2, "median L2 EOC in [1.8, 2.2]");
  o.require(median(pp) >= 0.85, "median pressure EOC >= 0.85");
  const auto uni = rates(bl2d_runs().at("uniform"), &ErrorNorms::h1_u);
  o.require(uni.size() >= 2 && std::min(uni[0], uni[1]) < 0.7, "uniform coarse H1 EOC < 0.7");
  o.detail << "shishkin cr-bdm EOC H1 [" << list(h1) << "] median " << num(median(h1)) << "; L2 [" << list(l2)
           << "] median " << num(median(l2)) << "; pi_h p [" << list(pp) << "] median " << num(median(pp))
           << "; uniform H1 [" << list(uni) << "]";
}

void criterion_6(Outcome& o) {
  const auto& runs = bl2d_runs();
  const auto& cr = runs.at("cr").levels;
  const auto& rt = runs.at("cr-rt").levels;
  const auto& bdm = runs.at("cr-bdm").levels;
  double worst_vs_cr = 0.0, worst_pair = 1.0;
  for (std::size_t k = 0; k < cr.size(); ++k)
    for (auto member : {&ErrorNorms::h1_u, &ErrorNorms::l2_u}) {
      const double c = cr[k].errors.*member, r = rt[k].errors.*member, b = bdm[k].errors.*member;
      worst_vs_cr = std::max({worst_vs_cr, r / c, b / c});
      worst_pair = std::max(worst_pair, std::max(r, b) / std::min(r, b));
    }
  o.require(worst_vs_cr < 1.0, "reconstructed velocity errors below cr at every level");
  o.require(worst_pair <= 2.0, "cr-rt vs cr-bdm within a factor 2");
  o.detail << "max error ratio reconstructed/cr " << num(worst_vs_cr) << ", max cr-rt/cr-bdm factor "
           << num(worst_pair);
}

void criterion_7(Outcome& o) {
  const double lambda = solve_lambda(1.5 * kPi);
  auto config = [](double mu, Reconstruction mode, double nu) {
    ExperimentConfig c;
    c.case_name = "edge3d";
    c.mu = mu;
    c.method = mode;
    c.nu = nu;
    return c;
  };
  struct Series {
    ExperimentConfig config;
    ConvergenceRecord record;
  };
  auto sweep = [](std::vector<Series>& runs, const std::vector<double>& levels) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto mesh = make_mesh(runs.front().config, levels[k]);
      for (auto& s : runs)
        s.record.levels.push_back(solve_level(s.config, mesh, make_case(s.config), int(k), levels[k]).result);
    }
  };
  std::vector<Series> uniform{{config(1.0, Reconstruction::kBdm, 1.0), {}}};
  sweep(uniform, {0.5, 0.35, 0.25, 0.18, 0.125});
  std::vector<Series> graded{{config(0.4, Reconstruction::kBdm, 1.0), {}},
                             {config(0.4, Reconstruction::kBdm, 0.1), {}},
                             {config(0.4, Reconstruction::kRaviartThomas, 1.0), {}},
                             {config(0.4, Reconstruction::kRaviartThomas, 0.1), {}}};
  sweep(graded, {0.25, 0.18, 0.125, 0.09, 0.0625});

  const auto r1 = rates(uniform[0].record, &ErrorNorms::h1_u);
  const auto r4 = rates(graded[0].record, &ErrorNorms::h1_u);
  o.require(std::abs(median(r1) - lambda) <= 0.15, "mu=1 EOC in [lambda-0.15, lambda+0.15]");
  o.require(median(r4) >= 0.85 && median(r4) <= 1.15, "mu=0.4 EOC in [0.85, 1.15]");
  double worst = 0.0;
  for (int pair : {0, 2})
    for (std::size_t k = 0; k < graded[pair].record.levels.size(); ++k)
      for (auto member : {&ErrorNorms::h1_u, &ErrorNorms::l2_u}) {
        const double a = graded[pair].record.levels[k].errors.*member;
        const double b = graded[pair + 1].record.levels[k].errors.*member;
        worst = std::max(worst, std::abs(a - b) / a);
      }
  o.require(worst <= 1e-6, "nu=0.1 velocity errors match nu=1 to 1e-6");
  o.detail << "lambda " << num(lambda) << "; mu=1 EOC [" << list(r1) << "] median " << num(median(r1))
           << "; mu=0.4 EOC [" << list(r4) << "] median " << num(median(r4)) << " (max "
           << graded[0].record.levels.back().n_elem << " elements); max relative velocity error change nu=1 vs 0.1 "
           << num(worst);
}

void criterion_8(Outcome& o) {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  int solves = 0;
  for (const auto& mesh : testing::mac_mesh_pool(8, 88)) {
    const int d = mesh.dim();
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = u(rng);
    g(d - 1, d - 1) -= g.trace();
    Vec c(d);
    for (int i = 0; i < d; ++i) c(i) = u(rng);
    const auto lin = case_linear(g, c, 1.0);
    const auto exact = interpolate_cr(Space::crouzeix_raviart(mesh), lin.u).coefficients();
    for (auto mode : {Reconstruction::kNone, Reconstruction::kRaviartThomas, Reconstruction::kBdm}) {
      StokesProblem pr;
      pr.mesh = &mesh;
      pr.forcing = lin.f;
      pr.dirichlet = lin.g;
      pr.mode = mode;
      const auto sol = solve(assemble_constrained(pr));
      worst = std::max(worst, (sol.velocity - exact).lpNorm<Eigen::Infinity>());
      ++solves;
    }
  }
  o.require(worst <= 1e-10, "max nodal velocity error <= 1e-10");
  o.detail << solves << " solves on 8 anisotropic meshes, max velocity dof error " << num(worst);
}

void criterion_9(Outcome& o) {
  double sigma_err = 0.0;
  for (double eps : {1e-2, 1e-3})
    for (int n : {4, 8, 16, 32, 64}) {
      const double tau = shishkin_tau(eps);
      const double closed = shishkin_aspect_ratio(tau);
      sigma_err = std::max(sigma_err, std::abs(build_shishkin_2d(n, tau).max_aspect_ratio() - closed) / closed);
    }
  o.require(sigma_err <= 1e-12, "Shishkin sigma matches closed form to 1e-12");
  int wedge_tets = 0, mac_fail = 0;
  double widest = 0.0;
  for (double mu : {0.4, 1.0})
    for (double h : {0.5, 0.25, 0.125}) {
      const auto mesh = build_graded_wedge_3d(h, mu, 1.5 * kPi);
      const auto q = audit_mesh(mesh, 170.0 * kPi / 180.0, 0.1);
      wedge_tets += mesh.num_elements();
      mac_fail += q.mac_failures();
      widest = std::max(widest, q.max_angle);
    }
  o.require(mac_fail == 0, "graded wedge tetrahedra pass MAC(170)");
  auto v3 = [](double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
  };
  auto prism = [&](double height) {
    return std::array<Vec, 6>{v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, height), v3(1, 0, height),
                              v3(0, 1, height)};
  };
  const auto pattern = prism_split_pattern();
  o.require(pattern[0] == std::array<int, 4>{0, 1, 2, 5} && pattern[1] == std::array<int, 4>{0, 3, 4, 5} &&
                pattern[2] == std::array<int, 4>{0, 1, 4, 5},
            "prism split pattern");
  std::string rvp;
  for (double height : {100.0, 1.0, 0.01}) {
    const auto p = prism(height);
    const auto tets = subdivide_prism(p);
    rvp += " height " + num(height) + ":";
    for (int k = 0; k < 3; ++k) {
      const double det = regular_vertex(tets[k]).determinant;
      rvp += " " + num(det);
      const bool expect_fail = height > 10.0 && k == 2;
      o.require((det < 0.1) == expect_fail, "RVP(0.1) pattern for height " + num(height) + " tet " + std::to_string(k));
    }
  }
  o.detail << "Shishkin sigma relative error " << num(sigma_err) << "; " << wedge_tets << " wedge tets, max angle "
           << num(widest * 180.0 / kPi) << " deg, MAC failures " << mac_fail << "; prism RVP constants" << rvp;
}

struct Criterion {
  const char* name;
  double budget;  // seconds
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> all{
      {1, {"commutativity", 30, criterion_1}},   {2, {"Fortin bound", 60, criterion_2}},
      {3, {"no-flow robustness", 60, criterion_3}}, {4, {"nu-independence", 60, criterion_4}},
      {5, {"2D convergence", 300, criterion_5}},  {6, {"2D robustness comparison", 300, criterion_6}},
      {7, {"3D singular-edge convergence", 900, criterion_7}}, {8, {"patch test", 10, criterion_8}},
      {9, {"mesh audits", 30, criterion_9}}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, c] : all) selected.push_back(k);
  bool ok = true;
  for (int k : selected) {
    const auto it = all.find(k);
    if (it == all.end()) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second.run(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << " [error: " << ex.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds <= it->second.budget, "runtime budget " + num(it->second.budget) + " s");
    std::cout << "criterion " << k << " (" << it->second.name << "): " << (o.pass ? "PASS" : "FAIL") << " "
              << o.detail.str() << " [" << num(seconds) << " s]" << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}

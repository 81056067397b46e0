#include "aniso/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace aniso {

namespace {

void write_field(std::ostream& os, const VtkField& f, std::size_t count) {
  if (f.values.size() != count * static_cast<std::size_t>(f.components))
    throw InvalidArgument("write_vtk: field '" + f.name + "' has wrong length");
  if (f.components == 1) {
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) os << v << "\n";
    return;
  }
  if (f.components > 3) throw InvalidArgument("write_vtk: at most three components supported");
  os << "VECTORS " << f.name << " double\n";
  for (std::size_t i = 0; i < count; ++i) {
    for (int c = 0; c < 3; ++c) {
      os << (c < f.components ? f.values[i * f.components + c] : 0.0) << (c < 2 ? " " : "\n");
    }
  }
}

int cell_type(int dim) { return dim == 2 ? 5 : 10; }

}  // namespace

void write_vtk(std::ostream& os, const Triangulation& mesh, const std::vector<VtkField>& cell_data,
               const std::vector<VtkField>& point_data) {
  const int d = mesh.dim();
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_elements();
  os << std::setprecision(17);
  os << "# vtk DataFile Version 2.0\naniso-stokes mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v) {
    const Vec& p = mesh.vertex(v);
    os << p(0) << " " << p(1) << " " << (d == 3 ? p(2) : 0.0) << "\n";
  }
  os << "CELLS " << ne << " " << ne * (d + 2) << "\n";
  for (int e = 0; e < ne; ++e) {
    os << d + 1;
    for (int v : mesh.element(e)) os << " " << v;
    os << "\n";
  }
  os << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) os << cell_type(d) << "\n";
  if (!cell_data.empty()) {
    os << "CELL_DATA " << ne << "\n";
    for (const auto& f : cell_data) write_field(os, f, ne);
  }
  if (!point_data.empty()) {
    os << "POINT_DATA " << nv << "\n";
    for (const auto& f : point_data) write_field(os, f, nv);
  }
}

void write_vtk(const std::string& path, const Triangulation& mesh, const std::vector<VtkField>& cell_data,
               const std::vector<VtkField>& point_data) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("write_vtk: cannot open " + path);
  write_vtk(os, mesh, cell_data, point_data);
}

void write_vtk_discontinuous(std::ostream& os, const Triangulation& mesh,
                             const std::vector<VtkField>& corner_data) {
  const int d = mesh.dim();
  const int ne = mesh.num_elements();
  const int np = ne * (d + 1);
  os << std::setprecision(17);
  os << "# vtk DataFile Version 2.0\naniso-stokes elementwise-linear fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << np << " double\n";
  for (int e = 0; e < ne; ++e)
    for (int v : mesh.element(e)) {
      const Vec& p = mesh.vertex(v);
      os << p(0) << " " << p(1) << " " << (d == 3 ? p(2) : 0.0) << "\n";
    }
  os << "CELLS " << ne << " " << ne * (d + 2) << "\n";
  for (int e = 0; e < ne; ++e) {
    os << d + 1;
    for (int k = 0; k <= d; ++k) os << " " << e * (d + 1) + k;
    os << "\n";
  }
  os << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) os << cell_type(d) << "\n";
  if (!corner_data.empty()) {
    os << "POINT_DATA " << np << "\n";
    for (const auto& f : corner_data) write_field(os, f, np);
  }
}

}  // namespace aniso

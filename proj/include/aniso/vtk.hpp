#pragma once

#include "aniso/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aniso {

/// A named field attached to cells or points; `values` holds
/// `components` entries per cell/point.
struct VtkField {
  std::string name;
  int components = 1;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid (cell types 5 and 10). Vector fields
/// with fewer than three components are padded with zeros.
void write_vtk(std::ostream& os, const Triangulation& mesh, const std::vector<VtkField>& cell_data,
               const std::vector<VtkField>& point_data = {});
void write_vtk(const std::string& path, const Triangulation& mesh, const std::vector<VtkField>& cell_data,
               const std::vector<VtkField>& point_data = {});

/// Writes every element with its own copy of the vertices so that
/// elementwise-linear fields (given per element and local vertex in
/// `corner_data`, (dim+1)*components values per element) are represented
/// exactly.
void write_vtk_discontinuous(std::ostream& os, const Triangulation& mesh,
                             const std::vector<VtkField>& corner_data);

}  // namespace aniso

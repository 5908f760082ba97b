#pragma once

#include <string>
#include <string_view>

#include "symcomp/mesh.hpp"

namespace symcomp {

/// Text mesh format, version 1:
///
///   symcomp-mesh v1
///   manifold <plane|sphere|cone> <kappa> <fraction>
///   vertices <N>          then N lines "x y" (plane, cone) or "x y z" (sphere)
///   triangles <M>         then M lines "i j k", 0-based, counterclockwise
///   boundary <K>          then K lines "a b beta", a closed directed chain
///
/// Reals are written with 17 significant digits so a round trip is exact.
std::string export_mesh(const Mesh& mesh, const BoundaryField& beta);

struct ImportedMesh {
  MeshPtr mesh;
  BoundaryField beta;
};

/// Parses the text format. Errors are MeshError with the line number and
/// the offending record. The mesh size h is set to the longest edge.
ImportedMesh import_mesh(std::string_view text);

void write_mesh_file(const std::string& path, const Mesh& mesh, const BoundaryField& beta);
ImportedMesh read_mesh_file(const std::string& path);

}  // namespace symcomp

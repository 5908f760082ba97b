#include "symcomp/mesh_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace symcomp {

namespace {

void append_real(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty line split into tokens; false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      tokens.clear();
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError("mesh file line " + std::to_string(line_no_) + ": " + what);
  }

  void expect_line(std::vector<std::string_view>& tokens, const std::string& what) {
    if (!next(tokens)) throw MeshError("mesh file ended early: expected " + what);
  }

  double real(std::string_view tok, const std::string& what) const {
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(x))
      fail("bad number '" + std::string(tok) + "' in " + what);
    return x;
  }

  long integer(std::string_view tok, const std::string& what) const {
    long x = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      fail("bad integer '" + std::string(tok) + "' in " + what);
    return x;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

}  // namespace

std::string export_mesh(const Mesh& mesh, const BoundaryField& beta) {
  beta.validate(mesh);
  const Manifold& m = mesh.manifold();
  const bool sphere = m.kind() == ManifoldKind::sphere;
  std::string out = "symcomp-mesh v1\nmanifold ";
  out += to_string(m.kind());
  out += ' ';
  append_real(out, m.kappa());
  out += ' ';
  append_real(out, m.cone_fraction());
  out += "\nvertices " + std::to_string(mesh.vertex_count()) + "\n";
  for (const Vec3& p : mesh.vertices()) {
    append_real(out, p.x);
    out += ' ';
    append_real(out, p.y);
    if (sphere) {
      out += ' ';
      append_real(out, p.z);
    }
    out += '\n';
  }
  out += "triangles " + std::to_string(mesh.triangle_count()) + "\n";
  for (const auto& t : mesh.triangles())
    out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
  out += "boundary " + std::to_string(mesh.boundary().size()) + "\n";
  for (std::size_t e = 0; e < mesh.boundary().size(); ++e) {
    out += std::to_string(mesh.boundary()[e][0]) + ' ' + std::to_string(mesh.boundary()[e][1]) + ' ';
    append_real(out, beta.values[e]);
    out += '\n';
  }
  return out;
}

ImportedMesh import_mesh(std::string_view text) {
  LineReader in(text);
  std::vector<std::string_view> tok;

  in.expect_line(tok, "header");
  if (tok.size() != 2 || tok[0] != "symcomp-mesh" || tok[1] != "v1") in.fail("expected header 'symcomp-mesh v1'");

  in.expect_line(tok, "manifold record");
  if (tok.size() != 4 || tok[0] != "manifold") in.fail("expected 'manifold <kind> <kappa> <fraction>'");
  Manifold manifold = Manifold::plane(2);
  try {
    manifold = Manifold::make(manifold_kind_from_string(std::string(tok[1])), in.real(tok[2], "manifold kappa"),
                              in.real(tok[3], "manifold fraction"), 2);
  } catch (const std::invalid_argument& e) {
    in.fail(std::string("invalid manifold: ") + e.what());
  }
  const bool sphere = manifold.kind() == ManifoldKind::sphere;

  auto section = [&](const char* name) {
    in.expect_line(tok, std::string(name) + " record");
    if (tok.size() != 2 || tok[0] != name) in.fail(std::string("expected '") + name + " <count>'");
    const long n = in.integer(tok[1], std::string(name) + " count");
    if (n < 0) in.fail(std::string("negative ") + name + " count");
    return static_cast<std::size_t>(n);
  };

  const std::size_t nv = section("vertices");
  std::vector<Vec3> vertices(nv);
  const std::size_t width = sphere ? 3 : 2;
  for (std::size_t i = 0; i < nv; ++i) {
    const std::string rec = "vertex record " + std::to_string(i);
    in.expect_line(tok, rec);
    if (tok.size() != width) in.fail(rec + ": expected " + std::to_string(width) + " coordinates");
    vertices[i].x = in.real(tok[0], rec);
    vertices[i].y = in.real(tok[1], rec);
    if (sphere) vertices[i].z = in.real(tok[2], rec);
  }

  auto index = [&](std::string_view t, const std::string& rec) {
    const long v = in.integer(t, rec);
    if (v < 0 || static_cast<std::size_t>(v) >= nv)
      in.fail(rec + ": vertex index " + std::to_string(v) + " out of range (" + std::to_string(nv) + " vertices)");
    return static_cast<int>(v);
  };

  const std::size_t nt = section("triangles");
  std::vector<std::array<int, 3>> triangles(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const std::string rec = "triangle record " + std::to_string(i);
    in.expect_line(tok, rec);
    if (tok.size() != 3) in.fail(rec + ": expected 3 vertex indices");
    for (int k = 0; k < 3; ++k) triangles[i][k] = index(tok[k], rec);
  }

  const std::size_t nb = section("boundary");
  std::vector<std::array<int, 2>> boundary(nb);
  BoundaryField beta;
  beta.values.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::string rec = "boundary record " + std::to_string(i);
    in.expect_line(tok, rec);
    if (tok.size() != 3) in.fail(rec + ": expected 'a b beta'");
    boundary[i] = {index(tok[0], rec), index(tok[1], rec)};
    beta.values[i] = in.real(tok[2], rec);
    if (!(beta.values[i] > 0.0)) in.fail(rec + ": beta must be positive");
  }
  if (in.next(tok)) in.fail("unexpected trailing content");

  double h = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) h = std::max(h, norm(vertices[t[(k + 1) % 3]] - vertices[t[k]]));
  if (!(h > 0.0)) h = 1.0;

  ImportedMesh out;
  out.mesh = std::make_shared<const Mesh>(manifold, std::move(vertices), std::move(triangles), std::move(boundary), h);
  out.beta = std::move(beta);
  return out;
}

void write_mesh_file(const std::string& path, const Mesh& mesh, const BoundaryField& beta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << export_mesh(mesh, beta);
  if (!os) throw std::runtime_error("error writing " + path);
}

ImportedMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return import_mesh(ss.str());
}

}  // namespace symcomp

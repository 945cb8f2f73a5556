#include "ddf/io/mesh_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "binary.hpp"

namespace ddf::io {
namespace {

[[noreturn]] void obj_error(std::size_t line, const std::string& msg) {
  throw std::runtime_error("OBJ line " + std::to_string(line) + ": " + msg);
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// Resolves one `f` token ("7", "7/1", "7//3", "-1") to a 0-based index.
std::uint32_t face_index(const std::string& token, std::size_t vertex_count, std::size_t line) {
  const std::string head = token.substr(0, token.find('/'));
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    obj_error(line, "bad face index '" + token + "'");
  }
  if (value == 0) obj_error(line, "OBJ indices are 1-based");
  const long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    obj_error(line, "face index " + std::to_string(value) + " out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

ObjLoadResult read_obj(std::istream& in, bool normalize) {
  ObjLoadResult result;
  TriangleMesh& mesh = result.mesh;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    std::istringstream ls(text);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) obj_error(line_no, "vertex needs three coordinates");
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        obj_error(line_no, "vertex is not finite");
      }
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::uint32_t> idx;
      std::string token;
      while (ls >> token) idx.push_back(face_index(token, mesh.vertices.size(), line_no));
      if (idx.size() < 3) obj_error(line_no, "face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  if (mesh.faces.empty()) throw std::runtime_error("OBJ: mesh has no faces");
  if (normalize) {
    const auto [lo, hi] = mesh.bounds();
    result.center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo).maxCoeff();
    if (!(half > 0.0)) throw std::runtime_error("OBJ: mesh has zero extent");
    result.scale = 0.9 / half;
    for (auto& v : mesh.vertices) v = (v - result.center) * result.scale;
  }
  return result;
}

ObjLoadResult load_obj(const std::string& path, bool normalize) {
  auto in = open_in(path);
  return read_obj(in, normalize);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
  auto out = open_out(path);
  write_obj(out, mesh);
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat ascii 1.0\n";
  out << "comment mm_per_unit " << std::setprecision(17) << cloud.mm_per_unit << '\n';
  out << "element vertex " << cloud.size() << '\n';
  out << "property float x\nproperty float y\nproperty float z\nend_header\n";
  out << std::setprecision(9);
  for (const auto& p : cloud.points) {
    out << static_cast<float>(p.x()) << ' ' << static_cast<float>(p.y()) << ' '
        << static_cast<float>(p.z()) << '\n';
  }
}

void save_ply(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_ply(out, cloud);
}

PointCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") throw std::runtime_error("PLY: missing magic");
  PointCloud cloud;
  std::string format;
  std::size_t count = 0;
  bool in_vertex = false;
  std::vector<std::string> props;  // type per vertex property
  int ix = -1, iy = -1, iz = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      ls >> format;
    } else if (tag == "comment") {
      std::string key;
      if (ls >> key && key == "mm_per_unit") ls >> cloud.mm_per_unit;
    } else if (tag == "element") {
      std::string name;
      ls >> name;
      in_vertex = name == "vertex";
      if (in_vertex) ls >> count;
    } else if (tag == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      if (type == "list") throw std::runtime_error("PLY: list properties on vertices unsupported");
      if (name == "x") ix = static_cast<int>(props.size());
      if (name == "y") iy = static_cast<int>(props.size());
      if (name == "z") iz = static_cast<int>(props.size());
      props.push_back(type);
    }
  }
  if (ix < 0 || iy < 0 || iz < 0) throw std::runtime_error("PLY: vertex x/y/z properties missing");
  cloud.points.reserve(count);
  if (format == "ascii") {
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("PLY: truncated at vertex " + std::to_string(i));
      std::istringstream ls(line);
      std::vector<double> values(props.size());
      for (std::size_t k = 0; k < props.size(); ++k) {
        if (!(ls >> values[k])) throw std::runtime_error("PLY: bad vertex " + std::to_string(i));
        // Declared single precision: round as a binary reader would.
        if (props[k] == "float" || props[k] == "float32") values[k] = static_cast<float>(values[k]);
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
    }
  } else if (format == "binary_little_endian") {
    detail::Reader r(in, "PLY");
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> values(props.size());
      for (std::size_t k = 0; k < props.size(); ++k) {
        const auto& t = props[k];
        if (t == "float" || t == "float32") values[k] = r.get<float>("vertex");
        else if (t == "double" || t == "float64") values[k] = r.get<double>("vertex");
        else if (t == "uchar" || t == "uint8") values[k] = r.get<std::uint8_t>("vertex");
        else if (t == "int" || t == "int32") values[k] = r.get<std::int32_t>("vertex");
        else throw std::runtime_error("PLY: unsupported property type " + t);
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
    }
  } else {
    throw std::runtime_error("PLY: unsupported format '" + format + "'");
  }
  cloud.validate();
  return cloud;
}

PointCloud load_ply(const std::string& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_ply(in);
}

}  // namespace ddf::io

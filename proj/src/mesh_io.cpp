#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "seggrasp/error.hpp"
#include "seggrasp/mesh.hpp"

namespace seggrasp {

namespace {

struct PolygonSoup {
  std::vector<Vec3> vertices;
  std::vector<std::array<long long, 3>> triangles;
};

TriMesh build_mesh(const PolygonSoup& soup, const std::filesystem::path& path) {
  VertexMatrix v(static_cast<Eigen::Index>(soup.vertices.size()), 3);
  for (std::size_t i = 0; i < soup.vertices.size(); ++i) v.row(i) = soup.vertices[i].transpose();
  FaceMatrix f(static_cast<Eigen::Index>(soup.triangles.size()), 3);
  const auto nv = static_cast<long long>(soup.vertices.size());
  for (std::size_t i = 0; i < soup.triangles.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const long long idx = soup.triangles[i][c];
      if (idx < 0 || idx >= nv) {
        throw Error(ErrorKind::IndexOutOfRange, path.string() + ": face " + std::to_string(i) +
                                                    " references vertex " + std::to_string(idx) + " of " +
                                                    std::to_string(nv));
      }
      f(static_cast<Eigen::Index>(i), c) = static_cast<int>(idx);
    }
  }
  TriMesh mesh(std::move(v), std::move(f));
  if (mesh.is_degenerate()) throw Error(ErrorKind::DegenerateMesh, path.string() + ": zero total area");
  return mesh;
}

void fan_triangulate(const std::vector<long long>& polygon, PolygonSoup& soup) {
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    soup.triangles.push_back({polygon[0], polygon[k], polygon[k + 1]});
  }
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + msg);
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());

  PolygonSoup soup;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) parse_error(path, line_no, "bad vertex record");
      soup.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<long long> polygon;
      std::string token;
      while (ls >> token) {
        // v, v/vt, v//vn, v/vt/vn
        const std::string head = token.substr(0, token.find('/'));
        long long idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoll(head, &used);
          if (used != head.size()) parse_error(path, line_no, "bad face index '" + token + "'");
        } catch (const std::logic_error&) {
          parse_error(path, line_no, "bad face index '" + token + "'");
        }
        if (idx == 0) parse_error(path, line_no, "face index 0 is invalid in OBJ");
        // Negative indices are relative to the current vertex count.
        polygon.push_back(idx > 0 ? idx - 1 : static_cast<long long>(soup.vertices.size()) + idx);
      }
      if (polygon.size() < 3) parse_error(path, line_no, "face with fewer than 3 vertices");
      fan_triangulate(polygon, soup);
    }
  }
  return build_mesh(soup, path);
}

enum class PlyEncoding { Ascii, BinaryLittle, BinaryBig };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<PlyProperty> properties;
};

int ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  return 0;
}

class PlyBinaryReader {
 public:
  PlyBinaryReader(std::istream& in, bool big_endian, const std::filesystem::path& path)
      : in_(in), swap_(big_endian != (std::endian::native == std::endian::big)), path_(path) {}

  double read(const std::string& type) {
    const int size = ply_type_size(type);
    unsigned char buf[8];
    if (!in_.read(reinterpret_cast<char*>(buf), size)) {
      throw Error(ErrorKind::Parse, path_.string() + ": truncated binary PLY body");
    }
    if (swap_) std::reverse(buf, buf + size);
    if (type == "char" || type == "int8") return static_cast<std::int8_t>(buf[0]);
    if (type == "uchar" || type == "uint8") return buf[0];
    if (type == "short" || type == "int16") return as<std::int16_t>(buf);
    if (type == "ushort" || type == "uint16") return as<std::uint16_t>(buf);
    if (type == "int" || type == "int32") return as<std::int32_t>(buf);
    if (type == "uint" || type == "uint32") return as<std::uint32_t>(buf);
    if (type == "float" || type == "float32") return as<float>(buf);
    return as<double>(buf);
  }

 private:
  template <typename T>
  static double as(const unsigned char* buf) {
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return static_cast<double>(value);
  }

  std::istream& in_;
  bool swap_;
  const std::filesystem::path& path_;
};

TriMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw Error(ErrorKind::Parse, path.string() + ": missing 'ply' magic");

  PlyEncoding encoding = PlyEncoding::Ascii;
  std::vector<PlyElement> elements;
  bool saw_format = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string enc;
      ls >> enc;
      if (enc == "ascii") encoding = PlyEncoding::Ascii;
      else if (enc == "binary_little_endian") encoding = PlyEncoding::BinaryLittle;
      else if (enc == "binary_big_endian") encoding = PlyEncoding::BinaryBig;
      else throw Error(ErrorKind::Parse, path.string() + ": unknown PLY format " + enc);
      saw_format = true;
    } else if (keyword == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count) || e.count < 0) throw Error(ErrorKind::Parse, path.string() + ": bad element line");
      elements.push_back(e);
    } else if (keyword == "property") {
      if (elements.empty()) throw Error(ErrorKind::Parse, path.string() + ": property before element");
      PlyProperty p;
      std::string first;
      ls >> first;
      if (first == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
        if (ply_type_size(p.count_type) == 0) throw Error(ErrorKind::Parse, path.string() + ": bad list count type");
      } else {
        p.type = first;
        ls >> p.name;
      }
      if (ply_type_size(p.type) == 0) throw Error(ErrorKind::Parse, path.string() + ": bad property type " + p.type);
      elements.back().properties.push_back(p);
    } else if (keyword == "end_header") {
      break;
    } else if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) {
      continue;
    } else {
      throw Error(ErrorKind::Parse, path.string() + ": unexpected header line '" + line + "'");
    }
  }
  if (!saw_format) throw Error(ErrorKind::Parse, path.string() + ": missing format line");

  PolygonSoup soup;
  PlyBinaryReader binary(in, encoding == PlyEncoding::BinaryBig, path);
  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    int xyz[3] = {-1, -1, -1};
    int list_index = -1;
    for (std::size_t k = 0; k < element.properties.size(); ++k) {
      const auto& p = element.properties[k];
      if (p.name == "x") xyz[0] = static_cast<int>(k);
      if (p.name == "y") xyz[1] = static_cast<int>(k);
      if (p.name == "z") xyz[2] = static_cast<int>(k);
      if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) list_index = static_cast<int>(k);
    }
    if (is_vertex && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)) {
      throw Error(ErrorKind::Parse, path.string() + ": vertex element lacks x/y/z");
    }
    if (is_face && list_index < 0) throw Error(ErrorKind::Parse, path.string() + ": face element lacks vertex_indices");

    for (long long r = 0; r < element.count; ++r) {
      std::vector<double> scalars(element.properties.size(), 0.0);
      std::vector<long long> polygon;
      if (encoding == PlyEncoding::Ascii) {
        if (!std::getline(in, line)) throw Error(ErrorKind::Parse, path.string() + ": truncated ASCII PLY body");
        std::istringstream ls(line);
        for (std::size_t k = 0; k < element.properties.size(); ++k) {
          const auto& p = element.properties[k];
          if (p.is_list) {
            long long n = 0;
            if (!(ls >> n) || n < 0) throw Error(ErrorKind::Parse, path.string() + ": bad list length");
            for (long long j = 0; j < n; ++j) {
              double value = 0;
              if (!(ls >> value)) throw Error(ErrorKind::Parse, path.string() + ": bad list entry");
              if (static_cast<int>(k) == list_index) polygon.push_back(static_cast<long long>(value));
            }
          } else if (!(ls >> scalars[k])) {
            throw Error(ErrorKind::Parse, path.string() + ": bad scalar in " + element.name);
          }
        }
      } else {
        for (std::size_t k = 0; k < element.properties.size(); ++k) {
          const auto& p = element.properties[k];
          if (p.is_list) {
            const auto n = static_cast<long long>(binary.read(p.count_type));
            for (long long j = 0; j < n; ++j) {
              const double value = binary.read(p.type);
              if (static_cast<int>(k) == list_index) polygon.push_back(static_cast<long long>(value));
            }
          } else {
            scalars[k] = binary.read(p.type);
          }
        }
      }
      if (is_vertex) {
        soup.vertices.emplace_back(scalars[xyz[0]], scalars[xyz[1]], scalars[xyz[2]]);
      } else if (is_face) {
        if (polygon.size() < 3) throw Error(ErrorKind::Parse, path.string() + ": face with fewer than 3 vertices");
        fan_triangulate(polygon, soup);
      }
    }
  }
  return build_mesh(soup, path);
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::Parse, "file not found: " + path.string());
  return format == MeshFormat::Obj ? load_obj(path) : load_ply(path);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return load_mesh(path, MeshFormat::Obj);
  if (ext == ".ply") return load_mesh(path, MeshFormat::Ply);
  throw Error(ErrorKind::Parse, "unrecognized mesh extension '" + ext + "' (expected .obj or .ply)");
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << std::setprecision(17);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    out << "v " << mesh.vertices()(v, 0) << ' ' << mesh.vertices()(v, 1) << ' ' << mesh.vertices()(v, 2) << '\n';
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    out << "f " << mesh.faces()(f, 0) + 1 << ' ' << mesh.faces()(f, 1) + 1 << ' ' << mesh.faces()(f, 2) + 1 << '\n';
  }
}

void save_colored_ply(const TriMesh& mesh, std::span<const Rgb> face_colors, const std::filesystem::path& path) {
  if (static_cast<int>(face_colors.size()) != mesh.face_count()) {
    throw Error(ErrorKind::LengthMismatch, "face color count does not match face count");
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << mesh.vertex_count() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.face_count() << "\n"
      << "property list uchar int vertex_indices\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  out << std::setprecision(17);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    out << mesh.vertices()(v, 0) << ' ' << mesh.vertices()(v, 1) << ' ' << mesh.vertices()(v, 2) << '\n';
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Rgb& c = face_colors[f];
    out << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2) << ' '
        << int{c[0]} << ' ' << int{c[1]} << ' ' << int{c[2]} << '\n';
  }
}

}  // namespace seggrasp

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "bemalg/errors.hpp"
#include "bemalg/mesh.hpp"

namespace bemalg {

namespace {

constexpr int msh_triangle = 2;

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : in_(path), path_(path.string()) {
    if (!in_) throw MeshFormatError("cannot open mesh file '" + path_ + "'");
  }

  std::string next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return line;
    }
    fail("unexpected end of file");
  }

  void expect(const std::string& token) {
    const std::string line = next();
    if (line.substr(0, line.find_last_not_of(" \t") + 1) != token)
      fail("expected '" + token + "', found '" + line + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshFormatError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  int line_no() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string path_;
  int line_no_ = 0;
};

// Splits a line into whitespace-separated tokens.
std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line, i, j - i);
    i = j;
  }
  return out;
}

template <typename T>
T parse(std::string_view s, const LineReader& reader) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    reader.fail("cannot parse number '" + std::string(s) + "'");
  return value;
}

void write_double(std::ostream& out, double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.write(buf, ptr - buf);
}

}  // namespace

MeshPtr load_msh(const std::filesystem::path& path) {
  LineReader reader(path);
  reader.expect("$MeshFormat");
  {
    const auto fmt = tokens(reader.next());
    if (fmt.size() < 3) reader.fail("malformed $MeshFormat header");
    if (fmt[0] != "2.2") reader.fail("unsupported MSH version '" + std::string(fmt[0]) + "'");
    if (fmt[1] != "0") reader.fail("binary MSH files are not supported");
  }
  reader.expect("$EndMeshFormat");

  // Skip optional sections until $Nodes.
  std::string line = reader.next();
  while (line.rfind("$Nodes", 0) != 0) {
    if (line.rfind("$Elements", 0) == 0) reader.fail("$Elements before $Nodes");
    line = reader.next();
  }

  const long node_count = parse<long>(tokens(reader.next()).at(0), reader);
  if (node_count < 0) reader.fail("negative node count");
  std::vector<Vec3> nodes;
  nodes.reserve(node_count);
  std::unordered_map<long, int> node_index;
  for (long i = 0; i < node_count; ++i) {
    const auto t = tokens(reader.next());
    if (t.size() != 4) reader.fail("node line needs an id and three coordinates");
    const long id = parse<long>(t[0], reader);
    if (!node_index.emplace(id, static_cast<int>(i)).second)
      reader.fail("duplicate node id " + std::to_string(id));
    nodes.emplace_back(parse<double>(t[1], reader), parse<double>(t[2], reader),
                       parse<double>(t[3], reader));
  }
  reader.expect("$EndNodes");
  reader.expect("$Elements");

  const long element_count = parse<long>(tokens(reader.next()).at(0), reader);
  if (element_count < 0) reader.fail("negative element count");
  std::vector<Triangle> triangles;
  triangles.reserve(element_count);
  for (long i = 0; i < element_count; ++i) {
    const auto t = tokens(reader.next());
    if (t.size() < 3) reader.fail("malformed element line");
    const int type = parse<int>(t[1], reader);
    if (type != msh_triangle)
      throw UnsupportedElementError(path.string() + ":" + std::to_string(reader.line_no()) +
                                    ": element type " + std::to_string(type) +
                                    " is not supported; only 3-node triangles (type 2) are");
    const int tag_count = parse<int>(t[2], reader);
    if (tag_count < 0 || t.size() != static_cast<std::size_t>(3 + tag_count + 3))
      reader.fail("triangle element must list exactly three nodes");
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      const long id = parse<long>(t[3 + tag_count + k], reader);
      const auto it = node_index.find(id);
      if (it == node_index.end()) reader.fail("element references unknown node " + std::to_string(id));
      tri[k] = it->second;
    }
    triangles.push_back(tri);
  }
  reader.expect("$EndElements");

  // Drop nodes not referenced by any triangle, keeping file order.
  std::vector<int> used(nodes.size(), -1);
  for (const auto& tri : triangles)
    for (int v : tri) used[v] = 0;
  std::vector<Vec3> vertices;
  vertices.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (used[i] == 0) {
      used[i] = static_cast<int>(vertices.size());
      vertices.push_back(nodes[i]);
    }
  for (auto& tri : triangles)
    for (int& v : tri) v = used[v];

  return SurfaceMesh::create(std::move(vertices), std::move(triangles));
}

void save_msh(const SurfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshFormatError("cannot write mesh file '" + path.string() + "'");
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.vertex_count() << '\n';
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& p = mesh.vertex(static_cast<int>(i));
    out << i + 1;
    for (int d = 0; d < 3; ++d) {
      out << ' ';
      write_double(out, p[d]);
    }
    out << '\n';
  }
  out << "$EndNodes\n$Elements\n" << mesh.element_count() << '\n';
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Triangle& t = mesh.triangle(static_cast<int>(e));
    out << e + 1 << ' ' << msh_triangle << " 2 1 1 " << t[0] + 1 << ' ' << t[1] + 1 << ' '
        << t[2] + 1 << '\n';
  }
  out << "$EndElements\n";
  if (!out) throw MeshFormatError("failed writing mesh file '" + path.string() + "'");
}

}  // namespace bemalg

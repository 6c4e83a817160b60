#include "curvex/field_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace curvex {

namespace {

const char* mode_name(GridMode m) {
  switch (m) {
    case GridMode::Planar: return "planar";
    case GridMode::Volume: return "volume";
    default: return "lifted";
  }
}

GridMode mode_from(const std::string& s) {
  if (s == "planar") return GridMode::Planar;
  if (s == "volume") return GridMode::Volume;
  if (s == "lifted") return GridMode::Lifted;
  throw config_error("unknown grid mode tag: " + s);
}

std::size_t expected_count(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= std::size_t(d);
  return n;
}

std::string with_suffix(const std::string& base, const std::string& suffix) {
  auto dot = base.rfind('.');
  auto slash = base.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + suffix;
  return base.substr(0, dot) + suffix + base.substr(dot);
}

GridShape shape_from_header(const std::vector<int>& dims, GridMode mode,
                            const std::string& tag) {
  // Recover node dims from possibly staggered component dims.
  std::vector<int> nd = dims;
  if (tag.rfind("edge", 0) == 0) {
    int axis = tag[4] - '0';
    if (axis < 0 || axis >= int(nd.size()))
      throw config_error("bad edge component tag: " + tag);
    if (!(mode == GridMode::Lifted && axis == 2)) nd[axis] += 1;
  }
  if (nd.size() == 2) return GridShape::planar(nd[0], nd[1]);
  if (mode == GridMode::Lifted) return GridShape::lifted(nd[0], nd[1], nd[2]);
  return GridShape::volume(nd[0], nd[1], nd[2]);
}

}  // namespace

FieldComponent component_of(const NodeField& f) {
  FieldComponent c;
  c.mode = f.shape.mode();
  for (int a = 0; a < f.shape.axes(); ++a) c.dims.push_back(f.shape.dim(a));
  c.tag = "node";
  c.data = f.v;
  return c;
}

FieldComponent component_of(const EdgeField& f, int axis) {
  FieldComponent c;
  c.mode = f.shape.mode();
  for (int a = 0; a < f.shape.axes(); ++a)
    c.dims.push_back(a == axis ? f.shape.edge_dim(a) : f.shape.dim(a));
  c.tag = "edge" + std::to_string(axis);
  c.data = f.comp[axis];
  return c;
}

void write_component_text(const std::string& path, const FieldComponent& c) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path + " for writing");
  os << "CFLD " << c.dims.size();
  for (int d : c.dims) os << ' ' << d;
  os << ' ' << c.tag;
  if (c.mode == GridMode::Lifted) os << " periodic:theta";
  os << '\n';
  os.precision(17);
  for (std::size_t n = 0; n < c.data.size(); ++n)
    os << c.data[n] << ((n + 1) % 8 == 0 ? '\n' : ' ');
  os << '\n';
}

FieldComponent read_component_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open " + path);
  std::string magic;
  is >> magic;
  if (magic != "CFLD") throw config_error(path + ": not a CFLD file");
  int ndim = 0;
  is >> ndim;
  if (ndim < 2 || ndim > 3) throw config_error(path + ": bad rank");
  FieldComponent c;
  c.dims.resize(ndim);
  for (int& d : c.dims) is >> d;
  is >> c.tag;
  c.mode = ndim == 2 ? GridMode::Planar : GridMode::Volume;
  // optional periodic token on the rest of the header line
  std::string rest;
  std::getline(is, rest);
  if (rest.find("periodic:theta") != std::string::npos) c.mode = GridMode::Lifted;
  c.data.resize(expected_count(c.dims));
  for (double& v : c.data)
    if (!(is >> v)) throw config_error(path + ": truncated data");
  return c;
}

void write_component_binary(const std::string& path, const FieldComponent& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("cannot open " + path + " for writing");
  static_assert(sizeof(double) == 8);
  os.write(reinterpret_cast<const char*>(c.data.data()),
           std::streamsize(c.data.size() * sizeof(double)));
  nlohmann::json j{{"dims", c.dims}, {"component", c.tag},
                   {"mode", mode_name(c.mode)}};
  std::ofstream(path + ".json") << j.dump(1) << "\n";
}

FieldComponent read_component_binary(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw config_error("missing sidecar " + path + ".json");
  nlohmann::json j;
  js >> j;
  FieldComponent c;
  c.dims = j.at("dims").get<std::vector<int>>();
  c.tag = j.at("component").get<std::string>();
  c.mode = mode_from(j.at("mode").get<std::string>());
  c.data.resize(expected_count(c.dims));
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("cannot open " + path);
  is.read(reinterpret_cast<char*>(c.data.data()),
          std::streamsize(c.data.size() * sizeof(double)));
  if (std::size_t(is.gcount()) != c.data.size() * sizeof(double))
    throw config_error(path + ": truncated data");
  return c;
}

void dump_node_field(const std::string& path, const NodeField& f, bool binary) {
  auto c = component_of(f);
  binary ? write_component_binary(path, c) : write_component_text(path, c);
}

void dump_edge_field(const std::string& base, const EdgeField& f, bool binary) {
  for (int a = 0; a < f.shape.axes(); ++a) {
    auto c = component_of(f, a);
    std::string path = with_suffix(base, ".e" + std::to_string(a));
    binary ? write_component_binary(path, c) : write_component_text(path, c);
  }
}

NodeField load_node_field(const std::string& path, bool binary) {
  auto c = binary ? read_component_binary(path) : read_component_text(path);
  if (c.tag != "node") throw config_error(path + ": not a node component");
  NodeField f(shape_from_header(c.dims, c.mode, c.tag));
  f.v = std::move(c.data);
  return f;
}

EdgeField load_edge_field(const std::string& base, bool binary) {
  auto c0 = binary ? read_component_binary(with_suffix(base, ".e0"))
                   : read_component_text(with_suffix(base, ".e0"));
  GridShape shape = shape_from_header(c0.dims, c0.mode, c0.tag);
  EdgeField f(shape);
  f.comp[0] = std::move(c0.data);
  for (int a = 1; a < shape.axes(); ++a) {
    std::string path = with_suffix(base, ".e" + std::to_string(a));
    auto c = binary ? read_component_binary(path) : read_component_text(path);
    if (c.data.size() != f.comp[a].size())
      throw config_error(path + ": component size mismatch");
    f.comp[a] = std::move(c.data);
  }
  return f;
}

}  // namespace curvex

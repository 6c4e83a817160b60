#pragma once

#include <string>
#include <vector>

#include "curvex/grid.hpp"

namespace curvex {

/// One dumped component array: its own (possibly staggered) dims, a tag
/// ("node", "edge0".., "dual0"..), the grid mode, and the raw values in
/// storage order.
struct FieldComponent {
  std::vector<int> dims;
  std::string tag;
  GridMode mode = GridMode::Planar;
  std::vector<double> data;
};

/// Text format: header `CFLD <ndim> <dims...> <tag>` (plus a
/// `periodic:theta` token on lifted grids), then whitespace-separated
/// decimal reals in storage order.
void write_component_text(const std::string& path, const FieldComponent& c);
FieldComponent read_component_text(const std::string& path);

/// Binary variant: raw little-endian 64-bit floats, with a sidecar JSON
/// header `<path>.json` holding {dims, component, mode}. Round-trips
/// bitwise.
void write_component_binary(const std::string& path, const FieldComponent& c);
FieldComponent read_component_binary(const std::string& path);

/// Whole-field helpers; edge/dual fields fan out to one file per component
/// with `.e<axis>` / `.d<axis>` inserted before the extension.
void dump_node_field(const std::string& path, const NodeField& f, bool binary);
void dump_edge_field(const std::string& base, const EdgeField& f, bool binary);
NodeField load_node_field(const std::string& path, bool binary);
EdgeField load_edge_field(const std::string& base, bool binary);

FieldComponent component_of(const NodeField& f);
FieldComponent component_of(const EdgeField& f, int axis);

}  // namespace curvex

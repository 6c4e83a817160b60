#pragma once

#include <array>
#include <string>
#include <vector>

#include "curvex/diracs.hpp"
#include "curvex/endpoints.hpp"
#include "curvex/grid.hpp"

namespace curvex {

/// Loads a grayscale potential from an 8/16-bit PGM (P2/P5) or PNG file,
/// rescales intensities to [0,1] (min -> 0, max -> 1, so dark structures get
/// low weight) and optionally applies a Gaussian blur with reflective
/// boundary handling. Rejects constant images.
NodeField ingest_potential(const std::string& path, double blur_sigma = 0.0);

/// Raw little-endian float32 volume with a JSON sidecar `<path>.json`
/// holding {nx, ny, nz}; nx is the slowest (row) dimension, nz the fastest.
/// Same normalization/blur rules as the 2D path (blur applied per axis).
NodeField ingest_volume(const std::string& path, double blur_sigma = 0.0);

NodeField normalize_potential(NodeField f);
NodeField gaussian_blur(const NodeField& f, double sigma);

/// Renders the potential in grayscale with the node speed |Az| overlaid
/// (log-scaled, red channel), traced curves (green) and mass markers (blue
/// crosses, brighter for +1). Writes PPM or PNG depending on the extension.
void render_overlay(const std::string& path, const NodeField& g,
                    const EdgeField* planar_z,
                    const std::vector<TracedCurve>* curves,
                    const DiracSet* masses);

void write_pgm(const std::string& path, const NodeField& f);

}  // namespace curvex

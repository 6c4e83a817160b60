#include "curvex/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "curvex/ops.hpp"

namespace curvex {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// --- PGM ----------------------------------------------------------------

int pgm_next_int(std::istream& is) {
  // Skips whitespace and '#' comment lines.
  while (true) {
    int ch = is.peek();
    if (ch == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(ch)) {
      is.get();
    } else {
      break;
    }
  }
  int v;
  if (!(is >> v)) throw config_error("malformed PGM header");
  return v;
}

NodeField read_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("cannot open " + path);
  char m0 = 0, m1 = 0;
  is.get(m0);
  is.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw config_error(path + ": not a PGM file");
  const bool ascii = m1 == '2';
  int w = pgm_next_int(is);
  int h = pgm_next_int(is);
  int maxval = pgm_next_int(is);
  if (w < 2 || h < 2 || maxval <= 0 || maxval > 65535)
    throw config_error(path + ": unsupported PGM geometry");
  NodeField f(GridShape::planar(h, w));
  if (ascii) {
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        int v;
        if (!(is >> v)) throw config_error(path + ": truncated PGM");
        f.at(i, j) = double(v) / maxval;
      }
  } else {
    is.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(std::size_t(w) * bytes);
    for (int i = 0; i < h; ++i) {
      is.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
      if (std::size_t(is.gcount()) != row.size())
        throw config_error(path + ": truncated PGM");
      for (int j = 0; j < w; ++j) {
        int v = bytes == 1 ? row[j] : (row[2 * j] << 8) | row[2 * j + 1];
        f.at(i, j) = double(v) / maxval;
      }
    }
  }
  return f;
}

// --- PNG ----------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

NodeField read_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw config_error("cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw config_error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw config_error(path + ": PNG decode failed");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand(png);
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR)
    png_set_rgb_to_gray(png, 1, -1, -1);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = int(png_get_image_width(png, info));
  const int h = int(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  if (w < 2 || h < 2) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw config_error(path + ": image too small");
  }
  const int bytes = depth == 16 ? 2 : 1;
  std::vector<unsigned char> row(std::size_t(w) * bytes);
  NodeField f(GridShape::planar(h, w));
  const double maxval = depth == 16 ? 65535.0 : 255.0;
  for (int i = 0; i < h; ++i) {
    png_read_row(png, row.data(), nullptr);
    for (int j = 0; j < w; ++j) {
      int v = bytes == 1 ? row[j] : (row[2 * j] << 8) | row[2 * j + 1];
      f.at(i, j) = v / maxval;
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return f;
}

void write_png_rgb(const std::string& path, int h, int w,
                   const std::vector<unsigned char>& rgb) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw config_error("cannot open " + path + " for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw config_error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw config_error(path + ": PNG encode failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int i = 0; i < h; ++i)
    png_write_row(png, const_cast<unsigned char*>(&rgb[std::size_t(i) * w * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

NodeField normalize_potential(NodeField f) {
  double lo = f.v[0], hi = f.v[0];
  for (double v : f.v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo)
    throw config_error("potential has zero dynamic range (constant image)");
  for (double& v : f.v) v = (v - lo) / (hi - lo);
  return f;
}

NodeField gaussian_blur(const NodeField& f, double sigma) {
  if (sigma <= 0) return f;
  const int radius = std::max(1, int(std::ceil(3 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0;
  for (int t = -radius; t <= radius; ++t) {
    kernel[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
    sum += kernel[t + radius];
  }
  for (double& k : kernel) k /= sum;

  auto reflect = [](int x, int n) {
    while (x < 0 || x >= n) {
      if (x < 0) x = -x - 1;
      if (x >= n) x = 2 * n - 1 - x;
    }
    return x;
  };

  NodeField cur = f;
  const GridShape& s = f.shape;
  for (int axis = 0; axis < s.axes(); ++axis) {
    NodeField next(s);
    const int d2 = s.axes() == 3 ? s.dim(2) : 1;
    for (int i = 0; i < s.dim(0); ++i)
      for (int j = 0; j < s.dim(1); ++j)
        for (int k = 0; k < d2; ++k) {
          double acc = 0;
          for (int t = -radius; t <= radius; ++t) {
            int ii = i, jj = j, kk = k;
            if (axis == 0) ii = reflect(i + t, s.dim(0));
            if (axis == 1) jj = reflect(j + t, s.dim(1));
            if (axis == 2) kk = reflect(k + t, s.dim(2));
            acc += kernel[t + radius] * cur.at(ii, jj, kk);
          }
          next.at(i, j, k) = acc;
        }
    cur = std::move(next);
  }
  return cur;
}

NodeField ingest_potential(const std::string& path, double blur_sigma) {
  NodeField f = ends_with(path, ".png") ? read_png(path) : read_pgm(path);
  if (blur_sigma > 0) f = gaussian_blur(f, blur_sigma);
  return normalize_potential(std::move(f));
}

NodeField ingest_volume(const std::string& path, double blur_sigma) {
  std::ifstream js(path + ".json");
  if (!js) throw config_error("missing volume sidecar " + path + ".json");
  nlohmann::json j;
  js >> j;
  const int nx = j.at("nx").get<int>();
  const int ny = j.at("ny").get<int>();
  const int nz = j.at("nz").get<int>();
  NodeField f(GridShape::volume(nx, ny, nz));
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("cannot open " + path);
  std::vector<float> raw(f.v.size());
  is.read(reinterpret_cast<char*>(raw.data()),
          std::streamsize(raw.size() * sizeof(float)));
  if (std::size_t(is.gcount()) != raw.size() * sizeof(float))
    throw config_error(path + ": truncated volume");
  for (std::size_t n = 0; n < raw.size(); ++n) f.v[n] = raw[n];
  if (blur_sigma > 0) f = gaussian_blur(f, blur_sigma);
  return normalize_potential(std::move(f));
}

void write_pgm(const std::string& path, const NodeField& f) {
  if (f.shape.mode() != GridMode::Planar)
    throw config_error("write_pgm: planar fields only");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("cannot open " + path + " for writing");
  os << "P5\n" << f.shape.cols() << ' ' << f.shape.rows() << "\n255\n";
  for (double v : f.v) {
    double c = std::min(1.0, std::max(0.0, v));
    os.put(char(int(std::lround(c * 255))));
  }
}

void render_overlay(const std::string& path, const NodeField& g,
                    const EdgeField* planar_z,
                    const std::vector<TracedCurve>* curves,
                    const DiracSet* masses) {
  if (g.shape.mode() != GridMode::Planar)
    throw config_error("render_overlay: planar potentials only");
  const int h = g.shape.rows(), w = g.shape.cols();
  std::vector<unsigned char> rgb(std::size_t(h) * w * 3);
  auto px = [&](int i, int j) -> unsigned char* {
    return &rgb[(std::size_t(i) * w + j) * 3];
  };
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      auto c = (unsigned char)std::lround(
          255 * std::min(1.0, std::max(0.0, g.at(i, j))));
      px(i, j)[0] = px(i, j)[1] = px(i, j)[2] = c;
    }

  if (planar_z) {
    DualField v = average(*planar_z, AveragingMode::Averaged);
    double peak = 0;
    std::vector<double> mag(std::size_t(h) * w);
    for (std::size_t n = 0; n < mag.size(); ++n) {
      mag[n] = std::hypot(v.comp[0][n], v.comp[1][n]);
      peak = std::max(peak, mag[n]);
    }
    if (peak > 0) {
      const double denom = std::log1p(peak / (1e-3 * peak));
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
          double m = mag[g.shape.node_index(i, j)];
          if (m <= 1e-12 * peak) continue;
          double t = std::log1p(m / (1e-3 * peak)) / denom;
          auto* p = px(i, j);
          p[0] = (unsigned char)std::lround(255 * t + (1 - t) * p[0]);
          p[1] = (unsigned char)std::lround((1 - t) * p[1] * 0.6);
          p[2] = (unsigned char)std::lround((1 - t) * p[2] * 0.6);
        }
    }
  }

  if (curves)
    for (const auto& c : *curves)
      for (const auto& n : c.nodes)
        if (g.shape.in_bounds(n[0], n[1])) {
          auto* p = px(n[0], n[1]);
          p[1] = 255;
        }

  if (masses)
    for (const auto& m : *masses)
      for (int d = -1; d <= 1; ++d) {
        for (auto [ii, jj] : {std::pair{m.i + d, m.j}, std::pair{m.i, m.j + d}})
          if (g.shape.in_bounds(ii, jj)) {
            auto* p = px(ii, jj);
            p[2] = 255;
            p[0] = m.sign > 0 ? 255 : 0;
          }
      }

  if (ends_with(path, ".png")) {
    write_png_rgb(path, h, w, rgb);
  } else {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open " + path + " for writing");
    os << "P6\n" << w << ' ' << h << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()),
             std::streamsize(rgb.size()));
  }
}

}  // namespace curvex

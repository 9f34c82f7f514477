#include "udos/pipeline/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "udos/maskcore/error.hpp"
#include "udos/pipeline/image_io.hpp"

namespace udos::pipeline {

std::string_view shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kRectangle: return "rectangle";
    case ShapeKind::kEllipse: return "ellipse";
    case ShapeKind::kTriangle: return "triangle";
  }
  return "unknown";
}

void SynthConfig::validate() const {
  if (num_scenes < 0) throw InvalidArgument("num_scenes must be non-negative");
  if (height < 16 || width < 16) throw InvalidArgument("synthetic images must be at least 16x16");
  if (min_objects < 0 || max_objects < min_objects) throw InvalidArgument("need 0 <= min_objects <= max_objects");
  if (min_size < 4 || max_size < min_size || max_size > std::min(height, width)) {
    throw InvalidArgument("need 4 <= min_size <= max_size <= image extent");
  }
  if (!(part_hue_shift_min >= 0 && part_hue_shift_max >= part_hue_shift_min && part_hue_shift_max <= 180)) {
    throw InvalidArgument("need 0 <= part_hue_shift_min <= part_hue_shift_max <= 180");
  }
  if (!(noise_sigma >= 0)) throw InvalidArgument("noise_sigma must be non-negative");
  if (max_occluders < 0) throw InvalidArgument("max_occluders must be non-negative");
  if (!(occluder_width_min > 0 && occluder_width_max >= occluder_width_min)) {
    throw InvalidArgument("need 0 < occluder_width_min <= occluder_width_max");
  }
}

namespace {

struct Rgb {
  double r, g, b;
};

Rgb hsv(double h, double s, double v) {
  h = std::fmod(h + 360.0, 360.0) / 60.0;
  const double c = v * s;
  const double x = c * (1 - std::abs(std::fmod(h, 2.0) - 1));
  const double m = v - c;
  const int sector = static_cast<int>(h);
  Rgb out{0, 0, 0};
  switch (sector) {
    case 0: out = {c, x, 0}; break;
    case 1: out = {x, c, 0}; break;
    case 2: out = {0, c, x}; break;
    case 3: out = {0, x, c}; break;
    case 4: out = {x, 0, c}; break;
    default: out = {c, 0, x}; break;
  }
  return {(out.r + m) * 255, (out.g + m) * 255, (out.b + m) * 255};
}

// Shape coverage of the pixel center (x + 0.5, y + 0.5).
struct Shape {
  ShapeKind kind;
  double cx, cy;
  double a, b, theta;            // rectangle half-extents / ellipse semi-axes, rotation
  double tx[3], ty[3];           // triangle vertices

  bool covers(double px, double py) const {
    switch (kind) {
      case ShapeKind::kRectangle:
        return std::abs(px - cx) <= a && std::abs(py - cy) <= b;
      case ShapeKind::kEllipse: {
        const double dx = px - cx, dy = py - cy;
        const double u = dx * std::cos(theta) + dy * std::sin(theta);
        const double v = -dx * std::sin(theta) + dy * std::cos(theta);
        return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
      }
      case ShapeKind::kTriangle: {
        double sign = 0.0;
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3;
          const double cross = (tx[j] - tx[i]) * (py - ty[i]) - (ty[j] - ty[i]) * (px - tx[i]);
          if (cross != 0.0) {
            if (sign != 0.0 && (cross > 0) != (sign > 0)) return false;
            sign = cross;
          }
        }
        return true;
      }
    }
    return false;
  }
};

Shape random_shape(std::mt19937_64& rng, const SynthConfig& cfg, ShapeKind kind) {
  std::uniform_real_distribution<double> size(cfg.min_size, cfg.max_size);
  const double w = size(rng), h = size(rng);
  std::uniform_real_distribution<double> px(w / 2, cfg.width - w / 2), py(h / 2, cfg.height - h / 2);
  Shape s{kind, px(rng), py(rng), w / 2, h / 2, 0.0, {}, {}};
  if (kind == ShapeKind::kEllipse) {
    s.theta = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
    const double r = std::min(w, h) / 2;
    s.a = std::max(w, h) / 2;
    s.b = std::max(r, s.a * 0.45);
    // Keep the rotated ellipse inside the image.
    const double ext = s.a;
    s.cx = std::clamp(s.cx, ext, cfg.width - ext);
    s.cy = std::clamp(s.cy, ext, cfg.height - ext);
  } else if (kind == ShapeKind::kTriangle) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int attempt = 0; attempt < 20; ++attempt) {
      for (int i = 0; i < 3; ++i) {
        s.tx[i] = s.cx + u(rng) * w;
        s.ty[i] = s.cy + u(rng) * h;
      }
      const double area = std::abs((s.tx[1] - s.tx[0]) * (s.ty[2] - s.ty[0]) -
                                   (s.tx[2] - s.tx[0]) * (s.ty[1] - s.ty[0])) / 2;
      if (area >= 0.25 * w * h) break;
    }
  }
  return s;
}

}  // namespace

SynthScene generate_scene(const SynthConfig& config, int index) {
  config.validate();
  std::seed_seq seq{static_cast<uint32_t>(config.seed), static_cast<uint32_t>(config.seed >> 32),
                    static_cast<uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int h = config.height, w = config.width;

  std::vector<double> canvas(static_cast<size_t>(h) * w * 3);
  const Rgb bg0 = hsv(unit(rng) * 360, 0.1 + 0.25 * unit(rng), 0.35 + 0.4 * unit(rng));
  const Rgb bg1 = hsv(unit(rng) * 360, 0.1 + 0.25 * unit(rng), 0.35 + 0.4 * unit(rng));
  const double angle = unit(rng) * 2 * std::numbers::pi;
  const double gx = std::cos(angle), gy = std::sin(angle);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = std::clamp(0.5 + (gx * (x - w / 2.0) / w + gy * (y - h / 2.0) / h), 0.0, 1.0);
      double* p = &canvas[(static_cast<size_t>(y) * w + x) * 3];
      p[0] = bg0.r + t * (bg1.r - bg0.r);
      p[1] = bg0.g + t * (bg1.g - bg0.g);
      p[2] = bg0.b + t * (bg1.b - bg0.b);
    }
  }

  std::vector<int> owner(static_cast<size_t>(h) * w, -1);
  std::vector<ShapeKind> kinds;
  std::vector<int64_t> full_area;
  const int target = config.min_objects +
                     static_cast<int>(rng() % static_cast<uint64_t>(config.max_objects - config.min_objects + 1));
  for (int attempt = 0; attempt < target * 30 && static_cast<int>(kinds.size()) < target; ++attempt) {
    const ShapeKind kind = static_cast<ShapeKind>(rng() % 3);
    const Shape s = random_shape(rng, config, kind);
    std::vector<size_t> pix;
    int64_t overlap = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (s.covers(x + 0.5, y + 0.5)) {
          const size_t i = static_cast<size_t>(y) * w + x;
          pix.push_back(i);
          overlap += owner[i] >= 0;
        }
      }
    }
    if (pix.size() < 40 || overlap * 5 > static_cast<int64_t>(pix.size())) continue;

    const int id = static_cast<int>(kinds.size());
    kinds.push_back(kind);
    full_area.push_back(static_cast<int64_t>(pix.size()));

    const double hue = unit(rng) * 360;
    const Rgb part0 = hsv(hue, 0.55 + 0.35 * unit(rng), 0.55 + 0.35 * unit(rng));
    const double shift = (unit(rng) < 0.5 ? -1 : 1) * (config.part_hue_shift_min + (config.part_hue_shift_max - config.part_hue_shift_min) * unit(rng));
    const Rgb part1 = hsv(hue + shift, 0.55 + 0.35 * unit(rng), 0.45 + 0.45 * unit(rng));
    const double split = unit(rng) * std::numbers::pi;
    const double nx = std::cos(split), ny = std::sin(split);
    const double shade = unit(rng) * 2 * std::numbers::pi;
    const double sx = std::cos(shade), sy = std::sin(shade);
    const double extent = std::max(1.0, std::sqrt(static_cast<double>(pix.size())));
    for (size_t i : pix) {
      const double x = static_cast<double>(i % w) + 0.5 - s.cx;
      const double y = static_cast<double>(i / w) + 0.5 - s.cy;
      const Rgb& c = (x * nx + y * ny) >= 0 ? part0 : part1;
      const double light = std::clamp(1.0 + 0.15 * (x * sx + y * sy) / (extent / 2), 0.75, 1.25);
      canvas[i * 3 + 0] = c.r * light;
      canvas[i * 3 + 1] = c.g * light;
      canvas[i * 3 + 2] = c.b * light;
      owner[i] = id;
    }
  }

  const int occluders = static_cast<int>(rng() % static_cast<uint64_t>(config.max_occluders + 1));
  for (int b = 0; b < occluders; ++b) {
    const double px = unit(rng) * w, py = unit(rng) * h;
    const double dir = unit(rng) * std::numbers::pi;
    const double nx = -std::sin(dir), ny = std::cos(dir);
    const double half = (config.occluder_width_min +
                         (config.occluder_width_max - config.occluder_width_min) * unit(rng)) / 2;
    const Rgb c = hsv(unit(rng) * 360, 0.2 + 0.6 * unit(rng), 0.2 + 0.7 * unit(rng));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (std::abs((x + 0.5 - px) * nx + (y + 0.5 - py) * ny) > half) continue;
        const size_t i = static_cast<size_t>(y) * w + x;
        canvas[i * 3 + 0] = c.r;
        canvas[i * 3 + 1] = c.g;
        canvas[i * 3 + 2] = c.b;
        owner[i] = -1;
      }
    }
  }

  SynthScene scene;
  scene.image = RgbImage(h, w);
  std::normal_distribution<double> noise(0.0, config.noise_sigma);
  for (size_t i = 0; i < canvas.size(); ++i) {
    scene.image.pixels[i] = static_cast<uint8_t>(std::clamp(std::lround(canvas[i] + noise(rng)), 0L, 255L));
  }
  for (size_t k = 0; k < kinds.size(); ++k) {
    std::vector<uint8_t> dense(static_cast<size_t>(h) * w);
    for (size_t i = 0; i < dense.size(); ++i) dense[i] = owner[i] == static_cast<int>(k);
    BinaryMask mask = BinaryMask::from_dense(h, w, dense);
    if (mask.empty()) continue;
    const bool ignore = mask.area() * 2 < full_area[k];
    scene.objects.push_back({kinds[k], std::move(mask), ignore});
  }
  return scene;
}

SynthDataset write_synthetic_dataset(const std::filesystem::path& dir, const SynthConfig& config) {
  config.validate();
  std::filesystem::create_directories(dir / "images");
  SynthDataset ds;
  int64_t ann_id = 1;
  for (int i = 0; i < config.num_scenes; ++i) {
    const SynthScene scene = generate_scene(config, i);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.png", i + 1);
    write_png(dir / "images" / name, scene.image);
    const CocoImage image{i + 1, name, config.height, config.width};
    ds.all.images.push_back(image);
    ds.seen.images.push_back(image);
    ds.unseen.images.push_back(image);
    for (const auto& obj : scene.objects) {
      const CocoAnnotation ann{ann_id++, image.id, *obj.mask.tight_box(), obj.mask, obj.ignore,
                               Provenance::kGroundTruth};
      ds.all.annotations.push_back(ann);
      (is_seen(obj.kind) ? ds.seen : ds.unseen).annotations.push_back(ann);
    }
  }
  write_json_file((dir / "gt_all.json").string(), dataset_to_json(ds.all));
  write_json_file((dir / "gt_seen.json").string(), dataset_to_json(ds.seen));
  write_json_file((dir / "gt_unseen.json").string(), dataset_to_json(ds.unseen));
  return ds;
}

}  // namespace udos::pipeline

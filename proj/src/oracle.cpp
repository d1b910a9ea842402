/*
 * Copyright 2026 The multigrasp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "multigrasp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/kdtree.hpp"
#include "multigrasp/ply.hpp"
#include "multigrasp/rng.hpp"
#include "multigrasp/util.hpp"

namespace mg {

namespace {

using json = nlohmann::ordered_json;

constexpr double kRayEps = 1e-9;
constexpr double kInsideEps = 1e-9;
constexpr double kTableHalfExtent = 1.0;  // captured table square, meters
const double kHorizontalFov = deg_to_rad(54.0);

constexpr const char* kDatasetDirFormat = "multigrasp-dataset-dir-v1";

double primitive_volume(PrimitiveKind kind, const Vec3& dims) {
  switch (kind) {
    case PrimitiveKind::Box:
      return 8.0 * dims.x * dims.y * dims.z;
    case PrimitiveKind::Cylinder:
      return 2.0 * kPi * dims.x * dims.x * dims.z;
    case PrimitiveKind::Sphere:
      return (4.0 / 3.0) * kPi * dims.x * dims.x * dims.x;
  }
  return 0.0;
}

void validate_dims(PrimitiveKind kind, const Vec3& dims,
                   const std::string& what) {
  if (!dims.finite() || dims.x <= 0.0 || dims.y <= 0.0 || dims.z <= 0.0) {
    fail(ErrorCode::InvalidArgument, what + ": dimensions must be positive");
  }
  if (kind == PrimitiveKind::Cylinder && dims.y != dims.x) {
    fail(ErrorCode::InvalidArgument,
         what + ": cylinder dims must carry the radius in x and y");
  }
  if (kind == PrimitiveKind::Sphere &&
      (dims.y != dims.x || dims.z != dims.x)) {
    fail(ErrorCode::InvalidArgument,
         what + ": sphere dims must carry the radius in all components");
  }
}

// ---------------------------------------------------------------------------
// Ray intersection, primitive local frame. Rays carry unit directions; hits
// report the parameter t and the outward local-frame normal.

struct LocalHit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal;
};

bool ray_box(const Vec3& o, const Vec3& d, const Vec3& half, LocalHit* hit) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  int entry_axis = -1;
  double entry_sign = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(d[i]) < 1e-15) {
      if (std::fabs(o[i]) > half[i]) return false;
      continue;
    }
    double t1 = (-half[i] - o[i]) / d[i];
    double t2 = (half[i] - o[i]) / d[i];
    double sign = d[i] < 0.0 ? 1.0 : -1.0;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > tmin) {
      tmin = t1;
      entry_axis = i;
      entry_sign = sign;
    }
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  if (entry_axis < 0 || tmin <= kRayEps) return false;
  hit->t = tmin;
  hit->normal = Vec3{0, 0, 0};
  hit->normal[entry_axis] = entry_sign;
  return true;
}

bool ray_sphere(const Vec3& o, const Vec3& d, double radius, LocalHit* hit) {
  const double b = dot(o, d);
  const double c = dot(o, o) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return false;
  const double t = -b - std::sqrt(disc);
  if (t <= kRayEps) return false;
  hit->t = t;
  hit->normal = (o + t * d) / radius;
  return true;
}

bool ray_cylinder(const Vec3& o, const Vec3& d, double radius,
                  double half_height, LocalHit* hit) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 normal;
  const double a = d.x * d.x + d.y * d.y;
  if (a > 1e-15) {
    const double b = o.x * d.x + o.y * d.y;
    const double c = o.x * o.x + o.y * o.y - radius * radius;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / a;
      if (t > kRayEps) {
        const double z = o.z + t * d.z;
        if (std::fabs(z) <= half_height) {
          best = t;
          normal = Vec3{(o.x + t * d.x) / radius, (o.y + t * d.y) / radius, 0};
        }
      }
    }
  }
  if (std::fabs(d.z) > 1e-15) {
    for (double s : {1.0, -1.0}) {
      const double t = (s * half_height - o.z) / d.z;
      if (t <= kRayEps || t >= best) continue;
      const double x = o.x + t * d.x;
      const double y = o.y + t * d.y;
      if (x * x + y * y <= radius * radius) {
        best = t;
        normal = Vec3{0, 0, s};
      }
    }
  }
  if (!std::isfinite(best)) return false;
  hit->t = best;
  hit->normal = normal;
  return true;
}

bool ray_primitive(const PlacedPrimitive& prim, const Vec3& origin,
                   const Vec3& dir, LocalHit* world_hit) {
  const RigidTransform inv = prim.world_from_prim.inverse();
  const Vec3 o = inv.apply(origin);
  const Vec3 d = inv.rotation.rotate(dir);
  LocalHit local;
  bool ok = false;
  switch (prim.kind) {
    case PrimitiveKind::Box:
      ok = ray_box(o, d, prim.dims, &local);
      break;
    case PrimitiveKind::Cylinder:
      ok = ray_cylinder(o, d, prim.dims.x, prim.dims.z, &local);
      break;
    case PrimitiveKind::Sphere:
      ok = ray_sphere(o, d, prim.dims.x, &local);
      break;
  }
  if (!ok) return false;
  world_hit->t = local.t;
  world_hit->normal = prim.world_from_prim.rotation.rotate(local.normal);
  return true;
}

// ---------------------------------------------------------------------------
// Surface sampling, primitive local frame.

int grid_count(double half, double pitch) {
  return std::max(2, static_cast<int>(std::lround(2.0 * half / pitch)) + 1);
}

double grid_value(int i, int n, double half) {
  // Endpoints must land on +-half bitwise: faces of a box meet at edges,
  // and coincident edge samples have to be byte-identical so that contact
  // resolution can recognize them as one point with two normals.
  if (i == 0) return -half;
  if (i == n - 1) return half;
  return -half + 2.0 * half * static_cast<double>(i) /
                     static_cast<double>(n - 1);
}

void append_box_samples(const Vec3& half, double pitch,
                        std::vector<Vec3>* points, std::vector<Vec3>* normals) {
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    const int nu = grid_count(half[u], pitch);
    const int nv = grid_count(half[v], pitch);
    for (double sign : {-1.0, 1.0}) {
      for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
          Vec3 p;
          p[axis] = sign * half[axis];
          p[u] = grid_value(i, nu, half[u]);
          p[v] = grid_value(j, nv, half[v]);
          Vec3 n{0, 0, 0};
          n[axis] = sign;
          points->push_back(p);
          normals->push_back(n);
        }
      }
    }
  }
}

void append_cylinder_samples(double radius, double half_height, double pitch,
                             std::vector<Vec3>* points,
                             std::vector<Vec3>* normals) {
  const int n_around =
      std::max(3, static_cast<int>(std::lround(2.0 * kPi * radius / pitch)));
  const int n_z = grid_count(half_height, pitch);
  for (int k = 0; k < n_around; ++k) {
    const double theta = 2.0 * kPi * k / n_around;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < n_z; ++i) {
      points->push_back(
          Vec3{radius * c, radius * s, grid_value(i, n_z, half_height)});
      normals->push_back(Vec3{c, s, 0});
    }
  }
  const int n_rings = std::max(1, static_cast<int>(std::lround(radius / pitch)));
  for (double sign : {-1.0, 1.0}) {
    for (int j = 0; j <= n_rings; ++j) {
      // The outer ring must coincide bitwise with the side wall rows.
      const double rho = j == n_rings ? radius : radius * j / n_rings;
      const int m =
          std::max(1, static_cast<int>(std::lround(2.0 * kPi * rho / pitch)));
      for (int k = 0; k < m; ++k) {
        const double theta = 2.0 * kPi * k / m;
        points->push_back(Vec3{rho * std::cos(theta), rho * std::sin(theta),
                               sign * half_height});
        normals->push_back(Vec3{0, 0, sign});
      }
    }
  }
}

void append_sphere_samples(double radius, double pitch,
                           std::vector<Vec3>* points,
                           std::vector<Vec3>* normals) {
  const int n_lat =
      std::max(2, static_cast<int>(std::lround(kPi * radius / pitch)) + 1);
  for (int i = 0; i < n_lat; ++i) {
    const double phi = -kPi / 2.0 + kPi * i / (n_lat - 1);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    const double rho = radius * cphi;
    const int m =
        std::max(1, static_cast<int>(std::lround(2.0 * kPi * rho / pitch)));
    for (int k = 0; k < m; ++k) {
      const double theta = 2.0 * kPi * k / m;
      const Vec3 n{cphi * std::cos(theta), cphi * std::sin(theta), sphi};
      points->push_back(n * radius);
      normals->push_back(n);
    }
  }
}

bool strictly_inside(const PlacedPrimitive& prim, const Vec3& world_point) {
  const Vec3 p = prim.world_from_prim.inverse().apply(world_point);
  switch (prim.kind) {
    case PrimitiveKind::Box:
      return std::fabs(p.x) < prim.dims.x - kInsideEps &&
             std::fabs(p.y) < prim.dims.y - kInsideEps &&
             std::fabs(p.z) < prim.dims.z - kInsideEps;
    case PrimitiveKind::Cylinder: {
      const double r = prim.dims.x - kInsideEps;
      return p.x * p.x + p.y * p.y < r * r &&
             std::fabs(p.z) < prim.dims.z - kInsideEps;
    }
    case PrimitiveKind::Sphere: {
      const double r = prim.dims.x - kInsideEps;
      return p.norm2() < r * r;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// 2D convex hull (monotone chain) and point-to-hull distance for the
// retention test.

struct P2 {
  double x = 0.0, y = 0.0;
};

double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const P2& a, const P2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<P2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

double dist_point_segment(const P2& p, const P2& a, const P2& b) {
  const double abx = b.x - a.x;
  const double aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double dx = p.x - (a.x + t * abx);
  const double dy = p.y - (a.y + t * aby);
  return std::sqrt(dx * dx + dy * dy);
}

double dist_to_hull(const std::vector<P2>& hull, const P2& p) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) {
    return std::hypot(p.x - hull[0].x, p.y - hull[0].y);
  }
  if (hull.size() >= 3) {
    bool inside = true;
    for (size_t i = 0; i < hull.size(); ++i) {
      const P2& a = hull[i];
      const P2& b = hull[(i + 1) % hull.size()];
      if (cross2(a, b, p) < 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < hull.size(); ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % hull.size()];
    best = std::min(best, dist_point_segment(p, a, b));
    if (hull.size() == 2) break;  // one segment, not a loop
  }
  return best;
}

// ---------------------------------------------------------------------------
// Catalog construction helpers. Shape frames have their origin at the
// bottom center, so primitive centers are lifted by their own extent.

Shape box_shape(const std::string& id, const Vec3& half, double mass,
                SizeClass cls) {
  Shape s;
  s.id = id;
  s.mass_kg = mass;
  s.size_class = cls;
  s.parts.push_back(Primitive{PrimitiveKind::Box, Vec3{0, 0, half.z},
                              Quatern::identity(), half});
  return s;
}

Shape cylinder_shape(const std::string& id, double radius, double half_height,
                     double mass, SizeClass cls) {
  Shape s;
  s.id = id;
  s.mass_kg = mass;
  s.size_class = cls;
  s.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, half_height},
                              Quatern::identity(),
                              Vec3{radius, radius, half_height}});
  return s;
}

Shape sphere_shape(const std::string& id, double radius, double mass,
                   SizeClass cls) {
  Shape s;
  s.id = id;
  s.mass_kg = mass;
  s.size_class = cls;
  s.parts.push_back(Primitive{PrimitiveKind::Sphere, Vec3{0, 0, radius},
                              Quatern::identity(),
                              Vec3{radius, radius, radius}});
  return s;
}

uint64_t sub_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
  return Rng(base, (a << 42) ^ (b << 21) ^ c).next_u64();
}

}  // namespace

const char* size_class_name(SizeClass size_class) {
  switch (size_class) {
    case SizeClass::Small:
      return "small";
    case SizeClass::Medium:
      return "medium";
    case SizeClass::Large:
      return "large";
  }
  return "?";
}

const char* failure_class_name(FailureClass failure) {
  switch (failure) {
    case FailureClass::None:
      return "none";
    case FailureClass::Collision:
      return "collision";
    case FailureClass::MultiObject:
      return "multi_object";
    case FailureClass::Contact:
      return "contact";
    case FailureClass::Antipodal:
      return "antipodal";
    case FailureClass::GripMismatch:
      return "grip_mismatch";
    case FailureClass::Retention:
      return "retention";
    case FailureClass::Capacity:
      return "capacity";
  }
  return "?";
}

void Shape::validate() const {
  if (id.empty()) fail(ErrorCode::InvalidArgument, "shape id must not be empty");
  if (parts.empty()) {
    fail(ErrorCode::InvalidArgument,
         "shape '" + id + "' must have at least one primitive");
  }
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) {
    fail(ErrorCode::InvalidArgument,
         "shape '" + id + "': mass must be positive");
  }
  for (const Primitive& prim : parts) {
    validate_dims(prim.kind, prim.dims, "shape '" + id + "'");
    if (!prim.center.finite() || !prim.rotation.finite() ||
        std::fabs(prim.rotation.norm() - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument,
           "shape '" + id + "': primitive pose is not finite and unit");
    }
  }
}

const Shape* ShapeSet::find(const std::string& id) const {
  for (const Shape& s : shapes) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

void ShapeSet::validate() const {
  std::set<std::string> seen;
  for (const Shape& s : shapes) {
    s.validate();
    if (!seen.insert(s.id).second) {
      fail(ErrorCode::InvalidArgument, "duplicate shape id '" + s.id + "'");
    }
  }
}

ShapeSet builtin_catalog() {
  ShapeSet set;
  auto& v = set.shapes;

  // Small: within a pincher span, light.
  v.push_back(box_shape("small_cube", Vec3{0.025, 0.025, 0.025}, 0.12,
                        SizeClass::Small));
  v.push_back(sphere_shape("small_ball", 0.025, 0.10, SizeClass::Small));
  v.push_back(
      cylinder_shape("small_puck", 0.027, 0.014, 0.15, SizeClass::Small));
  v.push_back(box_shape("small_bar", Vec3{0.0075, 0.0275, 0.0075}, 0.05,
                        SizeClass::Small));
  v.push_back(
      cylinder_shape("small_can", 0.024, 0.0275, 0.08, SizeClass::Small));
  {
    Shape knob;
    knob.id = "small_knob";
    knob.mass_kg = 0.07;
    knob.size_class = SizeClass::Small;
    knob.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.01},
                                   Quatern::identity(),
                                   Vec3{0.009, 0.009, 0.01}});
    knob.parts.push_back(Primitive{PrimitiveKind::Sphere, Vec3{0, 0, 0.035},
                                   Quatern::identity(),
                                   Vec3{0.02, 0.02, 0.02}});
    v.push_back(knob);
  }

  // Medium: hand-sized household proportions.
  v.push_back(
      box_shape("med_box", Vec3{0.035, 0.035, 0.05}, 0.45, SizeClass::Medium));
  v.push_back(cylinder_shape("med_can", 0.033, 0.06, 0.40, SizeClass::Medium));
  v.push_back(sphere_shape("med_ball", 0.035, 0.30, SizeClass::Medium));
  v.push_back(box_shape("med_flat_box", Vec3{0.05, 0.035, 0.02}, 0.35,
                        SizeClass::Medium));
  v.push_back(
      cylinder_shape("med_tall_can", 0.0275, 0.055, 0.30, SizeClass::Medium));
  {
    Shape bottle;
    bottle.id = "med_bottle";
    bottle.mass_kg = 0.50;
    bottle.size_class = SizeClass::Medium;
    bottle.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.04},
                                     Quatern::identity(),
                                     Vec3{0.032, 0.032, 0.04}});
    bottle.parts.push_back(Primitive{PrimitiveKind::Cylinder,
                                     Vec3{0, 0, 0.0975}, Quatern::identity(),
                                     Vec3{0.013, 0.013, 0.0225}});
    v.push_back(bottle);
  }
  {
    Shape mug;
    mug.id = "med_mug";
    mug.mass_kg = 0.42;
    mug.size_class = SizeClass::Medium;
    mug.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.045},
                                  Quatern::identity(),
                                  Vec3{0.04, 0.04, 0.045}});
    mug.parts.push_back(Primitive{PrimitiveKind::Box, Vec3{0.0475, 0, 0.045},
                                  Quatern::identity(),
                                  Vec3{0.0125, 0.005, 0.03}});
    v.push_back(mug);
  }
  v.push_back(box_shape("med_block", Vec3{0.032, 0.048, 0.032}, 0.55,
                        SizeClass::Medium));
  {
    Shape dome;
    dome.id = "med_dome";
    dome.mass_kg = 0.60;
    dome.size_class = SizeClass::Medium;
    dome.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.025},
                                   Quatern::identity(),
                                   Vec3{0.04, 0.04, 0.025}});
    dome.parts.push_back(Primitive{PrimitiveKind::Sphere, Vec3{0, 0, 0.045},
                                   Quatern::identity(),
                                   Vec3{0.04, 0.04, 0.04}});
    v.push_back(dome);
  }
  v.push_back(
      box_shape("med_bar", Vec3{0.055, 0.025, 0.025}, 0.38, SizeClass::Medium));
  {
    // A cylinder lying on its side, resting on the table.
    Shape roll;
    roll.id = "med_roll";
    roll.mass_kg = 0.33;
    roll.size_class = SizeClass::Medium;
    roll.parts.push_back(
        Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.03},
                  Quatern::from_axis_angle(Vec3{1, 0, 0}, kPi / 2.0),
                  Vec3{0.03, 0.03, 0.05}});
    v.push_back(roll);
  }
  v.push_back(
      cylinder_shape("med_tube", 0.021, 0.0525, 0.22, SizeClass::Medium));

  // Large: two-hand scale; heavy_brick and heavy_jug exceed the fingertip
  // capacities but stay within the power-grip budget.
  v.push_back(box_shape("large_tower", Vec3{0.03, 0.03, 0.125}, 1.20,
                        SizeClass::Large));
  v.push_back(
      box_shape("large_box", Vec3{0.05, 0.05, 0.07}, 1.00, SizeClass::Large));
  v.push_back(
      cylinder_shape("large_can", 0.045, 0.0775, 0.95, SizeClass::Large));
  v.push_back(sphere_shape("large_ball", 0.0675, 0.80, SizeClass::Large));
  v.push_back(box_shape("heavy_brick", Vec3{0.03, 0.0675, 0.045}, 1.90,
                        SizeClass::Large));
  {
    Shape jug;
    jug.id = "heavy_jug";
    jug.mass_kg = 2.00;
    jug.size_class = SizeClass::Large;
    jug.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.0725},
                                  Quatern::identity(),
                                  Vec3{0.03, 0.03, 0.0725}});
    jug.parts.push_back(Primitive{PrimitiveKind::Cylinder, Vec3{0, 0, 0.15},
                                  Quatern::identity(),
                                  Vec3{0.016, 0.016, 0.02}});
    v.push_back(jug);
  }

  set.validate();
  return set;
}

InstancedScene instantiate_scene(const Scene& scene, const ShapeSet& catalog) {
  catalog.validate();
  InstancedScene out;
  out.table_height = scene.table_height;
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const ObjectInstance& obj = scene.objects[i];
    const Shape* shape = catalog.find(obj.shape_id);
    if (shape == nullptr) {
      fail(ErrorCode::InvalidArgument,
           "scene references unknown shape id '" + obj.shape_id + "'");
    }
    const Vec3 s = obj.scale;
    if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0)) {
      fail(ErrorCode::NonPositiveScale,
           "scene object " + std::to_string(i) + " has a non-positive scale");
    }
    const bool uniform = s.x == s.y && s.y == s.z;
    PlacedShape placed;
    placed.shape_id = shape->id;
    placed.instance_index = static_cast<int>(i);
    placed.mass_kg = shape->mass_kg;
    placed.size_class = shape->size_class;
    double volume_sum = 0.0;
    Vec3 moment{0, 0, 0};
    for (const Primitive& prim : shape->parts) {
      const bool identity_rot = std::fabs(std::fabs(prim.rotation.w) - 1.0) <
                                1e-12;
      if (!identity_rot && !uniform) {
        fail(ErrorCode::InvalidArgument,
             "shape '" + shape->id +
                 "': anisotropic scale on a rotated primitive");
      }
      Vec3 dims;
      switch (prim.kind) {
        case PrimitiveKind::Box:
          dims = Vec3{prim.dims.x * s.x, prim.dims.y * s.y, prim.dims.z * s.z};
          break;
        case PrimitiveKind::Cylinder:
          if (s.x != s.y) {
            fail(ErrorCode::InvalidArgument,
                 "shape '" + shape->id +
                     "': cylinder scale must match in x and y");
          }
          dims = Vec3{prim.dims.x * s.x, prim.dims.y * s.x,
                      prim.dims.z * s.z};
          break;
        case PrimitiveKind::Sphere:
          if (!uniform) {
            fail(ErrorCode::InvalidArgument,
                 "shape '" + shape->id + "': sphere scale must be uniform");
          }
          dims = prim.dims * s.x;
          break;
      }
      const Vec3 center{prim.center.x * s.x, prim.center.y * s.y,
                        prim.center.z * s.z};
      PlacedPrimitive pp;
      pp.kind = prim.kind;
      pp.dims = dims;
      pp.world_from_prim =
          obj.pose.compose(RigidTransform{prim.rotation, center});
      const double volume = primitive_volume(prim.kind, dims);
      volume_sum += volume;
      moment += pp.world_from_prim.translation * volume;
      placed.parts.push_back(pp);
    }
    placed.center_of_mass = moment / volume_sum;
    out.shapes.push_back(std::move(placed));
  }
  return out;
}

PointCloud capture_views(const Scene& scene, const ShapeSet& catalog,
                         int samples_per_view, uint64_t seed) {
  if (scene.cameras.empty()) {
    fail(ErrorCode::InvalidArgument, "capture needs at least one camera");
  }
  if (scene.cameras.size() > 255) {
    fail(ErrorCode::InvalidArgument, "capture supports at most 255 cameras");
  }
  if (samples_per_view < 1) {
    fail(ErrorCode::InvalidArgument, "samples_per_view must be >= 1");
  }
  const InstancedScene inst = instantiate_scene(scene, catalog);

  const int cols = std::max(
      1, static_cast<int>(std::lround(
             std::sqrt(static_cast<double>(samples_per_view) * 4.0 / 3.0))));
  const int rows =
      std::max(1, static_cast<int>(std::lround(
                      static_cast<double>(samples_per_view) / cols)));
  const double tan_h = std::tan(kHorizontalFov / 2.0);
  const double tan_v = tan_h * rows / cols;

  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<uint8_t> tags;
  Rng rng(seed, 0x6361707475726573ULL);

  for (size_t cam_idx = 0; cam_idx < scene.cameras.size(); ++cam_idx) {
    const CameraPose& cam = scene.cameras[cam_idx];
    const Vec3 gaze = cam.look_at - cam.position;
    if (gaze.norm() < 1e-9) {
      fail(ErrorCode::InvalidArgument,
           "camera " + std::to_string(cam_idx) + " looks at its own position");
    }
    const Vec3 forward = gaze.normalized();
    Vec3 right = cross(forward, Vec3{0, 0, 1});
    if (right.norm() < 1e-9) right = cross(forward, Vec3{1, 0, 0});
    right = right.normalized();
    const Vec3 up = cross(right, forward);

    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double u = (2.0 * (c + rng.uniform()) / cols - 1.0) * tan_h;
        const double v = (2.0 * (r + rng.uniform()) / rows - 1.0) * tan_v;
        const Vec3 dir = (forward + right * u + up * v).normalized();

        double best_t = std::numeric_limits<double>::infinity();
        Vec3 best_normal;
        for (const PlacedShape& shape : inst.shapes) {
          for (const PlacedPrimitive& prim : shape.parts) {
            LocalHit hit;
            if (ray_primitive(prim, cam.position, dir, &hit) &&
                hit.t < best_t) {
              best_t = hit.t;
              best_normal = hit.normal;
            }
          }
        }
        if (std::fabs(dir.z) > 1e-15) {
          const double t = (inst.table_height - cam.position.z) / dir.z;
          if (t > kRayEps && t < best_t) {
            const Vec3 p = cam.position + dir * t;
            if (std::fabs(p.x) <= kTableHalfExtent &&
                std::fabs(p.y) <= kTableHalfExtent) {
              best_t = t;
              best_normal = Vec3{
                  0, 0, cam.position.z >= inst.table_height ? 1.0 : -1.0};
            }
          }
        }
        if (std::isfinite(best_t)) {
          points.push_back(cam.position + dir * best_t);
          normals.push_back(best_normal);
          tags.push_back(static_cast<uint8_t>(cam_idx));
        }
      }
    }
  }
  if (points.empty()) {
    fail(ErrorCode::NoVisibleSurface, "no camera ray hit a surface");
  }
  return PointCloud::make(std::move(points), std::move(normals),
                          std::move(tags));
}

ContactSurface sample_contact_surface(const InstancedScene& scene,
                                      double pitch) {
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    fail(ErrorCode::InvalidArgument, "surface pitch must be > 0");
  }
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<int> shape_ids;
  for (size_t s_idx = 0; s_idx < scene.shapes.size(); ++s_idx) {
    const PlacedShape& shape = scene.shapes[s_idx];
    for (size_t p_idx = 0; p_idx < shape.parts.size(); ++p_idx) {
      const PlacedPrimitive& prim = shape.parts[p_idx];
      std::vector<Vec3> local_points;
      std::vector<Vec3> local_normals;
      switch (prim.kind) {
        case PrimitiveKind::Box:
          append_box_samples(prim.dims, pitch, &local_points, &local_normals);
          break;
        case PrimitiveKind::Cylinder:
          append_cylinder_samples(prim.dims.x, prim.dims.z, pitch,
                                  &local_points, &local_normals);
          break;
        case PrimitiveKind::Sphere:
          append_sphere_samples(prim.dims.x, pitch, &local_points,
                                &local_normals);
          break;
      }
      for (size_t i = 0; i < local_points.size(); ++i) {
        const Vec3 world = prim.world_from_prim.apply(local_points[i]);
        bool buried = false;
        for (size_t q_idx = 0; q_idx < shape.parts.size(); ++q_idx) {
          if (q_idx == p_idx) continue;
          if (strictly_inside(shape.parts[q_idx], world)) {
            buried = true;
            break;
          }
        }
        if (buried) continue;
        points.push_back(world);
        normals.push_back(
            prim.world_from_prim.rotation.rotate(local_normals[i]));
        shape_ids.push_back(static_cast<int>(s_idx));
      }
    }
  }
  return ContactSurface::make(std::move(points), std::move(normals),
                              std::move(shape_ids), scene.table_height);
}

int nearest_shape(const ContactSurface& surface, const Vec3& point) {
  if (surface.empty()) return -1;
  const auto nearest = surface.index().knn(point, 1);
  return surface.shape_ids()[static_cast<size_t>(nearest.front())];
}

void LabelConfig::validate() const {
  if (!(antipodal_min_deg > 0.0) || antipodal_min_deg > 180.0) {
    fail(ErrorCode::InvalidArgument, "antipodal threshold must be in (0, 180]");
  }
  if (!(retention_margin >= 0.0) || !std::isfinite(retention_margin)) {
    fail(ErrorCode::InvalidArgument, "retention margin must be >= 0");
  }
  if (!(capacity_power_kg > 0.0) || !(capacity_precision_kg > 0.0) ||
      !(capacity_pincher_kg > 0.0)) {
    fail(ErrorCode::InvalidArgument, "capacities must be positive");
  }
  if (!(surface_pitch > 0.0) || !std::isfinite(surface_pitch)) {
    fail(ErrorCode::InvalidArgument, "surface pitch must be > 0");
  }
}

double LabelConfig::capacity_for(GraspType type) const {
  switch (type) {
    case GraspType::WidePower:
    case GraspType::BasicPower:
      return capacity_power_kg;
    case GraspType::WidePrecision:
    case GraspType::BasicPrecision:
      return capacity_precision_kg;
    case GraspType::Pincher:
      return capacity_pincher_kg;
  }
  return capacity_pincher_kg;
}

GraspLabel label_candidate(const GraspCandidate& candidate,
                           const InstancedScene& scene,
                           const ContactSurface& surface,
                           const GripperConfig& gripper,
                           const LabelConfig& cfg) {
  gripper.validate();
  cfg.validate();
  GraspLabel out;
  out.success.assign(kNumGraspTypes, 0);
  out.diagnostics.assign(kNumGraspTypes, TypeDiagnostic{});

  const int target = nearest_shape(surface, candidate.centroid);
  const double table = surface.table_height();
  const bool has_table = table > kNoTable * 0.5;

  for (int t_idx = 0; t_idx < kNumGraspTypes; ++t_idx) {
    const GraspType type = all_grasp_types()[static_cast<size_t>(t_idx)];
    TypeDiagnostic& diag = out.diagnostics[static_cast<size_t>(t_idx)];

    const GripperPose pose = standoff_pose(candidate, type, gripper);
    const BodySet bodies =
        body_set(pose, type, gripper, JointState::open());
    bool collision =
        !surface.empty() &&
        collides(bodies, surface.index(), gripper.collision_margin);
    if (!collision && has_table) {
      for (const TaggedBox& body : bodies.boxes) {
        if (body.tag == BodyTag::Sweep) continue;
        if (body.box.min_z() < table - 1e-9) {
          collision = true;
          break;
        }
      }
    }
    if (collision) {
      diag.failure = FailureClass::Collision;
      continue;
    }
    if (target < 0) {
      diag.failure = FailureClass::Contact;
      continue;
    }

    const ClosingReport report = close_fingers(pose, type, gripper, surface);
    const std::vector<Contact> all = report.contacts();
    bool multi_object = false;
    std::vector<Contact> on_target;
    for (const Contact& c : all) {
      if (c.shape_id == target) {
        on_target.push_back(c);
      } else if (c.shape_id != kTableShapeId) {
        multi_object = true;
      }
    }
    diag.contact_count = static_cast<int>(on_target.size());

    std::set<int> fingers;
    for (const Contact& c : on_target) fingers.insert(c.finger);

    double best_pair = 0.0;
    for (size_t i = 0; i < on_target.size(); ++i) {
      for (size_t j = i + 1; j < on_target.size(); ++j) {
        if (on_target[i].finger == on_target[j].finger) continue;
        const double d =
            std::clamp(dot(on_target[i].normal, on_target[j].normal), -1.0,
                       1.0);
        best_pair = std::max(best_pair, rad_to_deg(std::acos(d)));
      }
    }
    diag.antipodal_deg = best_pair;

    // Retention: the target's center of mass, projected onto the closing
    // plane, must sit within `retention_margin` of the contact hull.
    const Vec3 approach = candidate.approach();
    const Vec3 ex = candidate.closing();
    const Vec3 ey = cross(approach, ex);
    const PlacedShape& target_shape =
        scene.shapes[static_cast<size_t>(target)];
    std::vector<P2> projected;
    for (const Contact& c : on_target) {
      const Vec3 q = c.point - candidate.centroid;
      projected.push_back(P2{dot(q, ex), dot(q, ey)});
    }
    const Vec3 qc = target_shape.center_of_mass - candidate.centroid;
    const P2 com2d{dot(qc, ex), dot(qc, ey)};
    diag.retention_ok =
        !projected.empty() &&
        dist_to_hull(convex_hull(projected), com2d) <= cfg.retention_margin;

    if (multi_object) {
      diag.failure = FailureClass::MultiObject;
    } else if (fingers.size() < 2) {
      diag.failure = FailureClass::Contact;
    } else if (best_pair < cfg.antipodal_min_deg) {
      diag.failure = FailureClass::Antipodal;
    } else if ([&] {
                 if (grip_of(type) == GripStyle::Encompassing) {
                   for (const Contact& c : on_target) {
                     if (c.link <= 1) return false;
                   }
                   return true;  // no proximal or medial contact
                 }
                 for (const Contact& c : on_target) {
                   if (c.link != 2) return true;  // non-distal contact
                 }
                 return false;
               }()) {
      diag.failure = FailureClass::GripMismatch;
    } else if (!diag.retention_ok) {
      diag.failure = FailureClass::Retention;
    } else if (target_shape.mass_kg > cfg.capacity_for(type)) {
      diag.failure = FailureClass::Capacity;
    } else {
      diag.failure = FailureClass::None;
      out.success[static_cast<size_t>(t_idx)] = 1;
    }
  }
  return out;
}

void DatasetBuildConfig::validate() const {
  if (views_per_object < 1 || candidates_per_view < 1 ||
      samples_per_view < 1 || input_points < 1) {
    fail(ErrorCode::InvalidArgument, "dataset build counts must be >= 1");
  }
  if (min_region_points < 0) {
    fail(ErrorCode::InvalidArgument, "min_region_points must be >= 0");
  }
  if (!(frame_radius > 0.0) || !(table_removal_threshold >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "dataset build radii must be positive");
  }
  if (!(region.half_x > 0.0) || !(region.half_y > 0.0) ||
      !(region.z_max > region.z_min)) {
    fail(ErrorCode::InvalidArgument, "dataset build region is degenerate");
  }
  gripper.validate();
  label.validate();
}

Dataset build_dataset(const ShapeSet& catalog,
                      const std::vector<std::string>& object_ids,
                      const DatasetBuildConfig& cfg) {
  cfg.validate();
  catalog.validate();
  if (object_ids.size() < 2) {
    fail(ErrorCode::InvalidArgument,
         "dataset generation needs at least two objects");
  }
  const auto type_array = all_grasp_types();
  const std::vector<GraspType> types(type_array.begin(), type_array.end());
  Dataset dataset;
  dataset.n_types = kNumGraspTypes;

  for (size_t o = 0; o < object_ids.size(); ++o) {
    if (catalog.find(object_ids[o]) == nullptr) {
      fail(ErrorCode::InvalidArgument,
           "dataset references unknown shape id '" + object_ids[o] + "'");
    }
    Scene scene;
    scene.table_height = 0.0;
    scene.objects.push_back(
        ObjectInstance{object_ids[o], RigidTransform::identity(),
                       Vec3{1, 1, 1}});
    const InstancedScene inst = instantiate_scene(scene, catalog);
    const ContactSurface surface =
        sample_contact_surface(inst, cfg.label.surface_pitch);
    const Vec3 focus = inst.shapes.front().center_of_mass;

    for (int view = 0; view < cfg.views_per_object; ++view) {
      const double azimuth = 2.0 * kPi * view / cfg.views_per_object;
      const double elevation = deg_to_rad(35.0 + 10.0 * (view % 3));
      const double radius = 0.65;
      const auto camera_at = [&](double az) {
        return CameraPose{Vec3{radius * std::cos(elevation) * std::cos(az),
                               radius * std::cos(elevation) * std::sin(az),
                               radius * std::sin(elevation)},
                          focus};
      };
      scene.cameras = {camera_at(azimuth),
                       camera_at(azimuth + deg_to_rad(54.0))};

      PointCloud object_cloud;
      CandidateSet candidates;
      try {
        const PointCloud captured =
            capture_views(scene, catalog, cfg.samples_per_view,
                          sub_seed(cfg.seed, o, view, 0));
        object_cloud =
            captured.above_plane(0.0, cfg.table_removal_threshold);
        candidates = generate(object_cloud, cfg.candidates_per_view,
                              sub_seed(cfg.seed, o, view, 1),
                              {scene.cameras[0].position,
                               scene.cameras[1].position},
                              cfg.frame_radius);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoVisibleSurface ||
            e.code() == ErrorCode::InsufficientSurface ||
            e.code() == ErrorCode::EmptyCloud) {
          continue;  // a grazing view; nothing usable was seen
        }
        throw;
      }
      const SpatialIndex index = SpatialIndex::build(object_cloud);
      prune(candidates, index, cfg.gripper, types, cfg.min_region_points);

      for (size_t ci = 0; ci < candidates.candidates.size(); ++ci) {
        const GraspCandidate& cand = candidates.candidates[ci];
        const GraspLabel label =
            label_candidate(cand, inst, surface, cfg.gripper, cfg.label);
        bool all_collision = true;
        for (const TypeDiagnostic& diag : label.diagnostics) {
          if (diag.failure != FailureClass::Collision) {
            all_collision = false;
            break;
          }
        }
        if (all_collision) continue;
        LabeledExemplar ex;
        try {
          ex.encoding = encode(object_cloud, cand, cfg.region,
                               cfg.input_points,
                               sub_seed(cfg.seed, o, view, 2 + ci));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::EmptyRegion) continue;
          throw;
        }
        ex.labels = label.success;
        ex.object_id = static_cast<int>(o);
        ex.candidate = cand;
        dataset.exemplars.push_back(std::move(ex));
      }
    }
  }
  return dataset;
}

std::vector<double> positive_rates(const Dataset& dataset) {
  std::vector<double> rates(static_cast<size_t>(dataset.n_types), 0.0);
  if (dataset.exemplars.empty()) return rates;
  for (const LabeledExemplar& ex : dataset.exemplars) {
    for (size_t t = 0; t < rates.size(); ++t) {
      rates[t] += ex.labels[t];
    }
   }
  for (double& r : rates) {
    r /= static_cast<double>(dataset.exemplars.size());
  }
  return rates;
}

void save_dataset_dir(const Dataset& dataset, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "encodings");

  int input_points = 0;
  RegionBox region;
  if (!dataset.exemplars.empty()) {
    input_points =
        static_cast<int>(dataset.exemplars.front().encoding.points.size());
    region = dataset.exemplars.front().encoding.region;
  }
  json header;
  header["format"] = kDatasetDirFormat;
  header["n_types"] = dataset.n_types;
  header["input_points"] = input_points;
  header["region"] = {{"half_x", region.half_x},
                      {"half_y", region.half_y},
                      {"z_min", region.z_min},
                      {"z_max", region.z_max}};
  header["count"] = dataset.exemplars.size();
  std::string index = header.dump() + "\n";

  for (size_t i = 0; i < dataset.exemplars.size(); ++i) {
    const LabeledExemplar& ex = dataset.exemplars[i];
    if (static_cast<int>(ex.encoding.points.size()) != input_points) {
      fail(ErrorCode::ShapeMismatch,
           "dataset: exemplars disagree on encoding size");
    }
    if (static_cast<int>(ex.labels.size()) != dataset.n_types) {
      fail(ErrorCode::ShapeMismatch,
           "dataset: exemplar label count does not match n_types");
    }
    char name[40];
    std::snprintf(name, sizeof(name), "encodings/ex_%06zu.ply", i);
    std::vector<Vec3> valid(ex.encoding.points.begin(),
                            ex.encoding.points.begin() +
                                ex.encoding.valid_count);
    save_ply(PointCloud::make(std::move(valid)),
             (fs::path(dir) / name).string());

    json line;
    line["encoding"] = name;
    line["object_id"] = ex.object_id;
    line["split_tag"] = ex.split_tag;
    line["labels"] = ex.labels;
    line["candidate"] = json::parse(candidate_to_json(ex.candidate));
    index += line.dump() + "\n";
  }
  write_text_file((fs::path(dir) / "index.jsonl").string(), index);
}

Dataset load_dataset_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string text =
      read_text_file((fs::path(dir) / "index.jsonl").string());
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) {
    fail(ErrorCode::SchemaViolation, "dataset: missing index header line");
  }
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("dataset: invalid index header: ") + e.what());
  }
  if (!header.is_object() || !header.contains("format") ||
      !header["format"].is_string() ||
      header["format"].get<std::string>() != kDatasetDirFormat) {
    fail(ErrorCode::SchemaViolation,
         "dataset: missing or unsupported index format marker");
  }
  const auto int_field = [](const json& v, const char* what) {
    if (!v.is_number_integer()) {
      fail(ErrorCode::SchemaViolation,
           std::string("dataset: ") + what + " must be an integer");
    }
    return v.get<int>();
  };
  const auto number_field = [](const json& v, const char* what) {
    if (!v.is_number()) {
      fail(ErrorCode::SchemaViolation,
           std::string("dataset: ") + what + " must be a number");
    }
    return v.get<double>();
  };

  Dataset dataset;
  dataset.n_types = int_field(header.value("n_types", json()), "n_types");
  const int input_points =
      int_field(header.value("input_points", json()), "input_points");
  if (dataset.n_types < 1 || input_points < 0) {
    fail(ErrorCode::SchemaViolation, "dataset: invalid index header sizes");
  }
  if (!header.contains("region") || !header["region"].is_object()) {
    fail(ErrorCode::SchemaViolation, "dataset: missing region");
  }
  RegionBox region;
  const json& r = header["region"];
  region.half_x = number_field(r.value("half_x", json()), "half_x");
  region.half_y = number_field(r.value("half_y", json()), "half_y");
  region.z_min = number_field(r.value("z_min", json()), "z_min");
  region.z_max = number_field(r.value("z_max", json()), "z_max");

  size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::SchemaViolation,
           "dataset: index line " + std::to_string(line_no) +
               " is not valid JSON: " + e.what());
    }
    if (!entry.is_object() || !entry.contains("encoding") ||
        !entry["encoding"].is_string()) {
      fail(ErrorCode::SchemaViolation,
           "dataset: index line " + std::to_string(line_no) +
               " must name an encoding file");
    }
    const std::string rel = entry["encoding"].get<std::string>();
    const fs::path rel_path(rel);
    if (rel_path.is_absolute() ||
        rel.find("..") != std::string::npos) {
      fail(ErrorCode::SchemaViolation,
           "dataset: encoding path must stay inside the dataset directory");
    }
    LabeledExemplar ex;
    ex.object_id = int_field(entry.value("object_id", json()), "object_id");
    if (!entry.contains("split_tag") || !entry["split_tag"].is_string()) {
      fail(ErrorCode::SchemaViolation, "dataset: split_tag must be a string");
    }
    ex.split_tag = entry["split_tag"].get<std::string>();
    if (!entry.contains("labels") || !entry["labels"].is_array() ||
        static_cast<int>(entry["labels"].size()) != dataset.n_types) {
      fail(ErrorCode::SchemaViolation,
           "dataset: labels must hold one entry per grasp type");
    }
    for (const json& v : entry["labels"]) {
      const int label = int_field(v, "label");
      if (label != 0 && label != 1) {
        fail(ErrorCode::SchemaViolation, "dataset: labels must be 0 or 1");
      }
      ex.labels.push_back(label);
    }
    if (!entry.contains("candidate")) {
      fail(ErrorCode::SchemaViolation, "dataset: missing candidate pose");
    }
    ex.candidate = candidate_from_json(entry["candidate"].dump());

    const PointCloud cloud = load_ply((fs::path(dir) / rel_path).string());
    if (static_cast<int>(cloud.size()) > input_points) {
      fail(ErrorCode::SchemaViolation,
           "dataset: encoding file holds more points than input_points");
    }
    ex.encoding.points.assign(static_cast<size_t>(input_points),
                              Vec3{0, 0, 0});
    ex.encoding.valid_count = static_cast<int>(cloud.size());
    ex.encoding.region = region;
    std::copy(cloud.points().begin(), cloud.points().end(),
              ex.encoding.points.begin());
    dataset.exemplars.push_back(std::move(ex));
  }
  return dataset;
}

}  // namespace mg

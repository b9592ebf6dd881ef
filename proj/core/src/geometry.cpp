// SPDX-License-Identifier: Apache-2.0
#include "patchforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "patchforge/constants.hpp"

namespace pf {

namespace {

constexpr double kGeomEps = 1e-9;  // mm-scale coordinate tolerance

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Squared distance from p to segment ab.
double seg_dist_sq(Vec2 p, Vec2 a, Vec2 b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double apx = p.x - a.x, apy = p.y - a.y;
  const double len_sq = abx * abx + aby * aby;
  double t = len_sq > 0.0 ? (apx * abx + apy * aby) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = apx - t * abx, dy = apy - t * aby;
  return dx * dx + dy * dy;
}

// Proper crossing: segments intersect at a single interior point of both.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > kGeomEps && d2 < -kGeomEps) || (d1 < -kGeomEps && d2 > kGeomEps)) &&
         ((d3 > kGeomEps && d4 < -kGeomEps) || (d3 < -kGeomEps && d4 > kGeomEps));
}

bool is_multiple_of(double deg, double base) {
  const double r = std::fmod(std::fmod(deg, base) + base, base);
  return r < 1e-9 || base - r < 1e-9;
}

}  // namespace

Rect Rect::united(const Rect& o) const {
  return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1),
          std::max(y1, o.y1)};
}

Polygon::Polygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  if (verts_.size() < 3) throw GeometryError("polygon needs >= 3 vertices");
  for (size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    for (size_t j = i + 1; j < verts_.size(); ++j) {
      const Vec2 c = verts_[j];
      const Vec2 d = verts_[(j + 1) % verts_.size()];
      if (segments_cross(a, b, c, d))
        throw GeometryError("polygon is self-intersecting");
    }
  }
}

Polygon Polygon::from_rect(const Rect& r) {
  return Polygon({{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}});
}

double Polygon::area() const {
  double twice = 0.0;
  for (size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

Rect Polygon::bbox() const {
  Rect r{verts_[0].x, verts_[0].y, verts_[0].x, verts_[0].y};
  for (const Vec2& v : verts_) {
    r.x0 = std::min(r.x0, v.x);
    r.y0 = std::min(r.y0, v.y);
    r.x1 = std::max(r.x1, v.x);
    r.y1 = std::max(r.y1, v.y);
  }
  return r;
}

bool Polygon::contains(Vec2 p) const {
  const double eps_sq = kGeomEps * kGeomEps;
  bool inside = false;
  for (size_t i = 0, j = verts_.size() - 1; i < verts_.size(); j = i++) {
    const Vec2 a = verts_[j];
    const Vec2 b = verts_[i];
    if (seg_dist_sq(p, a, b) < eps_sq) return true;  // on boundary
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_int = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_int) inside = !inside;
    }
  }
  return inside;
}

bool Polygon::interior_intersects(const Polygon& other) const {
  const Rect ra = bbox(), rb = other.bbox();
  if (ra.x1 <= rb.x0 + kGeomEps || rb.x1 <= ra.x0 + kGeomEps ||
      ra.y1 <= rb.y0 + kGeomEps || rb.y1 <= ra.y0 + kGeomEps)
    return false;
  const auto& va = verts_;
  const auto& vb = other.verts_;
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j)
      if (segments_cross(va[i], va[(i + 1) % va.size()], vb[j],
                         vb[(j + 1) % vb.size()]))
        return true;
  // No proper crossings: one may still contain the other. Probe with a
  // point slightly inside a vertex (centroid of a corner wedge).
  auto inner_probe = [](const Polygon& poly) {
    const auto& v = poly.vertices();
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : v) {
      c.x += p.x / static_cast<double>(v.size());
      c.y += p.y / static_cast<double>(v.size());
    }
    return c;
  };
  // Centroid of a simple polygon can fall outside it; use the midpoint of
  // a diagonal fan triangle that lies inside instead.
  auto interior_point = [&](const Polygon& poly) -> Vec2 {
    const auto& v = poly.vertices();
    for (size_t i = 1; i + 1 < v.size(); ++i) {
      const Vec2 m{(v[0].x + v[i].x + v[i + 1].x) / 3.0,
                   (v[0].y + v[i].y + v[i + 1].y) / 3.0};
      if (poly.contains(m)) return m;
    }
    return inner_probe(poly);
  };
  const Vec2 pa = interior_point(*this);
  const Vec2 pb = interior_point(other);
  // Shrink test: a boundary-touching configuration must not count, so
  // require the probe to be strictly interior of the other polygon.
  auto strictly_inside = [](const Polygon& poly, Vec2 p) {
    if (!poly.contains(p)) return false;
    const double eps_sq = kGeomEps * kGeomEps * 4.0;
    const auto& v = poly.vertices();
    for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
      if (seg_dist_sq(p, v[j], v[i]) < eps_sq) return false;
    return true;
  };
  return strictly_inside(other, pa) || strictly_inside(*this, pb);
}

bool Polygon::contains_polygon(const Polygon& inner) const {
  for (const Vec2& v : inner.vertices())
    if (!contains(v)) return false;
  const auto& va = verts_;
  const auto& vb = inner.vertices();
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j)
      if (segments_cross(va[i], va[(i + 1) % va.size()], vb[j],
                         vb[(j + 1) % vb.size()]))
        return false;
  return true;
}

Polygon Polygon::rotated(double degrees, Vec2 pivot) const {
  const double rad = degrees * pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  std::vector<Vec2> out;
  out.reserve(verts_.size());
  for (const Vec2& v : verts_) {
    const double dx = v.x - pivot.x, dy = v.y - pivot.y;
    out.push_back({pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy});
  }
  return Polygon(std::move(out));
}

Polygon Polygon::translated(Vec2 delta) const {
  std::vector<Vec2> out;
  out.reserve(verts_.size());
  for (const Vec2& v : verts_) out.push_back({v.x + delta.x, v.y + delta.y});
  return Polygon(std::move(out));
}

double shape_area(const Shape& s) {
  return std::visit([](const auto& v) -> double { return v.area(); }, s);
}

Rect shape_bbox(const Shape& s) {
  if (const Rect* r = std::get_if<Rect>(&s)) return *r;
  return std::get<Polygon>(s).bbox();
}

bool shape_contains(const Shape& s, Vec2 p) {
  return std::visit([p](const auto& v) { return v.contains(p); }, s);
}

Polygon shape_polygon(const Shape& s) {
  if (const Rect* r = std::get_if<Rect>(&s)) return Polygon::from_rect(*r);
  return std::get<Polygon>(s);
}

Shape shape_transformed(const Shape& s, double rot_deg, Vec2 pivot, Vec2 delta) {
  if (const Rect* r = std::get_if<Rect>(&s)) {
    if (is_multiple_of(rot_deg, 90.0)) {
      // Stay rectangular: rotate corners, re-normalize.
      const Polygon p =
          Polygon::from_rect(*r).rotated(rot_deg, pivot).translated(delta);
      const Rect b = p.bbox();
      return b;
    }
    return Polygon::from_rect(*r).rotated(rot_deg, pivot).translated(delta);
  }
  return std::get<Polygon>(s).rotated(rot_deg, pivot).translated(delta);
}

Rect Scene::bounding_box_mm() const {
  Rect box = substrate_extent_mm;
  bool have = box.valid();
  for (const Primitive& p : primitives) {
    const Rect b = shape_bbox(p.shape);
    box = have ? box.united(b) : b;
    have = true;
  }
  return box;
}

bool Scene::metal_at(Layer layer, Vec2 p_mm) const {
  bool inside = false;
  for (const Primitive& prim : primitives) {
    if (prim.layer != layer) continue;
    if (!shape_contains(prim.shape, p_mm)) continue;
    inside = (prim.op == BoolOp::Add);
  }
  return inside;
}

std::pair<double, double> Scene::dielectric_at(Vec2 p_mm) const {
  std::pair<double, double> mat{1.0, 0.0};
  if (substrate_extent_mm.valid() && substrate_extent_mm.contains(p_mm))
    mat = {substrate.relative_permittivity, substrate.loss_tangent};
  for (const Primitive& prim : primitives) {
    if (prim.layer != Layer::Substrate) continue;
    if (!shape_contains(prim.shape, p_mm)) continue;
    if (prim.op == BoolOp::Add &&
        prim.material.kind == Material::Kind::Dielectric)
      mat = {prim.material.relative_permittivity, prim.material.loss_tangent};
    else
      mat = {1.0, 0.0};
  }
  return mat;
}

double Scene::conductor_area_mm2(Layer layer) const {
  std::vector<Polygon> added;
  std::vector<Polygon> removed;
  double area = 0.0;
  for (const Primitive& prim : primitives) {
    if (prim.layer != layer) continue;
    const Polygon poly = shape_polygon(prim.shape);
    if (prim.op == BoolOp::Add) {
      for (const Polygon& other : added)
        if (poly.interior_intersects(other))
          throw GeometryError(
              "analytic conductor area requires disjoint additive primitives");
      area += poly.area();
      added.push_back(poly);
    } else {
      bool inside_one = false;
      for (const Polygon& host : added)
        if (host.contains_polygon(poly)) {
          inside_one = true;
          break;
        }
      if (!inside_one)
        throw GeometryError(
            "analytic conductor area requires each cut inside one primitive");
      for (const Polygon& other : removed)
        if (poly.interior_intersects(other))
          throw GeometryError(
              "analytic conductor area requires disjoint subtractive cuts");
      area -= poly.area();
      removed.push_back(poly);
    }
  }
  return area;
}

void Scene::note_feature(double feature_mm) {
  min_feature_mm = std::min(min_feature_mm, feature_mm);
}

void Scene::expand_substrate_to_fit(const Rect& r) {
  substrate_extent_mm =
      substrate_extent_mm.valid() ? substrate_extent_mm.united(r) : r;
}

void Scene::validate() const {
  substrate.validate();
  if (!substrate_extent_mm.valid())
    throw GeometryError("scene has no substrate extent");
  const Rect box = bounding_box_mm();
  for (const Primitive& p : primitives) {
    const Rect b = shape_bbox(p.shape);
    if (b.x0 < box.x0 - kGeomEps || b.x1 > box.x1 + kGeomEps ||
        b.y0 < box.y0 - kGeomEps || b.y1 > box.y1 + kGeomEps)
      throw GeometryError("primitive escapes the scene bounding box");
  }
  // Subtractive primitives must follow at least one additive one on the
  // same layer.
  for (Layer layer : {Layer::TopMetal, Layer::Substrate, Layer::GroundMetal}) {
    bool seen_add = false;
    for (const Primitive& p : primitives) {
      if (p.layer != layer) continue;
      if (p.op == BoolOp::Add) seen_add = true;
      if (p.op == BoolOp::Subtract && !seen_add)
        throw GeometryError("subtractive primitive precedes any material");
    }
  }
}

// ----- Builders ---------------------------------------------------------

void TSlotParams::validate() const {
  if (!(arm_mm > 0.0 && slot_width_mm > 0.0 && bar_length_mm > 0.0 &&
        bar_breadth_mm > 0.0 && pair_separation_mm > 0.0))
    throw GeometryError("T-slot parameters must all be positive");
  if (slot_width_mm > bar_length_mm)
    throw GeometryError("T stem cannot be wider than its bar");
}

void FeedParams::validate() const {
  if (!(line_width_mm > 0.0 && line_length_mm > 0.0 && coplanar_gap_mm > 0.0))
    throw GeometryError("feed parameters must all be positive");
}

ElementFragment build_patch_element(double length_mm, double width_mm) {
  if (!(length_mm > 0.0 && width_mm > 0.0))
    throw GeometryError("patch element needs positive dimensions");
  ElementFragment frag;
  frag.footprint_mm = {-width_mm / 2.0, -length_mm / 2.0, width_mm / 2.0,
                       length_mm / 2.0};
  Primitive patch;
  patch.layer = Layer::TopMetal;
  patch.op = BoolOp::Add;
  patch.material.kind = Material::Kind::Pec;
  patch.shape = frag.footprint_mm;
  frag.primitives.push_back(patch);
  return frag;
}

Polygon make_t_polygon(const TSlotParams& t, double scale) {
  if (!(scale > 0.0)) throw GeometryError("T-slot scale must be positive");
  const double ta = t.arm_mm * scale;
  const double tg = t.slot_width_mm * scale;
  const double tl = t.bar_length_mm * scale;
  const double tb = t.bar_breadth_mm * scale;
  // Bar top edge on y = 0, stem descending from the bar's center.
  return Polygon({{-tl / 2.0, 0.0},
                  {tl / 2.0, 0.0},
                  {tl / 2.0, -tb},
                  {tg / 2.0, -tb},
                  {tg / 2.0, -tb - ta},
                  {-tg / 2.0, -tb - ta},
                  {-tg / 2.0, -tb},
                  {-tl / 2.0, -tb}});
}

void apply_double_t_slots(ElementFragment& element, const TSlotParams& t,
                          double top_inset_mm) {
  t.validate();
  if (element.primitives.empty())
    throw GeometryError("no patch to cut T-slots from");
  if (top_inset_mm < 0.0) throw GeometryError("T-slot inset must be >= 0");

  const Rect patch = element.footprint_mm;
  const double bar_top_y = patch.y1 - top_inset_mm;
  // Stems' inner edges sit pair_separation_mm apart, so the centers are at
  // +/-(d + t_g)/2 around the patch's vertical axis.
  const double center_off = (t.pair_separation_mm + t.slot_width_mm) / 2.0;

  const Polygon base = make_t_polygon(t);
  const Polygon left = base.translated({-center_off, bar_top_y});
  const Polygon right = base.translated({center_off, bar_top_y});

  const Polygon patch_poly = Polygon::from_rect(patch);
  for (const Polygon* p : {&left, &right})
    if (!patch_poly.contains_polygon(*p))
      throw GeometryError("T-slot extends outside the patch");
  if (left.interior_intersects(right))
    throw GeometryError("the two T-slots overlap");

  for (const Polygon* p : {&left, &right}) {
    Primitive cut;
    cut.layer = Layer::TopMetal;
    cut.op = BoolOp::Subtract;
    cut.material.kind = Material::Kind::Vacuum;
    cut.shape = *p;
    element.primitives.push_back(cut);
  }
}

namespace {

double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

Scene scene_shell(const SubstrateSpec& substrate) {
  substrate.validate();
  Scene scene;
  scene.substrate = substrate;
  return scene;
}

}  // namespace

Scene tile_array(const ElementFragment& element, const ArrayParams& a,
                 const SubstrateSpec& substrate) {
  if (a.rows < 1 || a.cols < 1)
    throw GeometryError("array needs at least one row and one column");
  if (a.col_gap_mm < 0.0 || a.row_gap_mm < 0.0)
    throw GeometryError("array gap must be >= 0");

  Scene scene = scene_shell(substrate);
  const double pitch_x = element.footprint_mm.width() + a.col_gap_mm;
  const double pitch_y = element.footprint_mm.height() + a.row_gap_mm;

  std::vector<Polygon> outlines;
  Rect array_box{};
  bool have_box = false;
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) {
      const double rot = normalize_deg(a.element_rotation_deg * (r + c));
      const Vec2 at{c * pitch_x, r * pitch_y};
      for (const Primitive& prim : element.primitives) {
        Primitive placed = prim;
        placed.shape = shape_transformed(prim.shape, rot, {0.0, 0.0}, at);
        scene.primitives.push_back(placed);
      }
      const Polygon outline = Polygon::from_rect(element.footprint_mm)
                                  .rotated(rot)
                                  .translated(at);
      for (const Polygon& other : outlines)
        if (outline.interior_intersects(other))
          throw GeometryError("array elements overlap");
      const Rect b = outline.bbox();
      array_box = have_box ? array_box.united(b) : b;
      have_box = true;
      if (r == 0 && c == (a.cols - 1) / 2) scene.feed_anchor_mm = b;
      outlines.push_back(outline);
    }
  }
  scene.array_bbox_mm = array_box;
  scene.expand_substrate_to_fit(array_box);
  scene.note_feature(std::min(element.footprint_mm.width(),
                              element.footprint_mm.height()));
  // Track the slot width as the smallest feature when slots are present.
  for (const Primitive& p : element.primitives)
    if (p.op == BoolOp::Subtract) {
      const Rect b = shape_bbox(p.shape);
      scene.note_feature(std::min(b.width(), b.height()));
    }
  return scene;
}

Scene single_element_scene(const ElementFragment& element,
                           const SubstrateSpec& substrate) {
  ArrayParams one;
  one.rows = 1;
  one.cols = 1;
  one.element_rotation_deg = 0.0;
  return tile_array(element, one, substrate);
}

void add_feed(Scene& scene, const FeedParams& f) {
  f.validate();
  if (!scene.feed_anchor_mm)
    throw GeometryError("scene has no element to attach the feed to");
  const Rect anchor = *scene.feed_anchor_mm;
  const double xc = anchor.center().x;
  Rect strip{xc - f.line_width_mm / 2.0, anchor.y0 - f.line_length_mm,
             xc + f.line_width_mm / 2.0, anchor.y0};

  // The strip may touch its attachment element but not cut into any other
  // top-layer conductor.
  const Polygon strip_poly = Polygon::from_rect(strip);
  for (const Primitive& p : scene.primitives) {
    if (p.layer != Layer::TopMetal || p.op != BoolOp::Add) continue;
    const Polygon other = shape_polygon(p.shape);
    if (strip_poly.interior_intersects(other))
      throw GeometryError("feed strip overlaps a non-attachment element");
  }

  Primitive feed;
  feed.layer = Layer::TopMetal;
  feed.op = BoolOp::Add;
  feed.material.kind = Material::Kind::Pec;
  feed.shape = strip;
  scene.primitives.push_back(feed);

  if (f.add_coplanar_grounds) {
    for (double side : {-1.0, 1.0}) {
      const double inner =
          xc + side * (f.line_width_mm / 2.0 + f.coplanar_gap_mm);
      const double outer = inner + side * f.coplanar_ground_width_mm;
      Primitive pad;
      pad.layer = Layer::TopMetal;
      pad.op = BoolOp::Add;
      pad.material.kind = Material::Kind::Pec;
      pad.shape = Rect{std::min(inner, outer), strip.y0,
                       std::max(inner, outer), strip.y1};
      scene.primitives.push_back(pad);
    }
    scene.note_feature(f.coplanar_gap_mm);
  }

  scene.expand_substrate_to_fit(strip);
  scene.note_feature(f.line_width_mm);

  PortSpec port;
  port.position_mm = {xc, strip.y0};
  port.feed_direction = {0.0, 1.0};
  scene.port = port;
}

void add_ground_plane(Scene& scene) {
  if (!scene.substrate_extent_mm.valid())
    throw GeometryError("scene has no substrate extent for a ground plane");
  Primitive sheet;
  sheet.layer = Layer::GroundMetal;
  sheet.op = BoolOp::Add;
  sheet.material.kind = Material::Kind::Pec;
  sheet.shape = scene.substrate_extent_mm;
  scene.primitives.push_back(sheet);
}

void add_ground_with_rear_slot(Scene& scene, const TSlotParams& slot,
                               double scale) {
  slot.validate();
  if (!(scale > 0.0)) throw GeometryError("rear-slot scale must be positive");
  if (!scene.substrate_extent_mm.valid())
    throw GeometryError("scene has no substrate extent for a ground plane");

  Primitive sheet;
  sheet.layer = Layer::GroundMetal;
  sheet.op = BoolOp::Add;
  sheet.material.kind = Material::Kind::Pec;
  sheet.shape = scene.substrate_extent_mm;
  scene.primitives.push_back(sheet);

  const Rect under = scene.array_bbox_mm.value_or(scene.substrate_extent_mm);
  Polygon t = make_t_polygon(slot, scale);
  const Rect tb = t.bbox();
  const Vec2 want = under.center();
  t = t.translated({want.x - tb.center().x, want.y - tb.center().y});

  const Polygon ground_poly = Polygon::from_rect(scene.substrate_extent_mm);
  if (!ground_poly.contains_polygon(t))
    throw GeometryError("rear T-slot exceeds the ground plane extent");

  Primitive cut;
  cut.layer = Layer::GroundMetal;
  cut.op = BoolOp::Subtract;
  cut.material.kind = Material::Kind::Vacuum;
  cut.shape = t;
  scene.primitives.push_back(cut);
  scene.note_feature(slot.slot_width_mm * scale);
}

// ----- JSON -------------------------------------------------------------

namespace {

using nlohmann::json;

const char* layer_name(Layer l) {
  switch (l) {
    case Layer::TopMetal: return "top_metal";
    case Layer::Substrate: return "substrate";
    case Layer::GroundMetal: return "ground_metal";
  }
  return "top_metal";
}

Layer layer_from(const std::string& s) {
  if (s == "top_metal") return Layer::TopMetal;
  if (s == "substrate") return Layer::Substrate;
  if (s == "ground_metal") return Layer::GroundMetal;
  throw GeometryError("unknown layer: " + s);
}

json rect_to_json(const Rect& r) {
  return json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

Rect rect_from_json(const json& j) {
  return Rect{j.at("x0"), j.at("y0"), j.at("x1"), j.at("y1")};
}

json shape_to_json(const Shape& s) {
  if (const Rect* r = std::get_if<Rect>(&s)) {
    json j = rect_to_json(*r);
    j["type"] = "rect";
    return j;
  }
  const Polygon& p = std::get<Polygon>(s);
  json verts = json::array();
  for (const Vec2& v : p.vertices()) verts.push_back(json::array({v.x, v.y}));
  return json{{"type", "polygon"}, {"vertices", verts}};
}

Shape shape_from_json(const json& j) {
  const std::string type = j.at("type");
  if (type == "rect") return rect_from_json(j);
  if (type == "polygon") {
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices"))
      verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return Polygon(std::move(verts));
  }
  throw GeometryError("unknown shape type: " + type);
}

json material_to_json(const Material& m) {
  switch (m.kind) {
    case Material::Kind::Pec:
      return json{{"kind", "pec"}};
    case Material::Kind::Vacuum:
      return json{{"kind", "vacuum"}};
    case Material::Kind::Dielectric:
      return json{{"kind", "dielectric"},
                  {"relative_permittivity", m.relative_permittivity},
                  {"loss_tangent", m.loss_tangent}};
  }
  return json{{"kind", "pec"}};
}

Material material_from_json(const json& j) {
  Material m;
  const std::string kind = j.at("kind");
  if (kind == "pec") {
    m.kind = Material::Kind::Pec;
  } else if (kind == "vacuum") {
    m.kind = Material::Kind::Vacuum;
  } else if (kind == "dielectric") {
    m.kind = Material::Kind::Dielectric;
    m.relative_permittivity = j.at("relative_permittivity");
    m.loss_tangent = j.value("loss_tangent", 0.0);
  } else {
    throw GeometryError("unknown material kind: " + kind);
  }
  return m;
}

}  // namespace

std::string Scene::to_json_string() const {
  json j;
  j["units"] = "mm";
  j["substrate"] = {{"relative_permittivity", substrate.relative_permittivity},
                    {"loss_tangent", substrate.loss_tangent},
                    {"height_mm", substrate.height_mm},
                    {"extent", rect_to_json(substrate_extent_mm)}};
  json prims = json::array();
  for (const Primitive& p : primitives) {
    prims.push_back({{"layer", layer_name(p.layer)},
                     {"op", p.op == BoolOp::Add ? "add" : "subtract"},
                     {"material", material_to_json(p.material)},
                     {"shape", shape_to_json(p.shape)}});
  }
  j["primitives"] = prims;
  if (port) {
    j["port"] = {{"x_mm", port->position_mm.x},
                 {"y_mm", port->position_mm.y},
                 {"impedance_ohms", port->impedance_ohms},
                 {"feed_direction",
                  json::array({port->feed_direction.x, port->feed_direction.y})}};
  }
  if (feed_anchor_mm) j["feed_anchor"] = rect_to_json(*feed_anchor_mm);
  if (array_bbox_mm) j["array_bbox"] = rect_to_json(*array_bbox_mm);
  if (min_feature_mm < 1e29) j["min_feature_mm"] = min_feature_mm;
  const Rect box = bounding_box_mm();
  j["bounding_box"] = {{"x0", box.x0}, {"y0", box.y0},
                       {"x1", box.x1}, {"y1", box.y1},
                       {"z0", 0.0},    {"z1", substrate.height_mm}};
  return j.dump(2) + "\n";
}

Scene Scene::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw GeometryError(std::string("scene JSON parse error: ") + e.what());
  }
  if (j.value("units", "mm") != std::string("mm"))
    throw GeometryError("scene units must be mm");
  Scene scene;
  const json& sub = j.at("substrate");
  scene.substrate.relative_permittivity = sub.at("relative_permittivity");
  scene.substrate.loss_tangent = sub.at("loss_tangent");
  scene.substrate.height_mm = sub.at("height_mm");
  scene.substrate_extent_mm = rect_from_json(sub.at("extent"));
  for (const auto& pj : j.at("primitives")) {
    Primitive p;
    p.layer = layer_from(pj.at("layer"));
    p.op = pj.at("op") == "add" ? BoolOp::Add : BoolOp::Subtract;
    p.material = material_from_json(pj.at("material"));
    p.shape = shape_from_json(pj.at("shape"));
    scene.primitives.push_back(std::move(p));
  }
  if (j.contains("port")) {
    PortSpec port;
    port.position_mm = {j["port"].at("x_mm"), j["port"].at("y_mm")};
    port.impedance_ohms = j["port"].value("impedance_ohms", 50.0);
    if (j["port"].contains("feed_direction")) {
      port.feed_direction = {j["port"]["feed_direction"].at(0),
                             j["port"]["feed_direction"].at(1)};
    }
    scene.port = port;
  }
  if (j.contains("feed_anchor"))
    scene.feed_anchor_mm = rect_from_json(j["feed_anchor"]);
  if (j.contains("array_bbox"))
    scene.array_bbox_mm = rect_from_json(j["array_bbox"]);
  if (j.contains("min_feature_mm"))
    scene.min_feature_mm = j["min_feature_mm"];
  scene.validate();
  return scene;
}

void Scene::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError("cannot write scene file: " + path);
  out << to_json_string();
}

Scene Scene::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot read scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

}  // namespace pf

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "patchforge/design.hpp"
#include "patchforge/errors.hpp"

namespace pf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned rectangle, x0 < x1 and y0 < y1.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  bool contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  Rect united(const Rect& o) const;
  bool valid() const { return x1 > x0 && y1 > y0; }
};

// Simple (non-self-intersecting) polygon. Vertices in consistent winding
// order; containment uses the even-odd rule and treats the boundary as
// inside.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);
  static Polygon from_rect(const Rect& r);

  const std::vector<Vec2>& vertices() const { return verts_; }
  double area() const;  // absolute shoelace area
  Rect bbox() const;
  bool contains(Vec2 p) const;
  // True when the interiors of the two polygons overlap. Shared boundary
  // segments or vertices alone do not count.
  bool interior_intersects(const Polygon& other) const;
  // True when every part of `inner` lies inside (or on the boundary of)
  // this polygon.
  bool contains_polygon(const Polygon& inner) const;

  Polygon rotated(double degrees, Vec2 pivot = {0.0, 0.0}) const;
  Polygon translated(Vec2 delta) const;

 private:
  std::vector<Vec2> verts_;
};

using Shape = std::variant<Rect, Polygon>;

double shape_area(const Shape& s);
Rect shape_bbox(const Shape& s);
bool shape_contains(const Shape& s, Vec2 p);
Polygon shape_polygon(const Shape& s);
// Rotation by a multiple of 90 degrees keeps a Rect a Rect; any other angle
// promotes it to a Polygon.
Shape shape_transformed(const Shape& s, double rot_deg, Vec2 pivot, Vec2 delta);

enum class Layer { TopMetal, Substrate, GroundMetal };
enum class BoolOp { Add, Subtract };

struct Material {
  enum class Kind { Pec, Dielectric, Vacuum };
  Kind kind = Kind::Pec;
  double relative_permittivity = 1.0;
  double loss_tangent = 0.0;
};

struct Primitive {
  Layer layer = Layer::TopMetal;
  BoolOp op = BoolOp::Add;
  Material material;
  Shape shape;
};

// Lumped-port marker: a vertical column at (x, y) spanning ground to top
// metal. feed_direction points from the port into the structure and guides
// grid snapping during rasterization.
struct PortSpec {
  Vec2 position_mm;
  double impedance_ohms = 50.0;
  Vec2 feed_direction = {0.0, 1.0};
};

// Constructive 2.5-D antenna scene: an ordered primitive list on three
// layers over a dielectric slab, with at most one lumped port.
struct Scene {
  SubstrateSpec substrate;
  Rect substrate_extent_mm;
  std::vector<Primitive> primitives;
  std::optional<PortSpec> port;
  // Set by tile_array / element builders; consumed by add_feed and the
  // rear-slot placement.
  std::optional<Rect> feed_anchor_mm;
  std::optional<Rect> array_bbox_mm;
  double min_feature_mm = 1e30;

  // Lateral bounding box over all primitives and the substrate extent.
  Rect bounding_box_mm() const;
  double thickness_mm() const { return substrate.height_mm; }

  // Point membership after applying the primitive list in order.
  bool metal_at(Layer layer, Vec2 p_mm) const;
  // Dielectric at a lateral position inside the substrate slab.
  // Returns {relative permittivity, loss tangent}; vacuum is {1, 0}.
  std::pair<double, double> dielectric_at(Vec2 p_mm) const;

  // Analytic conductor area of one metal layer. Requires the builder
  // guarantees: additive primitives pairwise interior-disjoint, subtractive
  // primitives disjoint and each contained in a previously added primitive.
  double conductor_area_mm2(Layer layer) const;

  void note_feature(double feature_mm);
  void expand_substrate_to_fit(const Rect& r);
  void validate() const;

  std::string to_json_string() const;
  static Scene from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static Scene load(const std::string& path);
};

// ----- Builders ---------------------------------------------------------

// Double-T slot parameters (all mm). The bar is horizontal, t_l long and
// t_b thick; the stem is t_g wide and t_a tall and descends from the bar
// center. pair_separation_mm is the clear distance between the two stems'
// inner edges, so the stem centers sit at +/-(d + t_g)/2.
struct TSlotParams {
  double arm_mm = 0.72;             // t_a
  double slot_width_mm = 0.4;       // t_g
  double bar_length_mm = 2.4;       // t_l
  double bar_breadth_mm = 0.48;     // t_b
  double pair_separation_mm = 2.16; // d

  void validate() const;
};

struct ArrayParams {
  int rows = 3;
  int cols = 3;
  double col_gap_mm = 2.2;   // horizontal gap g
  double row_gap_mm = 2.2;   // vertical gap (defaults to g)
  // Element (r, c) is rotated by element_rotation_deg * (r + c) about its
  // own center, so adjacent elements differ by exactly this angle.
  double element_rotation_deg = 90.0;
};

struct FeedParams {
  double line_width_mm = 0.80;    // f_g
  double line_length_mm = 2.77;   // f_l
  double coplanar_gap_mm = 0.15;  // strip-to-ground clearance
  // Coplanar top-layer ground pads are off by default; the rear ground
  // plane is the return path.
  bool add_coplanar_grounds = false;
  double coplanar_ground_width_mm = 2.4;

  void validate() const;
};

// One antenna element in its local frame (centered at the origin).
struct ElementFragment {
  std::vector<Primitive> primitives;
  Rect footprint_mm;  // unrotated outline
};

// Stage 1: plain rectangular radiator, length along y, width along x.
ElementFragment build_patch_element(double length_mm, double width_mm);

// Stage 2: cut the two T-slots out of the patch. Bars sit top_inset_mm
// below the patch top edge.
void apply_double_t_slots(ElementFragment& element, const TSlotParams& t,
                          double top_inset_mm = 0.3);

// Stage 3: tile the element into a rows x cols grid.
Scene tile_array(const ElementFragment& element, const ArrayParams& a,
                 const SubstrateSpec& substrate);

// Wrap a single element into a scene (1x1 array).
Scene single_element_scene(const ElementFragment& element,
                           const SubstrateSpec& substrate);

// Feed strip attached to the bottom-center element's lower edge, port
// marked at the strip's outer end.
void add_feed(Scene& scene, const FeedParams& f);

// Full ground sheet covering the substrate extent.
void add_ground_plane(Scene& scene);

// Full ground sheet with one T-shaped aperture (the front T scaled by
// `scale`) centered under the array.
void add_ground_with_rear_slot(Scene& scene, const TSlotParams& slot,
                               double scale = 1.0);

// Builds just the T polygon in a local frame: bar top edge at y = 0,
// shape centered horizontally on x = 0.
Polygon make_t_polygon(const TSlotParams& t, double scale = 1.0);

}  // namespace pf

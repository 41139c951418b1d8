// Copyright 2026 The freqalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

namespace freqalloc {

/// Wrap rule for one axis of a rectangular unit cell.
///
/// The x axis closes the right boundary column onto the left one; `shift`
/// counts rows. The y axis closes the bottom row onto the top one; `shift`
/// counts columns. With `flip`, the rows (resp. columns) are mirrored before
/// the shift is applied, which gives a Möbius-type closure.
struct AxisWrap {
  int shift = 0;
  bool flip = false;
  bool enabled = true;

  friend bool operator==(const AxisWrap&, const AxisWrap&) = default;
};

struct BoundaryCondition {
  std::string name = "custom";
  AxisWrap x_wrap;
  AxisWrap y_wrap;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

/// Integer affine map (x, y) -> (sx*x + tx, sy*y + ty) with sx, sy in {-1, +1}.
/// Elements of the wrap group are all of this form.
struct PlaneMap {
  int sx = 1;
  int sy = 1;
  long tx = 0;
  long ty = 0;

  long map_x(long x) const { return sx * x + tx; }
  long map_y(long y) const { return sy * y + ty; }
  // this ∘ other
  PlaneMap after(const PlaneMap& other) const {
    return {sx * other.sx, sy * other.sy, sx * other.tx + tx, sy * other.ty + ty};
  }
};

/// Plane point; x is the column coordinate and y the row coordinate.
struct PlanePoint {
  long x = 0;
  long y = 0;
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// The quotient of the integer plane by the group generated by the x- and
/// y-wrap maps of a boundary condition, with the rows x cols window at the
/// origin as fundamental domain.
///
/// At most one axis may carry a twist (non-zero shift or flip); with twists
/// on both axes the group no longer has the window as a fundamental domain.
class WrapQuotient {
 public:
  WrapQuotient(int rows, int cols, const BoundaryCondition& bc);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const BoundaryCondition& bc() const { return bc_; }

  bool in_window(PlanePoint p) const {
    return p.x >= 0 && p.x < cols_ && p.y >= 0 && p.y < rows_;
  }

  /// Group element that carries `p` into the window.
  PlaneMap reducer(PlanePoint p) const;

  PlanePoint reduce(PlanePoint p) const {
    PlaneMap g = reducer(p);
    return {g.map_x(p.x), g.map_y(p.y)};
  }

 private:
  PlaneMap step_x_;  // maps column C onto column 0
  PlaneMap step_y_;  // maps row R onto row 0
  PlaneMap step_x_inv_;
  PlaneMap step_y_inv_;
  int rows_;
  int cols_;
  bool x_first_;
  BoundaryCondition bc_;
};

}  // namespace freqalloc

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

#include "freqalloc/boundary.hpp"

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace {

bool twisted(const AxisWrap& w) { return w.shift != 0 || w.flip; }

}  // namespace

WrapQuotient::WrapQuotient(int rows, int cols, const BoundaryCondition& bc)
    : rows_(rows), cols_(cols), bc_(bc) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("wrap quotient needs a non-empty window");
  }
  if (bc.x_wrap.shift < 0 || bc.x_wrap.shift >= rows) {
    throw InvalidArgument("x-wrap shift " + std::to_string(bc.x_wrap.shift) +
                          " outside [0, " + std::to_string(rows) + ")");
  }
  if (bc.y_wrap.shift < 0 || bc.y_wrap.shift >= cols) {
    throw InvalidArgument("y-wrap shift " + std::to_string(bc.y_wrap.shift) +
                          " outside [0, " + std::to_string(cols) + ")");
  }
  if (twisted(bc.x_wrap) && twisted(bc.y_wrap)) {
    throw InvalidArgument("boundary condition '" + bc.name +
                          "' twists both axes; only one twisted axis is supported");
  }
  x_first_ = !twisted(bc.y_wrap);

  const long c = cols;
  const long r = rows;
  const long sx = bc.x_wrap.shift;
  const long sy = bc.y_wrap.shift;
  if (bc.x_wrap.flip) {
    step_x_ = {1, -1, -c, sx + r - 1};
    step_x_inv_ = {1, -1, c, sx + r - 1};
  } else {
    step_x_ = {1, 1, -c, sx};
    step_x_inv_ = {1, 1, c, -sx};
  }
  if (bc.y_wrap.flip) {
    step_y_ = {-1, 1, sy + c - 1, -r};
    step_y_inv_ = {-1, 1, sy + c - 1, r};
  } else {
    step_y_ = {1, 1, sy, -r};
    step_y_inv_ = {1, 1, -sy, r};
  }
}

PlaneMap WrapQuotient::reducer(PlanePoint p) const {
  PlaneMap g;
  auto apply = [&](const PlaneMap& step) {
    g = step.after(g);
    p = {step.map_x(p.x), step.map_y(p.y)};
  };
  auto reduce_x = [&] {
    if (!bc_.x_wrap.enabled) {
      if (p.x < 0 || p.x >= cols_) throw InvalidArgument("point leaves the window along the unwrapped x axis");
      return;
    }
    while (p.x >= cols_) apply(step_x_);
    while (p.x < 0) apply(step_x_inv_);
  };
  auto reduce_y = [&] {
    if (!bc_.y_wrap.enabled) {
      if (p.y < 0 || p.y >= rows_) throw InvalidArgument("point leaves the window along the unwrapped y axis");
      return;
    }
    while (p.y >= rows_) apply(step_y_);
    while (p.y < 0) apply(step_y_inv_);
  };
  if (x_first_) {
    reduce_x();
    reduce_y();
  } else {
    reduce_y();
    reduce_x();
  }
  return g;
}

}  // namespace freqalloc

#pragma once

#include <string>
#include <vector>

#include "qio/linalg.hpp"

namespace qio {

/// Strictly proper continuous-time LTI system  x' = A x + B u,  y = C x.
struct StateSpaceModel {
  Matrix a;
  Matrix b;
  Matrix c;
  std::vector<std::string> labels;  // one per state, may be empty

  StateSpaceModel() = default;
  StateSpaceModel(Matrix a_, Matrix b_, Matrix c_, std::vector<std::string> labels_ = {})
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), labels(std::move(labels_)) {
    validate();
  }

  std::size_t order() const { return a.rows(); }
  std::size_t inputs() const { return b.cols(); }
  std::size_t outputs() const { return c.rows(); }

  void validate() const {
    if (!a.is_square()) throw DimensionError("state matrix must be square");
    if (b.rows() != a.rows()) throw DimensionError("B rows must match the state dimension");
    if (c.cols() != a.rows()) throw DimensionError("C columns must match the state dimension");
    if (!labels.empty() && labels.size() != a.rows())
      throw DimensionError("state labels must match the state dimension");
  }
};

/// Two systems in feedback: sys1 is driven by y2 = C2 x2, sys2 by y1 = C1 x1.
///   x1' = A1 x1 + B1 C2 x2,   x2' = A2 x2 + B2 C1 x1.
struct InterconnectedModel {
  StateSpaceModel sys1;
  StateSpaceModel sys2;

  /// The closed-loop matrix [[A1, B1 C2], [B2 C1, A2]].
  Matrix reassemble() const {
    const std::size_t n1 = sys1.order(), n2 = sys2.order();
    Matrix full(n1 + n2, n1 + n2);
    full.set_block(0, 0, sys1.a);
    full.set_block(n1, n1, sys2.a);
    if (sys1.inputs() > 0) full.set_block(0, n1, sys1.b * sys2.c);
    if (sys2.inputs() > 0) full.set_block(n1, 0, sys2.b * sys1.c);
    return full;
  }
};

}  // namespace qio

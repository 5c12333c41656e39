#pragma once
#include <vector>

#include "stretchlat/body.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat {

enum class MeasureMethod { ClosedForm, Quadrature };

struct SectionMeasures {
  double volume = 0.0;
  Vec sections;  // sections[j] = (d-1)-volume of Omega ∩ {x_{j+1} = 0}
  MeasureMethod method = MeasureMethod::ClosedForm;
};

// d-volume. Superellipsoids use the Gamma-function closed form; generic
// bodies use adaptive Gauss-Legendre quadrature in polar/spherical form
// (supported for d = 2, 3), relative tolerance ~1e-8.
double volume(const BodySpec& body);

// (d-1)-volume of the central hyperplane section Omega_j, 0-based axis j.
double section_measure(const BodySpec& body, int j);

SectionMeasures section_measures(const BodySpec& body);

// The section of a coordinate-symmetric body by {x_j = 0}, as a body in the
// remaining coordinates (order preserved).
BodySpec section_body(const BodySpec& body, int j);

// Balanced stretch: diag entries proportional to the section measures,
// normalized to det 1.
StretchFactor balanced_factor(const BodySpec& body);

}  // namespace stretchlat

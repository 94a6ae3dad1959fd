#pragma once

#include <string>
#include <vector>

#include "tricf/words.hpp"

namespace tricf {

// Axis-aligned rectangle [x1,x2] x [y1,y2]; boundaries carry no mass.
struct Rect {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
};

enum class DomainKind { matching, zero, accel, one };

std::string kind_name(DomainKind k);
DomainKind kind_from_name(const std::string& name);

struct PlanarDomain {
    int m = 2;
    int n = 3;
    double alpha = 0.0;
    DomainKind kind = DomainKind::matching;
    std::vector<Rect> rects;
    bool infinite_mass = false;
};

// mu-mass of a rectangle, dmu = dx dy / (1+xy)^2; +infinity when a corner
// sits on the hyperbola xy = -1.
double rect_mass(const Rect& r);
double domain_mass(const PlanarDomain& dom);

// Image of a rectangle under (x,y) -> (M x, RMR^{-1} y).
Rect push_rect(const Mat2& mat, const Rect& r);
Mat2 conjugate_by_R(const Mat2& mat);

std::pair<double, double> planar_step(const MapParams& params, double x, double y);

// One step of the planar map for the W-accelerated alpha = 0 system: the
// W-power branch on [l0, W^{-1}.0), the plain digit branch elsewhere.
std::pair<double, double> accel_planar_step(const MapParams& params, double x, double y);

PlanarDomain build_omega_matching(const MapParams& params, const MatchingInterval& mi);
PlanarDomain build_omega_zero(const MapParams& params);
PlanarDomain build_omega_accel(const MapParams& params);
PlanarDomain build_omega_one(const MapParams& params);

// Rectangles deleted when passing from the alpha = 0 domain to the
// accelerated one.
std::vector<Rect> deletion_rects(const MapParams& params);

struct BijectivityReport {
    double mass = 0.0;
    double image_mass = 0.0;
    double overlap_mass = 0.0;
    double uncovered_mass = 0.0;
    double escaped_mass = 0.0;
    bool pass = false;
};

// Partitions the domain into cylinder x fiber blocks, pushes each through
// the planar map, and measures how well the images re-tile the domain.
BijectivityReport check_bijectivity(const PlanarDomain& dom, const MapParams& params,
                                    double rel_tol = 1e-8);

PlanarDomain symmetry_S(const PlanarDomain& dom);

// T_{M1} with M1 = (1 1; 0 1): sends Omega_{2,n,1} onto the part of
// Omega_{3,n,1} right of the unit square.
PlanarDomain shift_M1(const PlanarDomain& dom);

// Max entrywise deviation in M A(x,y) g_{tau(M,x)} = A(Th_M(x,y)) after
// projective normalization, plus the Z-conjugation consistency.
double arnoux_identity_check(const Mat2& mat, double x, double y);

// Omega^+_{alpha,d}: second-quadrant part whose point and preimage both lie
// in cylinders of digit <= d.
PlanarDomain first_return_region(const MapParams& params, const MatchingInterval& mi);
int first_return_digit_bound(const MapParams& params);

double symmetric_difference_mass(const PlanarDomain& a, const PlanarDomain& b);

// Keep the rectangles on one side of y = 0 (side = +1 keeps y >= 0).
PlanarDomain half_domain(const PlanarDomain& dom, int side);

std::string domain_to_json(const PlanarDomain& dom);
PlanarDomain domain_from_json(const std::string& text);

} // namespace tricf

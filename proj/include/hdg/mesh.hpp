#pragma once

#include <array>
#include <vector>

#include "hdg/basis.hpp"

namespace hdg {

inline constexpr int kNoElement = -1;

/// Axis-aligned rectangle domain.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// Structured quadrilateral mesh with element/face connectivity.
///
/// Local faces are ordered (bottom, right, top, left). Each local face is
/// parameterized along the +x or +y axis; a global face inherits the
/// parameterization of its first (lower-id) adjacent element, and
/// face_side_reversed records whether a side traverses the face backwards
/// relative to that canonical direction.
struct Mesh2D {
    int n_elements = 0;
    int n_faces = 0;
    static constexpr int n_local_faces = 4;

    std::vector<std::array<int, 4>> element_vertices; ///< counterclockwise
    std::vector<std::array<int, 4>> element_to_face;  ///< (bottom,right,top,left)
    std::vector<std::array<int, 2>> face_to_elements; ///< second = kNoElement on boundary
    std::vector<std::array<int, 2>> face_local_index; ///< local slot within each adjacent element
    std::vector<std::array<bool, 2>> face_side_reversed;
    std::vector<std::array<int, 2>> face_vertices; ///< endpoints in canonical direction
    std::vector<int> boundary_tag;                 ///< 0 interior; 1..4 = bottom,right,top,left
    std::vector<std::array<double, 2>> vertex_coords;

    bool is_boundary(int f) const { return face_to_elements[f][1] == kNoElement; }
};

/// Uniform n x n quadrilateral mesh of the given rectangle. Boundary tags:
/// 1=bottom, 2=right, 3=top, 4=left.
Mesh2D build_structured_quad(int n, const Rect& domain);

/// Geometric factors of the bilinear reference-to-physical map, sampled at
/// quadrature points.
struct GeomFactors {
    int qe = 0;
    int qf = 0;
    std::vector<double> elem_detjac; ///< [e*qe + g]
    /// Inverse Jacobian [[dxi/dx, dxi/dy], [deta/dx, deta/dy]] row-major:
    /// [(e*qe + g)*4 + (2*row + col)]
    std::vector<double> elem_invjac;
    std::vector<double> elem_coords; ///< [(e*qe + g)*2 + c] physical points
    std::vector<double> face_detjac; ///< [f*qf + g], canonical parameterization
    std::vector<double> face_coords; ///< [(f*qf + g)*2 + c], canonical order
    /// Outward unit normal per face side: [((f*2 + side)*qf + g)*2 + c],
    /// quadrature index in canonical face order.
    std::vector<double> face_normal;
};

/// Evaluates detJ, inverse Jacobians, face measures and outward normals at
/// the tensorized element points and 1D face points of `quad`. Throws
/// InvertedElement when any element determinant is non-positive.
GeomFactors compute_geometry(const Mesh2D& mesh, const QuadratureRule& quad);

} // namespace hdg

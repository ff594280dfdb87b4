#include "hdg/mesh.hpp"

#include <cmath>
#include <string>

#include "hdg/errors.hpp"

namespace hdg {

namespace {

// Element-local traversal endpoints of each local face, as indices into the
// CCW vertex list. Bottom/top run along +x, left/right along +y.
constexpr int kFaceEnds[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};

} // namespace

Mesh2D build_structured_quad(int n, const Rect& domain) {
    if (n < 1) throw InvalidResolution("mesh resolution must be >= 1, got " + std::to_string(n));
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
        throw DegenerateDomain("domain must satisfy x1 > x0 and y1 > y0");
    }

    Mesh2D m;
    m.n_elements = n * n;
    m.n_faces = 2 * n * (n + 1);

    const int nv1 = n + 1;
    const double hx = (domain.x1 - domain.x0) / n;
    const double hy = (domain.y1 - domain.y0) / n;
    m.vertex_coords.resize(static_cast<std::size_t>(nv1) * nv1);
    for (int j = 0; j < nv1; ++j) {
        for (int i = 0; i < nv1; ++i) {
            m.vertex_coords[static_cast<std::size_t>(j) * nv1 + i] = {domain.x0 + i * hx,
                                                                      domain.y0 + j * hy};
        }
    }
    auto vid = [nv1](int i, int j) { return j * nv1 + i; };
    auto eid = [n](int i, int j) { return j * n + i; };
    auto hface = [n](int i, int j) { return j * n + i; };              // at y_j, span [x_i, x_i+1]
    auto vface = [n](int i, int j) { return n * (n + 1) + i * n + j; }; // at x_i, span [y_j, y_j+1]

    m.element_vertices.resize(m.n_elements);
    m.element_to_face.resize(m.n_elements);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int e = eid(i, j);
            m.element_vertices[e] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
            m.element_to_face[e] = {hface(i, j), vface(i + 1, j), hface(i, j + 1), vface(i, j)};
        }
    }

    m.face_to_elements.assign(m.n_faces, {kNoElement, kNoElement});
    m.face_local_index.assign(m.n_faces, {-1, -1});
    m.face_side_reversed.assign(m.n_faces, {false, false});
    m.face_vertices.resize(m.n_faces);
    m.boundary_tag.assign(m.n_faces, 0);

    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int f = hface(i, j);
            m.face_vertices[f] = {vid(i, j), vid(i + 1, j)};
            if (j > 0) { // element below, sees this as its top face
                m.face_to_elements[f][0] = eid(i, j - 1);
                m.face_local_index[f][0] = 2;
            }
            if (j < n) { // element above, bottom face
                const int side = (j > 0) ? 1 : 0;
                m.face_to_elements[f][side] = eid(i, j);
                m.face_local_index[f][side] = 0;
            }
            if (j == 0) m.boundary_tag[f] = 1;
            if (j == n) m.boundary_tag[f] = 3;
        }
    }
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int f = vface(i, j);
            m.face_vertices[f] = {vid(i, j), vid(i, j + 1)};
            if (i > 0) { // element to the left, right face
                m.face_to_elements[f][0] = eid(i - 1, j);
                m.face_local_index[f][0] = 1;
            }
            if (i < n) { // element to the right, left face
                const int side = (i > 0) ? 1 : 0;
                m.face_to_elements[f][side] = eid(i, j);
                m.face_local_index[f][side] = 3;
            }
            if (i == 0) m.boundary_tag[f] = 4;
            if (i == n) m.boundary_tag[f] = 2;
        }
    }

    // Orientation flags: a side is reversed when its element-local traversal
    // starts at the canonical end vertex. Structured meshes are never
    // reversed; the flag exists for hand-built meshes in tests.
    for (int f = 0; f < m.n_faces; ++f) {
        for (int s = 0; s < 2; ++s) {
            const int e = m.face_to_elements[f][s];
            if (e == kNoElement) continue;
            const int lf = m.face_local_index[f][s];
            const int start = m.element_vertices[e][kFaceEnds[lf][0]];
            m.face_side_reversed[f][s] = (start != m.face_vertices[f][0]);
        }
    }
    return m;
}

GeomFactors compute_geometry(const Mesh2D& mesh, const QuadratureRule& quad) {
    GeomFactors g;
    const QuadratureRule2D r2 = tensor_rule(quad);
    g.qe = r2.size();
    g.qf = quad.size();
    g.elem_detjac.resize(static_cast<std::size_t>(mesh.n_elements) * g.qe);
    g.elem_invjac.resize(static_cast<std::size_t>(mesh.n_elements) * g.qe * 4);
    g.elem_coords.resize(static_cast<std::size_t>(mesh.n_elements) * g.qe * 2);

    for (int e = 0; e < mesh.n_elements; ++e) {
        std::array<std::array<double, 2>, 4> v;
        for (int c = 0; c < 4; ++c) v[c] = mesh.vertex_coords[mesh.element_vertices[e][c]];
        for (int q = 0; q < g.qe; ++q) {
            const auto [xi, eta] = r2.points[q];
            const double n0 = (1 - xi) * (1 - eta), n1 = xi * (1 - eta), n2 = xi * eta,
                         n3 = (1 - xi) * eta;
            const std::size_t idx = static_cast<std::size_t>(e) * g.qe + q;
            g.elem_coords[idx * 2 + 0] = n0 * v[0][0] + n1 * v[1][0] + n2 * v[2][0] + n3 * v[3][0];
            g.elem_coords[idx * 2 + 1] = n0 * v[0][1] + n1 * v[1][1] + n2 * v[2][1] + n3 * v[3][1];
            const double dxdxi = (v[1][0] - v[0][0]) * (1 - eta) + (v[2][0] - v[3][0]) * eta;
            const double dydxi = (v[1][1] - v[0][1]) * (1 - eta) + (v[2][1] - v[3][1]) * eta;
            const double dxdeta = (v[3][0] - v[0][0]) * (1 - xi) + (v[2][0] - v[1][0]) * xi;
            const double dydeta = (v[3][1] - v[0][1]) * (1 - xi) + (v[2][1] - v[1][1]) * xi;
            const double det = dxdxi * dydeta - dxdeta * dydxi;
            if (!(det > 0.0)) throw InvertedElement(e, det);
            g.elem_detjac[idx] = det;
            const double inv = 1.0 / det;
            g.elem_invjac[idx * 4 + 0] = dydeta * inv;  // dxi/dx
            g.elem_invjac[idx * 4 + 1] = -dxdeta * inv; // dxi/dy
            g.elem_invjac[idx * 4 + 2] = -dydxi * inv;  // deta/dx
            g.elem_invjac[idx * 4 + 3] = dxdxi * inv;   // deta/dy
        }
    }

    g.face_detjac.resize(static_cast<std::size_t>(mesh.n_faces) * g.qf);
    g.face_coords.resize(static_cast<std::size_t>(mesh.n_faces) * g.qf * 2);
    g.face_normal.resize(static_cast<std::size_t>(mesh.n_faces) * 2 * g.qf * 2);
    for (int f = 0; f < mesh.n_faces; ++f) {
        const auto a = mesh.vertex_coords[mesh.face_vertices[f][0]];
        const auto b = mesh.vertex_coords[mesh.face_vertices[f][1]];
        const double tx = b[0] - a[0], ty = b[1] - a[1];
        const double len = std::hypot(tx, ty);
        for (int q = 0; q < g.qf; ++q) {
            const double t = quad.points[q];
            const std::size_t idx = static_cast<std::size_t>(f) * g.qf + q;
            g.face_detjac[idx] = len;
            g.face_coords[idx * 2 + 0] = a[0] + t * tx;
            g.face_coords[idx * 2 + 1] = a[1] + t * ty;
        }
        for (int s = 0; s < 2; ++s) {
            const int e = mesh.face_to_elements[f][s];
            if (e == kNoElement) continue;
            const int lf = mesh.face_local_index[f][s];
            const double sign = mesh.face_side_reversed[f][s] ? -1.0 : 1.0;
            const double ex = sign * tx / len, ey = sign * ty / len;
            // Bottom/right faces rotate the traversal tangent by -90 degrees
            // for the outward direction, top/left by +90.
            double nx, ny;
            if (lf == 0 || lf == 1) {
                nx = ey;
                ny = -ex;
            } else {
                nx = -ey;
                ny = ex;
            }
            for (int q = 0; q < g.qf; ++q) {
                const std::size_t idx = (static_cast<std::size_t>(f) * 2 + s) * g.qf + q;
                g.face_normal[idx * 2 + 0] = nx;
                g.face_normal[idx * 2 + 1] = ny;
            }
        }
    }
    return g;
}

} // namespace hdg

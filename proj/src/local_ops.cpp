#include "hdg/local_ops.hpp"

#include <cmath>
#include <cstddef>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"

namespace hdg {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NonFiniteState(what);
    }
}

void sub_inplace(std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
}

// Uncondensed per-element assembly output. Jacobian blocks are derivatives
// of the weak residual R; the residual vectors carry r = -R so that the
// Newton system reads [blocks] * delta = r.
struct LocalAssembly {
    DenseBatch e_mat, f_mat, h_mat, j_mat;
    std::array<DenseBatch, 2> d_mat, g_mat;
    std::vector<double> ru;
    std::vector<double> ruhat_e;
};

LocalAssembly assemble_core(const PdeModel& model, StateFields& state, const Mesh2D& mesh,
                            const BasisTab& basis, const GeomFactors& geom,
                            const LocalFactors& factors, const TimeContext& time, bool want_jac) {
    check_finite(state.u, "interior solution");
    check_finite(state.uhat, "trace solution");
    if (time.dt && time.u_prev == nullptr) {
        throw InconsistentDimensions("transient assembly requires the previous solution");
    }
    compute_q(state, factors, mesh);

    const int pe = basis.pe, pf = basis.pf, qe = basis.qe, qf = basis.qf;
    const int nfl = 4 * pf;
    const int ne = mesh.n_elements;
    const double dt_inv = time.dt ? 1.0 / *time.dt : 0.0;

    LocalAssembly out;
    out.ru.assign(static_cast<std::size_t>(pe) * ne, 0.0);
    out.ruhat_e.assign(static_cast<std::size_t>(nfl) * ne, 0.0);
    if (want_jac) {
        out.e_mat = DenseBatch(pe, pe, ne);
        out.f_mat = DenseBatch(pe, nfl, ne);
        out.h_mat = DenseBatch(nfl, pe, ne);
        out.j_mat = DenseBatch(nfl, nfl, ne);
        for (int d = 0; d < 2; ++d) {
            out.d_mat[d] = DenseBatch(pe, pe, ne);
            out.g_mat[d] = DenseBatch(nfl, pe, ne);
        }
    }

    parallel_for(static_cast<std::size_t>(ne), [&](std::size_t e0, std::size_t e1) {
        std::vector<double> gradx(pe), grady(pe);
        for (std::size_t e = e0; e < e1; ++e) {
            const double* ue = state.u.data() + e * pe;
            const double* qxe = state.q[0].data() + e * pe;
            const double* qye = state.q[1].data() + e * pe;
            double* Ru = out.ru.data() + e * pe;
            double* Rh = out.ruhat_e.data() + e * nfl;

            // Volume terms.
            for (int g = 0; g < qe; ++g) {
                const std::size_t gi = e * qe + g;
                const double w = basis.rule2d.weights[g] * geom.elem_detjac[gi];
                const Vec2 x{geom.elem_coords[gi * 2], geom.elem_coords[gi * 2 + 1]};
                const double j00 = geom.elem_invjac[gi * 4 + 0], j01 = geom.elem_invjac[gi * 4 + 1],
                             j10 = geom.elem_invjac[gi * 4 + 2], j11 = geom.elem_invjac[gi * 4 + 3];
                const double* phig = basis.phi.data() + static_cast<std::size_t>(pe) * g;
                const double* dxig = basis.dphi_dxi.data() + static_cast<std::size_t>(pe) * g;
                const double* detag = basis.dphi_deta.data() + static_cast<std::size_t>(pe) * g;

                double ug = 0.0, qxg = 0.0, qyg = 0.0, upg = 0.0;
                for (int i = 0; i < pe; ++i) {
                    ug += ue[i] * phig[i];
                    qxg += qxe[i] * phig[i];
                    qyg += qye[i] * phig[i];
                    gradx[i] = dxig[i] * j00 + detag[i] * j10;
                    grady[i] = dxig[i] * j01 + detag[i] * j11;
                }
                if (time.dt) {
                    const double* up = time.u_prev->data() + e * pe;
                    for (int i = 0; i < pe; ++i) upg += up[i] * phig[i];
                }

                const Vec2 q{qxg, qyg};
                const Vec2 fl = model.flux(ug, q, x);
                const double s = model.source(ug, q, x);
                for (int i = 0; i < pe; ++i) {
                    double v = -(fl.x * gradx[i] + fl.y * grady[i]) - s * phig[i];
                    if (time.dt) v += dt_inv * (ug - upg) * phig[i];
                    Ru[i] += w * v;
                }

                if (want_jac) {
                    const Vec2 dfu = model.dflux_du(ug, q, x);
                    const auto dfq = model.dflux_dq(ug, q, x);
                    const double dsu = model.dsource_du(ug, q, x);
                    const Vec2 dsq = model.dsource_dq(ug, q, x);
                    for (int j = 0; j < pe; ++j) {
                        const double pj = w * phig[j];
                        for (int i = 0; i < pe; ++i) {
                            double eij = -(dfu.x * gradx[i] + dfu.y * grady[i]) - dsu * phig[i];
                            if (time.dt) eij += dt_inv * phig[i];
                            out.e_mat.at(i, j, static_cast<int>(e)) += pj * eij;
                            out.d_mat[0].at(i, j, static_cast<int>(e)) +=
                                pj * (-(dfq[0].x * gradx[i] + dfq[0].y * grady[i]) - dsq.x * phig[i]);
                            out.d_mat[1].at(i, j, static_cast<int>(e)) +=
                                pj * (-(dfq[1].x * gradx[i] + dfq[1].y * grady[i]) - dsq.y * phig[i]);
                        }
                    }
                }
            }

            // Face terms: interior equation always sees the numerical flux;
            // the trace equation sees it on interior faces and the boundary
            // flux on boundary faces.
            for (int lf = 0; lf < 4; ++lf) {
                const int f = mesh.element_to_face[e][lf];
                const int side =
                    (mesh.face_to_elements[f][0] == static_cast<int>(e) && mesh.face_local_index[f][0] == lf)
                        ? 0
                        : 1;
                const bool reversed = mesh.face_side_reversed[f][side];
                const int tag = mesh.boundary_tag[f];
                const double* tphi = basis.trace_phi[lf].data();

                for (int gc = 0; gc < qf; ++gc) {
                    const int gs = reversed ? qf - 1 - gc : gc;
                    const std::size_t fi = static_cast<std::size_t>(f) * qf + gc;
                    const double w = basis.rule1d.weights[gc] * geom.face_detjac[fi];
                    const Vec2 x{geom.face_coords[fi * 2], geom.face_coords[fi * 2 + 1]};
                    const std::size_t ni = (static_cast<std::size_t>(f) * 2 + side) * qf + gc;
                    const Vec2 n{geom.face_normal[ni * 2], geom.face_normal[ni * 2 + 1]};
                    const double* phis = tphi + static_cast<std::size_t>(pe) * gs;
                    const double* psic = basis.psi.data() + static_cast<std::size_t>(pf) * gc;

                    double ug = 0.0, qxg = 0.0, qyg = 0.0;
                    for (int i = 0; i < pe; ++i) {
                        ug += ue[i] * phis[i];
                        qxg += qxe[i] * phis[i];
                        qyg += qye[i] * phis[i];
                    }
                    double uh = 0.0;
                    const double* uhf = state.uhat.data() + static_cast<std::size_t>(f) * pf;
                    for (int b = 0; b < pf; ++b) uh += uhf[b] * psic[b];

                    const Vec2 q{qxg, qyg};
                    const double tau = model.tau(ug, uh, n);
                    const Vec2 fl = model.flux(uh, q, x);
                    const double fhat = fl.x * n.x + fl.y * n.y + tau * (ug - uh);

                    for (int i = 0; i < pe; ++i) Ru[i] += w * fhat * phis[i];

                    double val, dval_u, dval_uhat;
                    Vec2 dval_q;
                    Vec2 dfu{}, dfq0{}, dfq1{};
                    if (want_jac || tag != 0) {
                        dfu = model.dflux_du(uh, q, x);
                        const auto dfq = model.dflux_dq(uh, q, x);
                        dfq0 = dfq[0];
                        dfq1 = dfq[1];
                    }
                    if (tag == 0) {
                        val = fhat;
                        dval_u = tau;
                        dval_q = {dfq0.x * n.x + dfq0.y * n.y, dfq1.x * n.x + dfq1.y * n.y};
                        dval_uhat = dfu.x * n.x + dfu.y * n.y - tau;
                    } else {
                        const BoundaryFlux b = model.boundary_flux(tag, ug, q, uh, n, x);
                        val = b.value;
                        dval_u = b.d_u;
                        dval_q = b.d_q;
                        dval_uhat = b.d_uhat;
                    }

                    for (int b = 0; b < pf; ++b) Rh[lf * pf + b] += w * val * psic[b];

                    if (want_jac) {
                        const double dfhat_u = tau;
                        const Vec2 dfhat_q{dfq0.x * n.x + dfq0.y * n.y, dfq1.x * n.x + dfq1.y * n.y};
                        const double dfhat_uhat = dfu.x * n.x + dfu.y * n.y - tau;
                        for (int j = 0; j < pe; ++j) {
                            const double pj = w * phis[j];
                            for (int i = 0; i < pe; ++i) {
                                out.e_mat.at(i, j, static_cast<int>(e)) += pj * dfhat_u * phis[i];
                                out.d_mat[0].at(i, j, static_cast<int>(e)) += pj * dfhat_q.x * phis[i];
                                out.d_mat[1].at(i, j, static_cast<int>(e)) += pj * dfhat_q.y * phis[i];
                            }
                            for (int b = 0; b < pf; ++b) {
                                const int l = lf * pf + b;
                                out.h_mat.at(l, j, static_cast<int>(e)) += pj * dval_u * psic[b];
                                out.g_mat[0].at(l, j, static_cast<int>(e)) += pj * dval_q.x * psic[b];
                                out.g_mat[1].at(l, j, static_cast<int>(e)) += pj * dval_q.y * psic[b];
                            }
                        }
                        for (int bp = 0; bp < pf; ++bp) {
                            const double pj = w * psic[bp];
                            const int lp = lf * pf + bp;
                            for (int i = 0; i < pe; ++i) {
                                out.f_mat.at(i, lp, static_cast<int>(e)) += pj * dfhat_uhat * phis[i];
                            }
                            for (int b = 0; b < pf; ++b) {
                                out.j_mat.at(lf * pf + b, lp, static_cast<int>(e)) +=
                                    pj * dval_uhat * psic[b];
                            }
                        }
                    }
                }
            }
        }
    });

    // The assembled vectors are the weak residuals; Newton solves against
    // their negation.
    for (double& v : out.ru) v = -v;
    for (double& v : out.ruhat_e) v = -v;
    return out;
}

} // namespace

StateFields StateFields::zeros(const Mesh2D& mesh, const BasisTab& basis) {
    StateFields s;
    s.pe = basis.pe;
    s.pf = basis.pf;
    s.ne = mesh.n_elements;
    s.nf = mesh.n_faces;
    s.u.assign(static_cast<std::size_t>(s.pe) * s.ne, 0.0);
    s.q[0].assign(s.u.size(), 0.0);
    s.q[1].assign(s.u.size(), 0.0);
    s.uhat.assign(static_cast<std::size_t>(s.pf) * s.nf, 0.0);
    return s;
}

double residual_norm(const Residuals& r) {
    double acc = 0.0;
    for (double v : r.trace) acc += v * v;
    for (double v : r.interior) acc += v * v;
    return std::sqrt(acc);
}

LocalFactors precompute_local_factors(const Mesh2D& mesh, const BasisTab& basis,
                                      const GeomFactors& geom) {
    const int pe = basis.pe, pf = basis.pf, qe = basis.qe, qf = basis.qf;
    const int ne = mesh.n_elements;
    const int nfl = 4 * pf;

    LocalFactors lf;
    lf.pe = pe;
    lf.pf = pf;
    lf.ne = ne;

    // Mass matrices for all elements at once: the (pe^2 x qe) table of basis
    // products times the (qe x ne) weights-times-detJ array. Each output
    // column is one element's column-major mass block.
    DenseBatch prod(pe * pe, qe, 1);
    for (int g = 0; g < qe; ++g) {
        const double* phig = basis.phi.data() + static_cast<std::size_t>(pe) * g;
        for (int j = 0; j < pe; ++j) {
            for (int i = 0; i < pe; ++i) prod.at(i + pe * j, g, 0) = phig[i] * phig[j];
        }
    }
    DenseBatch wdet(qe, ne, 1);
    for (int e = 0; e < ne; ++e) {
        for (int g = 0; g < qe; ++g) {
            wdet.at(g, e, 0) = basis.rule2d.weights[g] * geom.elem_detjac[static_cast<std::size_t>(e) * qe + g];
        }
    }
    DenseBatch mflat = gemm_batch(prod, wdet);
    lf.mass = DenseBatch(pe, pe, ne);
    lf.mass.data = std::move(mflat.data);

    for (int d = 0; d < 2; ++d) {
        lf.bmat[d] = DenseBatch(pe, pe, ne);
        lf.cmat[d] = DenseBatch(pe, nfl, ne);
    }

    parallel_for(static_cast<std::size_t>(ne), [&](std::size_t e0, std::size_t e1) {
        for (std::size_t e = e0; e < e1; ++e) {
            // B_d: (u, d(test_i)/dx_d) volume coupling.
            for (int g = 0; g < qe; ++g) {
                const std::size_t gi = e * qe + g;
                const double w = basis.rule2d.weights[g] * geom.elem_detjac[gi];
                const double j00 = geom.elem_invjac[gi * 4 + 0], j01 = geom.elem_invjac[gi * 4 + 1],
                             j10 = geom.elem_invjac[gi * 4 + 2], j11 = geom.elem_invjac[gi * 4 + 3];
                const double* phig = basis.phi.data() + static_cast<std::size_t>(pe) * g;
                const double* dxig = basis.dphi_dxi.data() + static_cast<std::size_t>(pe) * g;
                const double* detag = basis.dphi_deta.data() + static_cast<std::size_t>(pe) * g;
                for (int j = 0; j < pe; ++j) {
                    const double pj = w * phig[j];
                    for (int i = 0; i < pe; ++i) {
                        const double gx = dxig[i] * j00 + detag[i] * j10;
                        const double gy = dxig[i] * j01 + detag[i] * j11;
                        lf.bmat[0].at(i, j, static_cast<int>(e)) += pj * gx;
                        lf.bmat[1].at(i, j, static_cast<int>(e)) += pj * gy;
                    }
                }
            }
            // C_d couples uhat into the gradient equation through face
            // integrals with the outward normal.
            for (int lfc = 0; lfc < 4; ++lfc) {
                const int f = mesh.element_to_face[e][lfc];
                const int side =
                    (mesh.face_to_elements[f][0] == static_cast<int>(e) && mesh.face_local_index[f][0] == lfc)
                        ? 0
                        : 1;
                const bool reversed = mesh.face_side_reversed[f][side];
                for (int gc = 0; gc < qf; ++gc) {
                    const int gs = reversed ? qf - 1 - gc : gc;
                    const std::size_t fi = static_cast<std::size_t>(f) * qf + gc;
                    const double w = basis.rule1d.weights[gc] * geom.face_detjac[fi];
                    const std::size_t ni = (static_cast<std::size_t>(f) * 2 + side) * qf + gc;
                    const double nx = geom.face_normal[ni * 2], ny = geom.face_normal[ni * 2 + 1];
                    const double* phis = basis.trace_phi[lfc].data() + static_cast<std::size_t>(pe) * gs;
                    const double* psic = basis.psi.data() + static_cast<std::size_t>(pf) * gc;
                    for (int b = 0; b < pf; ++b) {
                        const double pb = w * psic[b];
                        const int l = lfc * pf + b;
                        for (int i = 0; i < pe; ++i) {
                            lf.cmat[0].at(i, l, static_cast<int>(e)) -= pb * phis[i] * nx;
                            lf.cmat[1].at(i, l, static_cast<int>(e)) -= pb * phis[i] * ny;
                        }
                    }
                }
            }
        }
    });

    try {
        lf.mass_inv = lu_invert_batch(lf.mass);
    } catch (const SingularBlock& sb) {
        throw SingularMass(sb.index);
    }
    for (int d = 0; d < 2; ++d) {
        lf.minv_b[d] = gemm_batch(lf.mass_inv, lf.bmat[d]);
        lf.minv_c[d] = gemm_batch(lf.mass_inv, lf.cmat[d]);
    }
    return lf;
}

std::vector<double> gather_element_trace(const Mesh2D& mesh, int pf,
                                         const std::vector<double>& face_values) {
    std::vector<double> out(static_cast<std::size_t>(mesh.n_elements) * 4 * pf);
    parallel_for(static_cast<std::size_t>(mesh.n_elements), [&](std::size_t e0, std::size_t e1) {
        for (std::size_t e = e0; e < e1; ++e) {
            for (int lf = 0; lf < 4; ++lf) {
                const int f = mesh.element_to_face[e][lf];
                for (int b = 0; b < pf; ++b) {
                    out[e * 4 * pf + lf * pf + b] = face_values[static_cast<std::size_t>(f) * pf + b];
                }
            }
        }
    });
    return out;
}

void compute_q(StateFields& state, const LocalFactors& factors, const Mesh2D& mesh) {
    const std::vector<double> uhat_e = gather_element_trace(mesh, factors.pf, state.uhat);
    for (int d = 0; d < 2; ++d) {
        gemv_strided_batch(factors.minv_b[d], state.u, state.q[d], false);
        gemv_strided_batch(factors.minv_c[d], uhat_e, state.q[d], true);
        for (double& v : state.q[d]) v = -v;
    }
}

ElementOperators assemble_element_operators(const PdeModel& model, StateFields& state,
                                            const Mesh2D& mesh, const BasisTab& basis,
                                            const GeomFactors& geom, const LocalFactors& factors,
                                            const TimeContext& time, bool keep_raw) {
    LocalAssembly la = assemble_core(model, state, mesh, basis, geom, factors, time, true);

    ElementOperators ops;
    ops.pe = basis.pe;
    ops.pf = basis.pf;
    ops.ne = mesh.n_elements;
    ops.ru = std::move(la.ru);
    ops.ruhat_e = std::move(la.ruhat_e);

    DenseBatch ebar = la.e_mat;
    DenseBatch fbar = la.f_mat;
    DenseBatch hbar = la.h_mat;
    DenseBatch jbar = la.j_mat;
    for (int d = 0; d < 2; ++d) {
        sub_inplace(ebar.data, gemm_batch(la.d_mat[d], factors.minv_b[d]).data);
        sub_inplace(fbar.data, gemm_batch(la.d_mat[d], factors.minv_c[d]).data);
        sub_inplace(hbar.data, gemm_batch(la.g_mat[d], factors.minv_b[d]).data);
        sub_inplace(jbar.data, gemm_batch(la.g_mat[d], factors.minv_c[d]).data);
    }

    try {
        ops.ebar_inv = lu_invert_batch(ebar);
    } catch (const SingularBlock& sb) {
        throw SingularLocalSolve(sb.index);
    }
    ops.fbar = std::move(fbar);
    ops.hbar = std::move(hbar);

    DenseBatch einv_f = gemm_batch(ops.ebar_inv, ops.fbar);
    DenseBatch h_einv_f = gemm_batch(ops.hbar, einv_f);
    ops.kbar = std::move(jbar);
    sub_inplace(ops.kbar.data, h_einv_f.data);

    std::vector<double> einv_ru(ops.ru.size());
    gemv_strided_batch(ops.ebar_inv, ops.ru, einv_ru, false);
    ops.rbar.assign(ops.ruhat_e.begin(), ops.ruhat_e.end());
    std::vector<double> h_einv_ru(ops.rbar.size());
    gemv_strided_batch(ops.hbar, einv_ru, h_einv_ru, false);
    sub_inplace(ops.rbar, h_einv_ru);

    if (keep_raw) {
        ops.has_raw = true;
        ops.e_raw = std::move(la.e_mat);
        ops.f_raw = std::move(la.f_mat);
        ops.h_raw = std::move(la.h_mat);
        ops.j_raw = std::move(la.j_mat);
        ops.d_raw = std::move(la.d_mat);
        ops.g_raw = std::move(la.g_mat);
    }
    return ops;
}

Residuals assemble_residual(const PdeModel& model, StateFields& state, const Mesh2D& mesh,
                            const BasisTab& basis, const GeomFactors& geom,
                            const LocalFactors& factors, const TimeContext& time) {
    LocalAssembly la = assemble_core(model, state, mesh, basis, geom, factors, time, false);
    Residuals r;
    r.interior = std::move(la.ru);
    r.trace.assign(static_cast<std::size_t>(basis.pf) * mesh.n_faces, 0.0);
    const int pf = basis.pf;
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int lf = 0; lf < 4; ++lf) {
            const int f = mesh.element_to_face[e][lf];
            for (int b = 0; b < pf; ++b) {
                r.trace[static_cast<std::size_t>(f) * pf + b] +=
                    la.ruhat_e[static_cast<std::size_t>(e) * 4 * pf + lf * pf + b];
            }
        }
    }
    return r;
}

std::vector<double> recover_local(const ElementOperators& ops,
                                  const std::vector<double>& duhat_gathered) {
    std::vector<double> tmp(ops.ru.size());
    gemv_strided_batch(ops.fbar, duhat_gathered, tmp, false);
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = ops.ru[i] - tmp[i];
    std::vector<double> du(ops.ru.size());
    gemv_strided_batch(ops.ebar_inv, tmp, du, false);
    return du;
}

std::vector<double> interpolate_volume(const std::function<double(Vec2)>& fn, const Mesh2D& mesh,
                                       const BasisTab& basis) {
    const int n1 = basis.degree + 1;
    std::vector<double> out(static_cast<std::size_t>(basis.pe) * mesh.n_elements);
    for (int e = 0; e < mesh.n_elements; ++e) {
        std::array<std::array<double, 2>, 4> v;
        for (int c = 0; c < 4; ++c) v[c] = mesh.vertex_coords[mesh.element_vertices[e][c]];
        for (int bb = 0; bb < n1; ++bb) {
            for (int aa = 0; aa < n1; ++aa) {
                const double xi = basis.nodes1d[aa], eta = basis.nodes1d[bb];
                const double n0 = (1 - xi) * (1 - eta), n1s = xi * (1 - eta), n2 = xi * eta,
                             n3 = (1 - xi) * eta;
                const Vec2 x{n0 * v[0][0] + n1s * v[1][0] + n2 * v[2][0] + n3 * v[3][0],
                             n0 * v[0][1] + n1s * v[1][1] + n2 * v[2][1] + n3 * v[3][1]};
                out[static_cast<std::size_t>(e) * basis.pe + aa + n1 * bb] = fn(x);
            }
        }
    }
    return out;
}

std::vector<double> interpolate_trace(const std::function<double(Vec2)>& fn, const Mesh2D& mesh,
                                      const BasisTab& basis) {
    std::vector<double> out(static_cast<std::size_t>(basis.pf) * mesh.n_faces);
    for (int f = 0; f < mesh.n_faces; ++f) {
        const auto a = mesh.vertex_coords[mesh.face_vertices[f][0]];
        const auto b = mesh.vertex_coords[mesh.face_vertices[f][1]];
        for (int l = 0; l < basis.pf; ++l) {
            const double t = basis.nodes1d[l];
            out[static_cast<std::size_t>(f) * basis.pf + l] =
                fn({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    return out;
}

double l2_error(const std::vector<double>& u, const std::function<double(Vec2)>& exact,
                const Mesh2D& mesh, const BasisTab& basis, int extra) {
    const QuadratureRule fine1d = gauss_rule(basis.rule1d.size() + extra);
    const QuadratureRule2D fine = tensor_rule(fine1d);
    const std::vector<double> phi = eval_basis_at(basis, fine);
    const GeomFactors geom = compute_geometry(mesh, fine1d);
    const int pe = basis.pe, qe = fine.size();
    double acc = 0.0;
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int g = 0; g < qe; ++g) {
            const std::size_t gi = static_cast<std::size_t>(e) * qe + g;
            double uh = 0.0;
            const double* phig = phi.data() + static_cast<std::size_t>(pe) * g;
            for (int i = 0; i < pe; ++i) uh += u[static_cast<std::size_t>(e) * pe + i] * phig[i];
            const double diff = uh - exact({geom.elem_coords[gi * 2], geom.elem_coords[gi * 2 + 1]});
            acc += fine.weights[g] * geom.elem_detjac[gi] * diff * diff;
        }
    }
    return std::sqrt(acc);
}

double l2_norm(const std::vector<double>& u, const Mesh2D& mesh, const BasisTab& basis, int extra) {
    return l2_error(u, [](Vec2) { return 0.0; }, mesh, basis, extra);
}

} // namespace hdg

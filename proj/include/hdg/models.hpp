#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace hdg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Boundary-flux value and its partial derivatives with respect to the
/// interior trace (u), the gradient unknowns (q), and the face trace (uhat).
struct BoundaryFlux {
    double value = 0.0;
    double d_u = 0.0;
    Vec2 d_q{};
    double d_uhat = 0.0;
};

/// A scalar conservation-law model: flux, source, their derivatives,
/// stabilization, and boundary fluxes. All callbacks must be pure; they are
/// invoked concurrently from batched quadrature loops.
struct PdeModel {
    std::string name;
    int n_state = 1;
    bool time_dependent = false;

    /// Physical flux F(u, q, x), one component per space direction.
    std::function<Vec2(double u, Vec2 q, Vec2 x)> flux;
    std::function<Vec2(double u, Vec2 q, Vec2 x)> dflux_du;
    /// dflux_dq[d] = dF/dq_d (d = 0 for q_x, 1 for q_y).
    std::function<std::array<Vec2, 2>(double u, Vec2 q, Vec2 x)> dflux_dq;

    std::function<double(double u, Vec2 q, Vec2 x)> source;
    std::function<double(double u, Vec2 q, Vec2 x)> dsource_du;
    std::function<Vec2(double u, Vec2 q, Vec2 x)> dsource_dq;

    /// Stabilization scalar tau(u, uhat, n) > 0 (S = tau*I).
    std::function<double(double u, double uhat, Vec2 n)> tau;

    /// Boundary flux b-hat and derivatives for the given boundary tag.
    std::function<BoundaryFlux(int tag, double u, Vec2 q, double uhat, Vec2 n, Vec2 x)> boundary_flux;

    std::function<double(Vec2 x)> exact_solution; ///< optional, for error studies
    std::function<double(Vec2 x)> initial_state;  ///< optional, transient runs
};

/// Mixed-form Poisson model: F(u,q) = -q, so -div q = forcing with
/// q approximating grad u. Dirichlet data on the whole boundary.
PdeModel poisson_model(std::function<double(Vec2)> forcing, std::function<double(Vec2)> dirichlet,
                       std::optional<double> tau_override = std::nullopt);

/// Steady viscous Burgers model: F(u,q) = (u^2/2 - nu*q_x, u - nu*q_y),
/// Dirichlet u = 1-2x on the bottom/right/left boundaries and a
/// zero-gradient (Neumann-type) outflow condition on top.
PdeModel burgers_model(double nu, std::optional<double> tau_override = std::nullopt);

/// Linear convection-diffusion: F = (c_x u - kappa q_x, c_y u - kappa q_y)
/// with Dirichlet data on the whole boundary.
PdeModel convdiff_model(Vec2 velocity, double kappa, std::function<double(Vec2)> forcing,
                        std::function<double(Vec2)> dirichlet,
                        std::optional<double> tau_override = std::nullopt);

} // namespace hdg

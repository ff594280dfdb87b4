#include "hdg/models.hpp"

#include <cmath>
#include <utility>

namespace hdg {


PdeModel poisson_model(std::function<double(Vec2)> forcing, std::function<double(Vec2)> dirichlet,
                       std::optional<double> tau_override) {
    PdeModel m;
    m.name = "poisson2d";
    m.flux = [](double, Vec2 q, Vec2) { return Vec2{-q.x, -q.y}; };
    m.dflux_du = [](double, Vec2, Vec2) { return Vec2{0.0, 0.0}; };
    m.dflux_dq = [](double, Vec2, Vec2) {
        return std::array<Vec2, 2>{Vec2{-1.0, 0.0}, Vec2{0.0, -1.0}};
    };
    m.source = [f = std::move(forcing)](double, Vec2, Vec2 x) { return f(x); };
    m.dsource_du = [](double, Vec2, Vec2) { return 0.0; };
    m.dsource_dq = [](double, Vec2, Vec2) { return Vec2{0.0, 0.0}; };
    const double tau = tau_override.value_or(1.0);
    m.tau = [tau](double, double, Vec2) { return tau; };
    m.boundary_flux = [g = std::move(dirichlet)](int, double, Vec2, double uhat, Vec2, Vec2 x) {
        BoundaryFlux b;
        b.value = uhat - g(x);
        b.d_uhat = 1.0;
        return b;
    };
    return m;
}

PdeModel burgers_model(double nu, std::optional<double> tau_override) {
    PdeModel m;
    m.name = "burgers2d";
    m.flux = [nu](double u, Vec2 q, Vec2) { return Vec2{0.5 * u * u - nu * q.x, u - nu * q.y}; };
    m.dflux_du = [](double u, Vec2, Vec2) { return Vec2{u, 1.0}; };
    m.dflux_dq = [nu](double, Vec2, Vec2) {
        return std::array<Vec2, 2>{Vec2{-nu, 0.0}, Vec2{0.0, -nu}};
    };
    m.source = [](double, Vec2, Vec2) { return 0.0; };
    m.dsource_du = [](double, Vec2, Vec2) { return 0.0; };
    m.dsource_dq = [](double, Vec2, Vec2) { return Vec2{0.0, 0.0}; };
    const double tau = tau_override.value_or(10.0 * nu + 1.0);
    m.tau = [tau](double, double, Vec2) { return tau; };
    m.boundary_flux = [tau](int tag, double u, Vec2 q, double uhat, Vec2 n, Vec2 x) {
        BoundaryFlux b;
        if (tag == 3) {
            // Top boundary: zero-gradient outflow, imposed through the
            // Neumann-type flux q.n + tau (u - uhat).
            b.value = q.x * n.x + q.y * n.y + tau * (u - uhat);
            b.d_u = tau;
            b.d_q = {n.x, n.y};
            b.d_uhat = -tau;
            return b;
        }
        b.value = uhat - (1.0 - 2.0 * x.x);
        b.d_uhat = 1.0;
        return b;
    };
    return m;
}

PdeModel convdiff_model(Vec2 velocity, double kappa, std::function<double(Vec2)> forcing,
                        std::function<double(Vec2)> dirichlet, std::optional<double> tau_override) {
    PdeModel m;
    m.name = "convdiff2d";
    const double cx = velocity.x, cy = velocity.y;
    m.flux = [cx, cy, kappa](double u, Vec2 q, Vec2) {
        return Vec2{cx * u - kappa * q.x, cy * u - kappa * q.y};
    };
    m.dflux_du = [cx, cy](double, Vec2, Vec2) { return Vec2{cx, cy}; };
    m.dflux_dq = [kappa](double, Vec2, Vec2) {
        return std::array<Vec2, 2>{Vec2{-kappa, 0.0}, Vec2{0.0, -kappa}};
    };
    m.source = [f = std::move(forcing)](double, Vec2, Vec2 x) { return f(x); };
    m.dsource_du = [](double, Vec2, Vec2) { return 0.0; };
    m.dsource_dq = [](double, Vec2, Vec2) { return Vec2{0.0, 0.0}; };
    if (tau_override) {
        const double tau = *tau_override;
        m.tau = [tau](double, double, Vec2) { return tau; };
    } else {
        m.tau = [cx, cy, kappa](double, double, Vec2 n) {
            return kappa + std::abs(cx * n.x + cy * n.y);
        };
    }
    m.boundary_flux = [g = std::move(dirichlet)](int, double, Vec2, double uhat, Vec2, Vec2 x) {
        BoundaryFlux b;
        b.value = uhat - g(x);
        b.d_uhat = 1.0;
        return b;
    };
    return m;
}

} // namespace hdg

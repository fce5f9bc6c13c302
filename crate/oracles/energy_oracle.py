"""Independent minimiser for the discrete energy (jax autodiff + scipy trust region).

Prints frozen reference values for the Rust solver tests.
"""
import json

import jax
import jax.numpy as jnp
import numpy as np
from scipy.optimize import minimize

jax.config.update("jax_enable_x64", True)

GL_X, GL_W = np.polynomial.legendre.leggauss(80)


def profile(name):
    if name == "area":
        return lambda r2: jnp.sqrt(1.0 + r2)
    if name == "quadratic":
        return lambda r2: 0.5 * r2
    mu = float(name.split(":")[1])

    def g(r2):
        r = jnp.sqrt(r2)
        t = 0.5 * r * (GL_X + 1.0)
        return 0.5 * r * jnp.sum(GL_W * (r - t) * (1.0 + t * t) ** (-mu / 2))

    return jax.vmap(g)


def u0_field(name, n):
    h = 1.0 / (n - 1)
    x, y = np.meshgrid(np.arange(n) * h, np.arange(n) * h, indexing="ij")
    if name == "shear":
        return np.stack([0.5 * np.sin(3 * x * y), x * x - 0.5 * y], axis=-1)
    if name == "bend":
        return np.stack([0.4 * x * y, -0.2 * x * x + 0.3 * np.sin(np.pi * y)], axis=-1)
    raise ValueError(name)


def make_energy(fname, n, j, u0):
    h = 1.0 / (n - 1)
    g = profile(fname)
    interior = np.zeros((n, n), bool)
    interior[1:-1, 1:-1] = True

    def full(z):
        u = jnp.asarray(u0)
        return u.at[1:-1, 1:-1, :].set(z.reshape(n - 2, n - 2, 2))

    def energy(z):
        u = full(z)
        a, b, c, d = u[:-1, :-1], u[1:, :-1], u[:-1, 1:], u[1:, 1:]
        dx = ((b - a) + (d - c)) / (2 * h)
        dy = ((c - a) + (d - b)) / (2 * h)
        exx, eyy, exy = dx[..., 0], dy[..., 1], 0.5 * (dy[..., 0] + dx[..., 1])
        r2 = (exx**2 + eyy**2 + 2 * exy**2).reshape(-1)
        e = jnp.sum(g(r2)) * h * h
        if j > 0:
            e = e + (0.5 / j) * jnp.sum(r2) * h * h
        return e

    return energy, u0[1:-1, 1:-1, :].reshape(-1)


def solve(fname, n, j, u0name):
    u0 = u0_field(u0name, n)
    energy, z0 = make_energy(fname, n, j, u0)
    fun = jax.jit(energy)
    jac = jax.jit(jax.grad(energy))
    hess = jax.jit(jax.hessian(energy))
    res = minimize(fun, z0, jac=jac, hess=hess, method="trust-exact", options={"gtol": 1e-13, "maxiter": 500})
    return float(res.fun), float(np.max(np.abs(jac(res.x))))


if __name__ == "__main__":
    out = {}
    for fname, n, j, u0 in [
        ("area", 8, 0, "shear"),
        ("area", 8, 1, "shear"),
        ("area", 16, 0, "bend"),
        ("phi_mu:1.5", 8, 0, "shear"),
        ("phi_mu:1.2", 8, 4, "bend"),
    ]:
        e, gn = solve(fname, n, j, u0)
        key = f"{fname}/{n}/{j}/{u0}"
        out[key] = e
        print(f"{key}: {e!r} (grad {gn:.1e})")
    print(json.dumps(out, indent=1))

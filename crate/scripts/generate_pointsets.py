#!/usr/bin/env python3
"""Regenerate the point-set fixtures under data/pointsets/.

The library only ingests externally computed configurations. This script
produces the ones used by the test suite:

  * well-conditioned spherical t-designs with m = (t+1)^2 points, found by
    Gauss-Newton (minimum-norm steps) on the residuals sum_j Y_{l,k}(x_j),
    1 <= l <= t, started from generalized spiral points;
  * Coulomb minimal-energy points (L-BFGS on the normalized coordinates);
  * approximate Fekete points (gradient ascent on log|det| of the basis
    matrix, started from the minimal-energy set).

Usage: python3 scripts/generate_pointsets.py [outdir [t ...] [--designs]]

With strengths given, only those designs are (re)generated first; --designs
skips the minimal-energy and Fekete sets.
"""

import sys
import time
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.special import sph_harm_y


def spiral_points(m):
    k = np.arange(1, m + 1)
    z = 1.0 - (2.0 * k - 1.0) / m
    theta = np.arccos(z)
    phi = np.zeros(m)
    for i in range(1, m - 1):
        phi[i] = (phi[i - 1] + 3.6 / np.sqrt(m * (1.0 - z[i] ** 2))) % (2 * np.pi)
    phi[-1] = 0.0
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1
    )


def real_harmonics(deg, pts, lmin=0):
    """Rows: real orthonormal harmonics for lmin <= l <= deg; columns: points."""
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    rows = []
    for l in range(lmin, deg + 1):
        ms = np.arange(0, l + 1)
        c = sph_harm_y(l, ms[:, None], theta[None, :], phi[None, :])
        rows.append(c[0].real)
        rows.append(np.sqrt(2.0) * c[1:].real)
        rows.append(np.sqrt(2.0) * c[1:].imag)
    return np.vstack(rows)


def tangent_frames(pts):
    a = np.where(np.abs(pts[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    u = np.cross(pts, a)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = np.cross(pts, u)
    return u, v


def retract(pts, u, v, a, b):
    q = pts + a[:, None] * u + b[:, None] * v
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def tangent_derivatives(deg, pts, lmin, h=1e-6):
    u, v = tangent_frames(pts)
    zero = np.zeros(len(pts))
    hv = np.full(len(pts), h)
    da = (real_harmonics(deg, retract(pts, u, v, hv, zero), lmin)
          - real_harmonics(deg, retract(pts, u, v, -hv, zero), lmin)) / (2 * h)
    db = (real_harmonics(deg, retract(pts, u, v, zero, hv), lmin)
          - real_harmonics(deg, retract(pts, u, v, zero, -hv), lmin)) / (2 * h)
    return u, v, da, db


def t_design(t, max_iter=60, tol=1e-14):
    m = (t + 1) ** 2
    pts = spiral_points(m)
    res = real_harmonics(t, pts, lmin=1).sum(axis=1)
    norm = np.linalg.norm(res)
    for it in range(max_iter):
        if norm < tol:
            break
        u, v, da, db = tangent_derivatives(t, pts, 1)
        jac = np.hstack([da, db])
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            cand = retract(pts, u, v, lam * step[:m], lam * step[m:])
            cres = real_harmonics(t, cand, lmin=1).sum(axis=1)
            cnorm = np.linalg.norm(cres)
            if cnorm < norm:
                break
            lam *= 0.5
        if cnorm >= norm:
            break
        stalled = norm < 1e-12 and cnorm > 0.5 * norm
        pts, res, norm = cand, cres, cnorm
        if stalled:
            break
        print(f"  t={t} iter={it} |r|={norm:.3e}", flush=True)
    return pts, norm


def coulomb_energy(flat, m):
    p = flat.reshape(m, 3)
    r = np.linalg.norm(p, axis=1, keepdims=True)
    x = p / r
    diff = x[:, None, :] - x[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(dist, np.inf)
    energy = np.sum(1.0 / dist) / 2.0
    gx = -np.sum(diff / dist[:, :, None] ** 3, axis=1)
    # chain rule through x = p / |p|
    gp = (gx - np.sum(gx * x, axis=1, keepdims=True) * x) / r
    return energy, gp.ravel()


def minimal_energy(m):
    pts = spiral_points(m)
    out = minimize(coulomb_energy, pts.ravel(), args=(m,), jac=True, method="L-BFGS-B",
                   options={"maxiter": 5000, "gtol": 1e-12, "ftol": 1e-16})
    p = out.x.reshape(m, 3)
    return p / np.linalg.norm(p, axis=1, keepdims=True), out.fun


def fekete(deg, start, iters=400):
    pts = start.copy()
    m = len(pts)
    assert m == (deg + 1) ** 2

    def logdet(p):
        return np.linalg.slogdet(real_harmonics(deg, p))[1]

    cur = logdet(pts)
    step = 0.05 / np.sqrt(m)
    for it in range(iters):
        basis = real_harmonics(deg, pts)
        inv_t = np.linalg.inv(basis).T
        u, v, da, db = tangent_derivatives(deg, pts, 0)
        ga = np.sum(inv_t * da, axis=0)
        gb = np.sum(inv_t * db, axis=0)
        gnorm = np.sqrt(np.sum(ga ** 2 + gb ** 2))
        accepted = False
        while step > 1e-9:
            cand = retract(pts, u, v, step * ga / gnorm, step * gb / gnorm)
            val = logdet(cand)
            if val > cur:
                pts, cur, accepted = cand, val, True
                step *= 1.5
                break
            step *= 0.5
        if not accepted:
            break
        if it % 20 == 0:
            print(f"  fekete iter={it} logdet={cur:.10f} step={step:.2e}", flush=True)
    return pts, cur


def write(path, pts, header):
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for p in pts:
            fh.write(f"{p[0]:.16e} {p[1]:.16e} {p[2]:.16e}\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/pointsets")
    out.mkdir(parents=True, exist_ok=True)
    designs_only = "--designs" in sys.argv
    strengths = [int(a) for a in sys.argv[2:] if a.isdigit()] or [10, 20, 30, 40]
    for t in strengths:
        start = time.time()
        pts, norm = t_design(t)
        m = len(pts)
        write(out / f"sd_t{t:02d}_m{m}.txt", pts,
              [f"well-conditioned spherical {t}-design, m = {m}",
               f"residual |sum_j Y_lk(x_j)|_2 over 1<=l<={t}: {norm:.3e}"])
        print(f"t={t} m={m} residual={norm:.3e} ({time.time() - start:.1f}s)", flush=True)
    if designs_only:
        return
    for m in (441,):
        pts, energy = minimal_energy(m)
        write(out / f"me_m{m}.txt", pts,
              [f"Coulomb minimal-energy points, m = {m}", f"energy: {energy:.12f}"])
        print(f"minimal energy m={m} E={energy:.10f}", flush=True)
        deg = int(round(np.sqrt(m))) - 1
        fpts, ld = fekete(deg, pts)
        write(out / f"fk_m{m}.txt", fpts,
              [f"approximate Fekete points for degree {deg}, m = {m}",
               f"log|det| of the orthonormal basis matrix: {ld:.12f}"])
        print(f"fekete m={m} logdet={ld:.10f}", flush=True)


if __name__ == "__main__":
    main()

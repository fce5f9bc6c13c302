use alloc::vec;
use alloc::vec::Vec;

use super::SampledFunction;
use crate::error::{Error, Result};
use crate::math::{ln, powf};

/// Mean oscillation `|Q|^{-1} sum_Q |u - u_Q|` of the lattice cube with
/// lower corner `(i0, j0)` and `mx x my` nodes.
pub fn cube_oscillation(u: &SampledFunction, i0: usize, j0: usize, mx: usize, my: usize) -> f64 {
    let nc = u.ncomp;
    let mut mean = [0.0f64; 4];
    let mut big = Vec::new();
    let m: &mut [f64] = if nc <= 4 {
        &mut mean[..nc]
    } else {
        big.resize(nc, 0.0);
        &mut big[..]
    };
    for j in j0..j0 + my {
        for i in i0..i0 + mx {
            for (c, v) in u.at(i + j * u.nx).iter().enumerate() {
                m[c] += v;
            }
        }
    }
    let cnt = (mx * my) as f64;
    for v in m.iter_mut() {
        *v /= cnt;
    }
    let mut acc = 0.0;
    for j in j0..j0 + my {
        for i in i0..i0 + mx {
            let x = u.at(i + j * u.nx);
            if nc == 1 {
                acc += (x[0] - m[0]).abs();
            } else {
                acc += crate::math::sqrt(x.iter().zip(m.iter()).map(|(a, b)| (a - b) * (a - b)).sum());
            }
        }
    }
    acc / cnt
}

/// Largest half-width of a centred cube at node `(i, j)` inside the lattice.
fn max_radius(u: &SampledFunction, i: usize, j: usize) -> usize {
    let r = i.min(u.nx - 1 - i);
    if u.dim() == 1 {
        r
    } else {
        r.min(j).min(u.ny - 1 - j)
    }
}

fn centred_osc(u: &SampledFunction, i: usize, j: usize, r: usize) -> f64 {
    let m = 2 * r + 1;
    if u.dim() == 1 {
        cube_oscillation(u, i - r, 0, m, 1)
    } else {
        cube_oscillation(u, i - r, j - r, m, m)
    }
}

/// Per node and per admissible half-width `r >= 1`, the mean oscillation of
/// the centred cube of `2r + 1` nodes (side `(2r + 1) h`).
pub fn centred_oscillations(u: &SampledFunction) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(u.num_nodes());
    for j in 0..u.ny {
        for i in 0..u.nx {
            let rmax = max_radius(u, i, j);
            out.push((1..=rmax).map(|r| centred_osc(u, i, j, r)).collect());
        }
    }
    out
}

fn frac_from_table(u: &SampledFunction, table: &[Vec<f64>], alpha: f64) -> SampledFunction {
    let vals = table
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, o)| if alpha == 0.0 { *o } else { o / powf((2 * k + 3) as f64 * u.h, alpha) })
                .fold(0.0, f64::max)
        })
        .collect();
    u.scalar_like(vals)
}

/// Centred sharp maximal function of order `alpha`:
/// `sup_r osc(Q_r(x)) / l(Q_r)^alpha` over cubes inside the lattice.
pub fn frac_sharp_maximal(u: &SampledFunction, alpha: f64) -> SampledFunction {
    frac_from_table(u, &centred_oscillations(u), alpha)
}

pub fn sharp_maximal(u: &SampledFunction) -> SampledFunction {
    frac_sharp_maximal(u, 0.0)
}

/// Discrete BMO seminorm: the largest value of the sharp maximal function.
pub fn bmo_norm(u: &SampledFunction) -> f64 {
    sharp_maximal(u).values.iter().cloned().fold(0.0, f64::max)
}

/// Enumerates every centred cube explicitly; slow oracle for
/// [`frac_sharp_maximal`].
pub fn frac_sharp_maximal_brute_force(u: &SampledFunction, alpha: f64) -> Vec<f64> {
    let mut out = vec![0.0; u.num_nodes()];
    for j in 0..u.ny {
        for i in 0..u.nx {
            let mut best: f64 = 0.0;
            for r in 1..u.nx.max(u.ny) {
                let fits = i >= r && i + r < u.nx && (u.dim() == 1 || (j >= r && j + r < u.ny));
                if !fits {
                    continue;
                }
                let m = 2 * r + 1;
                let (j0, my) = if u.dim() == 1 { (0, 1) } else { (j - r, m) };
                let mut mean = vec![0.0; u.ncomp];
                for jj in j0..j0 + my {
                    for ii in i - r..=i + r {
                        for c in 0..u.ncomp {
                            mean[c] += u.at(ii + jj * u.nx)[c];
                        }
                    }
                }
                let cnt = (m * my) as f64;
                let mut osc = 0.0;
                for jj in j0..j0 + my {
                    for ii in i - r..=i + r {
                        let d: f64 = (0..u.ncomp).map(|c| { let d = u.at(ii + jj * u.nx)[c] - mean[c] / cnt; d * d }).sum();
                        osc += crate::math::sqrt(d);
                    }
                }
                best = best.max(osc / cnt / powf(m as f64 * u.h, alpha));
            }
            out[j * u.nx + i] = best;
        }
    }
    out
}

/// `min_x [ (M#_s u)^lambda (M#_t u)^{1 - lambda} - M#_{lambda s + (1 - lambda) t} u ]`.
pub fn logconvexity_check(u: &SampledFunction, s: f64, t: f64, lambda: f64) -> Result<f64> {
    for (name, v) in [("s", s), ("t", t), ("lambda", lambda)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Param { name, value: v, range: "(0, 1)" });
        }
    }
    let table = centred_oscillations(u);
    let ms = frac_from_table(u, &table, s);
    let mt = frac_from_table(u, &table, t);
    let mm = frac_from_table(u, &table, lambda * s + (1.0 - lambda) * t);
    let mut margin = f64::INFINITY;
    for k in 0..u.num_nodes() {
        let rhs = powf(ms.values[k], lambda) * powf(mt.values[k], 1.0 - lambda);
        margin = margin.min(rhs - mm.values[k]);
    }
    Ok(margin)
}

/// `L^p` norm of `M#_alpha u`.
pub fn calderon_seminorm(u: &SampledFunction, alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Param { name: "alpha", value: alpha, range: "(0, inf)" });
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Param { name: "p", value: p, range: "[1, inf)" });
    }
    let m = frac_sharp_maximal(u, alpha);
    Ok(powf(m.values.iter().map(|v| powf(*v, p)).sum::<f64>() * u.cell_volume(), 1.0 / p))
}

/// Oscillation of every cube with `m` nodes per side, indexed by lower corner.
fn all_cube_osc(u: &SampledFunction, m: usize) -> (usize, usize, Vec<f64>) {
    let (mx, my) = if u.dim() == 1 { (m, 1) } else { (m, m) };
    let px = u.nx + 1 - mx;
    let py = u.ny + 1 - my;
    let mut out = Vec::with_capacity(px * py);
    for j0 in 0..py {
        for i0 in 0..px {
            out.push(cube_oscillation(u, i0, j0, mx, my));
        }
    }
    (px, py, out)
}

/// For each node the largest oscillation among the `m`-node cubes that
/// contain it (separable sliding maximum).
fn containing_max(u: &SampledFunction, m: usize) -> Vec<f64> {
    let (px, py, osc) = all_cube_osc(u, m);
    let my = if u.dim() == 1 { 1 } else { m };
    let mut rowmax = vec![0.0; u.nx * py];
    for j0 in 0..py {
        for i in 0..u.nx {
            let lo = (i + 1).saturating_sub(m);
            let hi = i.min(px - 1);
            let mut b: f64 = 0.0;
            for i0 in lo..=hi {
                b = b.max(osc[i0 + j0 * px]);
            }
            rowmax[i + j0 * u.nx] = b;
        }
    }
    let mut out = vec![0.0; u.num_nodes()];
    for j in 0..u.ny {
        let lo = (j + 1).saturating_sub(my);
        let hi = j.min(py - 1);
        for i in 0..u.nx {
            let mut b: f64 = 0.0;
            for j0 in lo..=hi {
                b = b.max(rowmax[i + j0 * u.nx]);
            }
            out[i + j * u.nx] = b;
        }
    }
    out
}

fn dyadic_sides(u: &SampledFunction) -> Vec<usize> {
    let lim = if u.dim() == 1 { u.nx } else { u.nx.min(u.ny) };
    let mut m = 2;
    let mut v = Vec::new();
    while m <= lim {
        v.push(m);
        m *= 2;
    }
    v
}

/// Mean-oscillation seminorm
/// `(sum_x h^n sum_{m dyadic} ln 2 (sup_{Q ∋ x, side m h} osc_Q / (m h)^s)^p)^{1/p}`.
pub fn doro_seminorm(u: &SampledFunction, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Param { name: "s", value: s, range: "(0, 1)" });
    }
    if !(p > 1.0) {
        return Err(Error::Param { name: "p", value: p, range: "(1, inf)" });
    }
    let mut acc = 0.0;
    for m in dyadic_sides(u) {
        let t = m as f64 * u.h;
        let scale = powf(t, -s * p) * ln(2.0);
        acc += containing_max(u, m).iter().map(|o| powf(*o, p)).sum::<f64>() * scale;
    }
    Ok(powf(acc * u.cell_volume(), 1.0 / p))
}

/// `doro_seminorm / gagliardo`, 0 for constants.
pub fn doro_ratio(u: &SampledFunction, s: f64, p: f64) -> Result<f64> {
    let d = doro_seminorm(u, s, p)?;
    let g = super::gagliardo(u, s, p)?;
    Ok(if g == 0.0 { 0.0 } else { d / g })
}

/// Covering constant: an `m`-node cube containing `x` lies in the centred
/// cube of half-width `m - 1`, whose side is below `K m`.
pub const COVERING_K: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DoroReduction {
    /// `min_x (C M#_alpha u(x) - sup_{Q ∋ x} osc_Q / l(Q)^alpha)`, `C = 2 K^{2n + alpha}`.
    pub margin: f64,
    /// Largest ratio of the uncentred to the centred value.
    pub max_ratio: f64,
    pub constant: f64,
    pub nodes_checked: usize,
}

/// Compares uncentred against centred sharp maximal functions of order
/// `alpha`, at each node using the cube sizes whose covering centred cube
/// fits in the lattice.
pub fn doro_reduction_check(u: &SampledFunction, alpha: f64) -> Result<DoroReduction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Param { name: "alpha", value: alpha, range: "[0, 1]" });
    }
    let n = u.dim() as f64;
    let constant = 2.0 * powf(COVERING_K, 2.0 * n + alpha);
    let centred = frac_sharp_maximal(u, alpha);
    let lim = if u.dim() == 1 { u.nx } else { u.nx.min(u.ny) };
    let mut unc = vec![0.0f64; u.num_nodes()];
    let mut any = vec![false; u.num_nodes()];
    for m in 2..=lim {
        let cm = containing_max(u, m);
        let ell = powf(m as f64 * u.h, alpha);
        for j in 0..u.ny {
            for i in 0..u.nx {
                if max_radius(u, i, j) + 1 >= m {
                    let k = i + j * u.nx;
                    unc[k] = unc[k].max(cm[k] / ell);
                    any[k] = true;
                }
            }
        }
    }
    let mut margin = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut checked = 0;
    for k in 0..u.num_nodes() {
        if !any[k] {
            continue;
        }
        checked += 1;
        margin = margin.min(constant * centred.values[k] - unc[k]);
        if centred.values[k] > 0.0 {
            max_ratio = max_ratio.max(unc[k] / centred.values[k]);
        }
    }
    Ok(DoroReduction { margin, max_ratio, constant, nodes_checked: checked })
}

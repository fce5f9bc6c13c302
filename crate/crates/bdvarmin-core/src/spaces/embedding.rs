//! Embedding experiments: the steep-ramp sequence on `(-1, 1)`, the
//! `BD ∩ BMO` fractional embedding and a small corpus of smooth fields.

use alloc::string::String;
use alloc::vec::Vec;

use super::{bmo_norm, gagliardo, w11_seminorm, SampledFunction};
use crate::error::{Error, Result};
use crate::grid::{sym_gradient, GridDomain, VectorField};
use crate::math::{cos, exp, sin};

/// `u_k(x) = clamp(k x, -1, 1)` sampled on `[-1, 1]` with `n` nodes.
pub fn bbm_field(k: f64, n: usize) -> Result<SampledFunction> {
    if n < 3 {
        return Err(Error::GridTooSmall { nx: n, ny: 1 });
    }
    let h = 2.0 / (n - 1) as f64;
    SampledFunction::line(n, -1.0, h, |x| (k * x).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BbmRow {
    pub k: f64,
    /// `gagliardo(u_k, 1/2, 2)^2`.
    pub gagliardo_sq: f64,
    /// `besov_nikolskii(u_k, 1/2, 2, inf)`.
    pub besov: f64,
    pub max_abs: f64,
    pub w11: f64,
}

/// Fractional energies of the ramps `u_k` for each `k`, on `n` nodes.
pub fn bbm_experiment(ks: &[f64], n: usize) -> Result<Vec<BbmRow>> {
    ks.iter()
        .map(|&k| {
            let u = bbm_field(k, n)?;
            let g = gagliardo(&u, 0.5, 2.0)?;
            Ok(BbmRow {
                k,
                gagliardo_sq: g * g,
                besov: super::besov_nikolskii(&u, 0.5, 2.0, f64::INFINITY)?,
                max_abs: u.max_abs(),
                w11: w11_seminorm(&u),
            })
        })
        .collect()
}

/// Mean increase of `gagliardo_sq` per doubling of `k` (least squares
/// slope against `log2 k`).
pub fn growth_per_doubling(rows: &[BbmRow]) -> f64 {
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| crate::math::ln(r.k) / core::f64::consts::LN_2).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = rows.iter().map(|r| r.gagliardo_sq).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, r) in xs.iter().zip(rows) {
        sxy += (x - mx) * (r.gagliardo_sq - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq)]
pub struct BdBmoReport {
    /// Total variation of `Eu` (vector fields on a grid) or of `Du`.
    pub total_variation: f64,
    pub bmo: f64,
    /// `gagliardo(u, 1/p - eps, p)`.
    pub gagliardo: f64,
    /// `gagliardo / (total_variation + bmo)`.
    pub ratio: f64,
    /// `eps == 0`, where the embedding is expected to fail.
    pub critical: bool,
}

/// `eps` must be 0 (the critical case, reported as such) or lie strictly
/// between 0 and the admissible bound for the dimension of `u`.
pub fn bd_bmo_embedding_experiment(u: &SampledFunction, p: f64, eps: f64) -> Result<BdBmoReport> {
    if !(p > 1.0) {
        return Err(Error::Param { name: "p", value: p, range: "(1, inf)" });
    }
    let bound = super::bd_bmo_eps_bound(u.dim() as u32, p);
    let critical = eps == 0.0;
    if !critical && !(eps > 0.0 && eps < bound) {
        return Err(Error::Param { name: "eps", value: eps, range: "0 or (0, eps_max)" });
    }
    let total_variation = if u.dim() == 2 && u.ncomp == 2 {
        let g = GridDomain::new(u.nx, u.ny, u.h)?;
        let vals = u.values.chunks(2).map(|c| [c[0], c[1]]).collect();
        sym_gradient(&VectorField::new(g, vals)?).l1_norm()
    } else {
        w11_seminorm(u)
    };
    let bmo = bmo_norm(u);
    let gag = gagliardo(u, 1.0 / p - eps, p)?;
    let d = total_variation + bmo;
    Ok(BdBmoReport { total_variation, bmo, gagliardo: gag, ratio: if d == 0.0 { 0.0 } else { gag / d }, critical })
}

/// Smooth scalar test fields on the unit square with `n` nodes per side.
pub fn smooth_corpus(n: usize) -> Result<Vec<(String, SampledFunction)>> {
    let g = GridDomain::unit_square(n)?;
    let tau = core::f64::consts::TAU;
    Ok(alloc::vec![
        ("sine".into(), SampledFunction::scalar_2d(g, |x, y| sin(tau * x) * sin(tau * y))),
        ("bump".into(), SampledFunction::scalar_2d(g, |x, y| exp(-20.0 * ((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6))))),
        ("poly".into(), SampledFunction::scalar_2d(g, |x, y| x * x * y - y * y * y / 3.0)),
        ("mixed".into(), SampledFunction::scalar_2d(g, |x, y| sin(3.0 * x + 2.0 * y) + 0.5 * cos(5.0 * y))),
    ])
}

/// Smooth displacement fields (two components) on the unit square.
pub fn smooth_vector_corpus(n: usize) -> Result<Vec<(String, SampledFunction)>> {
    let g = GridDomain::unit_square(n)?;
    let tau = core::f64::consts::TAU;
    let fields = [
        ("shear", VectorField::from_fn(g, |x, y| [sin(tau * y) * 0.3, x * y])),
        ("swirl", VectorField::from_fn(g, |x, y| [-sin(tau * x) * cos(tau * y), cos(tau * x) * sin(tau * y)])),
        ("bump", VectorField::from_fn(g, |x, y| {
            let b = exp(-10.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
            [b, -0.5 * b]
        })),
    ];
    Ok(fields.into_iter().map(|(n, v)| (String::from(n), SampledFunction::from_vector_field(&v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_is_exact() {
        let rows = bbm_experiment(&[2.0, 8.0], 257).unwrap();
        for r in rows {
            assert_eq!(r.max_abs, 1.0);
            assert_eq!(r.w11, 2.0);
        }
    }

    #[test]
    fn eps_validation() {
        let u = bbm_field(4.0, 65).unwrap();
        assert!(bd_bmo_embedding_experiment(&u, 2.0, 0.0).unwrap().critical);
        assert!(bd_bmo_embedding_experiment(&u, 2.0, 0.1).is_err());
        let c = smooth_vector_corpus(9).unwrap();
        let r = bd_bmo_embedding_experiment(&c[0].1, 2.0, 0.1).unwrap();
        assert!(!r.critical && r.ratio.is_finite());
        assert!(bd_bmo_embedding_experiment(&c[0].1, 2.0, 0.2).is_err());
    }
}

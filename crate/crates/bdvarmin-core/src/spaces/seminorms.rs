use alloc::vec::Vec;

use super::SampledFunction;
use crate::error::{Error, Result};
use crate::math::{ln, powf, sqrt};

/// `sum_k |tau_k u|^p` over nodes where the shift stays on the lattice.
fn shifted_sum(u: &SampledFunction, dx: isize, dy: isize, p: f64) -> f64 {
    let (nx, ny) = (u.nx as isize, u.ny as isize);
    let mut acc = 0.0;
    let (ilo, ihi) = (0.max(-dx), nx.min(nx - dx));
    let (jlo, jhi) = (0.max(-dy), ny.min(ny - dy));
    for j in jlo..jhi {
        for i in ilo..ihi {
            let a = (i + j * nx) as usize;
            let b = (i + dx + (j + dy) * nx) as usize;
            let d = u.dist(a, b);
            if d != 0.0 {
                acc += if p == 2.0 { d * d } else if p == 1.0 { d } else { powf(d, p) };
            }
        }
    }
    acc
}

/// Gagliardo seminorm `(sum_{x != y} |u(x) - u(y)|^p / |x - y|^{n + sp} h^{2n})^{1/p}`
/// over ordered node pairs.
pub fn gagliardo(u: &SampledFunction, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Param { name: "s", value: s, range: "(0, 1)" });
    }
    if !(p >= 1.0) {
        return Err(Error::Param { name: "p", value: p, range: "[1, inf)" });
    }
    let n = u.dim() as f64;
    let vol = u.cell_volume();
    let mut total = 0.0;
    let (nx, ny) = (u.nx as isize, u.ny as isize);
    // Half of the offsets; the other half contributes the same.
    for dy in 0..ny {
        let dxlo = if dy == 0 { 1 } else { -(nx - 1) };
        for dx in dxlo..nx {
            let r = u.h * sqrt((dx * dx + dy * dy) as f64);
            let w = vol * vol / powf(r, n + s * p);
            total += w * shifted_sum(u, dx, dy, p);
        }
    }
    Ok(powf(2.0 * total, 1.0 / p))
}

/// Plain double loop over node pairs, for cross-checks on small inputs.
pub fn gagliardo_brute_force(u: &SampledFunction, s: f64, p: f64) -> f64 {
    let n = u.dim() as f64;
    let vol = u.cell_volume();
    let mut total = 0.0;
    for a in 0..u.num_nodes() {
        for b in 0..u.num_nodes() {
            if a == b {
                continue;
            }
            let (ia, ja) = ((a % u.nx) as f64, (a / u.nx) as f64);
            let (ib, jb) = ((b % u.nx) as f64, (b / u.nx) as f64);
            let r = u.h * sqrt((ia - ib) * (ia - ib) + (ja - jb) * (ja - jb));
            total += powf(u.dist(a, b), p) / powf(r, n + s * p) * vol * vol;
        }
    }
    powf(total, 1.0 / p)
}

/// `||tau_{s,kh} u||_{L^p}` over valid nodes.
pub fn shift_lp_norm(u: &SampledFunction, axis: usize, k: usize, p: f64) -> f64 {
    let (dx, dy) = if axis == 0 { (k as isize, 0) } else { (0, k as isize) };
    powf(shifted_sum(u, dx, dy, p) * u.cell_volume(), 1.0 / p)
}

/// Nikolskii-Besov seminorm of order `alpha`.
///
/// `q = inf`: `sup_{k, s} ||tau_{s,kh} u||_p / (kh)^alpha` over every
/// realizable shift. Finite `q`: dyadic shifts `k = 1, 2, 4, ...`, each with
/// weight `ln 2` standing in for `dt/t`, of `max_s ||tau_{s,kh} u||_p / (kh)^alpha`.
pub fn besov_nikolskii(u: &SampledFunction, alpha: f64, p: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Param { name: "alpha", value: alpha, range: "(0, 1)" });
    }
    if !(p >= 1.0) {
        return Err(Error::Param { name: "p", value: p, range: "[1, inf)" });
    }
    if !(q >= 1.0) {
        return Err(Error::Param { name: "q", value: q, range: "[1, inf]" });
    }
    let axes: Vec<usize> = if u.dim() == 1 { alloc::vec![0] } else { alloc::vec![0, 1] };
    let ext = |a: usize| if a == 0 { u.nx } else { u.ny };
    let quotient = |k: usize| {
        axes.iter()
            .filter(|&&a| k < ext(a))
            .map(|&a| shift_lp_norm(u, a, k, p) / powf(k as f64 * u.h, alpha))
            .fold(0.0, f64::max)
    };
    let kmax = axes.iter().map(|&a| ext(a) - 1).max().unwrap_or(0);
    if q == f64::INFINITY {
        return Ok((1..=kmax).map(quotient).fold(0.0, f64::max));
    }
    let mut acc = 0.0;
    let mut k = 1;
    while k <= kmax {
        acc += powf(quotient(k), q) * ln(2.0);
        k *= 2;
    }
    Ok(powf(acc, 1.0 / q))
}

/// Discrete `W^{1,1}` seminorm: sum of forward-difference magnitudes times
/// the face measure (`h^{n-1}`).
pub fn w11_seminorm(u: &SampledFunction) -> f64 {
    let face = if u.dim() == 1 { 1.0 } else { u.h };
    let mut acc = 0.0;
    for j in 0..u.ny {
        for i in 0..u.nx {
            let a = i + j * u.nx;
            if i + 1 < u.nx {
                acc += u.dist(a, a + 1);
            }
            if j + 1 < u.ny {
                acc += u.dist(a, a + u.nx);
            }
        }
    }
    acc * face
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_matches_brute_force() {
        let u = SampledFunction::line(14, 0.0, 0.1, |x| if x > 0.65 { 1.0 } else { 0.0 }).unwrap();
        for (s, p) in [(0.5, 2.0), (0.3, 1.0), (0.8, 1.5)] {
            let a = gagliardo(&u, s, p).unwrap();
            let b = gagliardo_brute_force(&u, s, p);
            assert!((a - b).abs() < 1e-12 * b, "{a} {b}");
        }
    }

    #[test]
    fn two_d_matches_brute_force() {
        let g = crate::grid::GridDomain::unit_square(6).unwrap();
        let u = SampledFunction::scalar_2d(g, |x, y| (3.0 * x).sin() + x * y);
        let a = gagliardo(&u, 0.4, 2.0).unwrap();
        let b = gagliardo_brute_force(&u, 0.4, 2.0);
        assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn constants_vanish() {
        let u = SampledFunction::line(20, 0.0, 0.05, |_| 3.0).unwrap();
        assert_eq!(gagliardo(&u, 0.5, 2.0).unwrap(), 0.0);
        assert_eq!(besov_nikolskii(&u, 0.5, 2.0, f64::INFINITY).unwrap(), 0.0);
        assert_eq!(besov_nikolskii(&u, 0.5, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_envelope() {
        // |tau_t u| <= L t, so ||tau_t u||_p / t^a <= L t^{1-a} |Omega|^{1/p}.
        for n in [33, 65, 129] {
            let h = 1.0 / (n - 1) as f64;
            let u = SampledFunction::line(n, 0.0, h, |x| (2.0 * x).sin()).unwrap();
            let b = besov_nikolskii(&u, 0.5, 2.0, f64::INFINITY).unwrap();
            assert!(b <= 2.0 * 1.0 * (1.0 + h) + 1e-12);
            assert!(b > 0.5);
        }
    }
}

//! Rigid deformations `x -> Ax + b`, `A` skew, and the discrete L2
//! projection onto them.

use crate::error::{Error, Result};
use crate::grid::{full_gradient, sym_gradient, GridDomain, Mat2, VectorField};
use crate::math::{powf, sqrt};

/// Discrete-L2 orthonormal basis of the rigid deformations on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidBasis {
    pub fields: [VectorField; 3],
    /// Gram matrix of `fields` (identity up to rounding).
    pub gram: [[f64; 3]; 3],
}

impl RigidBasis {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }
}

/// Gram-Schmidt on `(1,0)`, `(0,1)`, `(-y,x)` sampled at the nodes.
pub fn rigid_basis(grid: GridDomain) -> RigidBasis {
    let raw = [
        VectorField::from_fn(grid, |_, _| [1.0, 0.0]),
        VectorField::from_fn(grid, |_, _| [0.0, 1.0]),
        VectorField::from_fn(grid, |x, y| [-y, x]),
    ];
    let mut out: [VectorField; 3] = raw.clone();
    for k in 0..3 {
        // Two passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for m in 0..k {
                let c = out[k].dot(&out[m]);
                let prev = out[m].clone();
                out[k].axpy(-c, &prev);
            }
        }
        let n = out[k].l2_norm();
        out[k] = out[k].scaled(1.0 / n);
    }
    let mut gram = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            gram[a][b] = out[a].dot(&out[b]);
        }
    }
    RigidBasis { fields: out, gram }
}

/// `Pi u = sum <b_j, u> b_j` and the residual `u - Pi u`.
pub fn project_rigid(basis: &RigidBasis, u: &VectorField) -> Result<(VectorField, VectorField)> {
    if !basis.fields[0].grid.same_shape(&u.grid) {
        return Err(Error::Shape { expected: basis.fields[0].values.len(), got: u.values.len() });
    }
    let mut pi = VectorField::zeros(u.grid);
    for b in &basis.fields {
        pi.axpy(b.dot(u), b);
    }
    let res = u.sub(&pi);
    Ok((pi, res))
}

/// Ratio `||Pi u||_p / ||u||_p`; its sup over fields is the stability
/// constant of the projection in `L^p`.
pub fn lp_stability_ratio(basis: &RigidBasis, u: &VectorField, p: f64) -> Result<f64> {
    let (pi, _) = project_rigid(basis, u)?;
    let d = u.lp_norm(p);
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(pi.lp_norm(p) / d)
}

/// Both quotients of the simultaneous Poincare/Korn estimate, with the same
/// rigid `b = Pi u` used for each.
#[derive(Clone, Debug, PartialEq)]
pub struct KornPoincare {
    /// `int |u - b|^q / int |e(u)|^q`.
    pub c_q: f64,
    /// `int |D(u - b)|^p / int |e(u)|^p`.
    pub c_p: f64,
    pub rigid_part: VectorField,
}

pub fn korn_poincare_check(basis: &RigidBasis, u: &VectorField, q: f64, p: f64) -> Result<KornPoincare> {
    if !(p > 1.0) || !(q >= 1.0) || q > p {
        return Err(Error::Invalid("need 1 <= q <= p and p > 1".into()));
    }
    let eps = sym_gradient(u);
    let h2 = u.grid.h() * u.grid.h();
    let eq: f64 = eps.values.iter().map(|e| powf(e.norm(), q)).sum::<f64>() * h2;
    let ep: f64 = eps.values.iter().map(|e| powf(e.norm(), p)).sum::<f64>() * h2;
    let scale = eps.max_norm();
    if !(scale > 1e-12 * (1.0 + u.max_norm())) {
        return Err(Error::RigidInput);
    }
    let (b, r) = project_rigid(basis, u)?;
    let num_q: f64 = r.values.iter().map(|v| powf(sqrt(v[0] * v[0] + v[1] * v[1]), q)).sum::<f64>() * h2;
    let dr = full_gradient(&r);
    let num_p: f64 = dr.values.iter().map(|m: &Mat2| powf(m.norm(), p)).sum::<f64>() * h2;
    Ok(KornPoincare { c_q: num_q / eq, c_p: num_p / ep, rigid_part: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal_rigid() {
        let g = GridDomain::unit_square(9).unwrap();
        let b = rigid_basis(g);
        assert_eq!(b.dim(), 3);
        for a in 0..3 {
            assert!(sym_gradient(&b.fields[a]).max_norm() < 1e-13);
            for c in 0..3 {
                let want = if a == c { 1.0 } else { 0.0 };
                assert!((b.gram[a][c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_recovers_rigid_part() {
        let g = GridDomain::unit_square(11).unwrap();
        let b = rigid_basis(g);
        let rig = VectorField::from_fn(g, |x, y| [0.3 - 0.7 * y, -1.1 + 0.7 * x]);
        let bump = VectorField::from_fn(g, |x, y| [x * x * y, (x - y).powi(3)]);
        let (_, bump_perp) = project_rigid(&b, &bump).unwrap();
        let u = rig.add(&bump_perp);
        let (pi, res) = project_rigid(&b, &u).unwrap();
        assert!(pi.sub(&rig).max_norm() < 1e-10);
        for bf in &b.fields {
            assert!(bf.dot(&res).abs() < 1e-10);
        }
        let (pi2, _) = project_rigid(&b, &pi).unwrap();
        assert!(pi2.sub(&pi).max_norm() < 1e-13);
    }

    #[test]
    fn rigid_input_rejected() {
        let g = GridDomain::unit_square(6).unwrap();
        let b = rigid_basis(g);
        let u = VectorField::from_fn(g, |x, y| [1.0 - y, x]);
        assert!(matches!(korn_poincare_check(&b, &u, 1.0, 2.0), Err(Error::RigidInput)));
    }

    #[test]
    fn quotients_are_scale_and_rigid_invariant() {
        let g = GridDomain::unit_square(12).unwrap();
        let b = rigid_basis(g);
        let u = VectorField::from_fn(g, |_, y| [0.5 * y * y, 0.0]);
        let k1 = korn_poincare_check(&b, &u, 1.5, 2.0).unwrap();
        assert!(k1.c_q.is_finite() && k1.c_p.is_finite() && k1.c_q > 0.0);
        let k2 = korn_poincare_check(&b, &u.scaled(3.7), 1.5, 2.0).unwrap();
        assert!((k1.c_q - k2.c_q).abs() < 1e-12 * k1.c_q);
        assert!((k1.c_p - k2.c_p).abs() < 1e-12 * k1.c_p);
        let r = VectorField::from_fn(g, |x, y| [2.0 + y, -x]);
        let k3 = korn_poincare_check(&b, &u.add(&r), 1.5, 2.0).unwrap();
        assert!((k1.c_q - k3.c_q).abs() < 1e-10 * k1.c_q);
        assert!((k1.c_p - k3.c_p).abs() < 1e-10 * k1.c_p);
    }
}

//! Radial convex integrands `f(xi) = g(|xi|)` on symmetric matrices.
//!
//! Shipped profiles:
//! * `phi_mu:<mu>`: `g(r) = int_0^r int_0^s (1+t^2)^(-mu/2) dt ds`, `mu > 1`;
//! * `area`: `g(r) = sqrt(1+r^2)` (unshifted, so `g(0) = 1`);
//! * `quadratic`: `g(r) = r^2/2`;
//! * `abs`: `g(r) = r`, already positively 1-homogeneous.

use alloc::format;
use alloc::string::String;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::Sym2;
use crate::math::{atan, powf, sqrt};
use crate::quadrature::integrate;

const QUAD_TOL: f64 = 1e-13;
const SEARCH_TOL: f64 = 1e-10;

/// `phi_mu(mu, r)`, closed form for `mu` in {2, 3}, quadrature otherwise.
pub fn phi_mu(mu: f64, r: f64) -> Result<f64> {
    let p = PhiMu::new(mu)?;
    Ok(p.g(r))
}

/// `int_0^inf (1+t^2)^(-mu/2) dt = sqrt(pi) Gamma((mu-1)/2) / (2 Gamma(mu/2))`.
pub fn phi_mu_recession(mu: f64) -> Result<f64> {
    Ok(PhiMu::new(mu)?.cinf)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct PhiMu {
    mu: f64,
    cinf: f64,
}

impl PhiMu {
    fn new(mu: f64) -> Result<Self> {
        if !(mu > 1.0 && mu.is_finite()) {
            return Err(Error::Param { name: "mu", value: mu, range: "(1, inf)" });
        }
        let cinf = if mu == 3.0 {
            1.0
        } else if mu == 2.0 {
            FRAC_PI_2
        } else {
            sqrt(PI) * crate::math::tgamma(0.5 * (mu - 1.0)) / (2.0 * crate::math::tgamma(0.5 * mu))
        };
        Ok(PhiMu { mu, cinf })
    }

    #[inline]
    fn w(&self, t: f64) -> f64 {
        powf(1.0 + t * t, -0.5 * self.mu)
    }

    /// `G(r) = g'(r) = int_0^r w`.
    fn g1(&self, r: f64) -> f64 {
        if self.mu == 3.0 {
            r / sqrt(1.0 + r * r)
        } else if self.mu == 2.0 {
            atan(r)
        } else {
            self.g1_quad(r)
        }
    }

    /// Quadrature path of `G`, also used to cross-check the closed forms.
    fn g1_quad(&self, r: f64) -> f64 {
        if r <= 1.0 {
            integrate(|t| self.w(t), 0.0, r, QUAD_TOL)
        } else {
            // Tail int_r^inf w after t = 1/u, u = v^(1/(mu-1)).
            let m1 = self.mu - 1.0;
            let e = 2.0 / m1;
            let half_mu = 0.5 * self.mu;
            let tail = integrate(|v| powf(1.0 + powf(v, e), -half_mu), 0.0, powf(r, -m1), QUAD_TOL) / m1;
            self.cinf - tail
        }
    }

    /// `H(r) = int_0^r t w(t) dt = r G(r) - g(r)`.
    fn h(&self, r: f64) -> f64 {
        let a = 2.0 - self.mu;
        let l = libm::log1p(r * r);
        if a.abs() < 1e-12 {
            0.5 * l
        } else {
            libm::expm1(0.5 * a * l) / a
        }
    }

    fn g(&self, r: f64) -> f64 {
        if self.mu == 3.0 {
            // sqrt(1+r^2) - 1 without cancellation
            r * r / (sqrt(1.0 + r * r) + 1.0)
        } else if self.mu == 2.0 {
            r * atan(r) - 0.5 * libm::log1p(r * r)
        } else {
            r * self.g1(r) - self.h(r)
        }
    }

    fn g1_inv(&self, s: f64) -> f64 {
        if self.mu == 3.0 {
            s / sqrt((1.0 - s) * (1.0 + s))
        } else if self.mu == 2.0 {
            libm::tan(s)
        } else {
            monotone_inverse(|r| self.g1(r), |r| self.w(r), s)
        }
    }
}

/// Solves `G(r) = s` for increasing `G` with `G(0) = 0 < s < sup G`:
/// bracket by doubling, then Newton safeguarded by bisection.
fn monotone_inverse(g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g(hi) < s {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = g(r) - s;
        if f == 0.0 {
            return r;
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let d = dg(r);
        let mut next = if d > 0.0 { r - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - r).abs() <= SEARCH_TOL * 1e-3 * r.max(1.0);
        r = next;
        if done || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    PhiMu { mu: f64 },
    Area,
    Quadratic,
    Abs,
}

/// Linear-growth constants: `c0 |xi| - c2 <= f(xi) <= c1 (1 + |xi|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Radius where the supporting line of slope `c0` touches the profile.
    pub r0: f64,
}

/// Hessian of a radial integrand as a symmetric 3x3 matrix in Mandel
/// coordinates, so that `<f''(B) A, A> = m_A^T M m_A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMap(pub [[f64; 3]; 3]);

impl SymMap {
    pub fn scaled_identity(a: f64) -> Self {
        SymMap([[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]])
    }

    pub fn apply(&self, a: &Sym2) -> Sym2 {
        let m = a.mandel();
        let mut o = [0.0; 3];
        for (r, row) in self.0.iter().enumerate() {
            o[r] = row[0] * m[0] + row[1] * m[1] + row[2] * m[2];
        }
        Sym2::from_mandel(o)
    }

    pub fn quad(&self, a: &Sym2) -> f64 {
        self.apply(a).dot(a)
    }

    pub fn add_identity(mut self, a: f64) -> Self {
        for i in 0..3 {
            self.0[i][i] += a;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Integrand {
    profile: Profile,
    phi: Option<PhiMu>,
    /// Claimed ellipticity exponent, if any.
    pub mu: Option<f64>,
}

impl Integrand {
    pub fn phi_mu(mu: f64) -> Result<Self> {
        let phi = PhiMu::new(mu)?;
        Ok(Integrand { profile: Profile::PhiMu { mu }, phi: Some(phi), mu: Some(mu) })
    }

    pub fn area() -> Self {
        Integrand { profile: Profile::Area, phi: None, mu: Some(3.0) }
    }

    pub fn quadratic() -> Self {
        Integrand { profile: Profile::Quadratic, phi: None, mu: None }
    }

    pub fn abs() -> Self {
        Integrand { profile: Profile::Abs, phi: None, mu: None }
    }

    /// Registry lookup: `phi_mu:<mu>`, `area`, `quadratic`, `abs`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "area" => Ok(Self::area()),
            "quadratic" => Ok(Self::quadratic()),
            "abs" => Ok(Self::abs()),
            _ => {
                let mu = name
                    .strip_prefix("phi_mu:")
                    .and_then(|m| m.parse::<f64>().ok())
                    .ok_or_else(|| Error::UnknownIntegrand(name.into()))?;
                Self::phi_mu(mu)
            }
        }
    }

    pub fn name(&self) -> String {
        match self.profile {
            Profile::PhiMu { mu } => format!("phi_mu:{mu}"),
            Profile::Area => "area".into(),
            Profile::Quadratic => "quadratic".into(),
            Profile::Abs => "abs".into(),
        }
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Same integrand with a different claimed exponent.
    pub fn with_claim(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn g(&self, r: f64) -> f64 {
        match self.profile {
            Profile::PhiMu { .. } => self.phi.unwrap().g(r),
            Profile::Area => sqrt(1.0 + r * r),
            Profile::Quadratic => 0.5 * r * r,
            Profile::Abs => r,
        }
    }

    pub fn g1(&self, r: f64) -> f64 {
        match self.profile {
            Profile::PhiMu { .. } => self.phi.unwrap().g1(r),
            Profile::Area => r / sqrt(1.0 + r * r),
            Profile::Quadratic => r,
            Profile::Abs => {
                if r > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn g2(&self, r: f64) -> f64 {
        match self.profile {
            Profile::PhiMu { mu } => powf(1.0 + r * r, -0.5 * mu),
            Profile::Area => powf(1.0 + r * r, -1.5),
            Profile::Quadratic => 1.0,
            Profile::Abs => 0.0,
        }
    }

    /// `g'(r)/r`, continuous at 0 for the smooth profiles.
    fn g1_over_r(&self, r: f64) -> f64 {
        match self.profile {
            Profile::Quadratic => 1.0,
            Profile::Area => 1.0 / sqrt(1.0 + r * r),
            Profile::Abs => {
                if r > 0.0 {
                    1.0 / r
                } else {
                    0.0
                }
            }
            Profile::PhiMu { mu } => {
                if mu == 3.0 {
                    1.0 / sqrt(1.0 + r * r)
                } else if r < 1e-6 {
                    // G(r)/r = 1 - mu r^2/6 + O(r^4)
                    1.0 - mu * r * r / 6.0
                } else {
                    self.g1(r) / r
                }
            }
        }
    }

    /// Legendre function `r g'(r) - g(r)`, i.e. `g*(g'(r))`.
    fn legendre(&self, r: f64) -> f64 {
        match self.profile {
            Profile::PhiMu { .. } => self.phi.unwrap().h(r),
            Profile::Area => -1.0 / sqrt(1.0 + r * r),
            Profile::Quadratic => 0.5 * r * r,
            Profile::Abs => 0.0,
        }
    }

    /// Right derivative of the profile at 0.
    fn g1_at_zero(&self) -> f64 {
        match self.profile {
            Profile::Abs => 1.0,
            _ => 0.0,
        }
    }

    pub fn eval(&self, xi: &Sym2) -> f64 {
        self.g(xi.norm())
    }

    pub fn grad(&self, xi: &Sym2) -> Sym2 {
        let r = xi.norm();
        if r == 0.0 {
            return Sym2::ZERO;
        }
        *xi * self.g1_over_r(r)
    }

    /// `g'' P + (g'/r)(I - P)` with `P` the projection onto `span{xi}`;
    /// `g''(0) I` at the origin.
    pub fn hess(&self, xi: &Sym2) -> SymMap {
        let r = xi.norm();
        if r == 0.0 {
            return SymMap::scaled_identity(self.g2(0.0));
        }
        let a = self.g2(r);
        let b = self.g1_over_r(r);
        let p = xi.mandel();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (a - b) * p[i] * p[j] / (r * r);
            }
            m[i][i] += b;
        }
        SymMap(m)
    }

    /// Recession slope `c_inf = lim g(r)/r`; `+inf` for superlinear profiles.
    pub fn recession(&self) -> f64 {
        match self.profile {
            Profile::PhiMu { .. } => self.phi.unwrap().cinf,
            Profile::Area | Profile::Abs => 1.0,
            Profile::Quadratic => f64::INFINITY,
        }
    }

    /// Sampled recession estimate `t g(1/t)`.
    pub fn recession_estimate(&self, t: f64) -> f64 {
        t * self.g(1.0 / t)
    }

    /// `f_inf(xi) = c_inf |xi|`.
    pub fn recession_fn(&self, xi: &Sym2) -> f64 {
        let c = self.recession();
        let r = xi.norm();
        if r == 0.0 {
            0.0
        } else {
            c * r
        }
    }

    /// Inverse of `g'` on `[0, c_inf)`.
    pub fn g1_inv(&self, s: f64) -> f64 {
        if s <= self.g1_at_zero() {
            return 0.0;
        }
        if s >= self.recession() {
            return f64::INFINITY;
        }
        match self.profile {
            Profile::PhiMu { .. } => self.phi.unwrap().g1_inv(s),
            Profile::Area => s / sqrt((1.0 - s) * (1.0 + s)),
            Profile::Quadratic => s,
            Profile::Abs => 0.0,
        }
    }

    /// Radial conjugate `g*(s) = sup_r (s r - g(r))`, `s >= 0`.
    pub fn conjugate(&self, s: f64) -> f64 {
        let s = s.abs();
        if s <= self.g1_at_zero() {
            return -self.g(0.0);
        }
        let c = self.recession();
        if s > c {
            return f64::INFINITY;
        }
        if s == c {
            return match self.profile {
                Profile::PhiMu { mu } if mu > 2.0 => 1.0 / (mu - 2.0),
                Profile::PhiMu { .. } => f64::INFINITY,
                Profile::Area => 0.0,
                Profile::Abs => 0.0,
                Profile::Quadratic => f64::INFINITY,
            };
        }
        let r = self.g1_inv(s);
        if !r.is_finite() {
            // Root beyond f64 range: the supremum is the limit value.
            return self.conjugate(c);
        }
        self.legendre(r)
    }

    /// `f*(eta) = g*(|eta|)`.
    pub fn conjugate_fn(&self, eta: &Sym2) -> f64 {
        self.conjugate(eta.norm())
    }

    pub fn growth_constants(&self) -> GrowthConstants {
        let cinf = self.recession();
        if cinf.is_finite() {
            let c0 = 0.5 * cinf;
            GrowthConstants { c0, c1: cinf + self.g(1.0), c2: self.conjugate(c0), r0: self.g1_inv(c0) }
        } else {
            GrowthConstants { c0: 1.0, c1: f64::INFINITY, c2: self.conjugate(1.0), r0: self.g1_inv(1.0) }
        }
    }
}

/// Outcome of [`certify_mu_ellipticity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticityCertificate {
    pub lambda_hat: f64,
    pub big_lambda_hat: f64,
    /// Largest upper ratio on `|B| in [10^2, 10^3]` vs below `10^2`.
    pub upper_growth: f64,
    /// Smallest lower ratio below `10^2` vs on `[10^2, 10^3]`.
    pub lower_decay: f64,
    pub pass: bool,
}

fn random_unit_sym<R: Rng + ?Sized>(rng: &mut R) -> Sym2 {
    loop {
        let m = [crate::math::normal(rng), crate::math::normal(rng), crate::math::normal(rng)];
        let n = sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
        if n > 1e-12 {
            return Sym2::from_mandel([m[0] / n, m[1] / n, m[2] / n]);
        }
    }
}

/// Samples `lambda(B) = <f''(B)A,A>(1+|B|^2)^(mu/2)/|A|^2` and
/// `Lambda(B) = <f''(B)A,A>(1+|B|^2)^(1/2)/|A|^2` with `log10 |B|`
/// stratified over `[-3, 3]`, for a random unit `A` and for `A = B/|B|`.
/// Passes iff the sampled infimum is positive and neither ratio drifts
/// across the last decade (growth factor below 2).
pub fn certify_mu_ellipticity<R: Rng + ?Sized>(f: &Integrand, mu: f64, n_samples: usize, rng: &mut R) -> EllipticityCertificate {
    let n = n_samples.max(1);
    let mut lam = f64::INFINITY;
    let mut big = 0.0f64;
    let (mut up_lo, mut up_hi) = (0.0f64, 0.0f64);
    let (mut dn_lo, mut dn_hi) = (f64::INFINITY, f64::INFINITY);
    for i in 0..n {
        let e = -3.0 + 6.0 * (i as f64 + rng.gen::<f64>()) / n as f64;
        let rb = powf(10.0, e);
        let bhat = random_unit_sym(rng);
        let b = bhat * rb;
        let a = random_unit_sym(rng);
        // The radial direction carries g'' and is where a wrong exponent shows.
        let hb = f.hess(&b);
        let (qa, qb) = (hb.quad(&a), hb.quad(&bhat));
        let s = 1.0 + rb * rb;
        let r1 = qa.min(qb) * powf(s, 0.5 * mu);
        let r2 = qa.max(qb) * sqrt(s);
        lam = lam.min(r1);
        big = big.max(r2);
        if e >= 2.0 {
            up_hi = up_hi.max(r2);
            dn_hi = dn_hi.min(r1);
        } else {
            up_lo = up_lo.max(r2);
            dn_lo = dn_lo.min(r1);
        }
    }
    let upper_growth = if up_lo > 0.0 { up_hi / up_lo } else { 1.0 };
    let lower_decay = if dn_hi.is_finite() && dn_hi > 0.0 { dn_lo / dn_hi } else if dn_hi == 0.0 { f64::INFINITY } else { 1.0 };
    let pass = lam > 0.0 && big.is_finite() && upper_growth <= 2.0 && lower_decay <= 2.0;
    EllipticityCertificate { lambda_hat: lam, big_lambda_hat: big, upper_growth, lower_decay, pass }
}

/// `V_alpha(xi) = (1+|xi|^2)^((1-alpha)/2) xi`.
pub fn v_alpha(xi: &Sym2, alpha: f64) -> Result<Sym2> {
    check_alpha(alpha)?;
    Ok(v_alpha_unchecked(xi, alpha))
}

#[inline]
pub(crate) fn v_alpha_unchecked(xi: &Sym2, alpha: f64) -> Sym2 {
    *xi * powf(1.0 + xi.norm_sq(), 0.5 * (1.0 - alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Param { name: "alpha", value: alpha, range: "(1, 2)" })
    }
}

/// Two-sided band for `|V(xi)-V(eta)| / ((1+|xi|^2+|eta|^2)^((1-alpha)/2) |xi-eta|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValphaBand {
    pub lower: f64,
    pub upper: f64,
}

impl ValphaBand {
    /// Lower constant `2 - alpha` (smallest eigenvalue of `DV_alpha` relative
    /// to `(1+|xi|^2)^((1-alpha)/2)`); upper constant from the calibration
    /// table for alpha in {1.1, 1.5, 1.9} (sampled sups 1.0355, 1.2185,
    /// 1.6603), else the operator-norm bound `2^beta/(1-2 beta)`,
    /// `beta = (alpha-1)/2`.
    pub fn calibrated(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let upper = if (alpha - 1.1).abs() < 1e-12 {
            1.05
        } else if (alpha - 1.5).abs() < 1e-12 {
            1.25
        } else if (alpha - 1.9).abs() < 1e-12 {
            1.70
        } else {
            let beta = 0.5 * (alpha - 1.0);
            powf(2.0, beta) / (1.0 - 2.0 * beta)
        };
        Ok(ValphaBand { lower: 2.0 - alpha, upper })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValphaCertificate {
    /// `sqrt2 |V(xi)| - min{|xi|, |xi|^(2-alpha)}`, must be `>= 0`.
    pub lower_margin: f64,
    pub two_point_ratio: f64,
    pub lower_ok: bool,
    pub two_point_ok: bool,
}

impl ValphaCertificate {
    pub fn pass(&self) -> bool {
        self.lower_ok && self.two_point_ok
    }
}

/// Checks (i) `min{|xi|, |xi|^(2-alpha)} <= sqrt2 |V(xi)|` and (ii) the
/// two-point band for the pair `(xi, eta)`.
pub fn valpha_check(xi: &Sym2, eta: &Sym2, alpha: f64, band: ValphaBand) -> Result<ValphaCertificate> {
    check_alpha(alpha)?;
    let r = xi.norm();
    let lhs = r.min(powf(r, 2.0 - alpha));
    let rhs = core::f64::consts::SQRT_2 * v_alpha_unchecked(xi, alpha).norm();
    let lower_margin = rhs - lhs;
    let d = (*xi - *eta).norm();
    let two_point_ratio = if d == 0.0 {
        band.lower.max(1.0).min(band.upper)
    } else {
        let num = (v_alpha_unchecked(xi, alpha) - v_alpha_unchecked(eta, alpha)).norm();
        num / (powf(1.0 + xi.norm_sq() + eta.norm_sq(), 0.5 * (1.0 - alpha)) * d)
    };
    Ok(ValphaCertificate {
        lower_margin,
        two_point_ratio,
        lower_ok: lower_margin >= -1e-14 * rhs.max(1.0),
        two_point_ok: two_point_ratio >= band.lower && two_point_ratio <= band.upper,
    })
}

/// Integral bound `sum |u|^((2-alpha)p) <= |Omega| + c(p) sum |V(u)|^p`
/// with `c(p) = 2^(p/2)`, summed over `values` with weight `cell_area`.
/// Returns `(lhs, rhs)`.
pub fn valpha_integral_check(values: &[Sym2], cell_area: f64, alpha: f64, p: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(p >= 1.0) {
        return Err(Error::Param { name: "p", value: p, range: "[1, inf)" });
    }
    let c = powf(2.0, 0.5 * p);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for u in values {
        lhs += powf(u.norm(), (2.0 - alpha) * p);
        rhs += 1.0 + c * powf(v_alpha_unchecked(u, alpha).norm(), p);
    }
    Ok((lhs * cell_area, rhs * cell_area))
}

/// Viscosity form `f + |xi|^2 / (2j)` or Ekeland form `f + w (1 + |xi|^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedIntegrand {
    pub base: Integrand,
    pub quad_weight: f64,
    pub ekeland: bool,
}

impl PerturbedIntegrand {
    pub fn viscosity(base: Integrand, j: f64) -> Result<Self> {
        if !(j > 0.0) {
            return Err(Error::Param { name: "j", value: j, range: "(0, inf)" });
        }
        Ok(PerturbedIntegrand { base, quad_weight: 0.5 / j, ekeland: false })
    }

    /// `f_k = f + (1 + |xi|^2)/(2 k^2 A_k)` with `A_k = 1 + sum (1 + |e|^2) h^2`
    /// of a reference strain field.
    pub fn ekeland(base: Integrand, k: f64, reference: &[Sym2], cell_area: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Param { name: "k", value: k, range: "(0, inf)" });
        }
        let a_k = 1.0 + reference.iter().map(|e| 1.0 + e.norm_sq()).sum::<f64>() * cell_area;
        Ok(PerturbedIntegrand { base, quad_weight: 1.0 / (2.0 * k * k * a_k), ekeland: true })
    }

    pub fn eval(&self, xi: &Sym2) -> f64 {
        let q = xi.norm_sq() + if self.ekeland { 1.0 } else { 0.0 };
        self.base.eval(xi) + self.quad_weight * q
    }

    pub fn grad(&self, xi: &Sym2) -> Sym2 {
        self.base.grad(xi) + *xi * (2.0 * self.quad_weight)
    }

    pub fn hess(&self, xi: &Sym2) -> SymMap {
        self.base.hess(xi).add_identity(2.0 * self.quad_weight)
    }
}

/// Golden-section maximisation of `s r - g(r)` over `r in [0, r_max]`; an
/// independent (slow) conjugate used to cross-check [`Integrand::conjugate`].
pub fn conjugate_by_search(f: &Integrand, s: f64, r_max: f64) -> f64 {
    golden_max(|r| s * r - f.g(r), 0.0, r_max)
}

/// Biconjugate `g**(r) = sup_s (s r - g*(s))` over `s in [0, c_inf]`.
pub fn biconjugate(f: &Integrand, r: f64) -> f64 {
    let c = f.recession();
    let hi = if c.is_finite() { c } else { f.g1(r) * 2.0 + 1.0 };
    golden_max(|s| s * r - f.conjugate(s), 0.0, hi)
}

fn golden_max(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let gr = 0.5 * (sqrt(5.0) - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..300 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = phi(d);
        }
    }
    let ends = phi(a).max(phi(b));
    fc.max(fd).max(ends)
}

/// Exposes the quadrature path of `g'` for cross-checks of the closed forms.
pub fn phi_mu_g1_quadrature(mu: f64, r: f64) -> Result<f64> {
    Ok(PhiMu::new(mu)?.g1_quad(r))
}

/// `g` evaluated through the quadrature path, `r G(r) - H(r)`.
pub fn phi_mu_quadrature(mu: f64, r: f64) -> Result<f64> {
    let p = PhiMu::new(mu)?;
    Ok(r * p.g1_quad(r) - p.h(r))
}

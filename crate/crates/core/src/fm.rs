//! Fourier-Mukai transforms seen from the lattice: the induced isometry of
//! the Mukai pairing, the action on stability parameters (eta, s), the
//! reflection-functor parameter map and the sphere chart for isotropic rays.
//!
//! A transform is specified by its lattice data only: (r0, beta) on the
//! source, beta' on the target, and the NS map C -> C-hat. The builder
//! verifies that the assembled matrix preserves the pairing and rejects
//! anything else. Complex identities are carried as (real, imag-coefficient)
//! pairs; ((eta + i omega)^2) = (eta^2) - s stays rational throughout.

use crate::charge::{central_charge, CentralValue, StabilityPoint};
use crate::error::{Error, Result};
use crate::mukai::{exp_beta, BetaFrame, MukaiVector};
use crate::ratio::{rat_int, Rat};
use crate::surface::{NSClass, SurfaceData};
use num_traits::{Signed, Zero};

/// A Mukai-lattice isometry with optional Fourier-Mukai frame data.
///
/// The matrix acts on coordinate vectors (r, c1..., s). `hat_map` records the
/// NS-level map; `nef_assertion` is the user's (unverifiable from lattice
/// data) claim that the image polarization direction is nef and big.
#[derive(Debug, Clone)]
pub struct MukaiIsometry {
    pub matrix: Vec<Vec<Rat>>,
    pub source: SurfaceData,
    pub target: SurfaceData,
    pub r0: Rat,
    pub beta: NSClass,
    pub beta_prime: NSClass,
    pub hat_map: Vec<Vec<Rat>>,
    pub nef_assertion: bool,
}

fn mat_apply(m: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).fold(Rat::zero(), |acc, t| acc + t))
        .collect()
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Rat::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

/// Pairing Gram matrix J on coordinates (r, c1, s):
/// <x,y> = x1^T G y1 - x0 y2 - x2 y0.
fn pairing_gram(surface: &SurfaceData) -> Vec<Vec<Rat>> {
    let rho = surface.rho;
    let n = rho + 2;
    let mut j = vec![vec![Rat::zero(); n]; n];
    j[0][n - 1] = -rat_int(1);
    j[n - 1][0] = -rat_int(1);
    for a in 0..rho {
        for b in 0..rho {
            j[1 + a][1 + b] = Rat::from_integer(surface.gram[a][b].clone());
        }
    }
    j
}

fn is_pairing_isometry(m: &[Vec<Rat>], source: &SurfaceData, target: &SurfaceData) -> bool {
    let j_src = pairing_gram(source);
    let j_tgt = pairing_gram(target);
    let n = m.len();
    let mt: Vec<Vec<Rat>> = (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect();
    mat_mul(&mat_mul(&mt, &j_tgt), m) == j_src
}

impl MukaiIsometry {
    pub fn apply(&self, v: &MukaiVector) -> MukaiVector {
        let out = mat_apply(&self.matrix, &v.coords());
        MukaiVector::from_coords(&out).expect("matrix output has the right shape")
    }

    pub fn hat(&self, c: &NSClass) -> NSClass {
        NSClass(mat_apply(&self.hat_map, &c.0))
    }

    /// Matrix composition; the composite is a raw isometry, its FM frame
    /// data is inherited from `self` only formally.
    pub fn compose(&self, inner: &MukaiIsometry) -> MukaiIsometry {
        MukaiIsometry {
            matrix: mat_mul(&self.matrix, &inner.matrix),
            source: inner.source.clone(),
            target: self.target.clone(),
            r0: &self.r0 * &inner.r0,
            beta: inner.beta.clone(),
            beta_prime: self.beta_prime.clone(),
            hat_map: mat_mul(&self.hat_map, &inner.hat_map),
            nef_assertion: self.nef_assertion && inner.nef_assertion,
        }
    }
}

/// Assemble the lattice isometry of the transform with kernel data
/// (r0, beta, beta', hat): e^beta -> (1/r0) rho', rho -> r0 e^{beta'},
/// C + (C,beta) rho -> -(C-hat + (C-hat, beta') rho').
///
/// `hat_map` must send H to the target's polarization and be an isometry of
/// the NS forms; the assembled matrix is verified to preserve the Mukai
/// pairing exactly.
pub fn fm_build(
    r0: i64,
    beta: &NSClass,
    beta_prime: &NSClass,
    hat_map: &[Vec<Rat>],
    source: &SurfaceData,
    target: &SurfaceData,
    nef_assertion: bool,
) -> Result<MukaiIsometry> {
    if r0 < 1 {
        return Err(Error::Precondition("r0 must be a positive integer".into()));
    }
    let rho = source.rho;
    if target.rho != rho || hat_map.len() != rho {
        return Err(Error::DimensionMismatch("hat map must be square of NS rank".into()));
    }
    // hat must intertwine the NS forms
    let hat_cols: Vec<NSClass> = (0..rho)
        .map(|j| NSClass((0..rho).map(|i| hat_map[i][j].clone()).collect()))
        .collect();
    for i in 0..rho {
        for j in 0..rho {
            let lhs = target.ip(&hat_cols[i], &hat_cols[j]);
            let rhs = Rat::from_integer(source.gram[i][j].clone());
            if lhs != rhs {
                return Err(Error::Precondition("hat map is not an isometry of NS forms".into()));
            }
        }
    }
    let h_hat = NSClass(mat_apply(hat_map, &source.h_class().0));
    if h_hat != target.h_class() {
        return Err(Error::Precondition(
            "hat map must send the source polarization to the target polarization".into(),
        ));
    }

    let r0_rat = rat_int(r0);
    let e_src = exp_beta(beta, source);
    let e_tgt = exp_beta(beta_prime, target);
    let rho_tgt = MukaiVector::rho_class(rho);

    // images of e^beta, rho, and of the frame classes C + (C,beta) rho
    let img_e = rho_tgt.scale(&(rat_int(1) / &r0_rat));
    let img_rho = e_tgt.scale(&r0_rat);
    let image_of = |x: &MukaiVector| -> MukaiVector {
        // decompose x = r e^beta + a rho + (C + (C,beta) rho), C = c1 - r beta
        let r = x.r.clone();
        let c = x.c1.sub(&beta.scale(&r));
        let a = &x.s - &r * &e_src.s - source.ip(&c, beta);
        let c_hat = NSClass(mat_apply(hat_map, &c.0));
        let mid = MukaiVector::new(Rat::zero(), c_hat.clone(), target.ip(&c_hat, beta_prime));
        img_e.scale(&r).add(&img_rho.scale(&a)).sub(&mid)
    };

    let n = rho + 2;
    let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut basis = Vec::new();
    basis.push(MukaiVector::new(rat_int(1), NSClass::zero(rho), Rat::zero()));
    for i in 0..rho {
        let mut c = NSClass::zero(rho);
        c.0[i] = rat_int(1);
        basis.push(MukaiVector::new(Rat::zero(), c, Rat::zero()));
    }
    basis.push(MukaiVector::rho_class(rho));
    for b in &basis {
        cols.push(image_of(b).coords());
    }
    let matrix: Vec<Vec<Rat>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();

    let iso = MukaiIsometry {
        matrix,
        source: source.clone(),
        target: target.clone(),
        r0: r0_rat,
        beta: beta.clone(),
        beta_prime: beta_prime.clone(),
        hat_map: hat_map.to_vec(),
        nef_assertion,
    };
    if !is_pairing_isometry(&iso.matrix, source, target) {
        return Err(Error::Precondition("assembled matrix does not preserve the Mukai pairing".into()));
    }
    Ok(iso)
}

/// Image under the shifted transform Phi[1]: v -> -Phi(v). In the beta'-frame
/// the image decomposes with r' = -r0 a, a' = -r/r0, d' = d and D' = D-hat.
pub fn fm_image_shift(iso: &MukaiIsometry, v: &MukaiVector) -> MukaiVector {
    iso.apply(v).neg()
}

/// The induced map on stability parameters:
/// eta~ + i omega~ = -2/(r0 ((eta + i omega)^2)) (eta-hat + i omega-hat),
/// returned as (eta~, s~) with s~ = f^2 s-hat and f = -2/(r0 ((eta^2) - s)).
pub fn param_transform(iso: &MukaiIsometry, p: &StabilityPoint, frame: &BetaFrame) -> Result<StabilityPoint> {
    if !p.s.is_positive() {
        return Err(Error::Precondition("s must be positive".into()));
    }
    let eta_sq = frame.surface.ip_checked(&p.eta, &p.eta)?;
    let denom = &frame.r0_rat() * (&eta_sq - &p.s);
    // (eta^2) - s < 0, so the factor is positive
    let f = rat_int(-2) / denom;
    let eta_hat = iso.hat(&p.eta);
    let s_hat = &p.s * iso.target.h2() / iso.source.h2();
    Ok(StabilityPoint { eta: eta_hat.scale(&f), s: &f * &f * s_hat })
}

/// Both sides of the charge commutation identity, normalized to comparable
/// exact pairs: the imaginary parts are multiplied by their own (H^2) scale
/// so that the shared t = sqrt(s/(H^2)) factor cancels.
pub fn charge_commutation_check(
    iso: &MukaiIsometry,
    v: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<(CentralValue, CentralValue)> {
    let target_frame = BetaFrame::new(iso.target.clone(), iso.beta_prime.clone())?;
    let p_tilde = param_transform(iso, p, frame)?;
    let w = fm_image_shift(iso, v);
    let lhs_raw = central_charge(&w, &p_tilde, &target_frame)?;

    let eta_sq = frame.surface.ip(&p.eta, &p.eta);
    let f = rat_int(-2) / (&frame.r0_rat() * (&eta_sq - &p.s));
    let rhs_raw = central_charge(v, p, frame)?;

    // true imaginary parts are d' t~ (H'^2) and f d t (H^2) with t~ = f t;
    // dividing out the shared t gives comparable exact pairs
    let lhs = CentralValue {
        re: lhs_raw.re,
        im_coeff: &f * &lhs_raw.im_coeff * iso.target.h2(),
    };
    let rhs = CentralValue {
        re: &f * &rhs_raw.re,
        im_coeff: &f * &rhs_raw.im_coeff * frame.surface.h2(),
    };
    Ok((lhs, rhs))
}

/// Parameter map of the reflection functor attached to a (-2)-class
/// u = r e^gamma + (1/r) rho, gamma = bH + upsilon: in upsilon-centered
/// coordinates (eta, s) -> (g eta, g^2 s) with g = 2/(r^2 (s - (eta^2))).
/// Fixed points are exactly the wall W_u; the map is an involution.
pub fn reflection_param(
    u: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<StabilityPoint> {
    let surface = &frame.surface;
    let uu = crate::mukai::self_pairing(u, surface)?;
    if uu != rat_int(-2) {
        return Err(Error::Precondition("reflection functor needs <u^2> = -2".into()));
    }
    if !u.r.is_positive() {
        return Err(Error::Precondition("reflection functor needs rk u > 0".into()));
    }
    let gamma = u.c1.scale(&(rat_int(1) / &u.r));
    let upsilon = surface.project_h_perp(&gamma);
    // gamma must sit over the frame's b-slice
    let b_of_gamma = surface.ip(&gamma, &surface.h_class()) / surface.h2();
    if b_of_gamma != frame.b {
        return Err(Error::Precondition(
            "the reflection class lives over a different b-slice".into(),
        ));
    }
    let eta = p.eta.sub(&upsilon);
    let eta_sq = surface.ip(&eta, &eta);
    let g = rat_int(2) / (&u.r * &u.r * (&p.s - &eta_sq));
    Ok(StabilityPoint { eta: eta.scale(&g).add(&upsilon), s: &g * &g * &p.s })
}

/// Chart coordinates of an isotropic ray on the parameter sphere:
/// R(r + xi + a rho) -> (X, Y) = (-2 xi / (r - 2a), (2a + r)/(2a - r)).
///
/// The middle component xi is read in the V_H convention: its H-part is the
/// imaginary omega-slot, its H-perp part the real eta-slot, so the relevant
/// square is q(xi) = (xi_perp^2) - (xi_H^2) and the isotropy precondition is
/// q(xi) = 2 r a. The image satisfies -q(X) + Y^2 = 1 exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpherePoint {
    /// the rho-ray, which the chart sends to the projection pole
    Infinity,
    Chart { x: NSClass, y: Rat },
}

pub fn sphere_embed(v: &MukaiVector, surface: &SurfaceData) -> Result<SpherePoint> {
    let h = surface.h_class();
    let h2 = surface.h2();
    let c = surface.ip(&v.c1, &h) / &h2;
    let xi_perp = v.c1.sub(&h.scale(&c));
    let q_xi = surface.ip(&xi_perp, &xi_perp) - &c * &c * &h2;
    let two_ra = rat_int(2) * &v.r * &v.s;
    if q_xi != two_ra {
        return Err(Error::Precondition(format!(
            "sphere chart needs an isotropic class: q(xi) = {q_xi} but 2ra = {two_ra}"
        )));
    }
    let denom = &v.r - rat_int(2) * &v.s;
    if denom.is_zero() {
        return Err(Error::Precondition("r = 2a is the chart's pole direction".into()));
    }
    if v.r.is_zero() && v.c1.is_zero() {
        return Ok(SpherePoint::Infinity);
    }
    let x = v.c1.scale(&(rat_int(-2) / &denom));
    let y = (rat_int(2) * &v.s + &v.r) / (rat_int(2) * &v.s - &v.r);
    // verify the sphere relation -q(X) + Y^2 = 1
    let cx = surface.ip(&x, &h) / &h2;
    let x_perp = x.sub(&h.scale(&cx));
    let q_x = surface.ip(&x_perp, &x_perp) - &cx * &cx * &h2;
    if -&q_x + &y * &y != rat_int(1) {
        return Err(Error::Internal("sphere relation failed".into()));
    }
    Ok(SpherePoint::Chart { x, y })
}

/// Wall transport check: p in W_u iff the transformed point lies on the wall
/// of -Phi(u) (used by tests; exposed for the CLI diagnostics).
pub fn wall_transport_holds(
    iso: &MukaiIsometry,
    u: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<bool> {
    let target_frame = BetaFrame::new(iso.target.clone(), iso.beta_prime.clone())?;
    let lhs = crate::walls::category_wall_eval(u, p, frame)?.is_zero();
    let p2 = param_transform(iso, p, frame)?;
    let u2 = fm_image_shift(iso, u);
    let rhs = crate::walls::category_wall_eval(&u2, &p2, &target_frame)?.is_zero();
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat_of;
    use crate::surface::SurfaceKind;
    use num_bigint::BigInt;

    fn ek3() -> SurfaceData {
        SurfaceData::new(
            SurfaceKind::K3,
            vec![vec![BigInt::from(-2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]],
            vec![BigInt::from(1), BigInt::from(4)],
        )
        .unwrap()
    }

    fn identity_hat(rho: usize) -> Vec<Vec<Rat>> {
        (0..rho)
            .map(|i| (0..rho).map(|j| if i == j { rat_int(1) } else { Rat::zero() }).collect())
            .collect()
    }

    fn dcl() -> NSClass {
        NSClass::from_ints(&[1, -2])
    }

    #[test]
    fn standard_transform_r0_one() {
        let s = ek3();
        let z = NSClass::zero(2);
        let iso = fm_build(1, &z, &z, &identity_hat(2), &s, &s, true).unwrap();
        let e0 = exp_beta(&z, &s);
        let rho = MukaiVector::rho_class(2);
        assert_eq!(iso.apply(&e0), rho);
        assert_eq!(iso.apply(&rho), e0);
        let c = MukaiVector::new(Rat::zero(), dcl(), Rat::zero());
        assert_eq!(iso.apply(&c), c.neg());
        // squares to the identity
        let sq = iso.compose(&iso);
        for v in [&e0, &rho, &c] {
            assert_eq!(MukaiVector::from_coords(&mat_apply(&sq.matrix, &v.coords())).unwrap(), v.clone());
        }
        // shift images
        assert_eq!(fm_image_shift(&iso, &e0), rho.neg());
        assert_eq!(fm_image_shift(&iso, &rho), e0.neg());
        let u2 = MukaiVector::new(rat_int(1), dcl(), rat_int(-2));
        let u3 = MukaiVector::new(rat_int(2), dcl(), rat_int(-1));
        assert_eq!(fm_image_shift(&iso, &u2), u3);
    }

    #[test]
    fn image_shift_frame_components() {
        let s = ek3();
        let z = NSClass::zero(2);
        let iso = fm_build(1, &z, &z, &identity_hat(2), &s, &s, true).unwrap();
        let v = MukaiVector::new(rat_int(1), s.h_class(), rat_int(1));
        let img = fm_image_shift(&iso, &v);
        let frame = BetaFrame::new(s.clone(), z.clone()).unwrap();
        let dv = frame.decompose(&v);
        let di = frame.decompose(&img);
        assert_eq!(di.r, -(&frame.r0_rat() * &dv.a));
        assert_eq!(di.a, -(&dv.r / &frame.r0_rat()));
        assert_eq!(di.d, dv.d);
    }

    #[test]
    fn bad_hat_rejected() {
        let s = ek3();
        let z = NSClass::zero(2);
        let mut hat = identity_hat(2);
        hat[0][1] = rat_int(1);
        assert!(fm_build(1, &z, &z, &hat, &s, &s, true).is_err());
    }

    #[test]
    fn param_transform_invariant() {
        let s = ek3();
        let z = NSClass::zero(2);
        let iso = fm_build(1, &z, &z, &identity_hat(2), &s, &s, true).unwrap();
        let frame = BetaFrame::new(s.clone(), z.clone()).unwrap();
        // eta = 0, s = 2 is fixed with product 4
        let p = StabilityPoint::new(&frame, NSClass::zero(2), rat_int(2)).unwrap();
        let q = param_transform(&iso, &p, &frame).unwrap();
        assert_eq!(q.s, rat_int(2));
        let p2 = StabilityPoint::new(&frame, NSClass::zero(2), rat_of(1, 2)).unwrap();
        let q2 = param_transform(&iso, &p2, &frame).unwrap();
        assert_eq!(q2.s, rat_int(8));
    }

    #[test]
    fn reflection_param_examples() {
        let s = ek3();
        let frame = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        let u1 = MukaiVector::new(rat_int(1), NSClass::zero(2), rat_int(1));
        // on the wall: fixed
        let p = StabilityPoint::new(&frame, NSClass::zero(2), rat_int(2)).unwrap();
        let q = reflection_param(&u1, &p, &frame).unwrap();
        assert_eq!(q, p);
        // off the wall
        let p2 = StabilityPoint::new(&frame, NSClass::zero(2), rat_of(1, 2)).unwrap();
        let q2 = reflection_param(&u1, &p2, &frame).unwrap();
        assert_eq!(q2.s, rat_int(8));
        // involution
        let back = reflection_param(&u1, &q2, &frame).unwrap();
        assert_eq!(back, p2);
    }

    #[test]
    fn image_shift_components_for_r0_two() {
        // rank-2 abelian fixture with beta = H/2, r0 = 2: the shifted image
        // decomposes with r' = -r0 a, a' = -r/r0, d' = d
        let s = SurfaceData::new(
            SurfaceKind::Abelian,
            vec![vec![BigInt::from(4), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(-4)]],
            vec![BigInt::from(1), BigInt::from(0)],
        )
        .unwrap();
        let beta = s.h_class().scale(&rat_of(1, 2));
        let frame = BetaFrame::new(s.clone(), beta.clone()).unwrap();
        assert_eq!(frame.r0, BigInt::from(2));
        let iso = fm_build(2, &beta, &NSClass::zero(2), &identity_hat(2), &s, &s, true).unwrap();
        let target = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        // e^beta -> -(1/r0) rho', rho -> -r0 e^{beta'}
        assert_eq!(
            fm_image_shift(&iso, &frame.exp_beta()),
            MukaiVector::rho_class(2).scale(&rat_of(-1, 2))
        );
        assert_eq!(
            fm_image_shift(&iso, &MukaiVector::rho_class(2)),
            target.exp_beta().scale(&rat_int(-2))
        );
        for v in [
            MukaiVector::new(rat_int(2), s.h_class(), rat_int(1)),
            MukaiVector::new(rat_int(0), NSClass::from_ints(&[3, 1]), rat_int(-2)),
            MukaiVector::new(rat_int(4), NSClass::from_ints(&[1, -1]), rat_int(5)),
        ] {
            let dv = frame.decompose(&v);
            let di = target.decompose(&fm_image_shift(&iso, &v));
            assert_eq!(di.r, -(&frame.r0_rat() * &dv.a));
            assert_eq!(di.a, -(&dv.r / &frame.r0_rat()));
            assert_eq!(di.d, dv.d);
        }
    }

    #[test]
    fn reflection_param_involution_on_many_points() {
        let s = ek3();
        let frame = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        let u1 = MukaiVector::new(rat_int(1), NSClass::zero(2), rat_int(1));
        let d = dcl();
        let mut n = 0u64;
        for num in -10i64..=10 {
            for sn in 1i64..=10 {
                let eta = d.scale(&rat_of(num, 7));
                let sv = rat_of(3 * sn, 2);
                let p = StabilityPoint::new(&frame, eta, sv).unwrap();
                let q = reflection_param(&u1, &p, &frame).unwrap();
                let back = reflection_param(&u1, &q, &frame).unwrap();
                assert_eq!(back, p);
                // fixed exactly on the wall
                let on_wall = crate::walls::category_wall_eval(&u1, &p, &frame)
                    .unwrap()
                    .is_zero();
                assert_eq!(q == p, on_wall);
                n += 1;
            }
        }
        assert!(n >= 100);
    }

    #[test]
    fn sphere_chart_examples() {
        let s = ek3();
        let one = MukaiVector::new(rat_int(1), NSClass::zero(2), rat_int(0));
        match sphere_embed(&one, &s).unwrap() {
            SpherePoint::Chart { x, y } => {
                assert!(x.is_zero());
                assert_eq!(y, rat_int(-1));
            }
            _ => panic!("expected a chart point"),
        }
        let rho = MukaiVector::rho_class(2);
        assert_eq!(sphere_embed(&rho, &s).unwrap(), SpherePoint::Infinity);
        // e^{i omega}: (1, t H, -s/2) with s = t^2 (H^2)
        let t = rat_of(1, 2);
        let sval = &t * &t * s.h2();
        let e_omega = MukaiVector::new(rat_int(1), s.h_class().scale(&t), -&sval / rat_int(2));
        match sphere_embed(&e_omega, &s).unwrap() {
            SpherePoint::Chart { y, .. } => {
                assert_eq!(y, (-&sval + rat_int(1)) / (-&sval - rat_int(1)));
            }
            _ => panic!("expected a chart point"),
        }
        // r = 2a chart pole (only the zero class satisfies it on the sphere)
        let pole = MukaiVector::zero(2);
        assert!(sphere_embed(&pole, &s).is_err());
        // non-isotropic rejected
        let bad = MukaiVector::new(rat_int(1), NSClass::zero(2), rat_int(1));
        assert!(sphere_embed(&bad, &s).is_err());
    }
}

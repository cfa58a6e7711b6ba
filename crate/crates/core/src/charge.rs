//! The central charge Z_(beta,omega)(v) = -a + r (omega^2)/2 + i d (H,omega)
//! and its exact companions: the sigma bracket that orders phases, a
//! transcendental-free phase comparison, the xi_v wall criterion and the
//! small-perturbation predicates.
//!
//! omega is never stored as a vector. Every formula used here depends on it
//! only through s = (omega^2) and the positive scalar (H,omega), which is
//! factored out of all sign tests.

use crate::error::{Error, Result};
use crate::mukai::{pairing, BetaFrame, MukaiVector};
use crate::ratio::{rat_int, Rat};
use crate::surface::NSClass;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// A point of the stability parameter space over the frame's bH-slice:
/// beta = bH + eta with (eta, H) = 0, and s = (omega^2) > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityPoint {
    pub eta: NSClass,
    pub s: Rat,
}

impl StabilityPoint {
    pub fn new(frame: &BetaFrame, eta: NSClass, s: Rat) -> Result<Self> {
        if !frame.surface.ip_checked(&eta, &frame.surface.h_class())?.is_zero() {
            return Err(Error::Precondition("(eta, H) must vanish".into()));
        }
        if !s.is_positive() {
            return Err(Error::Precondition("s = (omega^2) must be positive".into()));
        }
        Ok(StabilityPoint { eta, s })
    }

    /// The full base class beta = bH + eta of this point.
    pub fn beta(&self, frame: &BetaFrame) -> NSClass {
        frame.surface.h_class().scale(&frame.b).add(&self.eta)
    }

    /// The frame at this point's beta (same surface).
    pub fn frame_at(&self, frame: &BetaFrame) -> Result<BetaFrame> {
        BetaFrame::new(frame.surface.clone(), self.beta(frame))
    }
}

/// Exact representative of Z(v): the real part and the coefficient d of the
/// imaginary part (the true imaginary part is d (H,omega), a fixed positive
/// multiple that never affects a sign).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CentralValue {
    pub re: Rat,
    pub im_coeff: Rat,
}

impl CentralValue {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im_coeff.is_zero()
    }
}

/// Z at the point: decompose v at beta = bH + eta and read off
/// (-a + r s/2, d).
pub fn central_charge(v: &MukaiVector, p: &StabilityPoint, frame: &BetaFrame) -> Result<CentralValue> {
    let local = p.frame_at(frame)?;
    let dec = local.decompose(v);
    let re = -&dec.a + &dec.r * &p.s / rat_int(2);
    Ok(CentralValue { re, im_coeff: dec.d })
}

/// The bracket (r d1 - r1 d) s/2 - (a d1 - a1 d) whose sign equals the sign
/// of Sigma_(beta,omega)(v, v1); >= 0 iff phi(v1) >= phi(v) in the (0,1]
/// sector convention. The positive factor (H,omega) is dropped.
pub fn sigma_bracket(
    v: &MukaiVector,
    v1: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<Rat> {
    let local = p.frame_at(frame)?;
    let dv = local.decompose(v);
    let d1 = local.decompose(v1);
    Ok((&dv.r * &d1.d - &d1.r * &dv.d) * &p.s / rat_int(2) - (&dv.a * &d1.d - &d1.a * &dv.d))
}

/// Sector of a nonzero central value for the total phase order on (0, 2].
fn phase_sector(z: &CentralValue) -> u8 {
    if z.im_coeff.is_positive() {
        0 // phi in (0,1)
    } else if z.im_coeff.is_zero() && z.re.is_negative() {
        1 // phi = 1
    } else if z.im_coeff.is_negative() {
        2 // phi in (1,2)
    } else {
        3 // phi = 2
    }
}

/// Total order on phases phi in (0, 2], exact: sector comparison first, then
/// a cross-product sign inside the open half-plane sectors. Proportional
/// values with a positive ratio compare equal.
pub fn phase_cmp(z1: &CentralValue, z2: &CentralValue) -> Result<Ordering> {
    if z1.is_zero() || z2.is_zero() {
        return Err(Error::Precondition("phase of a zero central value".into()));
    }
    let s1 = phase_sector(z1);
    let s2 = phase_sector(z2);
    if s1 != s2 {
        return Ok(s1.cmp(&s2));
    }
    // within a half-plane sector the angle increases with the cross product
    let cross = &z1.re * &z2.im_coeff - &z2.re * &z1.im_coeff;
    Ok(if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    })
}

/// The class xi_v with <v1, xi_v> = 0 iff v1 is phase-aligned with v at the
/// point (Lemma criterion: <v1 - d1 v / d, e^{beta+i omega}> = 0). Requires
/// d(v) != 0 at this point. Exactly: d <v1, xi_v> = -sigma_bracket(v, v1).
pub fn xi_vector(v: &MukaiVector, p: &StabilityPoint, frame: &BetaFrame) -> Result<MukaiVector> {
    let local = p.frame_at(frame)?;
    let dec = local.decompose(v);
    if dec.d.is_zero() {
        return Err(Error::Precondition("xi_v needs d(v) != 0".into()));
    }
    let surface = &frame.surface;
    let beta = p.beta(frame);
    let rho = MukaiVector::rho_class(surface.rho);
    // Re e^{beta + i omega} = e^beta - (s/2) rho
    let re_exp = crate::mukai::exp_beta(&beta, surface).sub(&rho.scale(&(&p.s / rat_int(2))));
    // H + (H, beta) rho
    let h = surface.h_class();
    let h_lift = MukaiVector::new(Rat::zero(), h.clone(), surface.ip(&h, &beta));
    let lambda = pairing(&v.scale(&(rat_int(1) / &dec.d)), &re_exp, surface)? / surface.h2();
    Ok(re_exp.sub(&h_lift.scale(&lambda)))
}

/// Report of the small-perturbation predicates for eta', evaluated exactly.
#[derive(Debug, Clone)]
pub struct EtaSmallnessReport {
    /// -(eta'^2) < min{ r^2 s^2 / 8, s }
    pub ass_eta_holds: bool,
    /// -(eta'^2) < 1 / (2 r0^2 r^5)
    pub eta_ss_holds: bool,
    /// the real shift of Z under beta -> beta + eta': (eta', D) - (eta'^2) r / 2
    pub z_shift_re: Rat,
    pub minus_eta_sq: Rat,
    pub ass_eta_bound: Rat,
    pub eta_ss_bound: Rat,
}

/// Evaluate the perturbation predicates. The rank r enters both bounds; the
/// source statements leave its binding implicit, so it is an explicit
/// argument here rather than being guessed from v or r0.
pub fn eta_smallness(
    v: &MukaiVector,
    r: &Rat,
    eta_prime: &NSClass,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<EtaSmallnessReport> {
    let surface = &frame.surface;
    if !surface.ip_checked(eta_prime, &surface.h_class())?.is_zero() {
        return Err(Error::Precondition("(eta', H) must vanish".into()));
    }
    let minus_eta_sq = -surface.ip(eta_prime, eta_prime);
    let s = &p.s;
    let r2 = r * r;
    let ass_bound_a = &r2 * s * s / rat_int(8);
    let ass_eta_bound = ass_bound_a.min(s.clone());
    let r5 = r * r * r * r * r;
    if !r5.is_positive() {
        return Err(Error::Precondition("eta-ss bound needs r > 0".into()));
    }
    let r0 = frame.r0_rat();
    let eta_ss_bound = rat_int(1) / (rat_int(2) * &r0 * &r0 * r5);

    let local = p.frame_at(frame)?;
    let dec = local.decompose(v);
    let z_shift_re = surface.ip(eta_prime, &dec.big_d)
        - surface.ip(eta_prime, eta_prime) * &dec.r / rat_int(2);

    Ok(EtaSmallnessReport {
        ass_eta_holds: minus_eta_sq < ass_eta_bound,
        eta_ss_holds: minus_eta_sq < eta_ss_bound,
        z_shift_re,
        minus_eta_sq,
        ass_eta_bound,
        eta_ss_bound,
    })
}

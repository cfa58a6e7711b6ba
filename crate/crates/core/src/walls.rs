//! Walls for categories and walls for stabilities: enumeration over a fixed
//! beta-line or over a box in the (eta, s) parameter slice, exact defining
//! functions, chamber signatures and segment-crossing tests.
//!
//! Enumeration is complete by the finiteness bounds of the source lemmas
//! (rank bounded by the s-window, D-components bounded by a Schwarz chain and
//! enumerated with `lattice_enum::short_vectors`). Candidates are numerical:
//! no realizability by actual semistable objects is checked, so the list
//! over-approximates the true wall set.

use crate::error::{Error, Result};
use crate::lattice_enum::{ns_coset_in_h_perp, short_vectors};
use crate::mukai::{pairing, self_pairing, BetaFrame, MukaiVector};
use crate::ratio::{ceil_rat, floor_rat, floor_sqrt_rat, quadratic_range, rat_int, Rat, RatInterval};
use crate::surface::NSClass;
use crate::charge::StabilityPoint;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Locus geometry of a wall inside the (eta, s) slice at fixed b. Centers
/// and normals are NS classes orthogonal to H; radii are squared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallGeometry {
    /// -(eta - center)^2 + s = radius_sq
    HalfSphere { center: NSClass, radius_sq: Rat },
    /// (eta, normal) = offset, independent of s
    Hyperplane { normal: NSClass, offset: Rat },
    /// rank-0 category classes: no geometry in the slice; they record the
    /// dependence on the underlying category only
    Degenerate,
}

/// A wall for categories, indexed by a (-2)-vector u orthogonal to
/// H + (H,bH) rho.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryWall {
    pub u: MukaiVector,
    /// (omega^2)/2 threshold a/r on the fixed-beta line (rank > 0 only)
    pub threshold_half_s: Option<Rat>,
    pub geometry: WallGeometry,
}

/// A wall for stabilities, keyed by the ray Q(v1/d1 - v/d); `v1` is the
/// canonical (lexicographically smallest) defining class found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityWall {
    pub v1: MukaiVector,
    pub complement: MukaiVector,
    /// primitive, sign-normalized integer spanning vector of the ray
    pub ray: Vec<Rat>,
    pub geometry: WallGeometry,
    /// wall position on the fixed-beta line, when the region is an interval
    pub s_star: Option<Rat>,
}

/// A box in the parameter slice: eta = sum x_i basis_i with x_i ranging over
/// rational intervals, and s in a positive rational interval.
#[derive(Debug, Clone)]
pub struct ParamBox {
    pub eta_basis: Vec<NSClass>,
    pub eta_ranges: Vec<(Rat, Rat)>,
    pub s_range: (Rat, Rat),
}

impl ParamBox {
    pub fn validate(&self, frame: &BetaFrame) -> Result<()> {
        if self.eta_basis.len() != self.eta_ranges.len() {
            return Err(Error::DimensionMismatch("eta basis and ranges differ in length".into()));
        }
        for b in &self.eta_basis {
            if !frame.surface.ip_checked(b, &frame.surface.h_class())?.is_zero() {
                return Err(Error::Precondition("box basis vectors must be orthogonal to H".into()));
            }
        }
        for (lo, hi) in &self.eta_ranges {
            if lo > hi {
                return Err(Error::Precondition("empty eta range".into()));
            }
        }
        if !self.s_range.0.is_positive() || self.s_range.0 > self.s_range.1 {
            return Err(Error::Precondition("s range must be positive and nonempty".into()));
        }
        Ok(())
    }

    /// The eta class at given box coordinates.
    pub fn eta_at(&self, coords: &[Rat], rho: usize) -> NSClass {
        let mut eta = NSClass::zero(rho);
        for (b, x) in self.eta_basis.iter().zip(coords) {
            eta = eta.add(&b.scale(x));
        }
        eta
    }
}

/// Region over which walls are collected.
#[derive(Debug, Clone)]
pub enum Region {
    /// the line { (eta_beta, s) : s in [lo, hi] } at the frame's own beta
    FixedBetaInterval { s_lo: Rat, s_hi: Rat },
    Box(ParamBox),
}

/// Exact range over a box of an affine-quadratic function
/// g(eta, s) = kappa s + q(eta) where q(eta) = c2 (eta^2)-part + linear + const
/// is supplied as a closure of the coordinates. Ranges are exact for boxes
/// with at most one non-degenerate eta direction (all spec fixtures) and
/// conservative (interval arithmetic) otherwise.
struct BoxRanges {
    /// range of -(eta^2)
    neg_eta_sq: RatInterval,
}

fn eta_quad_range(
    frame: &BetaFrame,
    pbox: &ParamBox,
    // q(eta) = quad_coeff * (eta^2) + (lin_class, eta) + constant
    quad_coeff: &Rat,
    lin_class: &NSClass,
    constant: &Rat,
) -> RatInterval {
    let surface = &frame.surface;
    let k = pbox.eta_basis.len();
    if k == 0 {
        return RatInterval::point(constant.clone());
    }
    if k == 1 {
        // exact univariate quadratic range
        let b = &pbox.eta_basis[0];
        let a2 = quad_coeff * surface.ip(b, b);
        let a1 = surface.ip(lin_class, b);
        let (lo, hi) = &pbox.eta_ranges[0];
        return quadratic_range(&a2, &a1, constant, lo, hi);
    }
    // conservative interval arithmetic for higher-dimensional boxes
    let ranges: Vec<RatInterval> = pbox
        .eta_ranges
        .iter()
        .map(|(lo, hi)| RatInterval::new(lo.clone(), hi.clone()))
        .collect();
    let mut acc = RatInterval::point(constant.clone());
    for i in 0..k {
        let bi = &pbox.eta_basis[i];
        let diag = quad_coeff * surface.ip(bi, bi);
        acc = acc.add(&ranges[i].square().scale(&diag));
        for j in i + 1..k {
            let off = quad_coeff * surface.ip(bi, &pbox.eta_basis[j]) * rat_int(2);
            acc = acc.add(&ranges[i].mul(&ranges[j]).scale(&off));
        }
        acc = acc.add(&ranges[i].scale(&surface.ip(lin_class, bi)));
    }
    acc
}

fn box_ranges(frame: &BetaFrame, pbox: &ParamBox) -> BoxRanges {
    let neg = eta_quad_range(frame, pbox, &rat_int(-1), &NSClass::zero(frame.surface.rho), &Rat::zero());
    BoxRanges { neg_eta_sq: neg }
}

// ---------------------------------------------------------------------------
// walls for categories
// ---------------------------------------------------------------------------

fn r0_to_i64(frame: &BetaFrame) -> Result<i64> {
    frame
        .r0
        .to_i64()
        .ok_or_else(|| Error::Precondition("r0 too large for enumeration".into()))
}

/// The finite set R_beta of (-2)-classes u = r e^beta + a rho + (D + (D,beta) rho)
/// with r >= 1 and a > 0: the classes cutting the fixed-beta line into
/// category chambers. Abelian surfaces have none.
pub fn enumerate_r_beta(frame: &BetaFrame) -> Result<Vec<CategoryWall>> {
    if frame.surface.epsilon() == 0 {
        return Err(Error::AbelianInput(
            "walls for categories exist only on K3 surfaces".into(),
        ));
    }
    let surface = &frame.surface;
    let e = frame.exp_beta();
    let rho = MukaiVector::rho_class(surface.rho);
    let r0 = r0_to_i64(frame)?;
    let mut out = Vec::new();
    for r in 1..=r0 {
        for m in 1..=(r0 / r) {
            // a = m / r0, (D^2) = 2 r a - 2 <= 0
            let a = Rat::new(BigInt::from(m), BigInt::from(r0));
            let target = rat_int(2) * rat_int(r) * &a - rat_int(2);
            if target.is_positive() {
                continue;
            }
            let subtract = frame.beta.scale(&rat_int(r));
            let Some(coset) = ns_coset_in_h_perp(surface, &subtract) else {
                continue;
            };
            for d_class in short_vectors(surface, &target.abs(), &coset)? {
                if surface.ip(&d_class, &d_class) != target {
                    continue;
                }
                let mid_beta = surface.ip(&d_class, &frame.beta);
                let mut u = e.scale(&rat_int(r));
                u = u.add(&rho.scale(&a));
                u = u.add(&MukaiVector::new(Rat::zero(), d_class.clone(), mid_beta));
                if !u.is_integral() {
                    continue;
                }
                debug_assert_eq!(self_pairing(&u, surface).unwrap(), rat_int(-2));
                let center = frame.eta_beta.add(&d_class.scale(&Rat::new(BigInt::one(), BigInt::from(r))));
                let radius_sq = Rat::new(BigInt::from(2), BigInt::from(r * r));
                out.push(CategoryWall {
                    u,
                    threshold_half_s: Some(&a / rat_int(r)),
                    geometry: WallGeometry::HalfSphere { center, radius_sq },
                });
            }
        }
    }
    out.sort_by(|x, y| x.u.cmp(&y.u));
    Ok(out)
}

/// Defining function of W_u at a point of the b-slice:
/// rk u . s + 2 <e^{bH + eta}, u>; zero exactly on the wall.
pub fn category_wall_eval(
    u: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<Rat> {
    let surface = &frame.surface;
    let beta_pt = p.beta(frame);
    let e = crate::mukai::exp_beta(&beta_pt, surface);
    Ok(&u.r * &p.s + rat_int(2) * pairing(&e, u, surface)?)
}

/// Distinct category thresholds (omega^2)/2 = a/r on the fixed-beta line,
/// ascending.
pub fn category_thresholds(frame: &BetaFrame) -> Result<Vec<Rat>> {
    let mut vals: Vec<Rat> = enumerate_r_beta(frame)?
        .into_iter()
        .filter_map(|w| w.threshold_half_s)
        .collect();
    vals.sort();
    vals.dedup();
    Ok(vals)
}

/// All category walls meeting a box, including the rank-0 degenerate classes
/// (reported without geometry). Complete via r^2 <= 2/s_min and the Schwarz
/// bound on D.
pub fn category_walls_in_box(frame: &BetaFrame, pbox: &ParamBox) -> Result<Vec<CategoryWall>> {
    if frame.surface.epsilon() == 0 {
        return Err(Error::AbelianInput(
            "walls for categories exist only on K3 surfaces".into(),
        ));
    }
    pbox.validate(frame)?;
    let surface = &frame.surface;
    let base = frame.base_frame()?;
    let e_base = base.exp_beta();
    let rho_cl = MukaiVector::rho_class(surface.rho);
    let ranges = box_ranges(frame, pbox);
    let m_max = ranges.neg_eta_sq.hi.clone();
    let (s_lo, s_hi) = pbox.s_range.clone();

    let mut out = Vec::new();

    // rank > 0: half spheres with s <= 2/r^2 on the wall
    let r_cap = floor_sqrt_rat(&(rat_int(2) / &s_lo));
    let r_cap = r_cap.to_i64().unwrap_or(0);
    for r in 1..=r_cap.max(0) {
        // -(D^2) <= 2 (2 - r^2 s_lo) + 2 r^2 max(-(eta^2))
        let slack = rat_int(2) - rat_int(r * r) * &s_lo;
        if slack.is_negative() {
            continue;
        }
        let bound = rat_int(2) * &slack + rat_int(2) * rat_int(r * r) * &m_max;
        let subtract = base.beta.scale(&rat_int(r));
        let Some(coset) = ns_coset_in_h_perp(surface, &subtract) else {
            continue;
        };
        for d_class in short_vectors(surface, &bound, &coset)? {
            let d2 = surface.ip(&d_class, &d_class);
            // a = ((D^2) + 2)/(2r) from <u^2> = -2
            let a = (&d2 + rat_int(2)) / rat_int(2 * r);
            let mid_beta = surface.ip(&d_class, &base.beta);
            let mut u = e_base.scale(&rat_int(r));
            u = u.add(&rho_cl.scale(&a));
            u = u.add(&MukaiVector::new(Rat::zero(), d_class.clone(), mid_beta));
            if !u.is_integral() {
                continue;
            }
            // exact meet test: f = r (s - (eta^2)) + 2 (D, eta) - 2a
            let quad = eta_quad_range(frame, pbox, &rat_int(-r), &d_class.scale(&rat_int(2)), &(rat_int(-2) * &a));
            let f_range = quad.add(&RatInterval::new(rat_int(r) * &s_lo, rat_int(r) * &s_hi));
            if !f_range.contains_zero() {
                continue;
            }
            let center = d_class.scale(&Rat::new(BigInt::one(), BigInt::from(r)));
            let radius_sq = Rat::new(BigInt::from(2), BigInt::from(r * r));
            out.push(CategoryWall {
                u,
                threshold_half_s: None,
                geometry: WallGeometry::HalfSphere { center, radius_sq },
            });
        }
    }

    // rank 0: u = D + (D,bH) rho with (D^2) = -2; wall is (eta, D) = 0
    if let Some(coset) = ns_coset_in_h_perp(surface, &NSClass::zero(surface.rho)) {
        for d_class in short_vectors(surface, &rat_int(2), &coset)? {
            if surface.ip(&d_class, &d_class) != rat_int(-2) {
                continue;
            }
            let mid_beta = surface.ip(&d_class, &base.beta);
            let u = MukaiVector::new(Rat::zero(), d_class.clone(), mid_beta);
            if !u.is_integral() {
                continue;
            }
            // canonical sign representative
            let canonical = if u.coords() >= u.neg().coords() { u.clone() } else { u.neg() };
            if out.iter().any(|w: &CategoryWall| w.u == canonical) {
                continue;
            }
            let lin = eta_quad_range(frame, pbox, &Rat::zero(), &d_class, &Rat::zero());
            if !lin.contains_zero() {
                continue;
            }
            out.push(CategoryWall { u: canonical, threshold_half_s: None, geometry: WallGeometry::Degenerate });
        }
    }

    out.sort_by(|x, y| x.u.cmp(&y.u));
    out.dedup_by(|x, y| x.u == y.u);
    Ok(out)
}

// ---------------------------------------------------------------------------
// walls for stabilities
// ---------------------------------------------------------------------------

/// Defining function of the stability wall W_{v1} at a point:
/// s (d r1 - d1 r) - 2 (-d <e^beta, v1> + d1 <e^beta, v>)
/// with the decomposition taken at the point's beta. Zero exactly on W_{v1};
/// equal to -2 sigma_bracket(v, v1) = 2 sigma_bracket(v1, v) identically.
pub fn stability_wall_eval(
    v: &MukaiVector,
    v1: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<Rat> {
    let local = p.frame_at(frame)?;
    let dv = local.decompose(v);
    let d1 = local.decompose(v1);
    Ok(&p.s * (&dv.d * &d1.r - &d1.d * &dv.r)
        - rat_int(2) * (&dv.d * &d1.a - &d1.d * &dv.a))
}

/// Result of a candidate search: the deduplicated walls plus diagnostics.
#[derive(Debug, Clone)]
pub struct CandidateSearch {
    pub walls: Vec<StabilityWall>,
    /// classes hitting the non-strict boundary of condition (b); dropped
    pub boundary_dropped: Vec<MukaiVector>,
    /// candidates whose defining function vanishes identically on the region
    /// (the dr1 - d1 r = 0, phase-everywhere-aligned case)
    pub full_region: Vec<MukaiVector>,
}

/// primitive sign-normalized integer vector spanning Q(v1/d1 - v/d)
fn ray_key(v: &MukaiVector, dv: &Rat, v1: &MukaiVector, d1: &Rat) -> Option<Vec<Rat>> {
    let w = v1.scale(&(rat_int(1) / d1)).sub(&v.scale(&(rat_int(1) / dv)));
    if w.is_zero() {
        return None;
    }
    let coords = w.coords();
    let mut lcm = BigInt::one();
    for c in &coords {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = coords.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if !g.is_zero() {
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
    }
    if let Some(first) = ints.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in ints.iter_mut() {
                *c = -&*c;
            }
        }
    }
    Some(ints.into_iter().map(Rat::from_integer).collect())
}

fn decomposition_key(frame: &BetaFrame, v: &MukaiVector) -> Vec<Rat> {
    let d = frame.decompose(v);
    let mut key = vec![d.r, d.a, d.d];
    key.extend(d.big_d.0);
    key
}

/// geometry of W_{v1} in the b-slice, from bH-frame data
fn stability_geometry(base: &BetaFrame, v: &MukaiVector, v1: &MukaiVector) -> WallGeometry {
    let dv = base.decompose(v);
    let d1 = base.decompose(v1);
    let kappa = &dv.d * &d1.r - &d1.d * &dv.r;
    let dd = d1.big_d.scale(&dv.d).sub(&dv.big_d.scale(&d1.d));
    let da = &dv.d * &d1.a - &d1.d * &dv.a;
    if kappa.is_zero() {
        WallGeometry::Hyperplane { normal: dd, offset: da }
    } else {
        let center = dd.scale(&(rat_int(1) / &kappa));
        let radius_sq = rat_int(2) * &da / &kappa - base.surface.ip(&center, &center);
        WallGeometry::HalfSphere { center, radius_sq }
    }
}

struct CandidateContext<'a> {
    frame: &'a BetaFrame,
    v: MukaiVector,
    v_sq: Rat,
    eps: Rat,
    d_min: Rat,
    h2: Rat,
}

impl<'a> CandidateContext<'a> {
    /// conditions (a), (b), (c) plus the Bogomolov bound on the complement;
    /// all terms are frame-independent lattice data
    fn admissible(&self, v1: &MukaiVector, d1: &Rat) -> Result<AdmissibleOutcome> {
        let d = self.frame.decompose(&self.v).d;
        if !(d1.is_positive() && *d1 < d) {
            return Ok(AdmissibleOutcome::Fail);
        }
        let v1_sq = self_pairing(v1, &self.frame.surface)?;
        let dm2 = &self.d_min * &self.d_min;
        let b_rhs = d1 * &self.v_sq / &d + rat_int(2) * &d * d1 * &self.eps / &dm2;
        if v1_sq == b_rhs {
            return Ok(AdmissibleOutcome::Boundary);
        }
        if v1_sq > b_rhs {
            return Ok(AdmissibleOutcome::Fail);
        }
        let c_rhs = -rat_int(2) * d1 * d1 * &self.eps / &dm2;
        if v1_sq < c_rhs {
            return Ok(AdmissibleOutcome::Fail);
        }
        // Bogomolov for the complement v - v1
        let v2 = self.v.sub(v1);
        let d2 = &d - d1;
        let v2_sq = self_pairing(&v2, &self.frame.surface)?;
        if v2_sq < -rat_int(2) * &d2 * &d2 * &self.eps / &dm2 {
            return Ok(AdmissibleOutcome::Fail);
        }
        Ok(AdmissibleOutcome::Pass)
    }
}

enum AdmissibleOutcome {
    Pass,
    Fail,
    Boundary,
}

/// Complete candidate list of stability walls for v meeting the region.
///
/// Fixed-beta mode additionally imposes the eta-fixed refinement
/// <v1^2> - (D1^2) < (d1/d)(<v^2> - (D^2)) + 2 d d1 eps / d_min^2.
pub fn stability_wall_candidates(
    v: &MukaiVector,
    frame: &BetaFrame,
    region: &Region,
) -> Result<CandidateSearch> {
    let local_dec = frame.decompose(v);
    if !local_dec.d.is_positive() {
        return Err(Error::Precondition("stability walls need d(v) > 0".into()));
    }
    match region {
        Region::FixedBetaInterval { s_lo, s_hi } => {
            if !s_lo.is_positive() || s_lo > s_hi {
                return Err(Error::Precondition("s interval must be positive and nonempty".into()));
            }
            candidates_fixed_beta(v, frame, s_lo, s_hi)
        }
        Region::Box(pbox) => {
            pbox.validate(frame)?;
            candidates_box(v, frame, pbox)
        }
    }
}

fn candidates_fixed_beta(
    v: &MukaiVector,
    frame: &BetaFrame,
    s_lo: &Rat,
    s_hi: &Rat,
) -> Result<CandidateSearch> {
    let surface = &frame.surface;
    let base = frame.base_frame()?;
    let dec = frame.decompose(v);
    let (r, a, d, big_d) = (dec.r.clone(), dec.a.clone(), dec.d.clone(), dec.big_d.clone());
    let v_sq = self_pairing(v, surface)?;
    let d_sq = surface.ip(&big_d, &big_d);
    let eps = surface.epsilon_rat();
    let ctx = CandidateContext {
        frame,
        v: v.clone(),
        v_sq: v_sq.clone(),
        eps: eps.clone(),
        d_min: frame.d_min.clone(),
        h2: surface.h2(),
    };
    let r0 = frame.r0_rat();
    let dm2 = &frame.d_min * &frame.d_min;
    let h2 = ctx.h2.clone();

    let mut found: BTreeMap<Vec<Rat>, Vec<MukaiVector>> = BTreeMap::new();
    let mut boundary = Vec::new();
    let mut full_region = Vec::new();

    let steps = (&d / &frame.d_min).to_integer();
    let mut k = BigInt::one();
    while k < steps {
        let d1 = &frame.d_min * Rat::from_integer(k.clone());
        k += 1;
        // conditions (b) and (c) bracket <v1^2> in a window whose width is
        // independent of (r1, a1, D1); an empty window kills this d1 outright
        // (isotropic v on an abelian surface, for instance)
        let window = &d1 * &v_sq / &d
            + rat_int(2) * &d * &d1 * &eps / &dm2
            + rat_int(2) * &d1 * &d1 * &eps / &dm2;
        if !window.is_positive() {
            continue;
        }
        // P bounds 2 r1 a1 via condition (c) with (D1^2) <= 0
        let p_bound = &d1 * &d1 * &h2 + rat_int(2) * &d1 * &d1 * &eps / &dm2;

        // the kappa = 0 degenerate class: the wall equation holds on the
        // whole line exactly when d a1 = d1 a
        let r1_deg = &d1 * &r / &d;
        if r1_deg.is_integer() {
            let a1 = &d1 * &a / &d;
            if (&a1 * &r0).is_integer() {
                collect_candidate_fixed(
                    &ctx, frame, &r1_deg, &d1, &a1, &d_sq, &v_sq, true,
                    &mut found, &mut boundary, &mut full_region,
                )?;
            }
        }

        // kappa != 0: on the wall, 2 r1 a1(s) <= P for some s in the window;
        // a1(s) = (s kappa/2 + d1 a)/d turns this into the quadratic
        // s d r1^2 + (2 d1 a - s d1 r) r1 - d P <= 0 at an s-endpoint.
        let mut r1_lo: Option<BigInt> = None;
        let mut r1_hi: Option<BigInt> = None;
        for s in [s_lo, s_hi] {
            let qa = s * &d;
            let qb = rat_int(2) * &d1 * &a - s * &d1 * &r;
            let qc = -(&d * &p_bound);
            if let Some((lo, hi)) = crate::ratio::quadratic_int_range(&qa, &qb, &qc) {
                r1_lo = Some(r1_lo.map_or(lo.clone(), |c: BigInt| c.min(lo)));
                r1_hi = Some(r1_hi.map_or(hi.clone(), |c: BigInt| c.max(hi)));
            }
        }
        let (Some(r1_lo), Some(r1_hi)) = (r1_lo, r1_hi) else {
            continue;
        };

        let mut r1 = r1_lo.clone();
        while r1 <= r1_hi {
            let r1_rat = Rat::from_integer(r1.clone());
            let kappa = &d * &r1_rat - &d1 * &r;
            if kappa.is_zero() {
                r1 += 1;
                continue;
            }
            // a1 window from s* in [s_lo, s_hi], capped by achievability
            let a1_at = |s: &Rat| (s * &kappa / rat_int(2) + &d1 * &a) / &d;
            let (mut w_lo, mut w_hi) = (a1_at(s_lo), a1_at(s_hi));
            if w_lo > w_hi {
                std::mem::swap(&mut w_lo, &mut w_hi);
            }
            if r1_rat.is_positive() {
                w_hi = w_hi.min(&p_bound / (rat_int(2) * &r1_rat));
            } else if r1_rat.is_negative() {
                w_lo = w_lo.max(&p_bound / (rat_int(2) * &r1_rat));
            }
            let mut m = ceil_rat(&(&w_lo * &r0));
            let m_hi = floor_rat(&(&w_hi * &r0));
            while m <= m_hi {
                let a1 = Rat::from_integer(m.clone()) / &r0;
                collect_candidate_fixed(
                    &ctx, frame, &r1_rat, &d1, &a1, &d_sq, &v_sq, false,
                    &mut found, &mut boundary, &mut full_region,
                )?;
                m += 1;
            }
            r1 += 1;
        }
    }

    Ok(assemble_walls(frame, &base, v, &dec.d, found, boundary, full_region, true, s_lo, s_hi))
}

#[allow(clippy::too_many_arguments)]
fn collect_candidate_fixed(
    ctx: &CandidateContext,
    frame: &BetaFrame,
    r1: &Rat,
    d1: &Rat,
    a1: &Rat,
    v_dsq: &Rat,
    v_sq: &Rat,
    degenerate: bool,
    found: &mut BTreeMap<Vec<Rat>, Vec<MukaiVector>>,
    boundary: &mut Vec<MukaiVector>,
    full_region: &mut Vec<MukaiVector>,
) -> Result<()> {
    let surface = &frame.surface;
    let dec_v = frame.decompose(&ctx.v);
    let dm2 = &ctx.d_min * &ctx.d_min;
    let h2 = &ctx.h2;

    // eta-fixed refinement, D1-independent part
    let lhs_no_d1 = d1 * d1 * h2 - rat_int(2) * r1 * a1;
    let rhs_fixed = d1 * (v_sq - v_dsq) / &dec_v.d + rat_int(2) * &dec_v.d * d1 * &ctx.eps / &dm2;
    if lhs_no_d1 >= rhs_fixed {
        return Ok(());
    }

    // (D1^2) window from (b) and (c); (b) is strict, so an empty or
    // degenerate window carries no candidates
    let ub = d1 * v_sq / &dec_v.d + rat_int(2) * &dec_v.d * d1 * &ctx.eps / &dm2
        - (d1 * d1 * h2 - rat_int(2) * r1 * a1);
    let lb = -rat_int(2) * d1 * d1 * &ctx.eps / &dm2 - (d1 * d1 * h2 - rat_int(2) * r1 * a1);
    if lb.is_positive() || ub <= lb {
        return Ok(());
    }
    let subtract = frame.beta.scale(r1).add(&surface.h_class().scale(d1));
    let Some(coset) = ns_coset_in_h_perp(surface, &subtract) else {
        return Ok(());
    };
    for d1_class in short_vectors(surface, &lb.abs(), &coset)? {
        let d1_sq = surface.ip(&d1_class, &d1_class);
        if d1_sq < lb {
            continue;
        }
        let cand_dec = crate::mukai::BetaDecomposition {
            r: r1.clone(),
            a: a1.clone(),
            d: d1.clone(),
            big_d: d1_class.clone(),
        };
        let v1 = frame.recompose(&cand_dec)?;
        if !v1.is_integral() {
            continue;
        }
        // proportional classes define no wall
        if ray_key(&ctx.v, &dec_v.d, &v1, d1).is_none() {
            continue;
        }
        match ctx.admissible(&v1, d1)? {
            AdmissibleOutcome::Fail => continue,
            AdmissibleOutcome::Boundary => {
                boundary.push(v1);
                continue;
            }
            AdmissibleOutcome::Pass => {}
        }
        if d1_sq >= ub {
            continue;
        }
        if degenerate {
            full_region.push(v1);
            continue;
        }
        let key = ray_key(&ctx.v, &dec_v.d, &v1, d1).unwrap();
        found.entry(key).or_default().push(v1);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assemble_walls(
    frame: &BetaFrame,
    base: &BetaFrame,
    v: &MukaiVector,
    d: &Rat,
    found: BTreeMap<Vec<Rat>, Vec<MukaiVector>>,
    boundary: Vec<MukaiVector>,
    full_region: Vec<MukaiVector>,
    fixed_mode: bool,
    s_lo: &Rat,
    s_hi: &Rat,
) -> CandidateSearch {
    let mut walls = Vec::new();
    for (ray, mut reps) in found {
        reps.sort_by_key(|w| decomposition_key(base, w));
        reps.dedup();
        let v1 = reps[0].clone();
        let complement = v.sub(&v1);
        // the complement may compare smaller than every enumerated rep
        let (v1, complement) =
            if decomposition_key(base, &complement) < decomposition_key(base, &v1) {
                (complement.clone(), v1)
            } else {
                (v1, complement)
            };
        let geometry = stability_geometry(base, v, &v1);
        let s_star = if fixed_mode {
            let dec1 = frame.decompose(&v1);
            let decv = frame.decompose(v);
            let kappa = d * &dec1.r - &dec1.d * &decv.r;
            if kappa.is_zero() {
                None
            } else {
                let st = rat_int(2) * (d * &dec1.a - &dec1.d * &decv.a) / &kappa;
                if st >= *s_lo && st <= *s_hi {
                    Some(st)
                } else {
                    None
                }
            }
        } else {
            None
        };
        // in fixed mode, keep only walls actually meeting the interval
        if fixed_mode && s_star.is_none() {
            continue;
        }
        walls.push(StabilityWall { v1, complement, ray, geometry, s_star });
    }
    walls.sort_by(|a, b| a.v1.cmp(&b.v1));
    CandidateSearch { walls, boundary_dropped: boundary, full_region }
}

fn candidates_box(v: &MukaiVector, frame: &BetaFrame, pbox: &ParamBox) -> Result<CandidateSearch> {
    let surface = &frame.surface;
    let base = frame.base_frame()?;
    let dec0 = base.decompose(v);
    let (r, a0, d, big_d0) = (dec0.r.clone(), dec0.a.clone(), dec0.d.clone(), dec0.big_d.clone());
    if !d.is_positive() {
        return Err(Error::Precondition("stability walls need d(v) > 0".into()));
    }
    let v_sq = self_pairing(v, surface)?;
    let eps = surface.epsilon_rat();
    let ctx = CandidateContext {
        frame,
        v: v.clone(),
        v_sq: v_sq.clone(),
        eps: eps.clone(),
        d_min: base.d_min.clone(),
        h2: surface.h2(),
    };
    let r0 = base.r0_rat();
    let dm2 = &base.d_min * &base.d_min;
    let h2 = ctx.h2.clone();
    let (s_lo, s_hi) = pbox.s_range.clone();
    let ranges = box_ranges(&base, pbox);
    let m_max = ranges.neg_eta_sq.hi.clone();

    // exact range of a'(eta) = a0 - (D0, eta) + r (eta^2)/2 over the box
    let a_range = eta_quad_range(
        &base,
        pbox,
        &(&r / rat_int(2)),
        &big_d0.neg(),
        &a0,
    );

    let mut found: BTreeMap<Vec<Rat>, Vec<MukaiVector>> = BTreeMap::new();
    let mut boundary = Vec::new();
    let mut full_region = Vec::new();

    let steps = (&d / &base.d_min).to_integer();
    let mut k = BigInt::one();
    while k < steps {
        let d1 = &base.d_min * Rat::from_integer(k.clone());
        k += 1;
        let window = &d1 * &v_sq / &d
            + rat_int(2) * &d * &d1 * &eps / &dm2
            + rat_int(2) * &d1 * &d1 * &eps / &dm2;
        if !window.is_positive() {
            continue;
        }
        let p_bound = &d1 * &d1 * &h2 + rat_int(2) * &d1 * &d1 * &eps / &dm2;
        // achievability 2 r1 a1' <= P on the wall is, at a box corner,
        // the quadratic s d r1^2 + (2 d1 a' - s d1 r) r1 - d P <= 0
        let mut r1_lo: Option<BigInt> = None;
        let mut r1_hi: Option<BigInt> = None;
        for s in [&s_lo, &s_hi] {
            for ap in [&a_range.lo, &a_range.hi] {
                let qa = s.clone() * &d;
                let qb = rat_int(2) * &d1 * ap - s.clone() * &d1 * &r;
                let qc = -(&d * &p_bound);
                if let Some((lo, hi)) = crate::ratio::quadratic_int_range(&qa, &qb, &qc) {
                    r1_lo = Some(r1_lo.map_or(lo.clone(), |c: BigInt| c.min(lo)));
                    r1_hi = Some(r1_hi.map_or(hi.clone(), |c: BigInt| c.max(hi)));
                }
            }
        }
        // the kappa = 0 slope sits outside the quadratic range; include it
        let r1_deg = &d1 * &r / &d;
        if r1_deg.is_integer() {
            let rd = r1_deg.to_integer();
            r1_lo = Some(r1_lo.map_or(rd.clone(), |c: BigInt| c.min(rd.clone())));
            r1_hi = Some(r1_hi.map_or(rd.clone(), |c: BigInt| c.max(rd)));
        }
        let (Some(r1_lo), Some(r1_hi)) = (r1_lo, r1_hi) else {
            continue;
        };

        let mut r1 = r1_lo.clone();
        while r1 <= r1_hi {
            let r1_rat = Rat::from_integer(r1.clone());
            // Schwarz chain bound for -(D1^2) over the box
            let mut z_max: Option<Rat> = None;
            for s in [&s_lo, &s_hi] {
                for ap in [&a_range.lo, &a_range.hi] {
                    let z = &p_bound - rat_int(2) * &r1_rat * &d1 / &d * (ap - s * &r / rat_int(2));
                    if z_max.as_ref().is_none_or(|m| z > *m) {
                        z_max = Some(z);
                    }
                }
            }
            let z_max = z_max.unwrap();
            if z_max.is_negative() {
                r1 += 1;
                continue;
            }
            let d1_bound = rat_int(2) * &z_max + rat_int(2) * &r1_rat * &r1_rat * &m_max;
            let subtract = base.beta.scale(&r1_rat).add(&surface.h_class().scale(&d1));
            let Some(coset) = ns_coset_in_h_perp(surface, &subtract) else {
                r1 += 1;
                continue;
            };
            for d1_class in short_vectors(surface, &d1_bound, &coset)? {
                let kappa = &d * &r1_rat - &d1 * &r;
                // a1 range from the wall equation over the box:
                // a1 = [kappa (s - (eta^2)) + 2 (d D1 - d1 D, eta)] / (2d) + d1 a0 / d
                let dd = d1_class.scale(&d).sub(&big_d0.scale(&d1));
                let quad = eta_quad_range(
                    &base,
                    pbox,
                    &(-&kappa / (rat_int(2) * &d)),
                    &dd.scale(&(rat_int(1) / &d)),
                    &(&d1 * &a0 / &d),
                );
                let s_part = RatInterval::new(
                    (&kappa / (rat_int(2) * &d) * &s_lo).min(&kappa / (rat_int(2) * &d) * &s_hi),
                    (&kappa / (rat_int(2) * &d) * &s_lo).max(&kappa / (rat_int(2) * &d) * &s_hi),
                );
                let a1_range = quad.add(&s_part);
                let mut m = ceil_rat(&(&a1_range.lo * &r0));
                let m_hi = floor_rat(&(&a1_range.hi * &r0));
                while m <= m_hi {
                    let a1 = Rat::from_integer(m.clone()) / &r0;
                    m += 1;
                    let cand_dec = crate::mukai::BetaDecomposition {
                        r: r1_rat.clone(),
                        a: a1.clone(),
                        d: d1.clone(),
                        big_d: d1_class.clone(),
                    };
                    let v1 = base.recompose(&cand_dec)?;
                    if !v1.is_integral() {
                        continue;
                    }
                    if ray_key(v, &d, &v1, &d1).is_none() {
                        continue;
                    }
                    match ctx.admissible(&v1, &d1)? {
                        AdmissibleOutcome::Fail => continue,
                        AdmissibleOutcome::Boundary => {
                            boundary.push(v1);
                            continue;
                        }
                        AdmissibleOutcome::Pass => {}
                    }
                    // exact wall-meets-box test
                    let da = &d * &a1 - &d1 * &a0;
                    let wall_fn = eta_quad_range(
                        &base,
                        pbox,
                        &(-&kappa),
                        &dd.scale(&rat_int(2)),
                        &(rat_int(-2) * &da),
                    );
                    let f_range = wall_fn.add(&RatInterval::new(
                        (&kappa * &s_lo).min(&kappa * &s_hi),
                        (&kappa * &s_lo).max(&kappa * &s_hi),
                    ));
                    if !f_range.contains_zero() {
                        continue;
                    }
                    if kappa.is_zero() && dd.is_zero() {
                        // defining function constant: whole region
                        full_region.push(v1);
                        continue;
                    }
                    let key = ray_key(v, &d, &v1, &d1).unwrap();
                    found.entry(key).or_default().push(v1);
                }
            }
            r1 += 1;
        }
    }

    Ok(assemble_walls(frame, &base, v, &d, found, boundary, full_region, false, &s_lo, &s_hi))
}

// ---------------------------------------------------------------------------
// chamber signatures
// ---------------------------------------------------------------------------

/// Sign vector of a point against every wall collected over the region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberSignature {
    pub entries: Vec<(String, i8)>,
    pub boundary: bool,
}

pub fn wall_id_category(u: &MukaiVector) -> String {
    format!("cat:{u}")
}

pub fn wall_id_stability(w: &StabilityWall) -> String {
    let ray: Vec<String> = w.ray.iter().map(|c| c.to_string()).collect();
    format!("stab:[{}]", ray.join(","))
}

fn sign_of(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Walls relevant to (v, region): category walls on K3 plus stability
/// candidates. Category walls come from the fixed-beta set or the box
/// enumeration according to the region.
pub fn region_walls(
    v: &MukaiVector,
    frame: &BetaFrame,
    region: &Region,
) -> Result<(Vec<CategoryWall>, Vec<StabilityWall>)> {
    let cats = if frame.surface.epsilon() == 1 {
        match region {
            Region::FixedBetaInterval { .. } => enumerate_r_beta(frame)?,
            Region::Box(pbox) => category_walls_in_box(frame, pbox)?,
        }
    } else {
        Vec::new()
    };
    let stabs = stability_wall_candidates(v, frame, region)?.walls;
    Ok((cats, stabs))
}

fn region_contains(p: &StabilityPoint, frame: &BetaFrame, region: &Region) -> bool {
    match region {
        Region::FixedBetaInterval { s_lo, s_hi } => {
            p.eta == frame.eta_beta && p.s >= *s_lo && p.s <= *s_hi
        }
        Region::Box(pbox) => {
            // membership up to the box coordinates: solve eta in the basis
            // span exactly for the 1-basis case, otherwise accept s-range
            if p.s < pbox.s_range.0 || p.s > pbox.s_range.1 {
                return false;
            }
            if pbox.eta_basis.len() == 1 {
                let b = &pbox.eta_basis[0];
                let bb = frame.surface.ip(b, b);
                if bb.is_zero() {
                    return p.eta.is_zero();
                }
                let x = frame.surface.ip(&p.eta, b) / bb;
                p.eta == b.scale(&x) && x >= pbox.eta_ranges[0].0 && x <= pbox.eta_ranges[0].1
            } else {
                true
            }
        }
    }
}

/// Chamber signature of p: the sign of every wall's defining function. A
/// zero sign flags a boundary point.
pub fn locate_chamber(
    v: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
    region: &Region,
) -> Result<ChamberSignature> {
    if !region_contains(p, frame, region) {
        return Err(Error::Precondition("the point lies outside the region".into()));
    }
    let (cats, stabs) = region_walls(v, frame, region)?;
    let mut entries = Vec::new();
    for w in &cats {
        let f = category_wall_eval(&w.u, p, frame)?;
        entries.push((wall_id_category(&w.u), sign_of(&f)));
    }
    for w in &stabs {
        let f = stability_wall_eval(v, &w.v1, p, frame)?;
        entries.push((wall_id_stability(w), sign_of(&f)));
    }
    entries.sort();
    let boundary = entries.iter().any(|(_, s)| *s == 0);
    Ok(ChamberSignature { entries, boundary })
}

/// Same-chamber report for two points in the region.
#[derive(Debug, Clone)]
pub struct SameChamberReport {
    pub same: bool,
    pub boundary: bool,
    pub separating: Vec<String>,
}

/// Two points are reported same-chamber iff their signatures agree and no
/// wall crosses the connecting segment. Each wall restricted to the segment
/// is an exact rational quadratic; tangency (double root) does not separate.
pub fn same_chamber(
    v: &MukaiVector,
    p1: &StabilityPoint,
    p2: &StabilityPoint,
    frame: &BetaFrame,
    region: &Region,
) -> Result<SameChamberReport> {
    let sig1 = locate_chamber(v, p1, frame, region)?;
    let sig2 = locate_chamber(v, p2, frame, region)?;
    if sig1.boundary || sig2.boundary {
        return Ok(SameChamberReport { same: false, boundary: true, separating: vec![] });
    }
    let mut separating = Vec::new();
    let (cats, stabs) = region_walls(v, frame, region)?;

    let eval_at = |t: &Rat, which: &dyn Fn(&StabilityPoint) -> Result<Rat>| -> Result<Rat> {
        let eta = p1.eta.add(&p2.eta.sub(&p1.eta).scale(t));
        let s = &p1.s + (&p2.s - &p1.s) * t;
        let p = StabilityPoint { eta, s };
        which(&p)
    };

    let mut check = |id: String, f: &dyn Fn(&StabilityPoint) -> Result<Rat>| -> Result<()> {
        let f0 = eval_at(&rat_int(0), f)?;
        let f1 = eval_at(&rat_int(1), f)?;
        let fh = eval_at(&crate::ratio::rat_of(1, 2), f)?;
        // f(t) = A t^2 + B t + C through three exact samples
        let c = f0.clone();
        let a_coef = rat_int(2) * &f1 + rat_int(2) * &f0 - rat_int(4) * &fh;
        let b_coef = &f1 - &f0 - &a_coef;
        let s0 = sign_of(&f0);
        let s1 = sign_of(&f1);
        if s0 == 0 || s1 == 0 {
            separating.push(id);
            return Ok(());
        }
        if s0 != s1 {
            separating.push(id);
            return Ok(());
        }
        // same endpoint signs: a strict double crossing needs an interior
        // vertex on the strict opposite side
        if !a_coef.is_zero() {
            let vertex = -&b_coef / (rat_int(2) * &a_coef);
            if vertex.is_positive() && vertex < rat_int(1) {
                let f_vertex = &c - &b_coef * &b_coef / (rat_int(4) * &a_coef);
                let sv = sign_of(&f_vertex);
                if sv != 0 && sv != s0 {
                    separating.push(id);
                }
            }
        }
        Ok(())
    };

    for w in &cats {
        let u = w.u.clone();
        let frame_c = frame.clone();
        check(wall_id_category(&u), &move |p| category_wall_eval(&u, p, &frame_c))?;
    }
    for w in &stabs {
        let v1 = w.v1.clone();
        let vv = v.clone();
        let frame_c = frame.clone();
        check(wall_id_stability(w), &move |p| stability_wall_eval(&vv, &v1, p, &frame_c))?;
    }

    let same = sig1.entries == sig2.entries && separating.is_empty();
    Ok(SameChamberReport { same, boundary: false, separating })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat_of;
    use crate::surface::{SurfaceData, SurfaceKind};

    fn ek3() -> SurfaceData {
        SurfaceData::new(
            SurfaceKind::K3,
            vec![vec![BigInt::from(-2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]],
            vec![BigInt::from(1), BigInt::from(4)],
        )
        .unwrap()
    }

    fn ab1() -> SurfaceData {
        SurfaceData::new(SurfaceKind::Abelian, vec![vec![BigInt::from(2)]], vec![BigInt::from(1)])
            .unwrap()
    }

    fn dcl() -> NSClass {
        NSClass::from_ints(&[1, -2])
    }

    fn u1() -> MukaiVector {
        MukaiVector::new(rat_int(1), NSClass::zero(2), rat_int(1))
    }

    fn u2() -> MukaiVector {
        MukaiVector::new(rat_int(1), dcl(), rat_int(-2))
    }

    fn u3() -> MukaiVector {
        MukaiVector::new(rat_int(2), dcl(), rat_int(-1))
    }

    #[test]
    fn r_beta_for_the_elliptic_k3() {
        let s = ek3();
        let f3 = BetaFrame::new(s.clone(), dcl().scale(&rat_of(1, 3))).unwrap();
        let walls3 = enumerate_r_beta(&f3).unwrap();
        let got3: Vec<MukaiVector> = walls3.iter().map(|w| w.u.clone()).collect();
        assert_eq!(got3, vec![u1(), u3()]);

        let f2 = BetaFrame::new(s.clone(), dcl().scale(&rat_of(1, 2))).unwrap();
        let walls2 = enumerate_r_beta(&f2).unwrap();
        let got2: Vec<MukaiVector> = walls2.iter().map(|w| w.u.clone()).collect();
        assert_eq!(got2, vec![u1(), u2(), u3()]);

        // abelian surfaces carry no category walls
        let fa = BetaFrame::new(ab1(), NSClass::zero(1)).unwrap();
        assert!(enumerate_r_beta(&fa).is_err());
    }

    #[test]
    fn r_beta_boundary_case_r0_one() {
        // at beta = 0 the only solution is r = 1, r0 a = 1, D = 0: the class
        // e^beta + rho
        let s = ek3();
        let f = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        assert_eq!(f.r0, BigInt::one());
        let walls = enumerate_r_beta(&f).unwrap();
        assert_eq!(walls.len(), 1);
        assert_eq!(walls[0].u, u1());
        assert_eq!(walls[0].threshold_half_s, Some(rat_int(1)));
    }

    #[test]
    fn category_thresholds_for_the_elliptic_k3() {
        let s = ek3();
        let f3 = BetaFrame::new(s.clone(), dcl().scale(&rat_of(1, 3))).unwrap();
        assert_eq!(category_thresholds(&f3).unwrap(), vec![rat_of(1, 6), rat_of(2, 3)]);
        let f2 = BetaFrame::new(s, dcl().scale(&rat_of(1, 2))).unwrap();
        assert_eq!(category_thresholds(&f2).unwrap(), vec![rat_of(1, 4)]);
    }

    #[test]
    fn exceptional_bundle_threshold_is_one_over_r0() {
        // K3 with NS = ZH, (H^2) = 2, beta = H/2: r0 = 4 and the unique
        // threshold is 1/4 = 1/r0, realized by v(E0) = (2, H, 1)
        let s = SurfaceData::new(SurfaceKind::K3, vec![vec![BigInt::from(2)]], vec![BigInt::from(1)])
            .unwrap();
        let beta = s.h_class().scale(&rat_of(1, 2));
        let f = BetaFrame::new(s, beta).unwrap();
        assert_eq!(f.r0, BigInt::from(4));
        let th = category_thresholds(&f).unwrap();
        assert_eq!(th, vec![rat_of(1, 4)]);
        let walls = enumerate_r_beta(&f).unwrap();
        assert_eq!(walls.len(), 1);
        assert_eq!(walls[0].u, MukaiVector::new(rat_int(2), f.surface.h_class(), rat_int(1)));
    }

    #[test]
    fn category_wall_eval_points() {
        let s = ek3();
        let f = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        // all three circles pass through (x, y^2) = (1/2, 1/12), s = 6 y^2 = 1/2
        let p_mid = StabilityPoint::new(&f, dcl().scale(&rat_of(1, 2)), rat_of(1, 2)).unwrap();
        for u in [u1(), u2(), u3()] {
            assert_eq!(category_wall_eval(&u, &p_mid, &f).unwrap(), rat_int(0));
        }
        // W_{u1} at eta = 0: s = 2
        let p0 = StabilityPoint::new(&f, NSClass::zero(2), rat_int(2)).unwrap();
        assert_eq!(category_wall_eval(&u1(), &p0, &f).unwrap(), rat_int(0));
        // off the wall the sign is definite
        let p_in = StabilityPoint::new(&f, NSClass::zero(2), rat_int(1)).unwrap();
        assert!(category_wall_eval(&u1(), &p_in, &f).unwrap().is_negative());
    }

    #[test]
    fn category_walls_in_boxes() {
        let s = ek3();
        let f = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        let mk_box = |xlo: Rat, xhi: Rat, slo: Rat, shi: Rat| ParamBox {
            eta_basis: vec![dcl()],
            eta_ranges: vec![(xlo, xhi)],
            s_range: (slo, shi),
        };
        // wide strip contains all three walls
        let wide = mk_box(rat_int(0), rat_int(1), rat_of(1, 10), rat_int(3));
        let walls = category_walls_in_box(&f, &wide).unwrap();
        let got: Vec<MukaiVector> = walls.iter().map(|w| w.u.clone()).collect();
        assert!(got.contains(&u1()) && got.contains(&u2()) && got.contains(&u3()));
        // a strip above every circle is empty
        let high = mk_box(rat_int(0), rat_of(1, 10), rat_of(21, 10), rat_int(3));
        assert!(category_walls_in_box(&f, &high).unwrap().is_empty());
        // s_min > 2 excludes every positive rank
        let very_high = mk_box(rat_int(-10), rat_int(10), rat_of(21, 10), rat_int(5));
        let vh = category_walls_in_box(&f, &very_high).unwrap();
        assert!(vh.iter().all(|w| w.geometry == WallGeometry::Degenerate));
    }

    #[test]
    fn degenerate_rank_zero_category_walls() {
        // a K3 whose H-perp contains a (-2)-class: the rank-0 elements of
        // the wall set are reported without geometry, and only when the
        // hyperplane (eta, D) = 0 meets the box
        let s = SurfaceData::new(
            SurfaceKind::K3,
            vec![vec![BigInt::from(2), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(-2)]],
            vec![BigInt::from(1), BigInt::from(0)],
        )
        .unwrap();
        let f = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        let e2 = NSClass::from_ints(&[0, 1]);
        let through_zero = ParamBox {
            eta_basis: vec![e2.clone()],
            eta_ranges: vec![(rat_int(-1), rat_int(1))],
            s_range: (rat_int(3), rat_int(4)),
        };
        let walls = category_walls_in_box(&f, &through_zero).unwrap();
        assert!(walls
            .iter()
            .any(|w| w.geometry == WallGeometry::Degenerate && w.u.r.is_zero()));
        let off_zero = ParamBox {
            eta_basis: vec![e2],
            eta_ranges: vec![(rat_of(1, 2), rat_int(1))],
            s_range: (rat_int(3), rat_int(4)),
        };
        let walls_off = category_walls_in_box(&f, &off_zero).unwrap();
        assert!(walls_off.iter().all(|w| w.geometry != WallGeometry::Degenerate));
    }

    #[test]
    fn stability_candidates_ab1() {
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        let v = MukaiVector::new(rat_int(0), s.h_class().scale(&rat_int(2)), rat_int(0));
        let region = Region::FixedBetaInterval { s_lo: rat_int(1), s_hi: rat_int(4) };
        let res = stability_wall_candidates(&v, &f, &region).unwrap();
        assert_eq!(res.walls.len(), 1);
        let w = &res.walls[0];
        let w1 = MukaiVector::new(rat_int(-1), s.h_class(), rat_int(-1));
        let w2 = MukaiVector::new(rat_int(1), s.h_class(), rat_int(1));
        assert_eq!(w.v1, w1);
        assert_eq!(w.complement, w2);
        assert_eq!(w.s_star, Some(rat_int(2)));

        // away from s = 2 the list is empty
        let region_far = Region::FixedBetaInterval { s_lo: rat_int(3), s_hi: rat_int(4) };
        assert!(stability_wall_candidates(&v, &f, &region_far).unwrap().walls.is_empty());

        // d = d_min has no candidates at all
        let vmin = MukaiVector::new(rat_int(1), s.h_class(), rat_int(0));
        let res_min = stability_wall_candidates(&vmin, &f, &region).unwrap();
        assert!(res_min.walls.is_empty());
    }

    #[test]
    fn no_stability_walls_for_primitive_isotropic_on_abelian() {
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        // (1, H, 1) and (1, 2H, 4) are primitive isotropic with d > 0
        for v in [
            MukaiVector::new(rat_int(1), s.h_class(), rat_int(1)),
            MukaiVector::new(rat_int(1), s.h_class().scale(&rat_int(2)), rat_int(4)),
        ] {
            assert_eq!(crate::mukai::self_pairing(&v, &s).unwrap(), rat_int(0));
            let region = Region::FixedBetaInterval { s_lo: rat_of(1, 10), s_hi: rat_int(50) };
            let res = stability_wall_candidates(&v, &f, &region).unwrap();
            assert!(res.walls.is_empty());
        }
    }

    #[test]
    fn stability_wall_eval_signs() {
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        let v = MukaiVector::new(rat_int(0), s.h_class().scale(&rat_int(2)), rat_int(0));
        let w1 = MukaiVector::new(rat_int(-1), s.h_class(), rat_int(-1));
        let at = |sv: Rat| StabilityPoint::new(&f, NSClass::zero(1), sv).unwrap();
        assert_eq!(stability_wall_eval(&v, &w1, &at(rat_int(2)), &f).unwrap(), rat_int(0));
        assert_eq!(stability_wall_eval(&v, &v, &at(rat_int(3)), &f).unwrap(), rat_int(0));
        // identically -2 sigma_bracket(v, v1) = 2 sigma_bracket(v1, v)
        for sv in [rat_int(1), rat_int(3), rat_of(7, 3)] {
            let p = at(sv);
            let ev = stability_wall_eval(&v, &w1, &p, &f).unwrap();
            let br = crate::charge::sigma_bracket(&v, &w1, &p, &f).unwrap();
            assert_eq!(ev, rat_int(-2) * br);
        }
    }

    #[test]
    fn chambers_on_the_fixed_beta_line() {
        // EK3 at beta = D/3: the category thresholds 1/6, 2/3 of s/2 split
        // the line into three chambers with distinct signatures
        let s = ek3();
        let f = BetaFrame::new(s.clone(), dcl().scale(&rat_of(1, 3))).unwrap();
        let v = MukaiVector::new(rat_int(1), s.h_class(), rat_int(0));
        let region = Region::FixedBetaInterval { s_lo: rat_of(1, 100), s_hi: rat_int(10) };
        let eta = f.eta_beta.clone();
        let sig = |half_s: Rat| {
            let p = StabilityPoint::new(&f, eta.clone(), rat_int(2) * half_s).unwrap();
            locate_chamber(&v, &p, &f, &region).unwrap()
        };
        let cat_part = |sig: &ChamberSignature| -> Vec<(String, i8)> {
            sig.entries.iter().filter(|(id, _)| id.starts_with("cat:")).cloned().collect()
        };
        let s_a = cat_part(&sig(rat_of(1, 10)));
        let s_b = cat_part(&sig(rat_of(1, 3)));
        let s_c = cat_part(&sig(rat_int(1)));
        assert!(s_a.iter().all(|(_, s)| *s != 0));
        assert!(s_b.iter().all(|(_, s)| *s != 0));
        assert!(s_c.iter().all(|(_, s)| *s != 0));
        assert_ne!(s_a, s_b);
        assert_ne!(s_b, s_c);
        assert_ne!(s_a, s_c);
        // a point on the threshold is flagged on the category wall
        let s_on = cat_part(&sig(rat_of(1, 6)));
        assert!(s_on.iter().any(|(_, s)| *s == 0));
    }

    #[test]
    fn r_beta_membership_recheck() {
        // every enumerated class satisfies the defining conditions exactly
        let s = ek3();
        for beta in [dcl().scale(&rat_of(1, 3)), dcl().scale(&rat_of(1, 2))] {
            let f = BetaFrame::new(s.clone(), beta).unwrap();
            let e = f.exp_beta();
            for w in enumerate_r_beta(&f).unwrap() {
                assert_eq!(self_pairing(&w.u, &s).unwrap(), rat_int(-2));
                assert!(w.u.r.is_positive());
                assert!(Rat::from_integer(f.r0.clone()) >= w.u.r);
                assert!((-pairing(&e, &w.u, &s).unwrap()).is_positive());
            }
        }
    }

    #[test]
    fn candidates_stable_under_subdivision() {
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        let v = MukaiVector::new(rat_int(1), s.h_class().scale(&rat_int(2)), rat_int(0));
        let rays = |lo: Rat, hi: Rat| -> Vec<Vec<Rat>> {
            let region = Region::FixedBetaInterval { s_lo: lo, s_hi: hi };
            let mut r: Vec<Vec<Rat>> = stability_wall_candidates(&v, &f, &region)
                .unwrap()
                .walls
                .into_iter()
                .map(|w| w.ray)
                .collect();
            r.sort();
            r
        };
        let whole = rays(rat_of(1, 2), rat_int(5));
        let mut union = rays(rat_of(1, 2), rat_int(2));
        union.extend(rays(rat_int(2), rat_int(5)));
        union.sort();
        union.dedup();
        assert_eq!(whole, union);
    }

    #[test]
    fn complementary_walls_coincide() {
        // the defining functions of W_{v1} and W_{v - v1} are proportional
        // by -1, so the walls agree as point sets
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        let v = MukaiVector::new(rat_int(0), s.h_class().scale(&rat_int(2)), rat_int(0));
        let region = Region::FixedBetaInterval { s_lo: rat_int(1), s_hi: rat_int(4) };
        let res = stability_wall_candidates(&v, &f, &region).unwrap();
        for w in &res.walls {
            for sv in [rat_of(3, 2), rat_int(2), rat_of(13, 4)] {
                let p = StabilityPoint::new(&f, NSClass::zero(1), sv).unwrap();
                let f1 = stability_wall_eval(&v, &w.v1, &p, &f).unwrap();
                let f2 = stability_wall_eval(&v, &w.complement, &p, &f).unwrap();
                assert_eq!(f1, -f2);
            }
        }
    }

    #[test]
    fn box_region_chambers_and_double_crossings() {
        let s = ek3();
        let f = BetaFrame::new(s.clone(), NSClass::zero(2)).unwrap();
        // d(v) = d_min kills all stability walls; only category circles remain
        let v = MukaiVector::new(rat_int(1), NSClass::from_ints(&[0, 1]), rat_int(0));
        assert_eq!(f.decompose(&v).d, f.d_min);
        let region = Region::Box(ParamBox {
            eta_basis: vec![dcl()],
            eta_ranges: vec![(rat_int(-1), rat_int(1))],
            s_range: (rat_of(1, 10), rat_int(3)),
        });
        let at = |x: Rat, sv: Rat| StabilityPoint {
            eta: dcl().scale(&x),
            s: sv,
        };
        // both endpoints inside the x^2 + y^2 = 1/3 circle: same chamber
        let inside = same_chamber(
            &v,
            &at(rat_of(-1, 10), rat_of(1, 5)),
            &at(rat_of(1, 10), rat_of(1, 5)),
            &f,
            &region,
        )
        .unwrap();
        assert!(inside.same, "separated by {:?}", inside.separating);
        // both endpoints outside, but the segment dives through the circle:
        // a strict double crossing separates them
        let through = same_chamber(
            &v,
            &at(rat_of(-7, 10), rat_of(1, 5)),
            &at(rat_of(7, 10), rat_of(1, 5)),
            &f,
            &region,
        )
        .unwrap();
        assert!(!through.same);
        assert!(!through.separating.is_empty());
        // out-of-region points are rejected
        let p_out = at(rat_int(0), rat_int(5));
        assert!(locate_chamber(&v, &p_out, &f, &region).is_err());
    }

    #[test]
    fn same_chamber_segments() {
        let s = ab1();
        let f = BetaFrame::new(s.clone(), NSClass::zero(1)).unwrap();
        let v = MukaiVector::new(rat_int(0), s.h_class().scale(&rat_int(2)), rat_int(0));
        let region = Region::FixedBetaInterval { s_lo: rat_int(1), s_hi: rat_int(4) };
        let at = |sv: Rat| StabilityPoint::new(&f, NSClass::zero(1), sv).unwrap();
        let rep = same_chamber(&v, &at(rat_of(3, 2)), &at(rat_of(5, 2)), &f, &region).unwrap();
        assert!(!rep.same);
        assert_eq!(rep.separating.len(), 1);
        let rep2 = same_chamber(&v, &at(rat_of(5, 2)), &at(rat_of(7, 2)), &f, &region).unwrap();
        assert!(rep2.same);
    }
}

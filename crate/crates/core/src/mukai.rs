//! The algebraic Mukai lattice Z + NS(X) + Z rho with the pairing
//! <x,y> = (x1,y1) - x0 y2 - x2 y0, beta-frame decompositions
//! v = r e^beta + a rho + (d H + D) + (d H + D, beta) rho, and the derived
//! frame constants r0, b0, d_min, delta.

use crate::error::{Error, Result};
use crate::ratio::{denominator, rat_gcd, rat_gcd_all, Rat};
use crate::surface::{NSClass, SurfaceData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Element of the rationalized Mukai lattice: rank, first Chern class, and
/// the rho coefficient. Fractional components are first-class values
/// (e.g. e^beta for non-integral beta); integrality is a predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MukaiVector {
    pub r: Rat,
    pub c1: NSClass,
    pub s: Rat,
}

impl MukaiVector {
    pub fn new(r: Rat, c1: NSClass, s: Rat) -> Self {
        MukaiVector { r, c1, s }
    }

    pub fn zero(rho: usize) -> Self {
        MukaiVector::new(Rat::zero(), NSClass::zero(rho), Rat::zero())
    }

    /// The class rho (the point class direction).
    pub fn rho_class(rho: usize) -> Self {
        MukaiVector::new(Rat::zero(), NSClass::zero(rho), Rat::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        MukaiVector::new(&self.r + &other.r, self.c1.add(&other.c1), &self.s + &other.s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        MukaiVector::new(&self.r - &other.r, self.c1.sub(&other.c1), &self.s - &other.s)
    }

    pub fn neg(&self) -> Self {
        MukaiVector::new(-&self.r, self.c1.neg(), -&self.s)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        MukaiVector::new(&self.r * c, self.c1.scale(c), &self.s * c)
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c1.is_zero()
    }

    /// Lattice integrality: r, all c1 coordinates and s are integers.
    pub fn is_integral(&self) -> bool {
        self.r.is_integer() && self.s.is_integer() && self.c1.is_integral()
    }

    /// The dual v -> (r, -c1, s).
    pub fn dual(&self) -> Self {
        MukaiVector::new(self.r.clone(), self.c1.neg(), self.s.clone())
    }

    /// Content of an integral vector: gcd of all components (0 for the zero
    /// vector). Used to split v = l v' with v' primitive.
    pub fn content(&self) -> Result<BigInt> {
        if !self.is_integral() {
            return Err(Error::Precondition("content of a non-integral Mukai vector".into()));
        }
        let mut g = self.r.to_integer().abs();
        for c in &self.c1.0 {
            g = g.gcd(&c.to_integer());
        }
        g = g.gcd(&self.s.to_integer());
        Ok(g)
    }

    pub fn coords(&self) -> Vec<Rat> {
        let mut v = vec![self.r.clone()];
        v.extend(self.c1.0.iter().cloned());
        v.push(self.s.clone());
        v
    }

    pub fn from_coords(coords: &[Rat]) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::DimensionMismatch("a Mukai vector needs rank, c1 and s".into()));
        }
        Ok(MukaiVector::new(
            coords[0].clone(),
            NSClass(coords[1..coords.len() - 1].to_vec()),
            coords[coords.len() - 1].clone(),
        ))
    }
}

impl std::fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mid: Vec<String> = self.c1.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({}, ({}), {})", self.r, mid.join(","), self.s)
    }
}

/// Mukai pairing <x,y> = (x1,y1) - x0 y2 - x2 y0.
pub fn pairing(x: &MukaiVector, y: &MukaiVector, surface: &SurfaceData) -> Result<Rat> {
    let ns = surface.ip_checked(&x.c1, &y.c1)?;
    Ok(ns - &x.r * &y.s - &x.s * &y.r)
}

pub fn self_pairing(x: &MukaiVector, surface: &SurfaceData) -> Result<Rat> {
    pairing(x, x, surface)
}

/// e^beta = (1, beta, (beta^2)/2).
pub fn exp_beta(beta: &NSClass, surface: &SurfaceData) -> MukaiVector {
    let b2 = surface.ip(beta, beta);
    MukaiVector::new(Rat::one(), beta.clone(), b2 / crate::ratio::rat_int(2))
}

/// Reflection R_u(x) = x + <u,x> u by a (-2)-vector; an involutive isometry.
pub fn reflect(u: &MukaiVector, x: &MukaiVector, surface: &SurfaceData) -> Result<MukaiVector> {
    let uu = self_pairing(u, surface)?;
    if uu != crate::ratio::rat_int(-2) {
        return Err(Error::Precondition(format!("reflection needs <u,u> = -2, got {uu}")));
    }
    let ux = pairing(u, x, surface)?;
    Ok(x.add(&u.scale(&ux)))
}

/// The beta-frame components of a vector:
/// v = r e^beta + a rho + (d H + D) + (d H + D, beta) rho with D in H-perp.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BetaDecomposition {
    pub r: Rat,
    pub a: Rat,
    pub d: Rat,
    pub big_d: NSClass,
}

/// A base class beta together with the constants the wall machinery needs:
///
/// * r0: least positive integer with r0 e^beta integral,
/// * b0: denominator of b = (beta,H)/(H^2),
/// * d_min: positive generator of the attainable d-values
///   {(xi - r beta, H)/(H^2) : xi in NS, r in Z},
/// * delta: positive generator of {(xi, H)/(H^2) : xi in NS}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaFrame {
    pub surface: SurfaceData,
    pub beta: NSClass,
    pub b: Rat,
    pub eta_beta: NSClass,
    pub r0: BigInt,
    pub b0: BigInt,
    pub d_min: Rat,
    pub delta: Rat,
}

impl BetaFrame {
    /// Assemble the frame constants for (surface, beta).
    pub fn new(surface: SurfaceData, beta: NSClass) -> Result<Self> {
        if beta.dim() != surface.rho {
            return Err(Error::DimensionMismatch("beta has wrong length".into()));
        }
        let h = surface.h_class();
        let h2 = surface.h2();
        let b = surface.ip(&beta, &h) / &h2;
        let eta_beta = beta.sub(&h.scale(&b));

        // r0: n beta integral and n (beta^2)/2 integral.
        let mut lcm_den = BigInt::one();
        for c in &beta.0 {
            lcm_den = lcm_den.lcm(&denominator(c));
        }
        let b2_half = surface.ip(&beta, &beta) / crate::ratio::rat_int(2);
        let scaled = &b2_half * Rat::from_integer(lcm_den.clone());
        let r0 = lcm_den * denominator(&scaled);

        let b0 = denominator(&b);

        // delta and d_min as gcd generators of finitely generated subgroups of Q.
        let mut degree_gens: Vec<Rat> = Vec::new();
        for i in 0..surface.rho {
            let mut e = NSClass::zero(surface.rho);
            e.0[i] = Rat::one();
            degree_gens.push(surface.ip(&e, &h) / &h2);
        }
        let delta = rat_gcd_all(degree_gens.iter());
        if delta.is_zero() {
            return Err(Error::InvalidSurface("degenerate polarization form".into()));
        }
        let d_min = rat_gcd(&delta, &b);
        if d_min.is_zero() {
            return Err(Error::InvalidSurface("no positive twisted degrees".into()));
        }

        Ok(BetaFrame { surface, beta, b, eta_beta, r0, b0, d_min, delta })
    }

    pub fn exp_beta(&self) -> MukaiVector {
        exp_beta(&self.beta, &self.surface)
    }

    pub fn r0_rat(&self) -> Rat {
        Rat::from_integer(self.r0.clone())
    }

    /// a = -<e^beta, v>; d = (c1(v) - r beta, H)/(H^2); D the H-perp rest.
    pub fn decompose(&self, v: &MukaiVector) -> BetaDecomposition {
        let e = self.exp_beta();
        let a = -pairing(&e, v, &self.surface).expect("frame and vector dimensions agree");
        let h = self.surface.h_class();
        let h2 = self.surface.h2();
        let xi = v.c1.sub(&self.beta.scale(&v.r));
        let d = self.surface.ip(&xi, &h) / &h2;
        let big_d = xi.sub(&h.scale(&d));
        BetaDecomposition { r: v.r.clone(), a, d, big_d }
    }

    /// Inverse of `decompose`; requires (D, H) = 0.
    pub fn recompose(&self, dec: &BetaDecomposition) -> Result<MukaiVector> {
        let h = self.surface.h_class();
        if !self.surface.ip(&dec.big_d, &h).is_zero() {
            return Err(Error::Precondition("recompose needs (D, H) = 0".into()));
        }
        let e = self.exp_beta();
        let rho = MukaiVector::rho_class(self.surface.rho);
        let mid = h.scale(&dec.d).add(&dec.big_d);
        let mid_beta = self.surface.ip(&mid, &self.beta);
        let mut v = e.scale(&dec.r);
        v = v.add(&rho.scale(&dec.a));
        v = v.add(&MukaiVector::new(Rat::zero(), mid, mid_beta));
        Ok(v)
    }

    /// <v^2> = d^2 (H^2) + (D^2) - 2 r a, evaluated from a decomposition.
    pub fn self_pairing_of(&self, dec: &BetaDecomposition) -> Rat {
        let h2 = self.surface.h2();
        &dec.d * &dec.d * h2 + self.surface.ip(&dec.big_d, &dec.big_d)
            - crate::ratio::rat_int(2) * &dec.r * &dec.a
    }

    /// beta-integrality: r in Z, c1 in NS, r0 a in Z. This is the predicate
    /// the enumeration lemmas quantify over; it is weaker than lattice
    /// integrality only through the rho coefficient convention.
    pub fn is_beta_integral(&self, v: &MukaiVector) -> bool {
        let dec = self.decompose(v);
        v.r.is_integer() && v.c1.is_integral() && (dec.a * self.r0_rat()).is_integer()
    }

    /// The frame at -beta on the same surface (used by the star-condition
    /// duality and by dual weighted counts).
    pub fn dual_frame(&self) -> Result<BetaFrame> {
        BetaFrame::new(self.surface.clone(), self.beta.neg())
    }

    /// The frame at bH (the eta = 0 slice of the same parameter family).
    pub fn base_frame(&self) -> Result<BetaFrame> {
        let h = self.surface.h_class();
        BetaFrame::new(self.surface.clone(), h.scale(&self.b))
    }
}

//! Surface lattice data: the Neron-Severi intersection form, the fixed
//! polarization direction H, and rational divisor classes in the chosen basis.

use crate::error::{Error, Result};
use crate::ratio::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A rational divisor class in the fixed NS basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NSClass(pub Vec<Rat>);

impl NSClass {
    pub fn zero(rho: usize) -> Self {
        NSClass(vec![Rat::zero(); rho])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &NSClass) -> NSClass {
        NSClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &NSClass) -> NSClass {
        NSClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> NSClass {
        NSClass(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Rat) -> NSClass {
        NSClass(self.0.iter().map(|a| a * c).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn from_ints(v: &[i64]) -> Self {
        NSClass(v.iter().map(|&n| Rat::from_integer(BigInt::from(n))).collect())
    }
}

/// Whether the surface is abelian (epsilon = 0) or K3 (epsilon = 1). The flag
/// feeds the rho-correction of Mukai vectors and decides whether walls for
/// categories exist at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Abelian,
    K3,
}

impl SurfaceKind {
    pub fn epsilon(&self) -> i64 {
        match self {
            SurfaceKind::Abelian => 0,
            SurfaceKind::K3 => 1,
        }
    }

    pub fn from_epsilon(e: i64) -> Result<Self> {
        match e {
            0 => Ok(SurfaceKind::Abelian),
            1 => Ok(SurfaceKind::K3),
            _ => Err(Error::InvalidSurface(format!("epsilon must be 0 or 1, got {e}"))),
        }
    }
}

/// The NS lattice of the surface together with the polarization class H.
///
/// The Gram matrix is the single source of the intersection form; classes are
/// plain coordinate vectors in the basis it is written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceData {
    pub kind: SurfaceKind,
    pub rho: usize,
    pub gram: Vec<Vec<BigInt>>,
    pub h: Vec<BigInt>,
}

impl SurfaceData {
    pub fn new(kind: SurfaceKind, gram: Vec<Vec<BigInt>>, h: Vec<BigInt>) -> Result<Self> {
        let rho = gram.len();
        let s = SurfaceData { kind, rho, gram, h };
        s.validate()?;
        Ok(s)
    }

    pub fn epsilon(&self) -> i64 {
        self.kind.epsilon()
    }

    pub fn epsilon_rat(&self) -> Rat {
        Rat::from_integer(BigInt::from(self.epsilon()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho == 0 {
            return Err(Error::InvalidSurface("NS rank must be positive".into()));
        }
        for row in &self.gram {
            if row.len() != self.rho {
                return Err(Error::InvalidSurface("gram matrix is not square".into()));
            }
        }
        for i in 0..self.rho {
            for j in 0..self.rho {
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(Error::InvalidSurface("gram matrix is not symmetric".into()));
                }
            }
        }
        if self.h.len() != self.rho {
            return Err(Error::InvalidSurface("H has wrong length".into()));
        }
        let (pos, neg, zero) = self.signature();
        if (pos, neg, zero) != (1, self.rho - 1, 0) {
            return Err(Error::InvalidSurface(format!(
                "signature must be (1, {}), found ({pos}, {neg}) with {zero} radical directions",
                self.rho - 1
            )));
        }
        let h2 = self.ip(&self.h_class(), &self.h_class());
        if !h2.is_positive() {
            return Err(Error::InvalidSurface("(H^2) must be positive".into()));
        }
        if !h2.is_integer() || (h2.to_integer() % BigInt::from(2)) != BigInt::zero() {
            return Err(Error::InvalidSurface("(H^2) must be a positive even integer".into()));
        }
        Ok(())
    }

    /// Signature (positive, negative, zero) of the Gram form, computed by
    /// exact symmetric Gaussian diagonalization over Q.
    #[allow(clippy::needless_range_loop)] // in-place row/column ops on one matrix
    pub fn signature(&self) -> (usize, usize, usize) {
        let n = self.rho;
        let mut m: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| Rat::from_integer(self.gram[i][j].clone())).collect())
            .collect();
        let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
        for i in 0..n {
            if m[i][i].is_zero() {
                // bring a nonzero entry to the pivot by congruence moves
                if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                    m.swap(i, j);
                    for row in m.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                    // add row/col j to i: new (i,i) entry is 2 m[i][j] != 0
                    for k in 0..n {
                        let t = m[j][k].clone();
                        m[i][k] += t;
                    }
                    for row in m.iter_mut() {
                        let t = row[j].clone();
                        row[i] += t;
                    }
                } else {
                    zero += 1;
                    continue;
                }
            }
            let pivot = m[i][i].clone();
            if pivot.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for j in i + 1..n {
                if m[i][j].is_zero() {
                    continue;
                }
                let f = &m[i][j] / &pivot;
                for k in 0..n {
                    let t = &m[i][k] * &f;
                    m[j][k] -= t;
                }
                for row in m.iter_mut() {
                    let t = &row[i] * &f;
                    row[j] -= t;
                }
            }
        }
        (pos, neg, zero)
    }

    /// Intersection product on NS via the Gram matrix.
    pub fn ip(&self, a: &NSClass, b: &NSClass) -> Rat {
        assert_eq!(a.dim(), self.rho, "NS class has wrong dimension");
        assert_eq!(b.dim(), self.rho);
        let mut acc = Rat::zero();
        for i in 0..self.rho {
            if a.0[i].is_zero() {
                continue;
            }
            for j in 0..self.rho {
                if b.0[j].is_zero() {
                    continue;
                }
                acc += &a.0[i] * &b.0[j] * Rat::from_integer(self.gram[i][j].clone());
            }
        }
        acc
    }

    pub fn ip_checked(&self, a: &NSClass, b: &NSClass) -> Result<Rat> {
        if a.dim() != self.rho || b.dim() != self.rho {
            return Err(Error::DimensionMismatch(format!(
                "NS classes of length {}, {} on a rank-{} lattice",
                a.dim(),
                b.dim(),
                self.rho
            )));
        }
        Ok(self.ip(a, b))
    }

    pub fn h_class(&self) -> NSClass {
        NSClass(self.h.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    pub fn h2(&self) -> Rat {
        self.ip(&self.h_class(), &self.h_class())
    }

    /// Gram vector (e_i, H), the integer linear form cutting out H-perp.
    pub fn h_form(&self) -> Vec<BigInt> {
        (0..self.rho)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.rho {
                    acc += &self.gram[i][j] * &self.h[j];
                }
                acc
            })
            .collect()
    }

    /// Projection of xi to the H-orthogonal complement: xi - ((xi,H)/(H^2)) H.
    pub fn project_h_perp(&self, xi: &NSClass) -> NSClass {
        let t = self.ip(xi, &self.h_class()) / self.h2();
        xi.sub(&self.h_class().scale(&t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat_int;

    fn ek3() -> SurfaceData {
        SurfaceData::new(
            SurfaceKind::K3,
            vec![vec![BigInt::from(-2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]],
            vec![BigInt::from(1), BigInt::from(4)],
        )
        .unwrap()
    }

    #[test]
    fn elliptic_k3_fixture_numbers() {
        let s = ek3();
        assert_eq!(s.h2(), rat_int(6));
        let d = NSClass::from_ints(&[1, -2]);
        assert_eq!(s.ip(&d, &s.h_class()), rat_int(0));
        assert_eq!(s.ip(&d, &d), rat_int(-6));
    }

    #[test]
    fn signature_rejects_two_positive_directions() {
        let bad = SurfaceData::new(
            SurfaceKind::K3,
            vec![vec![BigInt::from(2), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(4)]],
            vec![BigInt::from(1), BigInt::from(0)],
        );
        match bad {
            Err(Error::InvalidSurface(msg)) => assert!(msg.contains("signature")),
            other => panic!("expected signature error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_gram_rejected() {
        let bad = SurfaceData::new(
            SurfaceKind::Abelian,
            vec![vec![BigInt::from(2), BigInt::from(2)], vec![BigInt::from(2), BigInt::from(2)]],
            vec![BigInt::from(1), BigInt::from(0)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn h_perp_projection() {
        let s = ek3();
        let sigma = NSClass::from_ints(&[1, 0]);
        let p = s.project_h_perp(&sigma);
        assert_eq!(s.ip(&p, &s.h_class()), rat_int(0));
    }
}

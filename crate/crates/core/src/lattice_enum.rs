//! Exact enumeration of short vectors in negative definite sublattices and
//! affine cosets. This backs the finiteness arguments of the wall engine:
//! all D-components live in cosets of H-perp and are bounded in norm, so a
//! Fincke-Pohst walk over the negated (positive definite) form suffices.
//! All interval endpoints are computed with exact integer square roots.

use crate::error::{Error, Result};
use crate::ratio::{ceil_a_minus_sqrt, floor_a_plus_sqrt, Rat};
use crate::surface::{NSClass, SurfaceData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// An affine sublattice { offset + sum x_i basis_i : x in Z^k } of NS_Q,
/// written in ambient NS coordinates.
#[derive(Debug, Clone)]
pub struct AffineCoset {
    pub basis: Vec<NSClass>,
    pub offset: NSClass,
}

impl AffineCoset {
    pub fn lattice(basis: Vec<NSClass>, rho: usize) -> Self {
        AffineCoset { basis, offset: NSClass::zero(rho) }
    }
}

/// Extended gcd: returns (g, x, y) with g = gcd(a, b) >= 0 and a x + b y = g.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Unimodular column operations bringing the integer linear form `c` to
/// (g, 0, ..., 0); returns the transformed basis columns of Z^n.
fn clear_form(c: &[BigInt]) -> (BigInt, Vec<Vec<BigInt>>) {
    let n = c.len();
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut vals: Vec<BigInt> = c.to_vec();
    for i in 1..n {
        if vals[i].is_zero() {
            continue;
        }
        if vals[0].is_zero() {
            cols.swap(0, i);
            vals.swap(0, i);
            continue;
        }
        let (g, x, y) = ext_gcd(&vals[0], &vals[i]);
        let p = &vals[0] / &g;
        let q = &vals[i] / &g;
        let (c0, ci): (Vec<BigInt>, Vec<BigInt>) = (0..n)
            .map(|k| {
                let new0 = &x * &cols[0][k] + &y * &cols[i][k];
                let newi = -&q * &cols[0][k] + &p * &cols[i][k];
                (new0, newi)
            })
            .unzip();
        cols[0] = c0;
        cols[i] = ci;
        vals[0] = g;
        vals[i] = BigInt::zero();
    }
    (vals[0].abs(), cols)
}

/// Integer solutions of c . x = e over Z^n: a particular solution plus a
/// kernel basis, or None when no solution exists.
pub fn solve_linear_integer(c: &[BigInt], e: &BigInt) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let n = c.len();
    let (g, cols) = clear_form(c);
    if g.is_zero() {
        if e.is_zero() {
            return Some((vec![BigInt::zero(); n], cols));
        }
        return None;
    }
    if !(e % &g).is_zero() {
        return None;
    }
    // c . cols[0] = ±g, and ±g divides e
    let lead: BigInt = (0..n).map(|k| &c[k] * &cols[0][k]).sum();
    let factor = e / &lead;
    debug_assert_eq!(&factor * &lead, *e);
    let particular = (0..n).map(|k| &factor * &cols[0][k]).collect();
    let kernel = cols[1..].to_vec();
    Some((particular, kernel))
}

/// The coset { xi - subtract : xi in NS, (xi - subtract, H) = 0 } of the
/// H-perp hyperplane lattice, or None when it is empty.
pub fn ns_coset_in_h_perp(surface: &SurfaceData, subtract: &NSClass) -> Option<AffineCoset> {
    let hf = surface.h_form();
    let target = surface.ip(subtract, &surface.h_class());
    if !target.is_integer() {
        return None;
    }
    let (particular, kernel) = solve_linear_integer(&hf, &target.to_integer())?;
    let offset = NSClass(
        particular.iter().map(|x| Rat::from_integer(x.clone())).collect::<Vec<_>>(),
    )
    .sub(subtract);
    let basis = kernel
        .into_iter()
        .map(|col| NSClass(col.into_iter().map(Rat::from_integer).collect()))
        .collect();
    Some(AffineCoset { basis, offset })
}

/// Basis of { xi in (1/den) NS : (xi, H) = 0 }.
pub fn h_perp_sublattice(surface: &SurfaceData, den: &BigInt) -> Vec<NSClass> {
    let hf = surface.h_form();
    let (_, cols) = clear_form(&hf);
    let lead: BigInt = (0..hf.len()).map(|k| &hf[k] * &cols[0][k]).sum();
    let start = if lead.is_zero() { 0 } else { 1 };
    let inv_den = Rat::new(BigInt::one(), den.clone());
    cols[start..]
        .iter()
        .map(|col| {
            NSClass(col.iter().map(|x| Rat::from_integer(x.clone()) * &inv_den).collect())
        })
        .collect()
}

/// Complete, duplicate-free, lexicographically ordered list of classes D in
/// the coset with -(D^2) <= bound, for a negative definite form on the span.
///
/// `gram` is the ambient intersection form restricted to which the coset's
/// span must be negative definite (H-perp in practice).
pub fn short_vectors(
    surface: &SurfaceData,
    bound: &Rat,
    coset: &AffineCoset,
) -> Result<Vec<NSClass>> {
    let bound = bound.abs();
    let k = coset.basis.len();
    let neg_ip = |a: &NSClass, b: &NSClass| -surface.ip(a, b);

    // norm of the offset alone
    let c0 = neg_ip(&coset.offset, &coset.offset);
    if k == 0 {
        if c0.is_negative() {
            return Err(Error::IndefiniteForm("coset offset has positive square".into()));
        }
        return Ok(if c0 <= bound { vec![coset.offset.clone()] } else { vec![] });
    }

    // pulled-back positive definite form Q, linear part L, constant c0
    let q: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| neg_ip(&coset.basis[i], &coset.basis[j])).collect())
        .collect();
    let lin: Vec<Rat> = (0..k).map(|i| neg_ip(&coset.basis[i], &coset.offset)).collect();

    // center x* with Q x* = -L, by exact Gaussian elimination
    let center = solve_spd(&q, &lin.iter().map(|v| -v).collect::<Vec<_>>())?;
    let mut q_at_center = c0.clone();
    for i in 0..k {
        q_at_center += &lin[i] * &center[i] * crate::ratio::rat_int(2);
        for j in 0..k {
            q_at_center += &center[i] * &q[i][j] * &center[j];
        }
    }
    let radius = &bound - &q_at_center;
    if radius.is_negative() {
        return Ok(vec![]);
    }

    // LDL expansion: q(y) = sum_i d_i (y_i + sum_{j>i} u_ij y_j)^2
    let (diag, upper) = ldl(&q)?;

    // depth-first walk from the last coordinate down
    let mut out: Vec<NSClass> = Vec::new();
    let mut x = vec![BigInt::zero(); k];
    walk(k, &diag, &upper, &center, &radius, &mut x, k, &mut |x| {
        let mut v = coset.offset.clone();
        for (i, b) in coset.basis.iter().enumerate() {
            v = v.add(&b.scale(&Rat::from_integer(x[i].clone())));
        }
        out.push(v);
    });

    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup();
    Ok(out)
}

/// Solve Q x = rhs for symmetric positive definite rational Q.
#[allow(clippy::needless_range_loop)]
fn solve_spd(q: &[Vec<Rat>], rhs: &[Rat]) -> Result<Vec<Rat>> {
    let n = q.len();
    let mut m: Vec<Vec<Rat>> = q.to_vec();
    let mut b: Vec<Rat> = rhs.to_vec();
    for i in 0..n {
        let piv = (i..n)
            .find(|&r| !m[r][i].is_zero())
            .ok_or_else(|| Error::IndefiniteForm("singular form on coset span".into()))?;
        m.swap(i, piv);
        b.swap(i, piv);
        let p = m[i][i].clone();
        for r in 0..n {
            if r == i || m[r][i].is_zero() {
                continue;
            }
            let f = &m[r][i] / &p;
            for c in 0..n {
                let t = &m[i][c] * &f;
                m[r][c] -= t;
            }
            let t = &b[i] * &f;
            b[r] -= t;
        }
    }
    Ok((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

/// LDL^T data for the positive definite form: diagonal d_i and the unit
/// upper-triangular coefficients u[i][j] (j > i).
fn ldl(q: &[Vec<Rat>]) -> Result<(Vec<Rat>, Vec<Vec<Rat>>)> {
    let n = q.len();
    let mut m = q.to_vec();
    let mut diag = vec![Rat::zero(); n];
    let mut upper = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        let d = m[i][i].clone();
        if !d.is_positive() {
            return Err(Error::IndefiniteForm(
                "form on coset span is not negative definite".into(),
            ));
        }
        diag[i] = d.clone();
        for j in i + 1..n {
            upper[i][j] = &m[i][j] / &d;
        }
        for a in i + 1..n {
            for b in i + 1..n {
                let t = &diag[i] * &upper[i][a] * &upper[i][b];
                m[a][b] -= t;
            }
        }
    }
    Ok((diag, upper))
}

/// Recursive Fincke-Pohst descent. `level` counts down from k; coordinate
/// level-1 is chosen at each step with the exact interval endpoints.
#[allow(clippy::too_many_arguments)]
fn walk(
    k: usize,
    diag: &[Rat],
    upper: &[Vec<Rat>],
    center: &[Rat],
    remaining: &Rat,
    x: &mut Vec<BigInt>,
    level: usize,
    emit: &mut impl FnMut(&[BigInt]),
) {
    if level == 0 {
        emit(x);
        return;
    }
    let i = level - 1;
    // c_i = sum_{j>i} u_ij (x_j - center_j)
    let mut ci = Rat::zero();
    for j in i + 1..k {
        ci += &upper[i][j] * (Rat::from_integer(x[j].clone()) - &center[j]);
    }
    // d_i (x_i - center_i + c_i)^2 <= remaining
    let mid = &center[i] - &ci;
    let rad = remaining / &diag[i];
    let lo = ceil_a_minus_sqrt(&mid, &rad);
    let hi = floor_a_plus_sqrt(&mid, &rad);
    let mut xi = lo.clone();
    while xi <= hi {
        x[i] = xi.clone();
        let y = Rat::from_integer(xi.clone()) - &center[i] + &ci;
        let used = &diag[i] * &y * &y;
        let rem = remaining - &used;
        if !rem.is_negative() {
            walk(k, diag, upper, center, &rem, x, level - 1, emit);
        }
        xi += 1;
    }
}

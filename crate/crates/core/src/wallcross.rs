//! Wall-crossing bookkeeping: phase-aligned decompositions at a wall point,
//! the q-weighted crossing sums and their recursion, expected dimensions and
//! the codimension classification of crossing terms, and the isotropic-wall
//! toolkit (complementary isotropic class, the divisor class d and its
//! reflection, the slope-behavior volume).

use crate::charge::StabilityPoint;
use crate::error::{Error, Result};
use crate::lattice_enum::{ns_coset_in_h_perp, short_vectors};
use crate::mukai::{pairing, self_pairing, BetaDecomposition, BetaFrame, MukaiVector};
use crate::qpoly::{q_binomial, CountExpr, LaurentPolyQ};
use crate::ratio::{quadratic_int_range, rat_int, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Which side of the wall a perturbation moves to: minus decreases s, plus
/// increases it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// An ordered phase-aligned decomposition at a wall point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: Vec<MukaiVector>,
    pub side: Side,
}

/// Result of the decomposition search: strictly ordered tuples per side plus
/// the S-equivalence multisets whose parts stay equal-phase on both sides
/// (these never enter the crossing sums).
#[derive(Debug, Clone, Default)]
pub struct DecompositionSet {
    pub minus: Vec<Decomposition>,
    pub plus: Vec<Decomposition>,
    pub s_equivalence: Vec<Vec<MukaiVector>>,
}

/// Strict phase comparison of two wall-aligned classes just off the wall:
/// on the plus side phi(x) > phi(y) iff r_y d_x - r_x d_y > 0 (the s-derivative
/// of the sigma bracket), reversed on the minus side. Zero means the phases
/// agree on both sides.
fn side_order_key(x: &BetaDecomposition, y: &BetaDecomposition) -> Rat {
    &y.r * &x.d - &x.r * &y.d
}

fn multiset_key(parts: &[MukaiVector]) -> Vec<MukaiVector> {
    let mut k = parts.to_vec();
    k.sort();
    k
}

/// All decompositions v = v_1 + ... + v_s (s >= 2) into lattice classes that
/// are phase-aligned with v at p, each part with d_i > 0 and satisfying the
/// Bogomolov bound, with the total constrained by the chain inequality
/// sum_i (<v_i^2>/d_i + 2 d_i eps/d_min^2) <= <v^2>/d + 2 d eps/d_min^2.
///
/// Parts with Z = 0 at the wall (the category-wall boundary classes) are out
/// of scope here; their contributions enter the sums through oracle keys.
pub fn decompositions_on_wall(
    v: &MukaiVector,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<DecompositionSet> {
    let local = p.frame_at(frame)?;
    let dec = local.decompose(v);
    if !dec.d.is_positive() {
        return Err(Error::Precondition("decompositions need d(v) > 0".into()));
    }
    let surface = &frame.surface;
    let eps = surface.epsilon_rat();
    let dm2 = &local.d_min * &local.d_min;
    let v_sq = self_pairing(v, surface)?;
    let budget = &v_sq / &dec.d + rat_int(2) * &dec.d * &eps / &dm2;

    // collect unordered multisets by depth-first refinement
    let mut multisets: Vec<Vec<MukaiVector>> = Vec::new();
    let mut stack: Vec<MukaiVector> = Vec::new();
    search_parts(&local, v, &dec, &budget, &eps, &dm2, p, &mut stack, &mut multisets)?;

    // dedupe multisets
    let mut seen = std::collections::BTreeSet::new();
    let mut unique = Vec::new();
    for m in multisets {
        let k = multiset_key(&m);
        if seen.insert(k.clone()) {
            unique.push(k);
        }
    }

    let mut out = DecompositionSet::default();
    for parts in unique {
        if parts.len() < 2 {
            continue;
        }
        let decs: Vec<BetaDecomposition> = parts.iter().map(|w| local.decompose(w)).collect();
        // detect ties: any pair with proportional (r, d) stays equal-phase
        let mut tie = false;
        'outer: for i in 0..decs.len() {
            for j in i + 1..decs.len() {
                if side_order_key(&decs[i], &decs[j]).is_zero() {
                    tie = true;
                    break 'outer;
                }
            }
        }
        if tie {
            out.s_equivalence.push(parts);
            continue;
        }
        // plus side: descending phi_+, i.e. x before y iff key(x,y)... with
        // key(x, y) = r_y d_x - r_x d_y, phi_+(x) > phi_+(y) iff key > 0
        let mut plus = parts.clone();
        plus.sort_by(|x, y| {
            let kx = local.decompose(x);
            let ky = local.decompose(y);
            let k = side_order_key(&kx, &ky);
            if k.is_positive() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let mut minus = plus.clone();
        minus.reverse();
        out.plus.push(Decomposition { parts: plus, side: Side::Plus });
        out.minus.push(Decomposition { parts: minus, side: Side::Minus });
    }
    out.minus.sort_by(|a, b| a.parts.cmp(&b.parts));
    out.plus.sort_by(|a, b| a.parts.cmp(&b.parts));
    out.s_equivalence.sort();
    Ok(out)
}

/// Enumerate aligned first parts v1 of the remaining vector and recurse.
/// Alignment at p pins a_1 as an affine function of (r_1, d_1); Bogomolov
/// plus the chain budget bound r_1 and the D_1 norm window.
#[allow(clippy::too_many_arguments)]
fn search_parts(
    local: &BetaFrame,
    remaining: &MukaiVector,
    dec_total: &BetaDecomposition,
    budget: &Rat,
    eps: &Rat,
    dm2: &Rat,
    p: &StabilityPoint,
    stack: &mut Vec<MukaiVector>,
    out: &mut Vec<Vec<MukaiVector>>,
) -> Result<()> {
    let surface = &local.surface;
    let h2 = surface.h2();
    let rem_dec = local.decompose(remaining);
    // base case: the remaining vector itself is a valid aligned part
    if !stack.is_empty() && rem_dec.d.is_positive() {
        // phase alignment with v at p: the sigma bracket vanishes
        let bracket = (&dec_total.r * &rem_dec.d - &rem_dec.r * &dec_total.d) * &p.s
            / rat_int(2)
            - (&dec_total.a * &rem_dec.d - &rem_dec.a * &dec_total.d);
        let bogomolov = self_pairing(remaining, surface)?
            >= -rat_int(2) * &rem_dec.d * &rem_dec.d * eps / dm2;
        if bracket.is_zero() && bogomolov {
            let mut parts = stack.clone();
            parts.push(remaining.clone());
            out.push(parts);
        }
    }
    // refine further only while at least 2 d_min quanta remain
    if rem_dec.d < rat_int(2) * &local.d_min {
        return Ok(());
    }

    let r0 = local.r0_rat();
    let steps = (&rem_dec.d / &local.d_min).to_integer();
    let mut k = BigInt::one();
    while k < steps {
        let d1 = &local.d_min * Rat::from_integer(k.clone());
        k += 1;
        // alignment with the total fixes a1 once (r1, d1) are chosen:
        // a1 = [s (r1 d - r d1)/2 + a d1]/d  (phases of all parts equal phi(v))
        // Bogomolov with (D1^2) <= 0 caps 2 r1 a1 <= d1^2 (H^2) + 2 d1^2 eps/dm2,
        // giving a quadratic in r1.
        let cap = &d1 * &d1 * &h2 + rat_int(2) * &d1 * &d1 * eps / dm2;
        let qa = p.s.clone();
        let qb = rat_int(2) * &dec_total.a * &d1 / &dec_total.d
            - &dec_total.r * &d1 * &p.s / &dec_total.d;
        let qc = -&cap;
        let Some((lo, hi)) = quadratic_int_range(&qa, &qb, &qc) else {
            continue;
        };
        let mut r1 = lo.clone();
        while r1 <= hi {
            let r1r = Rat::from_integer(r1.clone());
            let a1 = (&p.s * (&r1r * &dec_total.d - &dec_total.r * &d1) / rat_int(2)
                + &dec_total.a * &d1)
                / &dec_total.d;
            if !(&a1 * &r0).is_integer() {
                r1 += 1;
                continue;
            }
            // remaining budget to distribute: parts so far + this part + rest
            // each term <v_i^2>/d_i + 2 d_i eps/dm2 is >= 0 under Bogomolov
            let lb = rat_int(2) * &r1r * &a1 - &d1 * &d1 * &h2 - rat_int(2) * &d1 * &d1 * eps / dm2;
            // chain bound: term <= budget  =>  (D1^2) <= d1 budget - ...
            let ub_chain = &d1 * budget - (&d1 * &d1 * &h2 - rat_int(2) * &r1r * &a1)
                - rat_int(2) * &d1 * &d1 * eps / dm2;
            let ub = ub_chain.min(Rat::zero());
            if lb > ub {
                r1 += 1;
                continue;
            }
            let subtract = local.beta.scale(&r1r).add(&surface.h_class().scale(&d1));
            let Some(coset) = ns_coset_in_h_perp(surface, &subtract) else {
                r1 += 1;
                continue;
            };
            for d1_class in short_vectors(surface, &lb.abs(), &coset)? {
                let d1_sq = surface.ip(&d1_class, &d1_class);
                if d1_sq < lb || d1_sq > ub {
                    continue;
                }
                let cand = local
                    .recompose(&BetaDecomposition {
                        r: r1r.clone(),
                        a: a1.clone(),
                        d: d1.clone(),
                        big_d: d1_class.clone(),
                    })
                    .expect("D1 orthogonal to H by construction");
                if !cand.is_integral() {
                    continue;
                }
                // avoid permutations: enforce non-decreasing part order
                if let Some(last) = stack.last() {
                    if cand < *last {
                        continue;
                    }
                }
                let rest = remaining.sub(&cand);
                stack.push(cand);
                search_parts(local, &rest, dec_total, budget, eps, dm2, p, stack, out)?;
                stack.pop();
            }
            r1 += 1;
        }
    }
    Ok(())
}

/// Table of weighted counts N(v), with an optional symbolic mode in which
/// unknown vectors become named atoms N(r,c1,s) combined formally.
#[derive(Debug, Clone, Default)]
pub struct CountOracle {
    table: BTreeMap<MukaiVector, LaurentPolyQ>,
    pub symbolic: bool,
}

impl CountOracle {
    pub fn symbolic() -> Self {
        CountOracle { table: BTreeMap::new(), symbolic: true }
    }

    pub fn insert(&mut self, v: MukaiVector, count: LaurentPolyQ) {
        self.table.insert(v, count);
    }

    pub fn atom_name(v: &MukaiVector) -> String {
        let mut parts = vec![v.r.to_string()];
        parts.extend(v.c1.0.iter().map(|c| c.to_string()));
        parts.push(v.s.to_string());
        format!("N({})", parts.join(","))
    }

    pub fn value(&self, v: &MukaiVector) -> Result<CountExpr> {
        if let Some(p) = self.table.get(v) {
            return Ok(CountExpr::from_poly(p.clone()));
        }
        if self.symbolic {
            return Ok(CountExpr::atom(Self::atom_name(v)));
        }
        Err(Error::MissingOracle(v.to_string()))
    }

    /// Consistency assertion N(v) = N(v-dual) for tables carrying both keys;
    /// the duality itself is not derived here.
    pub fn dual_consistent(&self, v: &MukaiVector) -> Option<bool> {
        let a = self.table.get(v)?;
        let b = self.table.get(&v.dual())?;
        Some(a == b)
    }
}

/// The one-sided crossing sum
/// N_side(v) + sum_tuples q^{sum_{i>j} <v_i, v_j>} prod_i N_side(v_i).
///
/// The exponent uses the symmetric Mukai pairing over the index pairs
/// i > j, so it depends only on the part multiset; the two side orderings
/// of a tuple therefore contribute equal terms.
pub fn wall_value(
    v: &MukaiVector,
    oracle: &CountOracle,
    frame: &BetaFrame,
    decomps: &[Decomposition],
) -> Result<CountExpr> {
    let surface = &frame.surface;
    let mut acc = oracle.value(v)?;
    for tuple in decomps {
        let mut exponent = Rat::zero();
        for i in 0..tuple.parts.len() {
            for j in 0..i {
                exponent += pairing(&tuple.parts[i], &tuple.parts[j], surface)?;
            }
        }
        if !exponent.is_integer() {
            return Err(Error::Internal("non-integral crossing exponent".into()));
        }
        let e: i64 = exponent
            .to_integer()
            .try_into()
            .map_err(|_| Error::Internal("crossing exponent overflow".into()))?;
        let mut term = CountExpr::from_poly(LaurentPolyQ::monomial(e, rat_int(1)));
        for part in &tuple.parts {
            term = term.mul(&oracle.value(part)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Solve for the plus-side count from minus-side data by equating the two
/// crossing sums and recursing in d; at d = d_min there are no decompositions
/// and the sides agree.
pub fn crossing_solve(
    v: &MukaiVector,
    oracle_minus: &CountOracle,
    p: &StabilityPoint,
    frame: &BetaFrame,
) -> Result<CountExpr> {
    let mut memo: BTreeMap<MukaiVector, CountExpr> = BTreeMap::new();
    solve_plus(v, oracle_minus, p, frame, &mut memo)
}

fn solve_plus(
    v: &MukaiVector,
    oracle: &CountOracle,
    p: &StabilityPoint,
    frame: &BetaFrame,
    memo: &mut BTreeMap<MukaiVector, CountExpr>,
) -> Result<CountExpr> {
    if let Some(e) = memo.get(v) {
        return Ok(e.clone());
    }
    let local = p.frame_at(frame)?;
    let dec = local.decompose(v);
    if !dec.d.is_positive() {
        return Err(Error::Precondition("crossing recursion needs d > 0".into()));
    }
    let sets = decompositions_on_wall(v, p, frame)?;
    let result = if sets.minus.is_empty() && sets.plus.is_empty() {
        oracle.value(v)?
    } else {
        // minus-side sum with known N_-
        let minus_total = wall_value(v, oracle, frame, &sets.minus)?;
        // plus-side correction terms use recursively solved N_+ of the parts
        let surface = &frame.surface;
        let mut plus_terms = CountExpr::zero();
        for tuple in &sets.plus {
            let mut exponent = Rat::zero();
            for i in 0..tuple.parts.len() {
                for j in 0..i {
                    exponent += pairing(&tuple.parts[i], &tuple.parts[j], surface)?;
                }
            }
            let e: i64 = exponent
                .to_integer()
                .try_into()
                .map_err(|_| Error::Internal("crossing exponent overflow".into()))?;
            let mut term = CountExpr::from_poly(LaurentPolyQ::monomial(e, rat_int(1)));
            for part in &tuple.parts {
                let np = solve_plus(part, oracle, p, frame, memo)?;
                term = term.mul(&np);
            }
            plus_terms = plus_terms.add(&term);
        }
        minus_total.sub(&plus_terms)
    };
    memo.insert(v.clone(), result.clone());
    Ok(result)
}

/// Expected dimension of the moduli of semistable classes with vector
/// v = l v' (v' primitive), for general (H, beta):
/// <v^2>+1 when <v^2> > 0; <v^2>+l when <v^2> = 0; <v^2>+l^2 when <v'^2> = -2.
pub fn expected_dim(v: &MukaiVector, frame: &BetaFrame) -> Result<BigInt> {
    let v_sq = self_pairing(v, &frame.surface)?;
    if !v_sq.is_integer() {
        return Err(Error::Precondition("expected_dim needs an integral class".into()));
    }
    let l = v.content()?;
    if l.is_zero() {
        return Err(Error::Precondition("expected_dim of the zero vector".into()));
    }
    let prim = v.scale(&(rat_int(1) / Rat::from_integer(l.clone())));
    let prim_sq = self_pairing(&prim, &frame.surface)?;
    let v_sq_int = v_sq.to_integer();
    if v_sq.is_positive() {
        Ok(v_sq_int + BigInt::one())
    } else if v_sq.is_zero() {
        Ok(v_sq_int + l)
    } else if prim_sq == rat_int(-2) {
        Ok(v_sq_int + &l * &l)
    } else {
        Err(Error::Precondition(format!(
            "no expected dimension for <v'^2> = {prim_sq} < -2"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodimCase {
    /// defect at least 2
    GeqTwo,
    /// defect 0: two parts {l u1, u2}, u1 isotropic, <u1,u2> = 1
    A,
    /// defect 1: {u1, u2}, u1 primitive isotropic, <u1,u2> = 2
    B1,
    /// defect 1: {2u1, 2u2}, both isotropic, <u1,u2> = 1
    B2,
    /// defect 1: three isotropic parts, pairwise pairing 1, <v^2> = 6
    B3,
    /// defect 1: {u1, u2, u1+u2}, u1, u2 isotropic, <u1,u2> = 1, v = 2(u1+u2)
    B4,
    Other,
}

#[derive(Debug, Clone)]
pub struct CodimReport {
    pub defect: BigInt,
    pub case: CodimCase,
}

/// Classify the crossing term of a phase-aligned decomposition by the defect
/// dim M(v) - sum_{i>j} <v_i, v_j> - sum_i dim M(v_i), matching the
/// exhaustive defect-0/1 case list. Requires an abelian surface and
/// <v_i^2> >= 0 for all parts.
pub fn classify_codim(
    v: &MukaiVector,
    parts: &[MukaiVector],
    frame: &BetaFrame,
) -> Result<CodimReport> {
    if frame.surface.epsilon() != 0 {
        return Err(Error::Precondition("codim classification assumes an abelian surface".into()));
    }
    if parts.len() < 2 {
        return Err(Error::Precondition("need at least two parts".into()));
    }
    let surface = &frame.surface;
    let total = parts.iter().fold(MukaiVector::zero(surface.rho), |acc, w| acc.add(w));
    if total != *v {
        return Err(Error::Precondition("parts do not sum to v".into()));
    }
    for w in parts {
        if self_pairing(w, surface)?.is_negative() {
            return Err(Error::Precondition("all parts must satisfy <v_i^2> >= 0".into()));
        }
    }

    let mut cross = Rat::zero();
    for i in 0..parts.len() {
        for j in 0..i {
            cross += pairing(&parts[i], &parts[j], surface)?;
        }
    }
    let mut defect = Rat::from_integer(expected_dim(v, frame)?) - cross;
    for w in parts {
        defect -= Rat::from_integer(expected_dim(w, frame)?);
    }
    if !defect.is_integer() {
        return Err(Error::Internal("non-integral defect".into()));
    }
    let defect = defect.to_integer();

    let iso = |w: &MukaiVector| -> Result<bool> { Ok(self_pairing(w, surface)?.is_zero()) };
    let prim = |w: &MukaiVector| -> Result<bool> { Ok(w.content()? == BigInt::one()) };

    let case = if defect >= BigInt::from(2) {
        CodimCase::GeqTwo
    } else if defect == BigInt::zero() {
        // {l u1, u2} with u1 isotropic, <u1, u2> = 1 (u1 the primitive part)
        let mut matched = false;
        if parts.len() == 2 {
            for (x, y) in [(&parts[0], &parts[1]), (&parts[1], &parts[0])] {
                if iso(x)? {
                    let lx = x.content()?;
                    let ux = x.scale(&(rat_int(1) / Rat::from_integer(lx.clone())));
                    if pairing(&ux, y, surface)? == rat_int(1) && prim(y)? {
                        matched = true;
                    }
                }
            }
        }
        if matched {
            CodimCase::A
        } else {
            CodimCase::Other
        }
    } else if defect == BigInt::one() {
        let mut case = CodimCase::Other;
        if parts.len() == 2 {
            let p01 = pairing(&parts[0], &parts[1], surface)?;
            // (b1)
            for (x, y) in [(&parts[0], &parts[1]), (&parts[1], &parts[0])] {
                if iso(x)? && prim(x)? && p01 == rat_int(2) && prim(y)? {
                    case = CodimCase::B1;
                }
            }
            // (b2)
            if case == CodimCase::Other
                && parts.iter().map(|w| w.content()).collect::<Result<Vec<_>>>()?
                    == vec![BigInt::from(2), BigInt::from(2)]
                && iso(&parts[0])?
                && iso(&parts[1])?
            {
                let u1 = parts[0].scale(&crate::ratio::rat_of(1, 2));
                let u2 = parts[1].scale(&crate::ratio::rat_of(1, 2));
                if pairing(&u1, &u2, surface)? == rat_int(1) {
                    case = CodimCase::B2;
                }
            }
        } else if parts.len() == 3 {
            let all_iso = parts.iter().map(&iso).collect::<Result<Vec<_>>>()?;
            if all_iso.iter().all(|b| *b) {
                let mut pairwise_one = true;
                for i in 0..3 {
                    for j in 0..i {
                        if pairing(&parts[i], &parts[j], surface)? != rat_int(1) {
                            pairwise_one = false;
                        }
                    }
                }
                if pairwise_one && self_pairing(v, surface)? == rat_int(6) {
                    case = CodimCase::B3;
                }
            }
            if case == CodimCase::Other {
                // (b4): {u1, u2, u1+u2} with u1, u2 isotropic, <u1,u2> = 1
                for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
                    let (x, y, z) = (&parts[i], &parts[j], &parts[k]);
                    if x.add(y) == *z
                        && iso(x)?
                        && iso(y)?
                        && pairing(x, y, surface)? == rat_int(1)
                        && *v == z.scale(&rat_int(2))
                    {
                        case = CodimCase::B4;
                    }
                }
            }
        }
        case
    } else {
        CodimCase::Other
    };

    Ok(CodimReport { defect, case })
}

/// w2 = v - (<v^2>/2) w1 for isotropic w1 with <v, w1> = 1; the complementary
/// isotropic class with <w1, w2> = 1.
pub fn isotropic_complement(
    v: &MukaiVector,
    w1: &MukaiVector,
    frame: &BetaFrame,
) -> Result<MukaiVector> {
    let surface = &frame.surface;
    if !self_pairing(w1, surface)?.is_zero() {
        return Err(Error::Precondition("w1 must be isotropic".into()));
    }
    if pairing(v, w1, surface)? != rat_int(1) {
        return Err(Error::Precondition("isotropic complement needs <v, w1> = 1".into()));
    }
    let v_sq = self_pairing(v, surface)?;
    let w2 = v.sub(&w1.scale(&(&v_sq / rat_int(2))));
    debug_assert!(self_pairing(&w2, surface)?.is_zero());
    debug_assert_eq!(pairing(w1, &w2, surface)?, rat_int(1));
    Ok(w2)
}

/// The divisor class d = v - (<v^2>/2) w1 for isotropic w1 with <v, w1> = 2;
/// satisfies <d^2> = -<v^2>.
pub fn divisor_class_d(
    v: &MukaiVector,
    w1: &MukaiVector,
    frame: &BetaFrame,
) -> Result<MukaiVector> {
    let surface = &frame.surface;
    if !self_pairing(w1, surface)?.is_zero() {
        return Err(Error::Precondition("w1 must be isotropic".into()));
    }
    if pairing(v, w1, surface)? != rat_int(2) {
        return Err(Error::Precondition("divisor class needs <v, w1> = 2".into()));
    }
    let v_sq = self_pairing(v, surface)?;
    let d = v.sub(&w1.scale(&(&v_sq / rat_int(2))));
    let d_sq = self_pairing(&d, surface)?;
    if d_sq != -&v_sq {
        return Err(Error::Internal("divisor class square check failed".into()));
    }
    Ok(d)
}

/// Reflection by the divisor class on v-perp: x -> x - <w1, x> d, equal to
/// the orthogonal reflection x - 2 (<d,x>/<d,d>) d; both forms are evaluated
/// and must agree. An involution fixing d-perp inside v-perp.
pub fn theta_reflection(
    v: &MukaiVector,
    w1: &MukaiVector,
    x: &MukaiVector,
    frame: &BetaFrame,
) -> Result<MukaiVector> {
    let surface = &frame.surface;
    if !pairing(v, x, surface)?.is_zero() {
        return Err(Error::Precondition("theta reflection acts on v-perp".into()));
    }
    let d = divisor_class_d(v, w1, frame)?;
    let first = x.sub(&d.scale(&pairing(w1, x, surface)?));
    let d_sq = self_pairing(&d, surface)?;
    if d_sq.is_zero() {
        return Err(Error::Precondition("theta reflection needs <v^2> != 0".into()));
    }
    let second = x.sub(&d.scale(&(rat_int(2) * pairing(&d, x, surface)? / &d_sq)));
    if first != second {
        return Err(Error::Internal("the two reflection formulas disagree".into()));
    }
    if !pairing(v, &first, surface)?.is_zero() {
        return Err(Error::Internal("reflection left v-perp".into()));
    }
    Ok(first)
}

/// The volume (omega^2) at which two isotropic decompositions become
/// phase-aligned, by the three equivalent closed forms; all three are
/// computed and must agree. A non-positive value means the wall misses the
/// positive cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeBehavior {
    pub s: Rat,
    pub on_positive_cone: bool,
}

pub fn slope_behavior_s(
    w1_dec: &BetaDecomposition,
    w2_dec: &BetaDecomposition,
    frame: &BetaFrame,
) -> Result<SlopeBehavior> {
    let surface = &frame.surface;
    let h2 = surface.h2();
    for w in [w1_dec, w2_dec] {
        let sq = &w.d * &w.d * &h2 + surface.ip(&w.big_d, &w.big_d)
            - rat_int(2) * &w.r * &w.a;
        if !sq.is_zero() {
            return Err(Error::Precondition("slope behavior needs isotropic classes".into()));
        }
        if w.r.is_zero() || w.d.is_zero() {
            return Err(Error::Precondition("slope behavior needs r_i != 0 and d_i != 0".into()));
        }
    }
    let (r1, a1, d1, dd1) = (&w1_dec.r, &w1_dec.a, &w1_dec.d, &w1_dec.big_d);
    let (r2, a2, d2, dd2) = (&w2_dec.r, &w2_dec.a, &w2_dec.d, &w2_dec.big_d);
    if r1 * d2 == r2 * d1 {
        return Err(Error::Precondition("slope behavior needs r1 d2 != r2 d1".into()));
    }

    let slope_gap = r1 / d1 - r2 / d2;
    let e1 = rat_int(2) * (a1 / d1 - a2 / d2) / &slope_gap;

    let h = surface.h_class();
    let m1 = h.add(&dd1.scale(&(rat_int(1) / d1)));
    let m2 = h.add(&dd2.scale(&(rat_int(1) / d2)));
    let e2 = (surface.ip(&m1, &m1) * d1 / r1 - surface.ip(&m2, &m2) * d2 / r2) / &slope_gap;

    let dd1_sq = surface.ip(dd1, dd1);
    let dd2_sq = surface.ip(dd2, dd2);
    let e3 = -(d1 * d2 / (r1 * r2)) * &h2
        + (d2 * r2 * &dd1_sq - r1 * d1 * &dd2_sq) / (r1 * r2 * (r1 * d2 - r2 * d1));

    if e1 != e2 || e1 != e3 {
        return Err(Error::Internal("slope-behavior expressions disagree".into()));
    }
    Ok(SlopeBehavior { on_positive_cone: e1.is_positive(), s: e1 })
}

/// Brill-Noether fiber data: the Grassmannian Gr(n, m) with
/// n = 2m + <v, u_k>, its F_q point count, and the base vector v - m u_k.
#[derive(Debug, Clone)]
pub struct BnFiber {
    pub n: BigInt,
    pub m: u32,
    pub count: LaurentPolyQ,
    pub base: MukaiVector,
}

pub fn bn_fiber(v: &MukaiVector, u_k: &MukaiVector, m: u32, frame: &BetaFrame) -> Result<BnFiber> {
    let surface = &frame.surface;
    if self_pairing(u_k, surface)? != rat_int(-2) {
        return Err(Error::Precondition("Brill-Noether fiber needs <u_k^2> = -2".into()));
    }
    let pair = pairing(v, u_k, surface)?;
    if !pair.is_integer() {
        return Err(Error::Precondition("<v, u_k> must be integral".into()));
    }
    let n = rat_int(2) * rat_int(m as i64) + &pair;
    if n < rat_int(m as i64) {
        return Err(Error::Precondition(format!("Grassmannian needs n >= m, got n = {n}")));
    }
    let n_int = n.to_integer();
    let n_u32: u32 = n_int
        .clone()
        .try_into()
        .map_err(|_| Error::Precondition("Grassmannian dimension overflow".into()))?;
    Ok(BnFiber {
        n: n_int,
        m,
        count: q_binomial(n_u32, m)?,
        base: v.sub(&u_k.scale(&rat_int(m as i64))),
    })
}

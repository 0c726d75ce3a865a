//! The basic Lie superalgebra gl(n+1|n) and its principal osp(1|2) data.
//!
//! Elements are sparse rational combinations of matrix units `E_{i,j}` with
//! 1-based indices `1..=2n+1`. The parity of an index is `(i+1) mod 2`, so
//! odd-numbered rows/columns are even (bosonic) and even-numbered ones are
//! odd (fermionic); `E_{i,j}` has parity `(i+j) mod 2`. The principal
//! grading is by half-integers: `E_{i,j}` sits in degree `(j-i)/2`, which we
//! store doubled as `j-i` to stay in integers.

use crate::{rat, ratio, Error, Rat, Result};
use num::traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A matrix unit `E_{i,j}` of gl(n+1|n), with 1-based indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BasisElem {
    /// Row index, `1..=2n+1`.
    pub i: u8,
    /// Column index, `1..=2n+1`.
    pub j: u8,
}

/// Parity of a matrix index: odd-numbered indices are bosonic.
pub fn idx_parity(i: u8) -> u8 {
    ((i as u16 + 1) % 2) as u8
}

impl BasisElem {
    /// Construct `E_{i,j}`.
    pub fn new(i: u8, j: u8) -> Self {
        BasisElem { i, j }
    }

    /// Super parity of `E_{i,j}`: `(i+j) mod 2`.
    pub fn parity(self) -> u8 {
        ((self.i as u16 + self.j as u16) % 2) as u8
    }

    /// Twice the principal grade: `j - i`.
    pub fn grade2(self) -> i32 {
        self.j as i32 - self.i as i32
    }
}

impl fmt::Display for BasisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E[{},{}]", self.i, self.j)
    }
}

/// Normalization of the invariant bilinear form.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum FormMode {
    /// `(a|b) = c_n str(ab)` with `c_n = 2/(n(n+1))`, so that `(e|f) = 1`.
    #[default]
    Rescaled,
    /// Plain supertrace `(a|b) = str(ab)`.
    Supertrace,
}

impl FormMode {
    /// The scalar multiplying the supertrace.
    pub fn scale(self, n: u32) -> Rat {
        match self {
            FormMode::Rescaled => ratio(2, (n as i64) * (n as i64 + 1)),
            FormMode::Supertrace => rat(1),
        }
    }
}

/// A sparse element of gl(n+1|n): a rational combination of matrix units.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LieElem {
    terms: BTreeMap<BasisElem, Rat>,
}

impl LieElem {
    /// The zero element.
    pub fn zero() -> Self {
        LieElem::default()
    }

    /// The basis element `E_{i,j}` with coefficient one.
    pub fn basis(e: BasisElem) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(e, rat(1));
        LieElem { terms }
    }

    /// Whether this is the zero element.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c * E` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: BasisElem, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Sum of two elements.
    pub fn add(&self, other: &LieElem) -> LieElem {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    /// Difference of two elements.
    pub fn sub(&self, other: &LieElem) -> LieElem {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rat) -> LieElem {
        if c.is_zero() {
            return LieElem::zero();
        }
        LieElem {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (*e, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `E_{i,j}` (zero if absent).
    pub fn coeff(&self, e: BasisElem) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Iterate over `(basis element, coefficient)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisElem, &Rat)> {
        self.terms.iter()
    }

    /// Number of nonzero coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether there are no nonzero coefficients.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Super parity if homogeneous, error otherwise; zero counts as even.
    pub fn parity(&self) -> Result<u8> {
        let mut p: Option<u8> = None;
        for (e, _) in self.iter() {
            match p {
                None => p = Some(e.parity()),
                Some(q) if q == e.parity() => {}
                Some(_) => {
                    return Err(Error::NonHomogeneous(format!(
                        "element mixes parities: {self}"
                    )))
                }
            }
        }
        Ok(p.unwrap_or(0))
    }

    /// Keep only the components of non-positive grade (`j <= i`).
    pub fn pi_leq0(&self) -> LieElem {
        LieElem {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.grade2() <= 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Keep only the components of positive grade (`j > i`).
    pub fn pi_gt0(&self) -> LieElem {
        LieElem {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.grade2() > 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Keep only the components of negative grade (`j < i`).
    pub fn pi_lt0(&self) -> LieElem {
        LieElem {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.grade2() < 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for LieElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{e}")?;
        }
        Ok(())
    }
}

/// Super bracket of two elements: bilinear extension of
/// `[E_ij, E_kl] = d_{jk} E_il - (-1)^{p(E_ij) p(E_kl)} d_{li} E_kj`.
pub fn superbracket(a: &LieElem, b: &LieElem) -> LieElem {
    let mut out = LieElem::zero();
    for (ea, ca) in a.iter() {
        for (eb, cb) in b.iter() {
            let c = ca.clone() * cb.clone();
            if ea.j == eb.i {
                out.add_term(BasisElem::new(ea.i, eb.j), c.clone());
            }
            if eb.j == ea.i {
                let sign = if ea.parity() * eb.parity() == 1 { -1 } else { 1 };
                out.add_term(BasisElem::new(eb.i, ea.j), c * rat(-sign));
            }
        }
    }
    out
}

/// Supertrace of the product of two basis elements, times `mode.scale(n)`:
/// `(E_ij | E_kl) = d_{jk} d_{il} (-1)^{p(i)} c`.
pub fn form_basis(a: BasisElem, b: BasisElem, n: u32, mode: FormMode) -> Rat {
    if a.j == b.i && a.i == b.j {
        let sign = if idx_parity(a.i) == 1 { -1 } else { 1 };
        mode.scale(n) * rat(sign)
    } else {
        Rat::zero()
    }
}

/// The invariant bilinear form `(a|b)`, bilinear in both slots.
pub fn form(a: &LieElem, b: &LieElem, n: u32, mode: FormMode) -> Rat {
    let mut out = Rat::zero();
    for (ea, ca) in a.iter() {
        for (eb, cb) in b.iter() {
            let f = form_basis(*ea, *eb, n, mode);
            if !f.is_zero() {
                out += ca.clone() * cb.clone() * f;
            }
        }
    }
    out
}

/// Structural data of the principal osp(1|2) embedding in gl(n+1|n).
#[derive(Clone, Debug)]
pub struct PrincipalData {
    /// Rank parameter; matrices have size `2n+1`.
    pub n: u32,
    /// Matrix size `2n+1`.
    pub size: u8,
    /// Normalization of the bilinear form.
    pub mode: FormMode,
    /// Cartan element `h = sum_i (n+1-i) E_{ii}`.
    pub h: LieElem,
    /// Even positive element with `[e, f] = h`.
    pub e: LieElem,
    /// Even principal nilpotent `f = (1/2)[f_odd, f_odd]`.
    pub f: LieElem,
    /// Odd principal nilpotent `f_odd = sum_p E_{p+1,p}`.
    pub f_odd: LieElem,
    /// Ordered basis of the positive part `n_+` (strictly upper units).
    pub pos_basis: Vec<BasisElem>,
    /// Dual basis in `n_-`: `(dual_basis[a] | pos_basis[b]) = delta_{ab}`.
    pub dual_basis: Vec<LieElem>,
}

/// Invert a square matrix over the rationals by Gauss-Jordan elimination.
#[allow(clippy::needless_range_loop)] // row r is updated against row col
fn invert(mat: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let m = mat.len();
    let mut aug: Vec<Vec<Rat>> = mat
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..m).map(|c| if c == r { Rat::one() } else { Rat::zero() }));
            v
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v /= p.clone();
        }
        for r in 0..m {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * m {
                    let sub = factor.clone() * aug[col][c].clone();
                    aug[r][c] -= sub;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[m..].to_vec()).collect())
}

/// Build the principal data for gl(n+1|n).
///
/// Errors if `n == 0`: gl(1|0) has no odd part and no principal nilpotent.
pub fn principal_data(n: u32, mode: FormMode) -> Result<PrincipalData> {
    if n == 0 {
        return Err(Error::BadIndex(
            "rank parameter n must be at least 1 (matrices of size 2n+1)".into(),
        ));
    }
    if 2 * n + 1 > u8::MAX as u32 {
        return Err(Error::BadIndex(format!("rank parameter n={n} is too large")));
    }
    let size = (2 * n + 1) as u8;

    let mut h = LieElem::zero();
    for i in 1..=size {
        h.add_term(BasisElem::new(i, i), rat(n as i64 + 1 - i as i64));
    }

    let mut f_odd = LieElem::zero();
    for p in 1..size {
        f_odd.add_term(BasisElem::new(p + 1, p), rat(1));
    }
    let f = superbracket(&f_odd, &f_odd).scale(&ratio(1, 2));

    // e = sum_k c_k E_{k,k+2} with c_k - c_{k-2} = n+1-k and c_{-1} = c_0 = 0,
    // the unique even grade-one element with [e, f] = h.
    let mut e = LieElem::zero();
    let mut c_prev = [rat(0), rat(0)]; // c_{k-2} for k odd / even
    for k in 1..=(size as i64 - 2) {
        let slot = (k % 2) as usize;
        let c_k = c_prev[slot].clone() + rat(n as i64 + 1 - k);
        e.add_term(BasisElem::new(k as u8, k as u8 + 2), c_k.clone());
        c_prev[slot] = c_k;
    }

    let mut pos_basis = Vec::new();
    for i in 1..=size {
        for j in (i + 1)..=size {
            pos_basis.push(BasisElem::new(i, j));
        }
    }
    let neg_basis: Vec<BasisElem> = pos_basis.iter().map(|e| BasisElem::new(e.j, e.i)).collect();

    // Gram matrix M[a][b] = (neg_a | pos_b); duals are the rows of (M^T)^{-1}.
    let m = pos_basis.len();
    let gram: Vec<Vec<Rat>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| form_basis(neg_basis[a], pos_basis[b], n, mode))
                .collect()
        })
        .collect();
    let gram_t: Vec<Vec<Rat>> = (0..m)
        .map(|a| (0..m).map(|b| gram[b][a].clone()).collect())
        .collect();
    let inv = invert(&gram_t).ok_or_else(|| {
        Error::BadIndex("bilinear form is degenerate on n_- x n_+ (internal)".into())
    })?;
    let dual_basis: Vec<LieElem> = (0..m)
        .map(|b| {
            let mut u = LieElem::zero();
            for a in 0..m {
                u.add_term(neg_basis[a], inv[b][a].clone());
            }
            u
        })
        .collect();

    Ok(PrincipalData {
        n,
        size,
        mode,
        h,
        e,
        f,
        f_odd,
        pos_basis,
        dual_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense-matrix model of gl(n+1|n), an independent reference
    /// implementation for the sparse structure constants.
    struct Dense {
        size: usize,
        a: Vec<Vec<Rat>>,
    }

    impl Dense {
        fn from(x: &LieElem, size: usize) -> Self {
            let mut a = vec![vec![Rat::zero(); size]; size];
            for (e, c) in x.iter() {
                a[e.i as usize - 1][e.j as usize - 1] = c.clone();
            }
            Dense { size, a }
        }

        #[allow(clippy::needless_range_loop)] // i-k-j index form of the product
        fn mul(&self, other: &Dense) -> Dense {
            let s = self.size;
            let mut a = vec![vec![Rat::zero(); s]; s];
            for i in 0..s {
                for kk in 0..s {
                    if self.a[i][kk].is_zero() {
                        continue;
                    }
                    for j in 0..s {
                        let add = self.a[i][kk].clone() * other.a[kk][j].clone();
                        a[i][j] += add;
                    }
                }
            }
            Dense { size: s, a }
        }

        fn supertrace(&self) -> Rat {
            let mut t = Rat::zero();
            for i in 0..self.size {
                let sgn = if idx_parity(i as u8 + 1) == 1 { -1 } else { 1 };
                t += self.a[i][i].clone() * rat(sgn);
            }
            t
        }

        fn to_sparse(&self) -> LieElem {
            let mut out = LieElem::zero();
            for i in 0..self.size {
                for j in 0..self.size {
                    out.add_term(
                        BasisElem::new(i as u8 + 1, j as u8 + 1),
                        self.a[i][j].clone(),
                    );
                }
            }
            out
        }
    }

    /// Supercommutator of homogeneous dense matrices: `ab - (-1)^{pq} ba`.
    fn dense_bracket(x: BasisElem, y: BasisElem, size: usize) -> LieElem {
        let dx = Dense::from(&LieElem::basis(x), size);
        let dy = Dense::from(&LieElem::basis(y), size);
        let xy = dx.mul(&dy).to_sparse();
        let yx = dy.mul(&dx).to_sparse();
        let sign = if x.parity() * y.parity() == 1 { rat(1) } else { rat(-1) };
        xy.add(&yx.scale(&sign))
    }

    fn all_basis(size: u8) -> Vec<BasisElem> {
        let mut v = Vec::new();
        for i in 1..=size {
            for j in 1..=size {
                v.push(BasisElem::new(i, j));
            }
        }
        v
    }

    #[test]
    fn superbracket_matches_dense_matrix_model() {
        for n in 1..=2u32 {
            let size = (2 * n + 1) as u8;
            for x in all_basis(size) {
                for y in all_basis(size) {
                    let fast = superbracket(&LieElem::basis(x), &LieElem::basis(y));
                    let slow = dense_bracket(x, y, size as usize);
                    assert_eq!(fast, slow, "bracket [{x}, {y}] at n={n}");
                }
            }
        }
    }

    #[test]
    fn form_matches_dense_supertrace() {
        for n in 1..=2u32 {
            let size = (2 * n + 1) as u8;
            let c = FormMode::Rescaled.scale(n);
            for x in all_basis(size) {
                for y in all_basis(size) {
                    let fast = form_basis(x, y, n, FormMode::Rescaled);
                    let dx = Dense::from(&LieElem::basis(x), size as usize);
                    let dy = Dense::from(&LieElem::basis(y), size as usize);
                    let slow = dx.mul(&dy).supertrace() * c.clone();
                    assert_eq!(fast, slow, "form ({x}|{y}) at n={n}");
                }
            }
        }
    }

    #[test]
    fn bracket_is_super_antisymmetric() {
        for n in 1..=2u32 {
            let size = (2 * n + 1) as u8;
            for x in all_basis(size) {
                for y in all_basis(size) {
                    let ab = superbracket(&LieElem::basis(x), &LieElem::basis(y));
                    let ba = superbracket(&LieElem::basis(y), &LieElem::basis(x));
                    let sign = if x.parity() * y.parity() == 1 { rat(1) } else { rat(-1) };
                    assert_eq!(ab, ba.scale(&sign), "[{x},{y}] vs [{y},{x}]");
                }
            }
        }
    }

    #[test]
    fn bracket_satisfies_graded_leibniz() {
        // [a,[b,c]] = [[a,b],c] + (-1)^{p(a)p(b)} [b,[a,c]] over all basis triples.
        for n in 1..=2u32 {
            let size = (2 * n + 1) as u8;
            let basis = all_basis(size);
            for &a in &basis {
                for &b in &basis {
                    for &c in &basis {
                        let ea = LieElem::basis(a);
                        let eb = LieElem::basis(b);
                        let ec = LieElem::basis(c);
                        let lhs = superbracket(&ea, &superbracket(&eb, &ec));
                        let mut rhs = superbracket(&superbracket(&ea, &eb), &ec);
                        let sign = if a.parity() * b.parity() == 1 { rat(-1) } else { rat(1) };
                        rhs = rhs.add(&superbracket(&eb, &superbracket(&ea, &ec)).scale(&sign));
                        assert_eq!(lhs, rhs, "Leibniz at [{a},[{b},{c}]] n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn form_is_invariant_and_supersymmetric() {
        for n in 1..=2u32 {
            let size = (2 * n + 1) as u8;
            let basis = all_basis(size);
            for &a in &basis {
                for &b in &basis {
                    // (a|b) = (-1)^{p(a)p(b)} (b|a)
                    let ab = form_basis(a, b, n, FormMode::Rescaled);
                    let ba = form_basis(b, a, n, FormMode::Rescaled);
                    let sign = if a.parity() * b.parity() == 1 { rat(-1) } else { rat(1) };
                    assert_eq!(ab, ba * sign, "supersymmetry ({a}|{b})");
                    for &c in &basis {
                        // ([a,b]|c) = (a|[b,c])
                        let lhs = form(
                            &superbracket(&LieElem::basis(a), &LieElem::basis(b)),
                            &LieElem::basis(c),
                            n,
                            FormMode::Rescaled,
                        );
                        let rhs = form(
                            &LieElem::basis(a),
                            &superbracket(&LieElem::basis(b), &LieElem::basis(c)),
                            n,
                            FormMode::Rescaled,
                        );
                        assert_eq!(lhs, rhs, "invariance at ({a},{b},{c}) n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn principal_triple_relations() {
        for n in 1..=3u32 {
            let pd = principal_data(n, FormMode::Rescaled).unwrap();
            // [h, e] = 2e, [h, f] = -2f, [e, f] = h.
            assert_eq!(superbracket(&pd.h, &pd.e), pd.e.scale(&rat(2)));
            assert_eq!(superbracket(&pd.h, &pd.f), pd.f.scale(&rat(-2)));
            assert_eq!(superbracket(&pd.e, &pd.f), pd.h);
            // f = (1/2)[f_odd, f_odd] and [f, f_odd] = 0.
            assert_eq!(
                pd.f,
                superbracket(&pd.f_odd, &pd.f_odd).scale(&ratio(1, 2))
            );
            assert!(superbracket(&pd.f, &pd.f_odd).is_zero());
            // (e|f) = 1 in the rescaled normalization.
            assert_eq!(form(&pd.e, &pd.f, n, FormMode::Rescaled), rat(1));
            // [h, f_odd] = -f_odd: f_odd has grade -1/2.
            assert_eq!(superbracket(&pd.h, &pd.f_odd), pd.f_odd.scale(&rat(-1)));
        }
    }

    #[test]
    fn dual_basis_pairs_to_identity() {
        for n in 1..=3u32 {
            for mode in [FormMode::Rescaled, FormMode::Supertrace] {
                let pd = principal_data(n, mode).unwrap();
                for (a, ua) in pd.dual_basis.iter().enumerate() {
                    for (b, &eb) in pd.pos_basis.iter().enumerate() {
                        let want = if a == b { rat(1) } else { rat(0) };
                        assert_eq!(
                            form(ua, &LieElem::basis(eb), n, mode),
                            want,
                            "(u^{a} | u_{b}) at n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dual_basis_closed_form_gl21() {
        // At n=1 the duals of E12, E13, E23 are -E21, E31, E32.
        let pd = principal_data(1, FormMode::Rescaled).unwrap();
        assert_eq!(pd.pos_basis, vec![
            BasisElem::new(1, 2),
            BasisElem::new(1, 3),
            BasisElem::new(2, 3)
        ]);
        assert_eq!(pd.dual_basis[0], LieElem::basis(BasisElem::new(2, 1)).scale(&rat(-1)));
        assert_eq!(pd.dual_basis[1], LieElem::basis(BasisElem::new(3, 1)));
        assert_eq!(pd.dual_basis[2], LieElem::basis(BasisElem::new(3, 2)));
    }

    #[test]
    fn f_odd_pairings_gl21() {
        let pd = principal_data(1, FormMode::Rescaled).unwrap();
        let pair = |i, j| {
            form(
                &pd.f_odd,
                &LieElem::basis(BasisElem::new(i, j)),
                1,
                FormMode::Rescaled,
            )
        };
        assert_eq!(pair(1, 2), rat(-1));
        assert_eq!(pair(2, 3), rat(1));
        assert_eq!(pair(1, 3), rat(0));
    }

    #[test]
    fn projection_examples() {
        let e13 = LieElem::basis(BasisElem::new(1, 3));
        let e31 = LieElem::basis(BasisElem::new(3, 1));
        let mix = LieElem::basis(BasisElem::new(1, 1)).add(&LieElem::basis(BasisElem::new(1, 2)));
        assert!(e13.pi_leq0().is_zero());
        assert_eq!(e31.pi_leq0(), e31);
        assert_eq!(mix.pi_leq0(), LieElem::basis(BasisElem::new(1, 1)));
    }

    #[test]
    fn grades_and_parities() {
        let e = BasisElem::new(2, 5);
        assert_eq!(e.grade2(), 3);
        assert_eq!(e.parity(), 1);
        assert_eq!(idx_parity(1), 0);
        assert_eq!(idx_parity(2), 1);
    }

    #[test]
    fn rejects_rank_zero() {
        assert!(principal_data(0, FormMode::Rescaled).is_err());
    }

    #[test]
    fn e_coefficients_gl32() {
        // n=2: c_1 = 2, c_2 = 1, c_3 = 2 (from c_k - c_{k-2} = n+1-k).
        let pd = principal_data(2, FormMode::Rescaled).unwrap();
        assert_eq!(pd.e.coeff(BasisElem::new(1, 3)), rat(2));
        assert_eq!(pd.e.coeff(BasisElem::new(2, 4)), rat(1));
        assert_eq!(pd.e.coeff(BasisElem::new(3, 5)), rat(2));
    }
}

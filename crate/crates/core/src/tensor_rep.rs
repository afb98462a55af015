//! Exact operators on `(C^M)^{⊗n}`: the Brauer monoid and the symmetric
//! group acting on tensor slots, and Casimir elements of `u(N)`, `su(N)`,
//! `so(N)` and `sp(N)` acting slot-wise.
//!
//! Multi-indices are encoded in base `M` with slot 0 the most significant
//! digit. Brauer points `0..n` are the top (input) row and `n..2n` the bottom
//! (output) row; a permutation `σ` is the diagram pairing `k` with `σ(k)+n`,
//! which moves the vector in slot `k` to slot `σ(k)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cmatrix::CMatrix;
use crate::error::{budget, Error, Result};
use crate::perm::{compose, Permutation};

/// Default bound on `M^n`, the dimension of the tensor space.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Largest single-site dimension `M` for which Lie bases are built.
const MAX_SITE_DIM: usize = 64;

/// A perfect matching of `{0, …, 2n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BrauerDiagram {
    n: usize,
    partner: Vec<usize>,
}

impl BrauerDiagram {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![usize::MAX; 2 * n];
        for &(a, b) in pairs {
            if a >= 2 * n
                || b >= 2 * n
                || a == b
                || partner[a] != usize::MAX
                || partner[b] != usize::MAX
            {
                return Err(Error::OutOfRange(format!(
                    "{pairs:?} is not a pairing of {} points",
                    2 * n
                )));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.contains(&usize::MAX) {
            return Err(Error::OutOfRange(format!(
                "{pairs:?} leaves points unpaired"
            )));
        }
        Ok(BrauerDiagram { n, partner })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_perm(&Permutation::identity(n))
    }

    pub fn from_perm(s: &Permutation) -> Self {
        let n = s.degree();
        let mut partner = vec![0; 2 * n];
        for k in 0..n {
            partner[k] = s.apply(k) + n;
            partner[s.apply(k) + n] = k;
        }
        BrauerDiagram { n, partner }
    }

    /// `⟨kl⟩`: `{k,l}` on top, `{k,l}` on the bottom, other strands vertical.
    pub fn contraction(n: usize, k: usize, l: usize) -> Self {
        assert!(k < l && l < n, "contraction needs k < l < n");
        let mut d = Self::identity(n);
        d.partner[k] = l;
        d.partner[l] = k;
        d.partner[n + k] = n + l;
        d.partner[n + l] = n + k;
        d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p]
    }

    /// Pairs `(a, b)` with `a < b`, increasing in `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..2 * self.n)
            .filter(|&a| a < self.partner[a])
            .map(|a| (a, self.partner[a]))
            .collect()
    }

    /// The underlying permutation, if every chord joins top to bottom.
    pub fn to_perm(&self) -> Option<Permutation> {
        let images: Option<Vec<usize>> = (0..self.n)
            .map(|k| self.partner[k].checked_sub(self.n))
            .collect();
        Permutation::from_images(images?).ok()
    }

    /// Number of cycles once the top and bottom rows are identified, so
    /// that the trace of the orthogonal action is `N^ℓ`.
    pub fn loops_when_closed(&self) -> usize {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (a, b) in self.pairs() {
            let (ra, rb) = (find(&mut parent, a % n), find(&mut parent, b % n));
            parent[ra] = rb;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// All `(2n-1)!!` diagrams.
    pub fn all(n: usize) -> Vec<BrauerDiagram> {
        fn rec(
            free: &mut Vec<usize>,
            pairs: &mut Vec<(usize, usize)>,
            n: usize,
            out: &mut Vec<BrauerDiagram>,
        ) {
            if free.is_empty() {
                out.push(BrauerDiagram::new(n, pairs).expect("complete pairing"));
                return;
            }
            let a = free.remove(0);
            for i in 0..free.len() {
                let b = free.remove(i);
                pairs.push((a, b));
                rec(free, pairs, n, out);
                pairs.pop();
                free.insert(i, b);
            }
            free.insert(0, a);
        }
        let mut out = Vec::new();
        rec(&mut (0..2 * n).collect(), &mut Vec::new(), n, &mut out);
        out
    }
}

impl fmt::Display for BrauerDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in self.pairs() {
            write!(f, "{{{},{}}}", a + 1, b + 1)?;
        }
        Ok(())
    }
}

/// `a ∘ b` (apply `b` first): stack `b` above `a`, joining the bottom row of
/// `b` to the top row of `a`. Returns the product and the number of closed
/// loops removed.
pub fn brauer_compose(a: &BrauerDiagram, b: &BrauerDiagram) -> Result<(BrauerDiagram, usize)> {
    if a.n != b.n {
        return Err(Error::DegreeMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let n = a.n;
    // Middle point j is b's bottom n+j and a's top j.
    let mut visited = vec![false; n];
    let mut partner = vec![usize::MAX; 2 * n];
    // From an external point, alternate through the middle row until leaving.
    // External points: b's top (result top), a's bottom (result bottom).
    let exit = |mut from_b: bool, mut p: usize, visited: &mut Vec<bool>| -> usize {
        loop {
            if from_b {
                let q = b.partner[p];
                if q < n {
                    return q;
                }
                let j = q - n;
                visited[j] = true;
                p = j;
                from_b = false;
            } else {
                let q = a.partner[p];
                if q >= n {
                    return q;
                }
                visited[q] = true;
                p = q + n;
                from_b = true;
            }
        }
    };
    for start in 0..2 * n {
        if partner[start] != usize::MAX {
            continue;
        }
        let end = if start < n {
            exit(true, start, &mut visited)
        } else {
            exit(false, start, &mut visited)
        };
        partner[start] = end;
        partner[end] = start;
    }
    let mut loops = 0;
    for j in 0..n {
        if visited[j] {
            continue;
        }
        loops += 1;
        let mut p = j;
        loop {
            visited[p] = true;
            let q = a.partner[p];
            // q is a's top point; hop to b's bottom there.
            let r = b.partner[q + n] - n;
            if visited[r] && r == j {
                visited[q] = true;
                break;
            }
            visited[q] = true;
            p = r;
            if p == j {
                break;
            }
        }
    }
    Ok((BrauerDiagram { n, partner }, loops))
}

/// How chords with both ends in the same row are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `δ_{ij}` on `C^N`.
    Orthogonal,
    /// `J_{ij}` on `C^{2N}` with `J = [[0, I], [-I, 0]]`.
    Symplectic,
}

/// Sparse exact operator on `(C^M)^{⊗n}`; `cols[j]` lists `(i, A_ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    pub n: usize,
    pub site_dim: usize,
    cols: Vec<Vec<(usize, Rational64)>>,
}

fn check_dim(site_dim: usize, n: usize, max_dim: usize) -> Result<usize> {
    let dim = (site_dim as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    budget("tensor dimension", dim, max_dim as u128)?;
    Ok(dim as usize)
}

fn digits(mut idx: usize, m: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = idx % m;
        idx /= m;
    }
    d
}

fn undigits(d: &[usize], m: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * m + x)
}

fn merge(mut entries: Vec<(usize, Rational64)>) -> Vec<(usize, Rational64)> {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(usize, Rational64)> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

impl TensorOperator {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn zero(site_dim: usize, n: usize) -> Self {
        TensorOperator {
            n,
            site_dim,
            cols: vec![Vec::new(); site_dim.pow(n as u32)],
        }
    }

    pub fn scalar(site_dim: usize, n: usize, c: Rational64) -> Self {
        let dim = site_dim.pow(n as u32);
        TensorOperator {
            n,
            site_dim,
            cols: (0..dim)
                .map(|j| if c.is_zero() { vec![] } else { vec![(j, c)] })
                .collect(),
        }
    }

    /// Entry `A_ij`.
    pub fn entry(&self, i: usize, j: usize) -> Rational64 {
        self.cols[j]
            .binary_search_by_key(&i, |e| e.0)
            .map(|p| self.cols[j][p].1)
            .unwrap_or_else(|_| Rational64::zero())
    }

    /// Nonzero entries `(i, j, A_ij)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Rational64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn trace(&self) -> Rational64 {
        (0..self.dim()).map(|j| self.entry(j, j)).sum()
    }

    pub fn scale(&self, c: Rational64) -> Self {
        let mut out = self.clone();
        for col in &mut out.cols {
            for e in col.iter_mut() {
                e.1 *= c;
            }
            col.retain(|e| !e.1.is_zero());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
        TensorOperator {
            n: self.n,
            site_dim: self.site_dim,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| merge(a.iter().chain(b).copied().collect()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Rational64::one()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc = Vec::new();
                for &(k, v) in col {
                    acc.extend(self.cols[k].iter().map(|&(i, w)| (i, w * v)));
                }
                merge(acc)
            })
            .collect();
        TensorOperator {
            n: self.n,
            site_dim: self.site_dim,
            cols,
        }
    }

    /// First entry where `self` and `other` differ, with both values.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, Rational64, Rational64)> {
        let diff = self.sub(other);
        let first = diff.entries().next();
        first.map(|(i, j, _)| (i, j, self.entry(i, j), other.entry(i, j)))
    }

    /// Largest `|A_ij - B_ij|`.
    pub fn max_difference(&self, other: &Self) -> Rational64 {
        self.sub(other)
            .entries()
            .map(|(_, _, v)| v.abs())
            .max()
            .unwrap_or_else(Rational64::zero)
    }
}

/// `ρ(β)`: for input `e_{i_0} ⊗ … ⊗ e_{i_{n-1}}`, sum over output indices of
/// the product of chord weights. Chords between the rows carry `δ`; chords
/// within a row carry `δ` or `J` by flavor.
pub fn rho(
    beta: &BrauerDiagram,
    site_dim: usize,
    flavor: Flavor,
    max_dim: usize,
) -> Result<TensorOperator> {
    let n = beta.n;
    let dim = check_dim(site_dim, n, max_dim)?;
    if flavor == Flavor::Symplectic && site_dim % 2 == 1 {
        return Err(Error::OutOfRange(format!(
            "symplectic action needs even dimension, got {site_dim}"
        )));
    }
    let half = site_dim / 2;
    // Nonzero (x, y, w) for a within-row chord with endpoints ordered x then y.
    let row_weights: Vec<(usize, usize, i64)> = match flavor {
        Flavor::Orthogonal => (0..site_dim).map(|x| (x, x, 1)).collect(),
        Flavor::Symplectic => (0..site_dim)
            .map(|x| {
                if x < half {
                    (x, x + half, 1)
                } else {
                    (x, x - half, -1)
                }
            })
            .collect(),
    };
    let weight = |x: usize, y: usize| -> i64 {
        match flavor {
            Flavor::Orthogonal => i64::from(x == y),
            Flavor::Symplectic => {
                if x < half && y == x + half {
                    1
                } else if x >= half && y + half == x {
                    -1
                } else {
                    0
                }
            }
        }
    };
    let pairs = beta.pairs();
    let bottom_pairs: Vec<(usize, usize)> = pairs
        .iter()
        .filter(|p| p.0 >= n)
        .map(|&(a, b)| (a - n, b - n))
        .collect();
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let input = digits(j, site_dim, n);
        let mut w = 1i64;
        let mut out = vec![0usize; n];
        for &(a, b) in &pairs {
            if b < n {
                w *= weight(input[a], input[b]);
            } else if a < n {
                out[b - n] = input[a];
            }
        }
        let mut col = Vec::new();
        if w != 0 {
            // Enumerate the free bottom-row chords.
            let mut choice = vec![0usize; bottom_pairs.len()];
            loop {
                let mut ww = w;
                for (c, &(a, b)) in choice.iter().zip(&bottom_pairs) {
                    let (x, y, v) = row_weights[*c];
                    out[a] = x;
                    out[b] = y;
                    ww *= v;
                }
                col.push((undigits(&out, site_dim), Rational64::from_integer(ww)));
                let mut pos = 0;
                while pos < choice.len() {
                    choice[pos] += 1;
                    if choice[pos] < site_dim {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == choice.len() {
                    break;
                }
            }
        }
        cols.push(merge(col));
    }
    Ok(TensorOperator { n, site_dim, cols })
}

/// `ρ(σ)` for a permutation; the same for both flavors.
pub fn rho_perm(s: &Permutation, site_dim: usize, max_dim: usize) -> Result<TensorOperator> {
    rho(
        &BrauerDiagram::from_perm(s),
        site_dim,
        Flavor::Orthogonal,
        max_dim,
    )
}

/// Single-site matrix as sparse `(row, col, value)` entries.
type SiteMatrix = Vec<(usize, usize, Rational64)>;

fn e(i: usize, j: usize, v: i64) -> (usize, usize, Rational64) {
    (i, j, Rational64::from_integer(v))
}

/// `Σ_k Id ⊗ … ⊗ X (slot k) ⊗ … ⊗ Id`.
fn rho_site(x: &SiteMatrix, site_dim: usize, n: usize) -> TensorOperator {
    let dim = site_dim.pow(n as u32);
    let mut by_col: Vec<Vec<(usize, Rational64)>> = vec![Vec::new(); site_dim];
    for &(r, c, v) in x {
        by_col[c].push((r, v));
    }
    let cols = (0..dim)
        .map(|j| {
            let d = digits(j, site_dim, n);
            let mut acc = Vec::new();
            for k in 0..n {
                for &(r, v) in &by_col[d[k]] {
                    let mut o = d.clone();
                    o[k] = r;
                    acc.push((undigits(&o, site_dim), v));
                }
            }
            merge(acc)
        })
        .collect();
    TensorOperator { n, site_dim, cols }
}

/// Structure groups with a Casimir on the defining representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LieGroup {
    U,
    SU,
    SO,
    Sp,
}

impl LieGroup {
    /// Dimension of the space the group acts on, `2N` for `Sp(N)`.
    pub fn site_dim(self, big_n: usize) -> usize {
        match self {
            LieGroup::Sp => 2 * big_n,
            _ => big_n,
        }
    }
}

/// Complex basis of the complexified Lie algebra, in the listing order
/// used by the identity proofs.
pub fn lie_basis(group: LieGroup, big_n: usize) -> Vec<SiteMatrix> {
    let nn = big_n;
    match group {
        LieGroup::U => (0..nn)
            .flat_map(|i| (0..nn).map(move |j| vec![e(i, j, 1)]))
            .collect(),
        LieGroup::SU => {
            let mut b: Vec<SiteMatrix> = (0..nn)
                .flat_map(|i| {
                    (0..nn)
                        .filter(move |&j| j != i)
                        .map(move |j| vec![e(i, j, 1)])
                })
                .collect();
            b.extend((0..nn.saturating_sub(1)).map(|i| vec![e(i, i, 1), e(i + 1, i + 1, -1)]));
            b
        }
        LieGroup::SO => (0..nn)
            .flat_map(|i| (i + 1..nn).map(move |j| vec![e(i, j, 1), e(j, i, -1)]))
            .collect(),
        LieGroup::Sp => {
            let mut b: Vec<SiteMatrix> = Vec::new();
            for i in 0..nn {
                for j in 0..nn {
                    b.push(vec![e(i, j, 1), e(j + nn, i + nn, -1)]);
                }
            }
            for i in 0..nn {
                for j in i + 1..nn {
                    b.push(vec![e(i, j + nn, 1), e(j, i + nn, 1)]);
                }
            }
            for i in 0..nn {
                for j in i + 1..nn {
                    b.push(vec![e(i + nn, j, 1), e(j + nn, i, 1)]);
                }
            }
            for i in 0..nn {
                b.push(vec![e(i, i + nn, 1)]);
            }
            for i in 0..nn {
                b.push(vec![e(i + nn, i, 1)]);
            }
            b
        }
    }
}

/// `-Tr(XY)`.
fn neg_trace_product(x: &SiteMatrix, y: &SiteMatrix) -> BigRational {
    let mut s = Rational64::zero();
    for &(r, c, v) in x {
        for &(r2, c2, w) in y {
            if c == r2 && c2 == r {
                s += v * w;
            }
        }
    }
    -BigRational::new(BigInt::from(*s.numer()), BigInt::from(*s.denom()))
}

/// Inverse of the Gram matrix `g_ab = -Tr(X_a X_b)`, as sparse
/// `(a, b, g^{ab})`. The Gram matrix splits into small connected blocks,
/// each inverted exactly.
fn inverse_gram(basis: &[SiteMatrix]) -> Result<Vec<(usize, usize, Rational64)>> {
    let m = basis.len();
    let mut adj: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); m];
    for a in 0..m {
        for b in 0..m {
            let g = neg_trace_product(&basis[a], &basis[b]);
            if !g.is_zero() {
                adj[a].push((b, g));
            }
        }
    }
    let mut comp = vec![usize::MAX; m];
    let mut out = Vec::new();
    for start in 0..m {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = start;
        let mut i = 0;
        while i < members.len() {
            for &(b, _) in &adj[members[i]] {
                if comp[b] == usize::MAX {
                    comp[b] = start;
                    members.push(b);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        let k = members.len();
        let pos: BTreeMap<usize, usize> =
            members.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        // Gauss–Jordan on [G | I].
        let mut mat = vec![vec![BigRational::zero(); 2 * k]; k];
        for (i, &a) in members.iter().enumerate() {
            for (b, g) in &adj[a] {
                mat[i][pos[b]] = g.clone();
            }
            mat[i][k + i] = BigRational::one();
        }
        for col in 0..k {
            let piv = (col..k)
                .find(|&r| !mat[r][col].is_zero())
                .ok_or_else(|| Error::Precision("degenerate invariant form".into()))?;
            mat.swap(col, piv);
            let p = mat[col][col].clone();
            for x in mat[col].iter_mut() {
                *x = &*x / &p;
            }
            for r in 0..k {
                if r != col && !mat[r][col].is_zero() {
                    let f = mat[r][col].clone();
                    let pivot_row = mat[col].clone();
                    for (x, y) in mat[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                let v = &mat[i][k + j];
                if v.is_zero() {
                    continue;
                }
                let num = v.numer().to_i64();
                let den = v.denom().to_i64();
                match (num, den) {
                    (Some(p), Some(q)) => out.push((a, b, Rational64::new(p, q))),
                    _ => return Err(Error::Precision("Gram inverse entry overflows i64".into())),
                }
            }
        }
    }
    Ok(out)
}

/// `ρ(1 ⊗ Δ)` with `Δ = Σ g^{ab} X_a X_b` for the form `-Tr(XY)`.
pub fn casimir(group: LieGroup, n: usize, big_n: usize, max_dim: usize) -> Result<TensorOperator> {
    let site_dim = group.site_dim(big_n);
    check_dim(site_dim, n, max_dim)?;
    budget("site dimension", site_dim as u128, MAX_SITE_DIM as u128)?;
    let basis = lie_basis(group, big_n);
    let reps: Vec<TensorOperator> = basis.iter().map(|x| rho_site(x, site_dim, n)).collect();
    let mut total = TensorOperator::zero(site_dim, n);
    for (a, b, g) in inverse_gram(&basis)? {
        total = total.add(&reps[a].compose(&reps[b]).scale(g));
    }
    Ok(total)
}

fn half_integer(num: i64) -> Rational64 {
    Rational64::new(num, 2)
}

/// `ρ(Δ_{S_n}) = -n(n-1)/2 + Σ_τ ρ(τ)`.
pub fn symmetric_laplacian(n: usize, site_dim: usize, max_dim: usize) -> Result<TensorOperator> {
    let mut total = TensorOperator::scalar(
        site_dim,
        n,
        half_integer(-((n * n.saturating_sub(1)) as i64)),
    );
    for k in 0..n {
        for l in k + 1..n {
            total = total.add(&rho_perm(
                &Permutation::transposition(n, k, l),
                site_dim,
                max_dim,
            )?);
        }
    }
    Ok(total)
}

/// `ρ(Δ_{B_n}) = -n(n-1)/2 + Σ_{k<l} ρ(⟨kl⟩)`.
pub fn brauer_laplacian(
    n: usize,
    site_dim: usize,
    flavor: Flavor,
    max_dim: usize,
) -> Result<TensorOperator> {
    let mut total = TensorOperator::scalar(
        site_dim,
        n,
        half_integer(-((n * n.saturating_sub(1)) as i64)),
    );
    for k in 0..n {
        for l in k + 1..n {
            total = total.add(&rho(
                &BrauerDiagram::contraction(n, k, l),
                site_dim,
                flavor,
                max_dim,
            )?);
        }
    }
    Ok(total)
}

/// Outcome of an exact operator identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasimirReport {
    pub group: LieGroup,
    pub n: usize,
    pub big_n: usize,
    pub holds: bool,
    pub max_deviation: f64,
    /// First offending entry `(row, col, lhs, rhs)`, values as `p/q`.
    pub offending: Option<(usize, usize, String, String)>,
}

/// Checks, exactly:
/// - U: `ρ(Δ_{S_n}) + ½ρ(Δ_U) = -(Nn + n(n-1))/2`
/// - SU: `ρ(Δ_SU) = ρ(Δ_U) + (n²/N) Id`
/// - SO: `ρ(Δ_{S_n}) + ρ(Δ_SO) = -(N-1)n/2 + ρ(Δ_{B_n})`
/// - Sp: `ρ(Δ_{S_n}) + ρ(Δ_Sp) = -(2N+1)n/2 + ρ(Δ_{B_n})` on `C^{2N}`
///
/// For `Sp` the form `-Tr(XY)` gives cross terms `Σ(⟨kl⟩ - (kl))` with unit
/// weight, so doubling `Δ_Sp` only balances when `n = 1`.
pub fn casimir_identity_check(
    group: LieGroup,
    n: usize,
    big_n: usize,
    max_dim: usize,
) -> Result<CasimirReport> {
    let site = group.site_dim(big_n);
    let nn = big_n as i64;
    let ni = n as i64;
    let (lhs, rhs) = match group {
        LieGroup::U => {
            let lhs = symmetric_laplacian(n, site, max_dim)?
                .add(&casimir(group, n, big_n, max_dim)?.scale(Rational64::new(1, 2)));
            (
                lhs,
                TensorOperator::scalar(site, n, Rational64::new(-(nn * ni + ni * (ni - 1)), 2)),
            )
        }
        LieGroup::SU => {
            let lhs = casimir(group, n, big_n, max_dim)?;
            let rhs = casimir(LieGroup::U, n, big_n, max_dim)?.add(&TensorOperator::scalar(
                site,
                n,
                Rational64::new(ni * ni, nn),
            ));
            (lhs, rhs)
        }
        LieGroup::SO => {
            let lhs =
                symmetric_laplacian(n, site, max_dim)?.add(&casimir(group, n, big_n, max_dim)?);
            let rhs = brauer_laplacian(n, site, Flavor::Orthogonal, max_dim)?.add(
                &TensorOperator::scalar(site, n, Rational64::new(-(nn - 1) * ni, 2)),
            );
            (lhs, rhs)
        }
        LieGroup::Sp => {
            let lhs =
                symmetric_laplacian(n, site, max_dim)?.add(&casimir(group, n, big_n, max_dim)?);
            let rhs = brauer_laplacian(n, site, Flavor::Symplectic, max_dim)?.add(
                &TensorOperator::scalar(site, n, Rational64::new(-(2 * nn + 1) * ni, 2)),
            );
            (lhs, rhs)
        }
    };
    let dev = lhs.max_difference(&rhs);
    let offending = lhs
        .first_difference(&rhs)
        .map(|(i, j, a, b)| (i, j, a.to_string(), b.to_string()));
    Ok(CasimirReport {
        group,
        n,
        big_n,
        holds: offending.is_none(),
        max_deviation: *dev.numer() as f64 / *dev.denom() as f64,
        offending,
    })
}

/// `p^st_σ(U) = Π_cycles Tr(U^m)`.
pub fn power_sum(s: &Permutation, u: &CMatrix) -> Complex64 {
    let cycles = s.cycles();
    let traces = u.power_traces(cycles.iter().map(Vec::len).max().unwrap_or(0));
    cycles.iter().map(|c| traces[c.len()]).product()
}

/// `Tr(U^{⊗n} A)` for a sparse operator `A`.
fn trace_against_tensor_power(u: &CMatrix, a: &TensorOperator) -> Complex64 {
    let (m, n) = (a.site_dim, a.n);
    a.entries()
        .map(|(i, j, v)| {
            let (di, dj) = (digits(i, m, n), digits(j, m, n));
            let prod: Complex64 = (0..n).map(|k| u.get(dj[k], di[k])).product();
            prod * (*v.numer() as f64 / *v.denom() as f64)
        })
        .sum()
}

/// Largest `|LHS - RHS|` over the given unitaries for
/// `½Δ p^st_σ = -(Nn/2) p^st_σ - Σ_τ p^st_{στ}`, with the left side computed
/// as `Tr(ρ(σ, U) ρ(1 ⊗ ½Δ))`.
pub fn laplacian_action_check(
    s: &Permutation,
    big_n: usize,
    unitaries: &[CMatrix],
    max_dim: usize,
) -> Result<f64> {
    let n = s.degree();
    let op = rho_perm(s, big_n, max_dim)?
        .compose(&casimir(LieGroup::U, n, big_n, max_dim)?.scale(Rational64::new(1, 2)));
    let transpositions: Vec<Permutation> = (0..n)
        .flat_map(|k| (k + 1..n).map(move |l| Permutation::transposition(n, k, l)))
        .collect();
    let mut worst = 0.0f64;
    for u in unitaries {
        let lhs = trace_against_tensor_power(u, &op);
        let mut rhs = power_sum(s, u) * (-(big_n as f64) * n as f64 / 2.0);
        for t in &transpositions {
            rhs -= power_sum(&compose(s, t)?, u);
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// The same identity at `U = I`, exactly: returns `(LHS, RHS)`.
pub fn laplacian_action_at_identity(
    s: &Permutation,
    big_n: usize,
    max_dim: usize,
) -> Result<(Rational64, Rational64)> {
    let n = s.degree();
    let lhs = rho_perm(s, big_n, max_dim)?
        .compose(&casimir(LieGroup::U, n, big_n, max_dim)?.scale(Rational64::new(1, 2)))
        .trace();
    let nn = big_n as i64;
    let pow = |l: usize| Rational64::from_integer(nn.pow(l as u32));
    let mut rhs = Rational64::new(-nn * n as i64, 2) * pow(s.cycle_count());
    for k in 0..n {
        for l in k + 1..n {
            rhs -= pow(compose(s, &Permutation::transposition(n, k, l))?.cycle_count());
        }
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const D: usize = DEFAULT_MAX_DIM;

    fn q(a: i64) -> Rational64 {
        Rational64::from_integer(a)
    }

    #[test]
    fn swap_matrix() {
        let op = rho_perm(&Permutation::transposition(2, 0, 1), 2, D).unwrap();
        for j in 0..4 {
            let (a, b) = (j / 2, j % 2);
            for i in 0..4 {
                assert_eq!(op.entry(i, j), q(i64::from(i == b * 2 + a)));
            }
        }
    }

    #[test]
    fn compose_examples() {
        let c = BrauerDiagram::contraction(2, 0, 1);
        let (p, loops) = brauer_compose(&c, &c).unwrap();
        assert_eq!((p, loops), (c.clone(), 1));
        let id = BrauerDiagram::identity(3);
        for b in BrauerDiagram::all(3) {
            assert_eq!(brauer_compose(&id, &b).unwrap(), (b.clone(), 0));
            assert_eq!(brauer_compose(&b, &id).unwrap(), (b.clone(), 0));
        }
        for s in Permutation::all(3) {
            for t in Permutation::all(3) {
                let (p, loops) =
                    brauer_compose(&BrauerDiagram::from_perm(&s), &BrauerDiagram::from_perm(&t))
                        .unwrap();
                assert_eq!(loops, 0);
                assert_eq!(p.to_perm().unwrap(), compose(&s, &t).unwrap());
            }
        }
        assert!(brauer_compose(&BrauerDiagram::identity(2), &id).is_err());
    }

    #[test]
    fn monoid_law_with_loops() {
        for n in 1..=3 {
            let all = BrauerDiagram::all(n);
            assert_eq!(all.len(), [1, 1, 3, 15][n]);
            for nn in 1..=3 {
                let ops: Vec<TensorOperator> = all
                    .iter()
                    .map(|b| rho(b, nn, Flavor::Orthogonal, D).unwrap())
                    .collect();
                for (a, ra) in all.iter().zip(&ops) {
                    for (b, rb) in all.iter().zip(&ops) {
                        let (ab, loops) = brauer_compose(a, b).unwrap();
                        let expected = rho(&ab, nn, Flavor::Orthogonal, D)
                            .unwrap()
                            .scale(q((nn as i64).pow(loops as u32)));
                        assert_eq!(ra.compose(rb), expected, "{a} ∘ {b}, N={nn}");
                    }
                }
            }
        }
    }

    #[test]
    fn traces_count_closed_loops() {
        for n in 1..=3 {
            for b in BrauerDiagram::all(n) {
                for nn in 1..=3 {
                    let t = rho(&b, nn, Flavor::Orthogonal, D).unwrap().trace();
                    assert_eq!(t, q((nn as i64).pow(b.loops_when_closed() as u32)));
                }
            }
        }
        let c = BrauerDiagram::contraction(2, 0, 1);
        assert_eq!(rho(&c, 2, Flavor::Orthogonal, D).unwrap().trace(), q(2));
    }

    #[test]
    fn invertible_diagrams_are_permutations() {
        for n in 1..=3 {
            let all = BrauerDiagram::all(n);
            let id = BrauerDiagram::identity(n);
            for a in &all {
                let invertible = all.iter().any(|b| brauer_compose(a, b).unwrap().0 == id);
                assert_eq!(invertible, a.to_perm().is_some(), "{a}");
            }
        }
    }

    #[test]
    fn symplectic_permutations_match() {
        for s in Permutation::all(3) {
            let a = rho(&BrauerDiagram::from_perm(&s), 2, Flavor::Symplectic, D).unwrap();
            assert_eq!(a, rho_perm(&s, 2, D).unwrap());
        }
        // The contraction against the explicit formula for n = 2.
        let nn = 2;
        let c = rho(
            &BrauerDiagram::contraction(2, 0, 1),
            2 * nn,
            Flavor::Symplectic,
            D,
        )
        .unwrap();
        let m = 2 * nn;
        let mut expected = TensorOperator::zero(m, 2);
        let mut add = |a: (usize, usize), b: (usize, usize), v: i64| {
            // E_a ⊗ E_b as an operator on C^m ⊗ C^m
            let op = TensorOperator {
                n: 2,
                site_dim: m,
                cols: (0..m * m)
                    .map(|j| {
                        if j == a.1 * m + b.1 {
                            vec![(a.0 * m + b.0, q(v))]
                        } else {
                            vec![]
                        }
                    })
                    .collect(),
            };
            expected = expected.add(&op);
        };
        for i in 0..nn {
            for j in 0..nn {
                add((i, j), (i + nn, j + nn), 1);
                add((i + nn, j + nn), (i, j), 1);
                add((i, j + nn), (i + nn, j), -1);
                add((i + nn, j), (i, j + nn), -1);
            }
        }
        assert_eq!(c, expected);
    }

    #[test]
    fn casimir_identities() {
        for group in [LieGroup::U, LieGroup::SU, LieGroup::SO, LieGroup::Sp] {
            for n in 1..=3 {
                for nn in 1..=3 {
                    if group == LieGroup::Sp && nn > 2 && n > 2 {
                        continue;
                    }
                    let r = casimir_identity_check(group, n, nn, D).unwrap();
                    assert!(r.holds, "{group:?} n={n} N={nn}: {:?}", r.offending);
                    assert_eq!(r.max_deviation, 0.0);
                }
            }
        }
        let u = casimir_identity_check(LieGroup::U, 2, 2, D).unwrap();
        assert!(u.holds);
    }

    #[test]
    fn symplectic_casimir_on_two_sites() {
        // sp(1) = su(2): the Casimir is -2S(S+1), so -4 on the symmetric
        // square and 0 on the antisymmetric line.
        let c = casimir(LieGroup::Sp, 2, 1, D).unwrap();
        let p = rho_perm(&Permutation::transposition(2, 0, 1), 2, D).unwrap();
        let expected = TensorOperator::scalar(2, 2, q(-2)).sub(&p.scale(q(2)));
        assert_eq!(c, expected);
        // Doubling the Casimir breaks the balance beyond one site.
        let doubled = symmetric_laplacian(2, 2, D).unwrap().add(&c.scale(q(2)));
        let rhs = brauer_laplacian(2, 2, Flavor::Symplectic, D)
            .unwrap()
            .add(&TensorOperator::scalar(2, 2, q(-6)));
        assert!(doubled.first_difference(&rhs).is_some());
    }

    #[test]
    fn broken_identity_is_reported() {
        // Dropping the transposition sum must fail, and name an entry.
        let lhs = casimir(LieGroup::U, 2, 2, D)
            .unwrap()
            .scale(Rational64::new(1, 2));
        let rhs = TensorOperator::scalar(2, 2, Rational64::new(-3, 1));
        assert!(lhs.first_difference(&rhs).is_some());
    }

    #[test]
    fn laplacian_action() {
        let (lhs, rhs) = laplacian_action_at_identity(&Permutation::identity(2), 2, D).unwrap();
        assert_eq!(lhs, rhs);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let us: Vec<CMatrix> = (0..10)
            .map(|_| CMatrix::random_unitary(2, &mut rng))
            .collect();
        let swap = Permutation::transposition(2, 0, 1);
        assert!(laplacian_action_check(&swap, 2, &us, D).unwrap() < 1e-10);
        let us3: Vec<CMatrix> = (0..3)
            .map(|_| CMatrix::random_unitary(3, &mut rng))
            .collect();
        let one = Permutation::identity(1);
        assert!(laplacian_action_check(&one, 3, &us3, D).unwrap() < 1e-12);
        for s in Permutation::all(3) {
            assert!(laplacian_action_check(&s, 2, &us[..3], D).unwrap() < 1e-10);
        }
    }

    #[test]
    fn actions_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = CMatrix::random_unitary(2, &mut rng);
        let n = 3;
        let dim = 8;
        let tensor = |i: usize, j: usize| -> Complex64 {
            let (di, dj) = (digits(i, 2, n), digits(j, 2, n));
            (0..n).map(|k| u.get(di[k], dj[k])).product()
        };
        for s in Permutation::all(n) {
            let p = rho_perm(&s, 2, D).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    let left: Complex64 = (0..dim)
                        .map(|k| tensor(i, k) * (*p.entry(k, j).numer() as f64))
                        .sum();
                    let right: Complex64 = (0..dim)
                        .map(|k| (*p.entry(i, k).numer() as f64) * tensor(k, j))
                        .sum();
                    assert!((left - right).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn budgets() {
        assert!(rho_perm(&Permutation::identity(13), 2, D).is_err());
        assert!(casimir(LieGroup::U, 1, 100, 10_000).is_err());
    }
}

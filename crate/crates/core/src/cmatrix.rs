//! Small dense complex matrices: products, traces, the exponential of
//! anti-Hermitian generators and Haar/Gaussian samplers.
//!
//! Real and imaginary parts are stored as separate row-major planes so the
//! inner product loops vectorize.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            re: vec![0.0; dim * dim],
            im: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.set_identity();
        m
    }

    fn set_identity(&mut self) {
        self.re.fill(0.0);
        self.im.fill(0.0);
        for i in 0..self.dim {
            self.re[i * self.dim + i] = 1.0;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let p = i * self.dim + j;
        Complex64::new(self.re[p], self.im[p])
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        let p = i * self.dim + j;
        self.re[p] = z.re;
        self.im[p] = z.im;
    }

    pub fn scale(&mut self, c: f64) {
        self.re.iter_mut().for_each(|x| *x *= c);
        self.im.iter_mut().for_each(|x| *x *= c);
    }

    /// `out = self · other`.
    pub fn mul_into(&self, other: &Self, out: &mut Self) {
        let d = self.dim;
        debug_assert!(other.dim == d && out.dim == d);
        out.re.fill(0.0);
        out.im.fill(0.0);
        for i in 0..d {
            let (rr, ri) = (
                &mut out.re[i * d..(i + 1) * d],
                &mut out.im[i * d..(i + 1) * d],
            );
            for k in 0..d {
                let (x, y) = (self.re[i * d + k], self.im[i * d + k]);
                let (br, bi) = (&other.re[k * d..(k + 1) * d], &other.im[k * d..(k + 1) * d]);
                for j in 0..d {
                    rr[j] += x * br[j] - y * bi[j];
                    ri[j] += x * bi[j] + y * br[j];
                }
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        self.mul_into(other, &mut out);
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.re[j * d + i] = self.re[i * d + j];
                out.im[j * d + i] = -self.im[i * d + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `max |(A*A - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.get(i, j) - e).norm());
            }
        }
        worst
    }

    /// One Newton–Schulz step towards the unitary polar factor,
    /// `A ← A(3I - A*A)/2`.
    pub fn polar_correct(&mut self) {
        let mut p = self.adjoint().mul(self);
        p.scale(-0.5);
        for i in 0..self.dim {
            p.re[i * self.dim + i] += 1.5;
        }
        *self = self.mul(&p);
    }

    /// `Tr(A^m)` for `m = 0..=max`.
    pub fn power_traces(&self, max: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(Complex64::new(self.dim as f64, 0.0));
        let mut p = self.clone();
        for m in 1..=max {
            if m > 1 {
                p = p.mul(self);
            }
            out.push(p.trace());
        }
        out
    }

    /// Haar-distributed unitary from Gram–Schmidt on a complex Gaussian
    /// matrix.
    pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        for j in 0..dim {
            let (done, rest) = cols.split_at_mut(j);
            let col = &mut rest[0];
            for prev in done.iter() {
                let proj: Complex64 = prev.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
                for (z, v) in col.iter_mut().zip(prev) {
                    *z -= proj * v;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                m.set(i, j, *z);
            }
        }
        m
    }

    /// Standard Gaussian element of `u(N)` for the form `-Tr(XY)`, scaled by
    /// `scale`: diagonal `i·g`, and `(x+iy)/√2`, `(-x+iy)/√2` off the diagonal.
    pub fn fill_lie_gaussian<R: Rng>(&mut self, scale: f64, rng: &mut R) {
        let d = self.dim;
        let s = scale * std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            let g: f64 = rng.sample(StandardNormal);
            self.re[i * d + i] = 0.0;
            self.im[i * d + i] = scale * g;
            for j in i + 1..d {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                self.re[i * d + j] = s * x;
                self.im[i * d + j] = s * y;
                self.re[j * d + i] = -s * x;
                self.im[j * d + i] = s * y;
            }
        }
    }
}

/// Target accuracy of the matrix exponential.
const EXPM_TOL: f64 = 1e-14;

/// Largest diagonal Padé degree before scaling and squaring kicks in.
const MAX_PADE: usize = 6;

fn pade_coeffs(m: usize) -> Vec<f64> {
    // c_j = (2m-j)! m! / ((2m)! j! (m-j)!)
    let mut c = vec![1.0; m + 1];
    for j in 1..=m {
        c[j] = c[j - 1] * (m + 1 - j) as f64 / (j as f64 * (2 * m + 1 - j) as f64);
    }
    c
}

/// Leading error constant `(m!)² / ((2m)! (2m+1)!)` of the `[m/m]` Padé
/// approximant.
fn pade_error_constant(m: usize) -> f64 {
    let fact = |k: usize| (1..=k).map(|j| j as f64).product::<f64>();
    fact(m) * fact(m) / (fact(2 * m) * fact(2 * m + 1))
}

/// Scratch space for repeated `exp(X)` on matrices of one size.
#[derive(Clone, Debug)]
pub struct Expm {
    d: usize,
    /// Largest `‖X‖` handled by each Padé degree without scaling.
    theta: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    pow: Vec<CMatrix>,
    u: CMatrix,
    v: CMatrix,
    tmp: CMatrix,
}

impl Expm {
    pub fn new(d: usize) -> Self {
        let theta = (0..=MAX_PADE)
            .map(|m| {
                if m == 0 {
                    0.0
                } else {
                    (EXPM_TOL / pade_error_constant(m)).powf(1.0 / (2 * m + 1) as f64)
                }
            })
            .collect();
        Expm {
            d,
            theta,
            coeffs: (0..=MAX_PADE).map(pade_coeffs).collect(),
            pow: vec![CMatrix::zeros(d); MAX_PADE + 1],
            u: CMatrix::zeros(d),
            v: CMatrix::zeros(d),
            tmp: CMatrix::zeros(d),
        }
    }

    /// `out = exp(x)` by scaling and squaring around a diagonal Padé
    /// approximant whose degree is the least meeting the tolerance.
    pub fn compute(&mut self, x: &CMatrix, out: &mut CMatrix) {
        let d = self.d;
        assert_eq!(x.dim, d);
        // Column sums of |re| + |im| bound the 1-norm from above.
        let norm1 = (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| x.re[i * d + j].abs() + x.im[i * d + j].abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let mut squarings = 0i32;
        let mut theta = norm1;
        let degree = loop {
            if let Some(m) = (1..=MAX_PADE).find(|&m| theta <= self.theta[m]) {
                break m;
            }
            squarings += 1;
            theta /= 2.0;
        };
        let scale = 0.5f64.powi(squarings);

        self.pow[1].clone_from(x);
        self.pow[1].scale(scale);
        for k in 2..=degree {
            let (lo, hi) = self.pow.split_at_mut(k);
            lo[k - 1].mul_into(&lo[1], &mut hi[0]);
        }
        // u = odd part, v = even part
        self.u.re.fill(0.0);
        self.u.im.fill(0.0);
        self.v.set_identity();
        let c = &self.coeffs[degree];
        for (k, &ck) in c.iter().enumerate().skip(1) {
            let target = if k % 2 == 1 { &mut self.u } else { &mut self.v };
            let p = &self.pow[k];
            for (t, s) in target.re.iter_mut().zip(&p.re) {
                *t += ck * s;
            }
            for (t, s) in target.im.iter_mut().zip(&p.im) {
                *t += ck * s;
            }
        }
        // Solve (v - u) r = (v + u); v becomes the system, u the right side.
        for (a, b) in self.v.re.iter_mut().zip(self.u.re.iter_mut()) {
            let (va, ub) = (*a, *b);
            *a = va - ub;
            *b = va + ub;
        }
        for (a, b) in self.v.im.iter_mut().zip(self.u.im.iter_mut()) {
            let (va, ub) = (*a, *b);
            *a = va - ub;
            *b = va + ub;
        }
        solve_in_place(&mut self.v, &mut self.u);
        out.dim = d;
        out.clone_from(&self.u);
        for _ in 0..squarings {
            out.mul_into(out, &mut self.tmp);
            std::mem::swap(out, &mut self.tmp);
        }
    }
}

/// Rows `src` and `dst` of a `d`-column plane, the second mutable.
fn row_pair(plane: &mut [f64], src: usize, dst: usize, d: usize) -> (&[f64], &mut [f64]) {
    if src < dst {
        let (lo, hi) = plane.split_at_mut(dst * d);
        (&lo[src * d..(src + 1) * d], &mut hi[..d])
    } else {
        let (lo, hi) = plane.split_at_mut(src * d);
        (&hi[..d], &mut lo[dst * d..(dst + 1) * d])
    }
}

/// `row_dst -= f · row_src` over columns `from..d`.
fn eliminate(m: &mut CMatrix, src: usize, dst: usize, f: Complex64, from: usize) {
    let d = m.dim;
    let (sr, dr) = row_pair(&mut m.re, src, dst, d);
    let (si, di) = row_pair(&mut m.im, src, dst, d);
    let rows = dr[from..].iter_mut().zip(di[from..].iter_mut());
    for ((xr, xi), (&yr, &yi)) in rows.zip(sr[from..].iter().zip(&si[from..])) {
        *xr -= f.re * yr - f.im * yi;
        *xi -= f.re * yi + f.im * yr;
    }
}

/// Gaussian elimination without pivoting; overwrites `b` with `a⁻¹b`. Only
/// used on Padé denominators of scaled generators, which stay within 1 of
/// the identity in norm.
fn solve_in_place(a: &mut CMatrix, b: &mut CMatrix) {
    let d = a.dim;
    for col in 0..d {
        let inv = a.get(col, col).inv();
        for r in col + 1..d {
            let f = a.get(r, col) * inv;
            eliminate(a, col, r, f, col);
            eliminate(b, col, r, f, 0);
        }
    }
    for col in (0..d).rev() {
        let inv = a.get(col, col).inv();
        for k in 0..d {
            let z = b.get(col, k) * inv;
            b.set(col, k, z);
        }
        for r in 0..col {
            let f = a.get(r, col);
            eliminate(b, col, r, f, 0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pade_coefficients() {
        let c = pade_coeffs(3);
        let expected = [1.0, 0.5, 0.1, 1.0 / 120.0];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        // (3!)² / (6! 7!)
        assert!((pade_error_constant(3) - 36.0 / (720.0 * 5040.0)).abs() < 1e-20);
    }

    #[test]
    fn exponential_of_diagonal_and_rotation() {
        let mut e = Expm::new(2);
        let mut x = CMatrix::zeros(2);
        x.set(0, 0, Complex64::new(0.0, 0.3));
        x.set(1, 1, Complex64::new(-1.0, 0.0));
        let mut out = CMatrix::zeros(2);
        e.compute(&x, &mut out);
        assert!((out.get(0, 0) - Complex64::new(0.0, 0.3).exp()).norm() < 1e-14);
        assert!((out.get(1, 1) - (-1.0f64).exp()).norm() < 1e-14);
        // exp([[0, -a], [a, 0]]) is a rotation by a, here with scaling.
        let a = 5.0;
        let mut r = CMatrix::zeros(2);
        r.set(0, 1, Complex64::new(-a, 0.0));
        r.set(1, 0, Complex64::new(a, 0.0));
        e.compute(&r, &mut out);
        assert!((out.get(0, 0).re - a.cos()).abs() < 1e-13);
        assert!((out.get(1, 0).re - a.sin()).abs() < 1e-13);
    }

    #[test]
    fn exponential_matches_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for scale in [0.01, 0.4, 3.0] {
            let mut x = CMatrix::zeros(4);
            x.fill_lie_gaussian(scale, &mut rng);
            let mut taylor = CMatrix::identity(4);
            let mut term = CMatrix::identity(4);
            for k in 1..80 {
                term = term.mul(&x);
                term.scale(1.0 / k as f64);
                for i in 0..4 {
                    for j in 0..4 {
                        taylor.set(i, j, taylor.get(i, j) + term.get(i, j));
                    }
                }
            }
            let mut out = CMatrix::zeros(4);
            Expm::new(4).compute(&x, &mut out);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (out.get(i, j) - taylor.get(i, j)).norm() < 1e-12,
                        "scale {scale}"
                    );
                }
            }
            assert!(out.unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn lie_gaussian_is_anti_hermitian_with_unit_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = 3;
        let mut x = CMatrix::zeros(d);
        let mut acc = 0.0;
        let reps = 20_000;
        for _ in 0..reps {
            x.fill_lie_gaussian(1.0, &mut rng);
            for i in 0..d {
                for j in 0..d {
                    assert_eq!(x.get(i, j), -x.get(j, i).conj());
                }
            }
            acc += x.mul(&x).trace().re;
        }
        // E[X²] = -N·Id, so E[Tr X²] = -N².
        let mean = acc / reps as f64;
        assert!((mean + 9.0).abs() < 0.2, "{mean}");
    }

    #[test]
    fn polar_correction_reduces_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut u = CMatrix::random_unitary(3, &mut rng);
        u.scale(1.0 + 1e-6);
        let before = u.unitarity_defect();
        u.polar_correct();
        assert!(u.unitarity_defect() < before * 1e-4);
    }

    #[test]
    fn products_and_adjoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = CMatrix::random_unitary(3, &mut rng);
        let b = CMatrix::random_unitary(3, &mut rng);
        let ab = a.mul(&b);
        for i in 0..3 {
            for j in 0..3 {
                let direct: Complex64 = (0..3).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert!((ab.get(i, j) - direct).norm() < 1e-14);
            }
        }
        assert!(a.unitarity_defect() < 1e-14);
        assert_eq!(a.adjoint().adjoint(), a);
    }
}

//! Z₂-graded dense complex linear algebra.
//!
//! Basis flattening is row-major over tensor factors: the first factor is the
//! slowest index. Super tensor products use the Koszul rule
//! `(A⊗B)(a⊗b) = (-1)^{p(B)p(a)} Aa⊗Bb`, which at the level of entries reads
//! `(A⊗B)[(α,β),(γ,δ)] = (-1)^{(p(β)+p(δ))p(γ)} A[α,γ] B[β,δ]`.
//! The logarithm branch is principal: `Arg ∈ (-π, π]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default residual tolerance.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Default tolerance for comparing results of two different methods.
pub const CROSS_METHOD_TOL: f64 = 1e-8;
/// Relative threshold used by rank-revealing factorizations.
pub const RANK_TOL: f64 = 1e-8;

pub const BRANCH_CONVENTION: &str = "principal logarithm, Arg in (-pi, pi]";

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        Self::from_bit(self.bit() + 1)
    }

    pub fn combine(self, other: Parity) -> Self {
        Self::from_bit(self.bit() + other.bit())
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Sign rule used when forming super tensor products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignRule {
    /// `(-1)^{(p(β)+p(δ))p(γ)}`; the default everywhere.
    Koszul,
    /// `(-1)^{p(β)(p(α)+p(γ))}`. Conjugate to [`SignRule::Koszul`] by the
    /// diagonal matrix `(-1)^{p(α)p(β)}`.
    RowColumn,
}

/// Complex matrix on a Z₂-graded space.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    pub parities: Vec<Parity>,
    pub mat: CMat,
}

impl GradedMatrix {
    pub fn new(parities: Vec<Parity>, mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() != parities.len() {
            return Err(KzError::InvalidInput(format!(
                "graded matrix shape {}x{} does not match {} parities",
                mat.nrows(),
                mat.ncols(),
                parities.len()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KzError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { parities, mat })
    }

    pub fn identity(parities: Vec<Parity>) -> Self {
        let n = parities.len();
        Self {
            parities,
            mat: CMat::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    /// Parity of the operator, if homogeneous up to `tol`.
    pub fn homogeneous_parity(&self, tol: f64) -> Option<Parity> {
        let mut even = false;
        let mut odd = false;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.mat[(i, j)].norm() > tol {
                    if self.parities[i] == self.parities[j] {
                        even = true;
                    } else {
                        odd = true;
                    }
                }
            }
        }
        match (even, odd) {
            (true, true) => None,
            (false, true) => Some(Parity::Odd),
            _ => Some(Parity::Even),
        }
    }
}

pub fn tensor_parities(a: &[Parity], b: &[Parity]) -> Vec<Parity> {
    a.iter()
        .flat_map(|&p| b.iter().map(move |&q| p.combine(q)))
        .collect()
}

pub fn flatten_parities(factors: &[Vec<Parity>]) -> Vec<Parity> {
    factors
        .iter()
        .fold(vec![Parity::Even], |acc, f| tensor_parities(&acc, f))
}

/// Entrywise super Kronecker product of raw matrices.
pub fn super_kron_raw(a: &CMat, pa: &[Parity], b: &CMat, pb: &[Parity], rule: SignRule) -> CMat {
    let (da, db) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(da * db, da * db);
    for al in 0..da {
        for ga in 0..da {
            let x = a[(al, ga)];
            if x == C64::default() {
                continue;
            }
            for be in 0..db {
                for de in 0..db {
                    let y = b[(be, de)];
                    if y == C64::default() {
                        continue;
                    }
                    let odd = match rule {
                        SignRule::Koszul => (pb[be].bit() + pb[de].bit()) * pa[ga].bit(),
                        SignRule::RowColumn => pb[be].bit() * (pa[al].bit() + pa[ga].bit()),
                    };
                    let s = if odd % 2 == 0 { 1.0 } else { -1.0 };
                    out[(al * db + be, ga * db + de)] = x * y * s;
                }
            }
        }
    }
    out
}

pub fn super_kron(a: &GradedMatrix, b: &GradedMatrix) -> GradedMatrix {
    super_kron_with(a, b, SignRule::Koszul)
}

pub fn super_kron_with(a: &GradedMatrix, b: &GradedMatrix, rule: SignRule) -> GradedMatrix {
    GradedMatrix {
        parities: tensor_parities(&a.parities, &b.parities),
        mat: super_kron_raw(&a.mat, &a.parities, &b.mat, &b.parities, rule),
    }
}

/// Plain Kronecker product `a ⊗ b` (no signs).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Operator acting as `x` in factor `slot` (0-based) and as the identity elsewhere.
pub fn act_in_slot(x: &CMat, slot: usize, factors: &[Vec<Parity>]) -> Result<GradedMatrix> {
    if slot >= factors.len() {
        return Err(KzError::InvalidInput(format!(
            "slot {} out of range for {} factors",
            slot,
            factors.len()
        )));
    }
    if x.nrows() != factors[slot].len() || x.ncols() != factors[slot].len() {
        return Err(KzError::InvalidInput(format!(
            "operator of size {} does not fit slot of dimension {}",
            x.nrows(),
            factors[slot].len()
        )));
    }
    let left = flatten_parities(&factors[..slot]);
    let right = flatten_parities(&factors[slot + 1..]);
    let nr = right.len();
    let inner = kron(x, &CMat::identity(nr, nr));
    let inner_par = tensor_parities(&factors[slot], &right);
    let nl = left.len();
    let mat = super_kron_raw(&CMat::identity(nl, nl), &left, &inner, &inner_par, SignRule::Koszul);
    Ok(GradedMatrix {
        parities: tensor_parities(&left, &inner_par),
        mat,
    })
}

/// Diagonal matrix `D = diag((-1)^{p(a)p(b)})` intertwining the two sign rules.
pub fn sign_rule_intertwiner(pa: &[Parity], pb: &[Parity]) -> CMat {
    let d: Vec<C64> = pa
        .iter()
        .flat_map(|&p| pb.iter().map(move |&q| re(if p.bit() * q.bit() == 1 { -1.0 } else { 1.0 })))
        .collect();
    CMat::from_diagonal(&CVec::from_vec(d))
}

/// Graded flip `a⊗b ↦ (-1)^{p(a)p(b)} b⊗a` as a matrix from `A⊗B` to `B⊗A`.
pub fn graded_swap(pa: &[Parity], pb: &[Parity]) -> CMat {
    let (da, db) = (pa.len(), pb.len());
    let mut m = CMat::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            let s = if pa[i].bit() * pb[j].bit() == 1 { -1.0 } else { 1.0 };
            m[(j * da + i, i * db + j)] = re(s);
        }
    }
    m
}

pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular values in descending order with the matching right singular vectors.
fn sorted_svd(m: &CMat) -> (Vec<f64>, CMat) {
    let ncols = m.ncols();
    // pad so the thin factorization still returns a full right basis
    let padded = if m.nrows() < ncols {
        let mut p = CMat::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = CMat::zeros(ncols, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        for r in 0..ncols {
            v[(r, k)] = v_t[(i, r)].conj();
        }
    }
    (s, v)
}

fn rank_threshold(s: &[f64], tol: f64) -> f64 {
    tol * s.first().cloned().unwrap_or(0.0).max(1.0)
}

/// Numerical rank with threshold `tol·max(1, σ_max)`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let (s, _) = sorted_svd(m);
    let thr = rank_threshold(&s, tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let (s, v) = sorted_svd(m);
    let thr = rank_threshold(&s, tol);
    let r = s.iter().filter(|&&x| x > thr).count();
    v.columns(r, n - r).into_owned()
}

/// Orthonormal basis of the column span of `m`.
pub fn column_span(m: &CMat, tol: f64) -> CMat {
    if m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = tol * smax.max(1.0);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr)
        .collect();
    let mut out = CMat::zeros(m.nrows(), cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

pub fn hstack(cols: &[CVec], nrows: usize) -> CMat {
    let mut m = CMat::zeros(nrows, cols.len());
    for (k, v) in cols.iter().enumerate() {
        m.set_column(k, v);
    }
    m
}

pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| KzError::Singular("matrix is not invertible".into()))
}

pub fn condition_number(m: &CMat) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = m.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = m / re(2f64.powi(squarings as i32));
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=24 {
        term = &term * &a / re(k as f64);
        sum += &term;
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// One Jordan chain: `(M − λ)v⁽ⁱ⁾ = v⁽ⁱ⁻¹⁾`, `v⁽⁻¹⁾ = 0`; `vectors[0]` is an eigenvector.
#[derive(Clone, Debug)]
pub struct JordanChain {
    pub eigenvalue: C64,
    pub vectors: Vec<CVec>,
}

impl JordanChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct JordanData {
    pub blocks: Vec<JordanChain>,
}

impl JordanData {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Columns are the chain vectors in block order.
    pub fn basis(&self) -> CMat {
        let n = self.blocks.first().map(|b| b.vectors[0].len()).unwrap_or(0);
        let cols: Vec<CVec> = self
            .blocks
            .iter()
            .flat_map(|b| b.vectors.iter().cloned())
            .collect();
        hstack(&cols, n)
    }

    /// Jordan matrix in the chain basis (superdiagonal ones inside blocks).
    pub fn jordan_form(&self) -> CMat {
        let n = self.dim();
        let mut j = CMat::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            for i in 0..b.len() {
                j[(off + i, off + i)] = b.eigenvalue;
                if i + 1 < b.len() {
                    j[(off + i, off + i + 1)] = re(1.0);
                }
            }
            off += b.len();
        }
        j
    }

    /// Sorted (descending) chain lengths of the blocks at `lambda`.
    pub fn profile(&self, lambda: C64, tol: f64) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .blocks
            .iter()
            .filter(|b| (b.eigenvalue - lambda).norm() <= tol)
            .map(|b| b.len())
            .collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    pub fn max_chain_residual(&self, m: &CMat) -> f64 {
        let n = m.nrows();
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let shifted = m - CMat::identity(n, n) * b.eigenvalue;
            for (i, v) in b.vectors.iter().enumerate() {
                let lhs = &shifted * v;
                let r = if i == 0 { lhs.norm() } else { (lhs - &b.vectors[i - 1]).norm() };
                worst = worst.max(r / v.norm().max(1.0));
            }
        }
        worst
    }
}

/// Removes near-duplicate candidates.
pub fn dedup_eigenvalues(vals: &[C64], tol: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for &v in vals {
        if !out.iter().any(|&u| (u - v).norm() <= tol * (1.0 + v.norm())) {
            out.push(v);
        }
    }
    out
}

/// Jordan chains of `m` at analytically supplied eigenvalue candidates.
///
/// Candidates that are not eigenvalues contribute nothing; the call fails
/// unless the generalized eigenspaces of the candidates fill the whole space.
pub fn jordan_chains(m: &CMat, eigenvalues: &[C64], tol: f64) -> Result<JordanData> {
    let n = m.nrows();
    let mut data = JordanData::default();
    let scale = max_abs(m).max(1.0);
    for &lam in &dedup_eigenvalues(eigenvalues, 1e-9) {
        let b = m - CMat::identity(n, n) * lam;
        // kernels of increasing powers until they stabilize
        let mut kernels: Vec<CMat> = vec![CMat::zeros(n, 0)];
        let mut power = CMat::identity(n, n);
        loop {
            power = &b * &power;
            let k = null_space(&(&power / re(scale.powi(kernels.len() as i32))), tol);
            if k.ncols() == kernels.last().map(|x| x.ncols()).unwrap_or(0) || kernels.len() > n {
                break;
            }
            let full = k.ncols() == n;
            kernels.push(k);
            if full {
                break;
            }
        }
        let depth = kernels.len() - 1;
        let mut chains: Vec<(usize, CVec)> = Vec::new();
        for level in (1..=depth).rev() {
            let mut w: Vec<CVec> = kernels[level - 1].column_iter().map(|c| c.into_owned()).collect();
            for (top_level, top) in &chains {
                let mut v = top.clone();
                for _ in level..*top_level {
                    v = &b * v;
                }
                w.push(v);
            }
            let q = column_span(&hstack(&w, n), tol);
            let kl = &kernels[level];
            let proj = kl - &q * (q.adjoint() * kl);
            let need = kl.ncols() - q.ncols().min(kl.ncols());
            if need == 0 {
                continue;
            }
            let (_, v) = sorted_svd(&proj);
            for k in 0..need {
                let mut top = kl * v.column(k);
                let nrm = top.norm();
                top /= re(nrm);
                chains.push((level, top));
            }
        }
        for (len, top) in chains {
            let mut vectors = vec![top];
            for _ in 1..len {
                let next = &b * vectors.last().unwrap();
                vectors.push(next);
            }
            vectors.reverse();
            data.blocks.push(JordanChain {
                eigenvalue: lam,
                vectors,
            });
        }
    }
    if data.dim() != n {
        return Err(KzError::Inconsistent(format!(
            "supplied eigenvalues account for {} of {} dimensions",
            data.dim(),
            n
        )));
    }
    let basis = data.basis();
    if rank(&basis, tol) != n {
        return Err(KzError::Inconsistent("Jordan chains are not independent".into()));
    }
    let res = data.max_chain_residual(m);
    if res > 1e-6 * scale {
        return Err(KzError::Inconsistent(format!("chain residual {res:e}")));
    }
    Ok(data)
}

/// `exp(z·M)` assembled blockwise from Jordan data (finite sum on nilpotent parts).
pub fn exp_scaled(jordan: &JordanData, z: C64) -> Result<CMat> {
    let c = jordan.basis();
    let n = c.nrows();
    let mut x = CMat::zeros(n, n);
    let mut off = 0;
    for b in &jordan.blocks {
        let head = (z * b.eigenvalue).exp();
        for i in 0..b.len() {
            let mut coef = head;
            for k in 0..(b.len() - i) {
                x[(off + i, off + i + k)] = coef;
                coef = coef * z / re((k + 1) as f64);
            }
        }
        off += b.len();
    }
    Ok(&c * x * inverse(&c)?)
}

/// `x^{M/κ} = exp((ln x / κ)·M)` on the principal branch.
pub fn power_with_log(jordan: &JordanData, x: C64, kappa: C64) -> Result<CMat> {
    if x.norm() == 0.0 {
        return Err(KzError::InvalidInput("power_with_log at x = 0".into()));
    }
    exp_scaled(jordan, x.ln() / kappa)
}

/// Unique `v` with `(M − μ)v = b`.
pub fn solve_shifted(m: &CMat, mu: C64, b: &CVec, tol: f64) -> Result<CVec> {
    let n = m.nrows();
    let a = m - CMat::identity(n, n) * mu;
    let lu = a.clone().lu();
    let v = lu
        .solve(b)
        .ok_or_else(|| KzError::ExcludedParameter(format!("shifted system singular at mu = {mu}")))?;
    let res = (&a * &v - b).norm();
    if !res.is_finite() || res > tol * b.norm().max(1e-300) && res > tol {
        return Err(KzError::ExcludedParameter(format!(
            "shifted system ill-posed at mu = {mu} (residual {res:e})"
        )));
    }
    Ok(v)
}

/// Groups indices by equal diagonal values of all supplied diagonal matrices.
pub fn diagonal_sectors(diagonals: &[&CMat], tol: f64) -> Vec<Vec<usize>> {
    let n = diagonals.first().map(|d| d.nrows()).unwrap_or(0);
    let mut keys: Vec<Vec<C64>> = Vec::new();
    let mut sectors: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let key: Vec<C64> = diagonals.iter().map(|d| d[(i, i)]).collect();
        match keys
            .iter()
            .position(|k| k.iter().zip(&key).all(|(a, b)| (a - b).norm() <= tol))
        {
            Some(p) => sectors[p].push(i),
            None => {
                keys.push(key);
                sectors.push(vec![i]);
            }
        }
    }
    sectors
}

pub fn submatrix(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

pub fn is_diagonal(m: &CMat, tol: f64) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| re(x))))
    }

    fn gm(p: &[u8], m: CMat) -> GradedMatrix {
        GradedMatrix::new(p.iter().map(|&b| Parity::from_bit(b)).collect(), m).unwrap()
    }

    fn psi_minus() -> CMat {
        CMat::from_row_slice(2, 2, &[re(0.0), re(0.0), re(1.0), re(0.0)])
    }

    fn psi_plus(e: f64) -> CMat {
        CMat::from_row_slice(2, 2, &[re(0.0), re(e), re(0.0), re(0.0)])
    }

    #[test]
    fn identity_kron() {
        let i = GradedMatrix::identity(vec![Parity::Even, Parity::Odd]);
        let k = super_kron(&i, &i);
        assert_eq!(k.mat, CMat::identity(4, 4));
        assert_eq!(
            k.parities,
            vec![Parity::Even, Parity::Odd, Parity::Odd, Parity::Even]
        );
    }

    #[test]
    fn scalar_kron() {
        let a = gm(&[0, 1], CMat::identity(2, 2) * re(0.3));
        let b = gm(&[0, 1], CMat::identity(2, 2) * re(-0.7));
        assert!(max_abs(&(super_kron(&a, &b).mat - CMat::identity(4, 4) * re(-0.21))) < 1e-15);
    }

    #[test]
    fn odd_kron_signs() {
        // ψ⁻ ⊗ ψ⁺ : only entry ((1,0),(0,1)) = ψ⁻[1,0]·ψ⁺[0,1]; column index γ=0 is even
        let a = gm(&[0, 1], psi_minus());
        let b = gm(&[0, 1], psi_plus(2.0));
        let k = super_kron(&a, &b).mat;
        assert_eq!(k[(2, 1)], re(2.0));
        // ψ⁺ ⊗ ψ⁻ : entry ((0,1),(1,0)), γ=1 odd and β+δ odd → sign −1
        let k2 = super_kron(&b, &a).mat;
        assert_eq!(k2[(1, 2)], re(-2.0));
        assert_eq!(k2.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn slot_actions_anticommute() {
        let f = vec![vec![Parity::Even, Parity::Odd]; 2];
        let a = act_in_slot(&psi_minus(), 0, &f).unwrap().mat;
        let b = act_in_slot(&psi_plus(0.4), 1, &f).unwrap().mat;
        assert!(max_abs(&(&a * &b + &b * &a)) < 1e-15);
        let i2 = gm(&[0, 1], CMat::identity(2, 2));
        let p = gm(&[0, 1], psi_plus(0.4));
        assert_eq!(b, super_kron(&i2, &p).mat);
        assert!(act_in_slot(&psi_minus(), 2, &f).is_err());
    }

    #[test]
    fn sign_rules_are_conjugate() {
        let pa = vec![Parity::Odd, Parity::Even, Parity::Odd];
        let pb = vec![Parity::Even, Parity::Odd];
        let a = gm(&[1, 0, 1], CMat::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0)));
        let b = gm(&[0, 1], CMat::from_fn(2, 2, |i, j| c(1.0 + j as f64, i as f64)));
        let k = super_kron_with(&a, &b, SignRule::Koszul).mat;
        let r = super_kron_with(&a, &b, SignRule::RowColumn).mat;
        let d = sign_rule_intertwiner(&pa, &pb);
        assert!(max_abs(&(&d * &k * &d - r)) < 1e-14);
    }

    #[test]
    fn graded_swap_inverse() {
        let pa = vec![Parity::Even, Parity::Odd];
        let pb = vec![Parity::Odd, Parity::Even, Parity::Even, Parity::Odd];
        let s = graded_swap(&pa, &pb);
        let t = graded_swap(&pb, &pa);
        assert!(max_abs(&(t * s - CMat::identity(8, 8))) < 1e-15);
    }

    #[test]
    fn jordan_identity_two_chains() {
        let jd = jordan_chains(&CMat::identity(2, 2), &[re(1.0)], 1e-10).unwrap();
        assert_eq!(jd.profile(re(1.0), 1e-12), vec![1, 1]);
    }

    #[test]
    fn jordan_rejects_wrong_eigenvalues() {
        assert!(jordan_chains(&diag(&[1.0, 2.0]), &[re(1.0)], 1e-10).is_err());
    }

    #[test]
    fn jordan_nilpotent_block() {
        let mut m = CMat::zeros(4, 4);
        m[(0, 1)] = re(1.0);
        m[(1, 2)] = re(1.0);
        m[(3, 3)] = re(2.0);
        let jd = jordan_chains(&m, &[re(0.0), re(2.0)], 1e-10).unwrap();
        assert_eq!(jd.profile(re(0.0), 1e-12), vec![3]);
        assert_eq!(jd.profile(re(2.0), 1e-12), vec![1]);
        let c = jd.basis();
        let back = &c * jd.jordan_form() * inverse(&c).unwrap();
        assert!(max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn power_of_jordan_block() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = re(1.0);
        let jd = jordan_chains(&m, &[re(0.0)], 1e-10).unwrap();
        let kappa = re(1.3);
        let x = re(0.4);
        let p = power_with_log(&jd, x, kappa).unwrap();
        assert!((p[(0, 1)] - x.ln() / kappa).norm() < 1e-14);
        assert!((p[(0, 0)] - re(1.0)).norm() < 1e-14);
        assert!(power_with_log(&jd, re(0.0), kappa).is_err());
        let one = power_with_log(&jordan_chains(&diag(&[3.0, 3.0]), &[re(3.0)], 1e-10).unwrap(), re(1.0), kappa).unwrap();
        assert!(max_abs(&(one - CMat::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn exp_scaled_matches_expm() {
        let m = CMat::from_row_slice(3, 3, &[re(1.0), re(1.0), re(0.0), re(0.0), re(1.0), re(0.0), re(0.0), re(0.0), re(-0.5)]);
        let jd = jordan_chains(&m, &[re(1.0), re(-0.5)], 1e-10).unwrap();
        let z = c(0.2, 0.7);
        let a = exp_scaled(&jd, z).unwrap();
        let b = expm(&(&m * z));
        assert!(max_abs(&(a - b)) < 1e-13);
    }

    #[test]
    fn shifted_solves() {
        let b0 = CVec::from_vec(vec![c(1.0, 2.0), c(-1.0, 0.5)]);
        let v = solve_shifted(&CMat::zeros(2, 2), re(1.0), &b0, 1e-12).unwrap();
        assert!((v + &b0).norm() < 1e-15);
        let v = solve_shifted(&diag(&[2.0, 3.0]), re(1.0), &CVec::from_vec(vec![re(1.0), re(1.0)]), 1e-12).unwrap();
        assert!((v[1] - re(0.5)).norm() < 1e-15);
        assert!(matches!(
            solve_shifted(&diag(&[1.0, 3.0]), re(1.0), &b0, 1e-12),
            Err(KzError::ExcludedParameter(_))
        ));
    }

    #[test]
    fn sectors_group_equal_diagonals() {
        let d = diag(&[1.0, 2.0, 1.0, 3.0]);
        assert_eq!(diagonal_sectors(&[&d], 1e-12), vec![vec![0, 2], vec![1], vec![3]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graded(n: usize) -> impl Strategy<Value = GradedMatrix> {
            (
                proptest::collection::vec(0u8..2, n),
                proptest::collection::vec(-2.0f64..2.0, 2 * n * n),
            )
                .prop_map(move |(p, v)| {
                    let m = CMat::from_fn(n, n, |i, j| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
                    GradedMatrix::new(p.into_iter().map(Parity::from_bit).collect(), m).unwrap()
                })
        }

        proptest! {
            #[test]
            fn kron_associative(a in graded(2), b in graded(3), cc in graded(2)) {
                let l = super_kron(&super_kron(&a, &b), &cc);
                let r = super_kron(&a, &super_kron(&b, &cc));
                prop_assert!(max_abs(&(l.mat - r.mat)) < 1e-12);
                prop_assert_eq!(l.parities, r.parities);
            }

            #[test]
            fn even_kron_is_plain(v in proptest::collection::vec(-2.0f64..2.0, 8), w in proptest::collection::vec(-2.0f64..2.0, 8)) {
                // block-diagonal (even) operators on a (1|1) space
                let a = gm(&[0, 1], CMat::from_row_slice(2, 2, &[c(v[0], v[1]), re(0.0), re(0.0), c(v[2], v[3])]));
                let b = gm(&[0, 1], CMat::from_row_slice(2, 2, &[c(w[0], w[1]), re(0.0), re(0.0), c(w[2], w[3])]));
                prop_assert!(max_abs(&(super_kron(&a, &b).mat - kron(&a.mat, &b.mat))) < 1e-14);
            }

            #[test]
            fn power_is_multiplicative(x1 in 0.1f64..2.0, x2 in 0.1f64..2.0, lam in -1.0f64..1.0) {
                let mut m = CMat::zeros(3, 3);
                m[(0, 0)] = re(lam); m[(1, 1)] = re(lam); m[(0, 1)] = re(1.0); m[(2, 2)] = re(0.3);
                let jd = jordan_chains(&m, &[re(lam), re(0.3)], 1e-10).unwrap();
                let k = c(1.1, 0.2);
                let a = power_with_log(&jd, re(x1), k).unwrap() * power_with_log(&jd, re(x2), k).unwrap();
                let b = power_with_log(&jd, re(x1 * x2), k).unwrap();
                prop_assert!(max_abs(&(a - b)) < 1e-11);
            }
        }
    }
}

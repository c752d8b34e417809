//! The three-point KZ equation `κ f' = (Ω₁₂/x + Ω₂₃/(x−1)) f`.
//!
//! Everything is computed sector by sector: `Δ(E)` and `Δ(N)` are diagonal in
//! the product basis and every `Ω_ij` preserves their joint eigenspaces.

use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::gl11_modules::{tensor_casimir, Kind, ModuleRep, ModuleSpec};
use crate::superlinalg::{
    condition_number, dedup_eigenvalues, diagonal_sectors, exp_scaled, graded_swap, inverse,
    jordan_chains, max_abs, power_with_log, re, submatrix, CMat, CVec, JordanChain, JordanData,
    Parity, C64, RANK_TOL,
};
use crate::tensor_ring::{tensor_all, LABEL_TOL};

/// Tail size at which the adaptive series stops.
pub const SERIES_TOL: f64 = 1e-13;
/// Default cap on the series order.
pub const DEFAULT_ORDER_CAP: usize = 60;
/// Point where the two frames are compared.
pub const MATCH_POINT: f64 = 0.5;
/// Distance to a positive integer below which `(λ'−λ)/κ` counts as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;

/// `δ^{αβ} = e₁e₂ + e₁(n₂+β/2) + e₂(n₁+α/2)`.
pub fn delta(x: &ModuleSpec, y: &ModuleSpec, alpha: f64, beta: f64) -> C64 {
    x.e * y.e + x.e * (y.n + beta / 2.0) + y.e * (x.n + alpha / 2.0)
}

/// Eigenvalues of `Ω₁₂` on `x ⊗ y` with their Jordan profiles (descending chain lengths).
pub fn spectral_table(x: &ModuleSpec, y: &ModuleSpec) -> Vec<(C64, Vec<usize>)> {
    use Kind::*;
    let z = C64::default();
    match (x.kind, y.kind) {
        (Typical, Typical) => {
            if (x.e + y.e).norm() <= LABEL_TOL {
                vec![(x.e * (y.n - x.n) - x.e * x.e, vec![2, 1, 1])]
            } else {
                vec![(delta(x, y, 1.0, 1.0), vec![1, 1]), (delta(x, y, -1.0, -1.0), vec![1, 1])]
            }
        }
        (Typical, Projective) => vec![
            (x.e * (y.n - 1.0), vec![1, 1]),
            (x.e * y.n, vec![2, 2]),
            (x.e * (y.n + 1.0), vec![1, 1]),
        ],
        (Projective, Typical) => vec![
            (y.e * (x.n - 1.0), vec![1, 1]),
            (y.e * x.n, vec![2, 2]),
            (y.e * (x.n + 1.0), vec![1, 1]),
        ],
        (Projective, Projective) => vec![(z, vec![3, 2, 2, 2, 2, 1, 1, 1, 1, 1])],
        (Typical, Atypical) => vec![(x.e * y.n, vec![1, 1])],
        (Atypical, Typical) => vec![(y.e * x.n, vec![1, 1])],
        (Projective, Atypical) | (Atypical, Projective) => vec![(z, vec![1, 1, 1, 1])],
        (Atypical, Atypical) => vec![(z, vec![1])],
    }
}

/// Distinct eigenvalues of `Ω₁₂` on `x ⊗ y`.
pub fn casimir_spectrum(x: &ModuleSpec, y: &ModuleSpec) -> Vec<C64> {
    spectral_table(x, y).into_iter().map(|(l, _)| l).collect()
}

/// Candidate eigenvalues of `Ω` between two possibly composite modules.
pub fn omega_eigenvalues(a: &ModuleRep, b: &ModuleRep) -> Vec<C64> {
    let all: Vec<C64> = a
        .summands
        .iter()
        .flat_map(|x| b.summands.iter().flat_map(move |y| casimir_spectrum(x, y)))
        .collect();
    dedup_eigenvalues(&all, 1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Point {
    Zero,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pair {
    Omega12,
    Omega23,
}

/// Restriction of the system to one weight sector.
#[derive(Clone, Debug)]
pub struct Sector {
    pub indices: Vec<usize>,
    pub omega12: CMat,
    pub omega23: CMat,
    pub chains12: JordanData,
    pub chains23: JordanData,
}

impl Sector {
    fn split(&self, point: Point) -> (&CMat, &CMat, &JordanData) {
        match point {
            Point::Zero => (&self.omega12, &self.omega23, &self.chains12),
            Point::One => (&self.omega23, &self.omega12, &self.chains23),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KzSystem {
    pub factors: Vec<ModuleRep>,
    pub kappa: C64,
    pub parities: Vec<Parity>,
    /// Diagonal action on the triple product.
    pub total: ModuleRep,
    pub omega12: CMat,
    pub omega23: CMat,
    pub omega13: CMat,
    pub sectors: Vec<Sector>,
}

fn sectorwise_chains(m: &CMat, sectors: &[Vec<usize>], candidates: &[C64]) -> Result<Vec<JordanData>> {
    sectors
        .iter()
        .map(|idx| jordan_chains(&submatrix(m, idx), candidates, RANK_TOL))
        .collect()
}

fn embed(v: &CVec, idx: &[usize], dim: usize) -> CVec {
    let mut out = CVec::zeros(dim);
    for (k, &i) in idx.iter().enumerate() {
        out[i] = v[k];
    }
    out
}

fn embed_data(parts: &[(&[usize], &JordanData)], dim: usize) -> JordanData {
    let mut out = JordanData::default();
    for (idx, jd) in parts {
        for b in &jd.blocks {
            out.blocks.push(JordanChain {
                eigenvalue: b.eigenvalue,
                vectors: b.vectors.iter().map(|v| embed(v, idx, dim)).collect(),
            });
        }
    }
    out
}

fn place_block(target: &mut CMat, block: &CMat, idx: &[usize]) {
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            target[(i, j)] = block[(a, b)];
        }
    }
}

impl KzSystem {
    pub fn new(factors: [&ModuleRep; 3], kappa: C64) -> Result<Self> {
        if kappa.norm() == 0.0 {
            return Err(KzError::InvalidInput("kappa must be nonzero".into()));
        }
        let total = tensor_all(&factors)?;
        let omega12 = tensor_casimir(&factors, 0, 1)?.mat;
        let omega23 = tensor_casimir(&factors, 1, 2)?.mat;
        let omega13 = tensor_casimir(&factors, 0, 2)?.mat;
        let groups = diagonal_sectors(&[&total.e, &total.n], 1e-9);
        let c12 = omega_eigenvalues(factors[0], factors[1]);
        let c23 = omega_eigenvalues(factors[1], factors[2]);
        let j12 = sectorwise_chains(&omega12, &groups, &c12)?;
        let j23 = sectorwise_chains(&omega23, &groups, &c23)?;
        let sectors = groups
            .into_iter()
            .zip(j12.into_iter().zip(j23))
            .map(|(idx, (chains12, chains23))| Sector {
                omega12: submatrix(&omega12, &idx),
                omega23: submatrix(&omega23, &idx),
                indices: idx,
                chains12,
                chains23,
            })
            .collect();
        Ok(KzSystem {
            factors: factors.iter().map(|f| (*f).clone()).collect(),
            kappa,
            parities: total.parities.clone(),
            total,
            omega12,
            omega23,
            omega13,
            sectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    /// `‖[Ω₁₂+Ω₁₃+Ω₂₃, Ω₁₂]‖ + ‖[…, Ω₂₃]‖`, zero for a flat connection.
    pub fn flatness_residual(&self) -> f64 {
        let s = &self.omega12 + &self.omega13 + &self.omega23;
        let c = |a: &CMat| max_abs(&(&s * a - a * &s));
        c(&self.omega12) + c(&self.omega23)
    }

    /// Largest `‖Ω Δ(x) − Δ(x) Ω‖` over generators and the three pair Casimirs.
    pub fn equivariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for om in [&self.omega12, &self.omega23, &self.omega13] {
            for (_, g) in self.total.generators() {
                worst = worst.max(max_abs(&(om * g - g * om)));
            }
        }
        worst
    }

    /// Jordan data of `Ω₁₂` or `Ω₂₃` in the full space.
    pub fn spectral_data(&self, which: Pair) -> JordanData {
        let parts: Vec<(&[usize], &JordanData)> = self
            .sectors
            .iter()
            .map(|s| {
                let jd = match which {
                    Pair::Omega12 => &s.chains12,
                    Pair::Omega23 => &s.chains23,
                };
                (s.indices.as_slice(), jd)
            })
            .collect();
        embed_data(&parts, self.dim())
    }

    fn sector_of(&self, v: &CVec) -> Result<usize> {
        let i = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .ok_or_else(|| KzError::InvalidInput("empty vector".into()))?;
        let s = self
            .sectors
            .iter()
            .position(|s| s.indices.contains(&i))
            .ok_or_else(|| KzError::InvalidInput("vector outside the tensor space".into()))?;
        let outside: f64 = v
            .iter()
            .enumerate()
            .filter(|(j, _)| !self.sectors[s].indices.contains(j))
            .map(|(_, x)| x.norm())
            .fold(0.0, f64::max);
        if outside > 1e-9 * v.norm() {
            return Err(KzError::InvalidInput("chain is not contained in one weight sector".into()));
        }
        Ok(s)
    }
}

/// Truncated series `u^{λ/κ} Σ_m Σ_k c_{m,k} uᵐ (ln u)ᵏ` with `u = x` or `u = 1 − x`.
#[derive(Clone, Debug)]
pub struct AsymptoticSolution {
    pub point: Point,
    pub exponent: C64,
    pub kappa: C64,
    pub log_degree: usize,
    /// `coeffs[m][k]`.
    pub coeffs: Vec<Vec<CVec>>,
}

impl AsymptoticSolution {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn local(&self, x: C64) -> C64 {
        match self.point {
            Point::Zero => x,
            Point::One => re(1.0) - x,
        }
    }

    /// `|u^{λ/κ}|`, the scale used for residuals.
    pub fn prefactor(&self, x: C64) -> f64 {
        (self.local(x).ln() * self.exponent / self.kappa).exp().norm()
    }

    pub fn eval(&self, x: C64) -> CVec {
        let u = self.local(x);
        let l = u.ln();
        let n = self.coeffs[0][0].len();
        let mut acc = CVec::zeros(n);
        let mut um = re(1.0);
        for row in &self.coeffs {
            let mut lk = re(1.0);
            for c in row {
                acc += c * (um * lk);
                lk *= l;
            }
            um *= u;
        }
        acc * (l * self.exponent / self.kappa).exp()
    }

    /// `df/dx`.
    pub fn derivative(&self, x: C64) -> CVec {
        let u = self.local(x);
        let l = u.ln();
        let mu = self.exponent / self.kappa;
        let n = self.coeffs[0][0].len();
        let mut acc = CVec::zeros(n);
        let mut um = re(1.0);
        for (m, row) in self.coeffs.iter().enumerate() {
            let mut lk = re(1.0);
            let mut lk1 = re(0.0);
            for (k, c) in row.iter().enumerate() {
                acc += c * (um * ((mu + m as f64) * lk + lk1 * k as f64));
                lk1 = lk;
                lk *= l;
            }
            um *= u;
        }
        let d = acc * ((l * mu).exp() / u);
        match self.point {
            Point::Zero => d,
            Point::One => -d,
        }
    }
}

/// KZ residual `‖κf' − (Ω₁₂/x + Ω₂₃/(x−1))f‖` scaled by the prefactor `|u^{λ/κ}|`.
pub fn kz_residual(sys: &KzSystem, sol: &AsymptoticSolution, x: C64) -> f64 {
    let f = sol.eval(x);
    let r = sol.derivative(x) * sys.kappa - (&sys.omega12 * &f) / x - (&sys.omega23 * &f) / (x - 1.0);
    r.norm() / sol.prefactor(x).max(1e-300)
}

/// How far to carry a series.
#[derive(Clone, Copy, Debug)]
pub enum Order {
    Fixed(usize),
    /// Stop once two consecutive terms at `u` fall below [`SERIES_TOL`], up to a cap.
    Adaptive { u: f64, cap: usize },
}

impl Order {
    fn cap(self) -> usize {
        match self {
            Order::Fixed(m) => m,
            Order::Adaptive { cap, .. } => cap,
        }
    }
}

fn check_resonance(lambda: C64, spectrum: &[C64], kappa: C64) -> Result<()> {
    for &mu in spectrum {
        let q = (mu - lambda) / kappa;
        let k = q.re.round();
        if k >= 1.0 && (q - re(k)).norm() < RESONANCE_TOL {
            return Err(KzError::ExcludedParameter(format!(
                "resonant exponents: {mu} - {lambda} = {k} kappa"
            )));
        }
    }
    Ok(())
}

/// Series for the solution led by `chain[i]`, in sector coordinates.
///
/// `a` is the Casimir with the singularity at `u = 0`, `b` the one at `u = 1`.
fn chain_series(a: &CMat, b: &CMat, chain: &JordanChain, i: usize, kappa: C64, order: Order) -> Result<Vec<Vec<CVec>>> {
    let n = a.nrows();
    let lambda = chain.eigenvalue;
    let mut first = Vec::with_capacity(i + 1);
    let mut fact = re(1.0);
    for k in 0..=i {
        if k > 0 {
            fact *= kappa * k as f64;
        }
        first.push(&chain.vectors[i - k] / fact);
    }
    let lead = first.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut coeffs = vec![first];
    let mut partial: Vec<CVec> = vec![CVec::zeros(n); i + 1];
    let mut quiet = 0;
    for m in 1..=order.cap() {
        for (p, c) in partial.iter_mut().zip(&coeffs[m - 1]) {
            *p += c;
        }
        let shift = lambda + kappa * m as f64;
        let shifted = a - CMat::identity(n, n) * shift;
        let lu = shifted.clone().lu();
        let mut row = vec![CVec::zeros(n); i + 1];
        for k in (0..=i).rev() {
            let mut rhs = b * &partial[k];
            if k < i {
                rhs += &row[k + 1] * (kappa * (k + 1) as f64);
            }
            let v = lu.solve(&rhs).ok_or_else(|| {
                KzError::ExcludedParameter(format!("shifted system singular at {shift}"))
            })?;
            let res = (&shifted * &v - &rhs).norm();
            if !res.is_finite() || res > 1e-8 * rhs.norm().max(1.0) {
                return Err(KzError::ExcludedParameter(format!(
                    "shifted system ill-conditioned at {shift}"
                )));
            }
            row[k] = v;
        }
        coeffs.push(row);
        if let Order::Adaptive { u, .. } = order {
            let lf = u.ln().abs().max(1.0).powi(i as i32);
            let tail = coeffs[m].iter().map(|v| v.norm()).fold(0.0, f64::max) * u.powi(m as i32) * lf;
            quiet = if tail < SERIES_TOL * lead { quiet + 1 } else { 0 };
            if quiet >= 2 {
                break;
            }
        }
    }
    Ok(coeffs)
}

fn present_eigenvalues(jd: &JordanData) -> Vec<C64> {
    dedup_eigenvalues(&jd.blocks.iter().map(|b| b.eigenvalue).collect::<Vec<_>>(), 1e-12)
}

fn series_at(sys: &KzSystem, point: Point, chain: &JordanChain, order: usize) -> Result<Vec<AsymptoticSolution>> {
    let s = sys.sector_of(&chain.vectors[0])?;
    let sector = &sys.sectors[s];
    let (a, b, jd) = sector.split(point);
    check_resonance(chain.eigenvalue, &present_eigenvalues(jd), sys.kappa)?;
    let local = JordanChain {
        eigenvalue: chain.eigenvalue,
        vectors: chain
            .vectors
            .iter()
            .map(|v| CVec::from_iterator(sector.indices.len(), sector.indices.iter().map(|&i| v[i])))
            .collect(),
    };
    (0..chain.len())
        .map(|i| {
            let coeffs = chain_series(a, b, &local, i, sys.kappa, Order::Fixed(order))?;
            Ok(AsymptoticSolution {
                point,
                exponent: chain.eigenvalue,
                kappa: sys.kappa,
                log_degree: i,
                coeffs: coeffs
                    .into_iter()
                    .map(|row| row.iter().map(|v| embed(v, &sector.indices, sys.dim())).collect())
                    .collect(),
            })
        })
        .collect()
}

/// Solutions at `x = 0`, one per vector of a Jordan chain of `Ω₁₂`.
pub fn series_at0(sys: &KzSystem, chain: &JordanChain, order: usize) -> Result<Vec<AsymptoticSolution>> {
    series_at(sys, Point::Zero, chain, order)
}

/// Solutions at `x = 1`, one per vector of a Jordan chain of `Ω₂₃`; leading factor `(1−x)^{λ/κ}`.
pub fn series_at1(sys: &KzSystem, chain: &JordanChain, order: usize) -> Result<Vec<AsymptoticSolution>> {
    series_at(sys, Point::One, chain, order)
}

/// All asymptotic solutions at one point, in the order of the chain basis.
pub fn frame(sys: &KzSystem, point: Point, order: usize) -> Result<Vec<AsymptoticSolution>> {
    let which = match point {
        Point::Zero => Pair::Omega12,
        Point::One => Pair::Omega23,
    };
    let mut out = Vec::new();
    for chain in &sys.spectral_data(which).blocks {
        out.extend(series_at(sys, point, chain, order)?);
    }
    Ok(out)
}

/// Sector frame: columns are the solutions at `u` for each chain vector, plus the chain basis.
struct SectorFrame {
    values: CMat,
    basis: CMat,
    order: usize,
}

fn sector_frame(sector: &Sector, point: Point, kappa: C64, x: f64, order: Order) -> Result<SectorFrame> {
    let (a, b, jd) = sector.split(point);
    let spectrum = present_eigenvalues(jd);
    let n = a.nrows();
    let u = match point {
        Point::Zero => x,
        Point::One => 1.0 - x,
    };
    let mut values = CMat::zeros(n, n);
    let mut col = 0;
    let mut used = 0;
    for chain in &jd.blocks {
        check_resonance(chain.eigenvalue, &spectrum, kappa)?;
        for i in 0..chain.len() {
            let coeffs = chain_series(a, b, chain, i, kappa, order)?;
            used = used.max(coeffs.len() - 1);
            let sol = AsymptoticSolution {
                point: Point::Zero,
                exponent: chain.eigenvalue,
                kappa,
                log_degree: i,
                coeffs,
            };
            values.set_column(col, &sol.eval(re(u)));
            col += 1;
        }
    }
    Ok(SectorFrame {
        values,
        basis: jd.basis(),
        order: used,
    })
}

#[derive(Clone, Debug)]
pub struct Associator {
    pub matrix: CMat,
    /// Largest series order actually used.
    pub order: usize,
    /// Worst condition numbers of the frame matrices at the matching point.
    pub frame_condition: (f64, f64),
}

/// Associator `α = φ₁⁻¹φ₀` from matching the two series frames at `x = 1/2`.
pub fn associator(sys: &KzSystem, order_cap: usize) -> Result<Associator> {
    let n = sys.dim();
    let mut alpha = CMat::zeros(n, n);
    let mut order = 0;
    let mut cond: (f64, f64) = (1.0, 1.0);
    let policy = Order::Adaptive {
        u: MATCH_POINT,
        cap: order_cap,
    };
    for s in &sys.sectors {
        let f0 = sector_frame(s, Point::Zero, sys.kappa, MATCH_POINT, policy)?;
        let f1 = sector_frame(s, Point::One, sys.kappa, MATCH_POINT, policy)?;
        order = order.max(f0.order).max(f1.order);
        cond.0 = cond.0.max(condition_number(&f0.values));
        cond.1 = cond.1.max(condition_number(&f1.values));
        let block = &f1.basis * inverse(&f1.values)? * &f0.values * inverse(&f0.basis)?;
        place_block(&mut alpha, &block, &s.indices);
    }
    Ok(Associator {
        matrix: alpha,
        order,
        frame_condition: cond,
    })
}

#[derive(Clone, Debug)]
pub struct PexpAssociator {
    /// `t^{−Ω₂₃/κ} · Pexp · t^{Ω₁₂/κ}`.
    pub bare: CMat,
    /// Same transport with the endpoint factors replaced by the series frames.
    pub corrected: CMat,
}

/// Transport of the KZ equation from `x = t` to `x = 1 − t`, RK4 in `s = ln(x/(1−x))`.
fn transport(a12: &CMat, a23: &CMat, kappa: C64, t: f64, steps: usize) -> CMat {
    let n = a12.nrows();
    let s0 = (t / (1.0 - t)).ln();
    let h = -2.0 * s0 / steps as f64;
    let gen = |s: f64| {
        let z = 1.0 / (1.0 + (-s).exp());
        (a12 * re(1.0 - z) - a23 * re(z)) / kappa
    };
    let mut u = CMat::identity(n, n);
    let hc = re(h);
    for k in 0..steps {
        let s = s0 + h * k as f64;
        let g0 = gen(s);
        let g1 = gen(s + h / 2.0);
        let g2 = gen(s + h);
        let k1 = &g0 * &u;
        let k2 = &g1 * (&u + &k1 * (hc / 2.0));
        let k3 = &g1 * (&u + &k2 * (hc / 2.0));
        let k4 = &g2 * (&u + &k3 * hc);
        u += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * (hc / 6.0);
    }
    u
}

/// Associator from the regularized path-ordered exponential over `[t, 1−t]`.
pub fn associator_pexp(sys: &KzSystem, t: f64, steps: usize) -> Result<PexpAssociator> {
    if !(t > 0.0 && t < 0.5) || steps == 0 {
        return Err(KzError::InvalidInput("need 0 < t < 1/2 and steps > 0".into()));
    }
    let n = sys.dim();
    let mut bare = CMat::zeros(n, n);
    let mut corrected = CMat::zeros(n, n);
    let policy = Order::Adaptive {
        u: t,
        cap: DEFAULT_ORDER_CAP,
    };
    for s in &sys.sectors {
        let u = transport(&s.omega12, &s.omega23, sys.kappa, t, steps);
        let right = power_with_log(&s.chains12, re(t), sys.kappa)?;
        let left = power_with_log(&s.chains23, re(t), -sys.kappa)?;
        place_block(&mut bare, &(&left * &u * &right), &s.indices);
        let f0 = sector_frame(s, Point::Zero, sys.kappa, t, policy)?;
        let f1 = sector_frame(s, Point::One, sys.kappa, 1.0 - t, policy)?;
        let block = &f1.basis * inverse(&f1.values)? * &u * &f0.values * inverse(&f0.basis)?;
        place_block(&mut corrected, &block, &s.indices);
    }
    Ok(PexpAssociator { bare, corrected })
}

/// Jordan data of `Ω` on `a ⊗ b`, computed per weight sector.
pub fn pair_spectral_data(a: &ModuleRep, b: &ModuleRep) -> Result<(CMat, JordanData)> {
    let omega = tensor_casimir(&[a, b], 0, 1)?.mat;
    let total = tensor_all(&[a, b])?;
    let groups = diagonal_sectors(&[&total.e, &total.n], 1e-9);
    let candidates = omega_eigenvalues(a, b);
    let parts = sectorwise_chains(&omega, &groups, &candidates)?;
    let refs: Vec<(&[usize], &JordanData)> = groups.iter().map(|g| g.as_slice()).zip(parts.iter()).collect();
    Ok((omega.clone(), embed_data(&refs, omega.nrows())))
}

/// `σ^± = P·exp(±iπΩ/κ)`: `a ⊗ b → b ⊗ a` with `P` the graded swap.
pub fn braiding(a: &ModuleRep, b: &ModuleRep, kappa: C64, sign: f64) -> Result<CMat> {
    let (_, jd) = pair_spectral_data(a, b)?;
    let z = C64::new(0.0, sign * std::f64::consts::PI) / kappa;
    Ok(graded_swap(&a.parities, &b.parities) * exp_scaled(&jd, z)?)
}

/// `exp(2πiΩ₁₂/κ)`, the loop around `x = 0`.
pub fn monodromy0(sys: &KzSystem) -> Result<CMat> {
    let z = C64::new(0.0, 2.0 * std::f64::consts::PI) / sys.kappa;
    exp_scaled(&sys.spectral_data(Pair::Omega12), z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl11_modules::build_module;
    use crate::superlinalg::c;

    fn rep(s: &str) -> ModuleRep {
        build_module(&s.parse().unwrap()).unwrap()
    }

    fn sys(a: &str, b: &str, c3: &str, kappa: f64) -> KzSystem {
        let (x, y, z) = (rep(a), rep(b), rep(c3));
        KzSystem::new([&x, &y, &z], re(kappa)).unwrap()
    }

    fn profiles_match(s: &KzSystem, x: &str, y: &str) {
        let jd = s.spectral_data(Pair::Omega12);
        let table = spectral_table(&x.parse().unwrap(), &y.parse().unwrap());
        let mult = s.dim() / (table.iter().map(|(_, p)| p.iter().sum::<usize>()).sum::<usize>());
        for (lam, prof) in table {
            let mut want: Vec<usize> = prof.iter().flat_map(|&p| std::iter::repeat_n(p, mult)).collect();
            want.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(jd.profile(lam, 1e-9), want, "{x} {y} at {lam}");
        }
    }

    #[test]
    fn table_profiles() {
        for (x, y) in [
            ("T:0.37,0.2", "T:0.21,-0.5"),
            ("T:0.37,0.2", "T:-0.37,0.7"),
            ("T:0.37,0.2", "P:0.4"),
            ("P:0.4", "T:0.29,1"),
            ("P:0.1", "P:-0.3"),
            ("T:0.3,0.1", "A:0.6"),
            ("A:0.6", "P:0.2"),
            ("A:0.6", "A:0.2"),
        ] {
            profiles_match(&sys(x, y, "A:0", 1.3), x, y);
        }
    }

    #[test]
    fn flat_and_equivariant() {
        let s = sys("T:0.37,0.2", "P:0.4", "T:-0.13,1", 1.0);
        assert!(s.flatness_residual() < 1e-12);
        assert!(s.equivariance_residual() < 1e-12);
    }

    #[test]
    fn series_residuals() {
        let s = sys("T:0.37,0.2", "T:-0.37,0.7", "P:0.1", 1.1);
        for point in [Point::Zero, Point::One] {
            let (x, far) = if point == Point::Zero { (1e-3, 0.3) } else { (1.0 - 1e-3, 0.7) };
            for sol in frame(&s, point, 20).unwrap() {
                assert!(kz_residual(&s, &sol, re(x)) < 1e-10, "{point:?} {}", kz_residual(&s, &sol, re(x)));
                assert!(kz_residual(&s, &sol, re(far)) < 1e-6);
            }
        }
    }

    #[test]
    fn first_recursion_step() {
        let s = sys("T:0.37,0.2", "T:0.21,-0.5", "T:0.13,1", 1.0);
        let chain = &s.spectral_data(Pair::Omega12).blocks[0];
        let sol = &series_at0(&s, chain, 3).unwrap()[0];
        let n = s.dim();
        let a = &s.omega12 - CMat::identity(n, n) * (chain.eigenvalue + s.kappa);
        let v1 = a.lu().solve(&(&s.omega23 * &chain.vectors[0])).unwrap();
        assert!((&sol.coeffs[1][0] - v1).norm() < 1e-12);
    }

    #[test]
    fn atypical_triples_are_trivial() {
        let s = sys("A:0.3", "A:0.1", "A:-0.2", 1.0);
        let sol = &frame(&s, Point::Zero, 10).unwrap()[0];
        assert!((sol.eval(re(0.3)) - sol.eval(re(0.7))).norm() < 1e-15);
        for trip in [("A:0.3", "T:0.2,0.1", "T:0.4,-1"), ("T:0.2,0.1", "A:0.3", "P:0.4"), ("P:0.1", "T:0.3,0", "A:1")] {
            let s = sys(trip.0, trip.1, trip.2, 1.2);
            let a = associator(&s, DEFAULT_ORDER_CAP).unwrap();
            assert!(max_abs(&(a.matrix - CMat::identity(s.dim(), s.dim()))) < 1e-13, "{trip:?}");
        }
    }

    #[test]
    fn associator_is_equivariant_and_matches_pexp() {
        let s = sys("T:0.37,0.2", "T:0.21,-0.5", "P:0.3", 1.0);
        let a = associator(&s, DEFAULT_ORDER_CAP).unwrap();
        for (_, g) in s.total.generators() {
            assert!(max_abs(&(&a.matrix * g - g * &a.matrix)) < 1e-9);
        }
        let p = associator_pexp(&s, 1e-3, 4000).unwrap();
        assert!(max_abs(&(&p.corrected - &a.matrix)) < 1e-8);
        assert!(max_abs(&(&p.bare - &a.matrix)) < 0.2);
    }

    #[test]
    fn resonance_is_excluded() {
        let s = sys("T:0.6,0", "T:0.4,0", "T:0.3,0", 1.0);
        let chains = s.spectral_data(Pair::Omega12);
        let failures = chains
            .blocks
            .iter()
            .filter(|ch| matches!(series_at0(&s, ch, 20), Err(KzError::ExcludedParameter(_))))
            .count();
        assert!(failures > 0);
        assert!(matches!(frame(&s, Point::Zero, 20), Err(KzError::ExcludedParameter(_))));
        assert!(matches!(associator(&s, 20), Err(KzError::ExcludedParameter(_))));
    }

    #[test]
    fn braiding_and_monodromy() {
        let (x, y) = (rep("T:0.3,0.1"), rep("P:0.2"));
        let k = re(1.7);
        let sp = braiding(&x, &y, k, 1.0).unwrap();
        let sm = braiding(&y, &x, k, -1.0).unwrap();
        assert!(max_abs(&(&sm * &sp - CMat::identity(8, 8))) < 1e-12);
        let aa = braiding(&rep("A:0.1"), &rep("A:2"), k, 1.0).unwrap();
        assert!((aa[(0, 0)] - re(1.0)).norm() < 1e-15);
        let s = KzSystem::new([&rep("P:0.1"), &rep("P:0.4"), &rep("A:0")], c(1.3, 0.2)).unwrap();
        let m = monodromy0(&s).unwrap() - CMat::identity(16, 16);
        assert!(max_abs(&(&m * &m)) > 1e-6);
        assert!(max_abs(&(&m * &m * &m)) < 1e-12);
    }
}

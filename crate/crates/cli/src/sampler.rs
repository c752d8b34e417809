//! Seeded draws of generic module parameters.

use kzdk_core::gl11_modules::{Kind, ModuleSpec};
use kzdk_core::superlinalg::C64;
use kzdk_core::tensor_ring::genericity_with_tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Draws closer than this to the excluded set are rejected.
pub const REJECTION_MARGIN: f64 = 1e-4;
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Typical,
    Atypical,
    Projective,
    /// Typical with `e` opposite to the `e` of the slot at the given index.
    OppositeOf(usize),
}

impl Slot {
    pub fn of_kind(kind: Kind) -> Self {
        match kind {
            Kind::Typical => Slot::Typical,
            Kind::Atypical => Slot::Atypical,
            Kind::Projective => Slot::Projective,
        }
    }

    /// `"T"`, `"A"`, `"P"` per character.
    pub fn pattern(code: &str) -> Vec<Slot> {
        code.chars()
            .map(|c| match c {
                'T' => Slot::Typical,
                'A' => Slot::Atypical,
                _ => Slot::Projective,
            })
            .collect()
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    pub rejections: usize,
    pub draws: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            rejections: 0,
            draws: 0,
        }
    }

    fn e(&mut self) -> f64 {
        let mag = self.rng.random_range(0.05..0.95);
        if self.rng.random_bool(0.5) {
            mag
        } else {
            -mag
        }
    }

    fn n(&mut self) -> f64 {
        self.rng.random_range(-2.0..2.0)
    }

    fn raw(&mut self, pattern: &[Slot]) -> Vec<ModuleSpec> {
        let mut out: Vec<ModuleSpec> = Vec::with_capacity(pattern.len());
        for slot in pattern {
            let spec = match *slot {
                Slot::Typical => ModuleSpec::typical(self.e(), self.n()),
                Slot::Atypical => ModuleSpec::atypical(self.n()),
                Slot::Projective => ModuleSpec::projective(self.n()),
                Slot::OppositeOf(i) => ModuleSpec::typical_c(-out[i].e, C64::new(self.n(), 0.0)),
            };
            out.push(spec);
        }
        out
    }

    /// One draw following `pattern`, at least [`REJECTION_MARGIN`] away from the excluded set.
    pub fn draw(&mut self, pattern: &[Slot], kappa: C64) -> Vec<ModuleSpec> {
        for _ in 0..MAX_ATTEMPTS {
            let specs = self.raw(pattern);
            if genericity_with_tol(&specs, kappa, REJECTION_MARGIN).is_generic() {
                self.draws += 1;
                return specs;
            }
            self.rejections += 1;
        }
        panic!("no generic draw for {pattern:?} at kappa {kappa} after {MAX_ATTEMPTS} attempts");
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_generic() {
        let k = C64::new(1.0, 0.0);
        let pat = Slot::pattern("TTP");
        let a: Vec<_> = (0..5).map(|_| Sampler::new(7).draw(&pat, k)).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s = Sampler::new(3);
        for _ in 0..50 {
            let d = s.draw(&[Slot::Typical, Slot::OppositeOf(0), Slot::Projective], k);
            assert!((d[0].e + d[1].e).norm() < 1e-15);
            assert!(genericity_with_tol(&d, k, REJECTION_MARGIN).is_generic());
        }
        assert_eq!(s.draws, 50);
    }
}

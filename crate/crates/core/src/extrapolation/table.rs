use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest number of products whose coefficients stay exact in `i128`.
pub const MAX_PRODUCTS: usize = 8;

type Q = Ratio<i128>;

/// Coefficients of `Σ cᵢ T₂^{kᵢ}(h/kᵢ)` with `kᵢ = i`, accurate to order `2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpeTable {
    pub order: usize,
    pub k: Vec<u32>,
    pub c: Vec<Ratio<i128>>,
}

impl MpeTable {
    pub fn products(&self) -> usize {
        self.k.len()
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.c
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// `Σ cᵢ` in exact arithmetic.
    pub fn coefficient_sum(&self) -> Option<Q> {
        self.c
            .iter()
            .try_fold(Q::zero(), |acc, c| acc.checked_add(c))
    }

    /// `Σ cᵢ kᵢ^{−2j}` in exact arithmetic.
    pub fn moment(&self, j: u32) -> Option<Q> {
        self.c
            .iter()
            .zip(&self.k)
            .try_fold(Q::zero(), |acc, (c, &k)| {
                let kk = (k as i128).checked_pow(2 * j)?;
                acc.checked_add(&c.checked_mul(&Q::new(1, kk))?)
            })
    }

    /// Consistency and order conditions: `Σ cᵢ = 1`, `Σ cᵢ kᵢ^{−2j} = 0` for `0 < j < n`.
    pub fn satisfies_order_conditions(&self) -> bool {
        let n = self.products() as u32;
        self.coefficient_sum() == Some(Q::one())
            && (1..n).all(|j| self.moment(j) == Some(Q::zero()))
    }
}

/// Exact table for `n` products: `cᵢ = Π_{j≠i} kᵢ² / (kᵢ² − kⱼ²)`.
pub fn mpe_coefficients(n: usize) -> Result<MpeTable> {
    if n == 0 || n > MAX_PRODUCTS {
        return Err(Error::Overflow(n));
    }
    let k: Vec<u32> = (1..=n as u32).collect();
    let mut c = Vec::with_capacity(n);
    for &ki in &k {
        let ki2 = (ki as i128) * (ki as i128);
        let mut ci = Q::one();
        for &kj in k.iter().filter(|&&kj| kj != ki) {
            let kj2 = (kj as i128) * (kj as i128);
            let den = Q::from_integer(ki2)
                .checked_sub(&Q::from_integer(kj2))
                .ok_or(Error::Overflow(n))?;
            ci = ci
                .checked_mul(&(Q::from_integer(ki2) / den))
                .ok_or(Error::Overflow(n))?;
        }
        c.push(ci);
    }
    Ok(MpeTable { order: 2 * n, k, c })
}

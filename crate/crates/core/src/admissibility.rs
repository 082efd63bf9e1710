//! Hurwitz–Radon numbers and the dimension screens they imply for two-root tensors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hurwitz–Radon number: for `n = odd · 2^(4b + c)` with `0 <= c <= 3`, `ρ(n) = 8b + 2^c`.
pub fn rho(n: u64) -> u64 {
    assert!(n >= 1, "rho is defined for n >= 1");
    let m = n.trailing_zeros() as u64;
    let (b, c) = (m / 4, m % 4);
    8 * b + (1 << c)
}

/// Multiplicities of a two-root spectrum, `p >= q >= 1`, `p + q = n − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityPattern {
    n: usize,
    p: usize,
    q: usize,
}

impl MultiplicityPattern {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPattern(format!("dimension {n} < 3")));
        }
        if p + q != n - 1 {
            return Err(Error::InvalidPattern(format!(
                "p + q = {} but n - 1 = {}",
                p + q,
                n - 1
            )));
        }
        if q < 1 || p < q {
            return Err(Error::InvalidPattern(format!(
                "need p >= q >= 1, got p = {p}, q = {q}"
            )));
        }
        Ok(Self { n, p, q })
    }

    /// Orders two observed multiplicities as `(max, min)`.
    pub fn from_observed(n: usize, a: usize, b: usize) -> Result<Self> {
        Self::new(n, a.max(b), a.min(b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub rho: u64,
    pub reason: String,
}

pub fn admissible(pattern: &MultiplicityPattern) -> Admissibility {
    let r = rho(pattern.n as u64);
    let q = pattern.q as u64;
    let admissible = q < r;
    let reason = if admissible {
        format!(
            "q = {q} < rho({}) = {r}: the {q}-dimensional eigenvalue distribution on the unit sphere is not obstructed",
            pattern.n
        )
    } else {
        format!(
            "q = {q} >= rho({}) = {r}: the unit sphere does not admit a continuous {q}-dimensional distribution",
            pattern.n
        )
    };
    Admissibility {
        admissible,
        rho: r,
        reason,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenVerdict {
    OddImpossible,
    TwiceOddOsserman,
    NoScreen,
}

impl ScreenVerdict {
    pub fn code(self) -> &'static str {
        match self {
            ScreenVerdict::OddImpossible => "odd_impossible",
            ScreenVerdict::TwiceOddOsserman => "twice_odd_osserman",
            ScreenVerdict::NoScreen => "no_screen",
        }
    }

    pub fn message(self) -> &'static str {
        match self {
            ScreenVerdict::OddImpossible => "two-root impossible",
            ScreenVerdict::TwiceOddOsserman => "two-root ⇒ globally Osserman; q=1 forced",
            ScreenVerdict::NoScreen => "no screen: open territory",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionScreen {
    pub n: usize,
    pub verdict: ScreenVerdict,
    pub code: String,
    pub message: String,
    pub rho: u64,
    /// Admissible simple-root multiplicities `q` in `[1, ρ(n) − 1]`; `None` when empty.
    pub q_range: Option<(u64, u64)>,
}

pub fn dimension_screen(n: usize) -> Result<DimensionScreen> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "dimension screen needs n >= 3, got {n}"
        )));
    }
    let verdict = if n % 2 == 1 {
        ScreenVerdict::OddImpossible
    } else if n % 4 == 2 {
        ScreenVerdict::TwiceOddOsserman
    } else {
        ScreenVerdict::NoScreen
    };
    let r = rho(n as u64);
    Ok(DimensionScreen {
        n,
        verdict,
        code: verdict.code().to_string(),
        message: verdict.message().to_string(),
        rho: r,
        q_range: (r > 1).then_some((1, r - 1)),
    })
}

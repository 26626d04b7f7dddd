//! The two problem families as kernel pairs `T` and `W = ∫₀ᵍ T`.

use serde::{Deserialize, Serialize};

/// Problem family of the cavity equation.
///
/// Each kernel also exposes its tail `P(g) = c* − W(g)`; the conserved
/// quantity of a solved curve is written as `P(G(x)) + P(G(−x)) = c`, which
/// for the full problem (`c = c*`) is the same statement as
/// `W(G(x)) + W(G(−x)) = c*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Matching,
    #[serde(rename = "tsp")]
    Tsp,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::Matching => "matching",
            Kernel::Tsp => "tsp",
        }
    }

    /// `T(g)`: `e^{-g}` for matching, `(1+g)e^{-g}` for the TSP.
    pub fn t(self, g: f64) -> f64 {
        if g == f64::INFINITY {
            return 0.0;
        }
        match self {
            Kernel::Matching => (-g).exp(),
            Kernel::Tsp => (1.0 + g) * (-g).exp(),
        }
    }

    /// `W(g) = ∫₀ᵍ T`, accurate for small `g`.
    pub fn w(self, g: f64) -> f64 {
        if g == f64::INFINITY {
            return self.c_star();
        }
        match self {
            Kernel::Matching => -(-g).exp_m1(),
            Kernel::Tsp => -2.0 * (-g).exp_m1() - g * (-g).exp(),
        }
    }

    /// Tail `P(g) = c* − W(g)`, accurate for large `g`.
    pub fn tail(self, g: f64) -> f64 {
        if g == f64::INFINITY {
            return 0.0;
        }
        match self {
            Kernel::Matching => (-g).exp(),
            Kernel::Tsp => (2.0 + g) * (-g).exp(),
        }
    }

    /// `c* = W(∞)`.
    pub fn c_star(self) -> f64 {
        match self {
            Kernel::Matching => 1.0,
            Kernel::Tsp => 2.0,
        }
    }

    /// Fixed-point map of the distributional recursion: `e^{-s}` for the
    /// minimum, `(1+s)e^{-s}` for the second minimum. Same function as `T`.
    pub fn survival_map(self, s: f64) -> f64 {
        self.t(s)
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "matching" => Ok(Kernel::Matching),
            "tsp" => Ok(Kernel::Tsp),
            other => Err(format!("unknown kernel '{other}' (expected matching or tsp)")),
        }
    }
}

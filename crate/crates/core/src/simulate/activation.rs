use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::hermite_value;
use crate::error::{Error, Result};

/// Entrywise nonlinearity. `Monomial(0)` is the constant `1` and
/// `Monomial(1)` the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Monomial(u32),
    Relu,
    Tanh,
    Heaviside,
    /// `y² exp(-y²)`.
    GaussBump,
    /// Probabilists' Hermite polynomial `He_k`.
    Hermite(u32),
}

impl Activation {
    #[inline]
    pub fn apply(self, y: f64) -> f64 {
        match self {
            Activation::Monomial(p) => y.powi(p as i32),
            Activation::Relu => y.max(0.0),
            Activation::Tanh => y.tanh(),
            Activation::Heaviside => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::GaussBump => y * y * (-y * y).exp(),
            Activation::Hermite(k) => hermite_value(k, y),
        }
    }

    /// Monomial degree, if this is a monomial.
    pub fn degree(self) -> Option<u32> {
        match self {
            Activation::Monomial(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Monomial(0) => write!(f, "constant"),
            Activation::Monomial(1) => write!(f, "identity"),
            Activation::Monomial(p) => write!(f, "x^{p}"),
            Activation::Relu => write!(f, "relu"),
            Activation::Tanh => write!(f, "tanh"),
            Activation::Heaviside => write!(f, "heaviside"),
            Activation::GaussBump => write!(f, "gauss_bump"),
            Activation::Hermite(k) => write!(f, "hermite{k}"),
        }
    }
}

/// Accepts the `Display` forms plus `monomial:p`, `hermite:k`, `linear`, `step`.
impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let number = |rest: &str| {
            rest.parse::<u32>()
                .map_err(|_| Error::InvalidArgument(format!("bad activation degree in `{s}`")))
        };
        Ok(match t.as_str() {
            "constant" | "one" => Activation::Monomial(0),
            "identity" | "linear" => Activation::Monomial(1),
            "relu" => Activation::Relu,
            "tanh" => Activation::Tanh,
            "heaviside" | "step" => Activation::Heaviside,
            "gauss_bump" | "gaussbump" => Activation::GaussBump,
            _ => {
                if let Some(rest) = t.strip_prefix("x^").or_else(|| t.strip_prefix("monomial:")) {
                    Activation::Monomial(number(rest)?)
                } else if let Some(rest) = t.strip_prefix("hermite:").or_else(|| t.strip_prefix("hermite")) {
                    Activation::Hermite(number(rest)?)
                } else {
                    return Err(Error::InvalidArgument(format!("unknown activation `{s}`")));
                }
            }
        })
    }
}

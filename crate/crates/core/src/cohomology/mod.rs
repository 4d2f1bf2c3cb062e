//! Čech cohomology of the abelian presheaf `F_R S_e` and the obstruction
//! `γ(s)` to extending a support section to a global one.

mod combination;
mod complex;
mod obstruction;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub use combination::LinearCombination;
pub use complex::{coboundary_matrix, is_compatible_family, CechComplex, Cochain};
pub use obstruction::{
    all_obstructions, all_obstructions_with, obstruction, obstruction_class_vanishes, obstruction_with,
    verify_witness, EquationLabel, ObstructionOptions, ObstructionResult, ObstructionSystem,
};

/// Coefficient ring for `F_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "z")]
    Integers,
    #[serde(rename = "z2")]
    Mod2,
}

impl Ring {
    /// Canonical representative: identity over `Z`, `{0, 1}` over `Z/2`.
    pub fn reduce(self, x: &BigInt) -> BigInt {
        match self {
            Ring::Integers => x.clone(),
            Ring::Mod2 => x.mod_floor(&BigInt::from(2)),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Integers => "Z",
            Ring::Mod2 => "Z/2",
        })
    }
}

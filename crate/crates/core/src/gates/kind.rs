use std::fmt;
use std::str::FromStr;

use crate::error::SimError;

/// Named gates. The string forms returned by [`GateKind::name`] are the
/// vocabulary of the `.qc` circuit format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Phase,
    RX,
    RY,
    RZ,
    Rot,
    CNOT,
    CZ,
    SWAP,
    IsingXX,
    IsingXY,
    IsingYY,
    IsingZZ,
    SingleExcitation,
    DoubleExcitation,
    ControlledMatrix,
    Matrix,
}

impl GateKind {
    pub const ALL: [GateKind; 23] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Phase,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::Rot,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::SWAP,
        GateKind::IsingXX,
        GateKind::IsingXY,
        GateKind::IsingYY,
        GateKind::IsingZZ,
        GateKind::SingleExcitation,
        GateKind::DoubleExcitation,
        GateKind::ControlledMatrix,
        GateKind::Matrix,
    ];

    /// Every gate that is fully described by its name and parameters.
    pub fn named() -> impl Iterator<Item = GateKind> {
        Self::ALL.into_iter().filter(|k| !k.is_matrix())
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Phase => "Phase",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::Rot => "Rot",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::IsingXX => "IsingXX",
            GateKind::IsingXY => "IsingXY",
            GateKind::IsingYY => "IsingYY",
            GateKind::IsingZZ => "IsingZZ",
            GateKind::SingleExcitation => "SingleExcitation",
            GateKind::DoubleExcitation => "DoubleExcitation",
            GateKind::ControlledMatrix => "ControlledMatrix",
            GateKind::Matrix => "Matrix",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Phase
            | GateKind::RX
            | GateKind::RY
            | GateKind::RZ
            | GateKind::IsingXX
            | GateKind::IsingXY
            | GateKind::IsingYY
            | GateKind::IsingZZ
            | GateKind::SingleExcitation
            | GateKind::DoubleExcitation => 1,
            GateKind::Rot => 3,
            _ => 0,
        }
    }

    /// Target wire count; `None` for matrix gates, whose width comes from the matrix.
    pub fn n_wires(self) -> Option<usize> {
        match self {
            GateKind::CNOT
            | GateKind::CZ
            | GateKind::SWAP
            | GateKind::IsingXX
            | GateKind::IsingXY
            | GateKind::IsingYY
            | GateKind::IsingZZ
            | GateKind::SingleExcitation => Some(2),
            GateKind::DoubleExcitation => Some(4),
            GateKind::ControlledMatrix | GateKind::Matrix => None,
            _ => Some(1),
        }
    }

    pub fn is_single_qubit(self) -> bool {
        self.n_wires() == Some(1)
    }

    pub fn is_parametric(self) -> bool {
        self.n_params() > 0
    }

    pub fn is_matrix(self) -> bool {
        matches!(self, GateKind::ControlledMatrix | GateKind::Matrix)
    }

    /// Two-qubit gates whose matrix is unchanged when the wires are exchanged.
    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            GateKind::CZ
                | GateKind::SWAP
                | GateKind::IsingXX
                | GateKind::IsingXY
                | GateKind::IsingYY
                | GateKind::IsingZZ
        )
    }

    /// Whether every parameter obeys the two-term ±π/2 shift rule, i.e. the
    /// generator has exactly two eigenvalues one unit apart.
    pub fn shift_compatible(self) -> bool {
        matches!(
            self,
            GateKind::Phase
                | GateKind::RX
                | GateKind::RY
                | GateKind::RZ
                | GateKind::Rot
                | GateKind::IsingXX
                | GateKind::IsingYY
                | GateKind::IsingZZ
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::from_name(s).ok_or_else(|| SimError::invalid(format!("unknown gate `{s}`")))
    }
}

//! Toffoli on three logical registers and its timestep comparison with the
//! exchange-only baseline.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dualrail::LogicalRegister;
use crate::error::{Error, Result};
use crate::schedule::{
    baseline_divincenzo, baseline_with_cnot_cost, CircuitCounts, Schedule, BASELINE_CNOT_COST_ALT, SCHEMA_VERSION,
};

/// Gates of the standard 6-CNOT Toffoli; registers are 1-based and the
/// target is register 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "gate", rename_all = "camelCase")]
pub enum CircuitGate {
    H { q: usize },
    Cnot { control: usize, target: usize },
    T { q: usize },
    Tdg { q: usize },
    S { q: usize },
}

impl CircuitGate {
    pub fn name(&self) -> &'static str {
        match self {
            CircuitGate::H { .. } => "H",
            CircuitGate::Cnot { .. } => "CNOT",
            CircuitGate::T { .. } => "T",
            CircuitGate::Tdg { .. } => "Tdg",
            CircuitGate::S { .. } => "S",
        }
    }

    pub fn is_permutational(&self) -> bool {
        matches!(
            self,
            CircuitGate::T { .. } | CircuitGate::Tdg { .. } | CircuitGate::S { .. }
        )
    }
}

use CircuitGate::{Cnot, Tdg, H, S, T};

pub const TOFFOLI_CIRCUIT: [CircuitGate; 16] = [
    H { q: 3 },
    Cnot { control: 2, target: 3 },
    Tdg { q: 3 },
    Cnot { control: 1, target: 3 },
    T { q: 3 },
    Cnot { control: 2, target: 3 },
    Tdg { q: 3 },
    Cnot { control: 1, target: 3 },
    Tdg { q: 2 },
    T { q: 3 },
    H { q: 3 },
    Cnot { control: 1, target: 2 },
    Tdg { q: 2 },
    Cnot { control: 1, target: 2 },
    T { q: 1 },
    S { q: 2 },
];

/// How the phase gates map onto `γ` powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PhaseMode {
    /// `T = γ^{n/8}`, `S = γ^{n/4}`; needs `8 | n`.
    Exact,
    /// Every phase gate squared (`T → S`, `S → Z`); needs `4 | n`. Keeps the
    /// gate layout and cost but is not a Toffoli.
    Squared,
}

impl PhaseMode {
    pub fn for_width(n: usize) -> Result<Self> {
        if n.is_multiple_of(8) {
            Ok(PhaseMode::Exact)
        } else if n.is_multiple_of(4) {
            Ok(PhaseMode::Squared)
        } else {
            Err(Error::IncompatibleRowWidth(n, "Toffoli needs n divisible by 4"))
        }
    }

    /// `γ` exponent of the gate, in units of `n/8`.
    fn eighths(&self, gate: &CircuitGate) -> i64 {
        let base = match gate {
            T { .. } => 1,
            Tdg { .. } => -1,
            S { .. } => 2,
            _ => 0,
        };
        match self {
            PhaseMode::Exact => base,
            PhaseMode::Squared => 2 * base,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GateCost {
    pub gate: CircuitGate,
    pub timesteps: usize,
    pub fredkins: usize,
    pub exchanges: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToffoliBuild {
    pub n: usize,
    pub mode: PhaseMode,
    pub schedule: Schedule,
    pub breakdown: Vec<GateCost>,
}

pub fn toffoli_schedule(n: usize) -> Result<ToffoliBuild> {
    let mode = PhaseMode::for_width(n)?;
    let reg = LogicalRegister::new(n, 3)?;
    let cal = reg.calibrate_hadamard()?;
    let mut schedule = Schedule::new(reg.num_qubits());
    let mut breakdown = Vec::with_capacity(TOFFOLI_CIRCUIT.len());
    for gate in TOFFOLI_CIRCUIT {
        let part = match gate {
            H { q } => reg.hadamard(q, &cal)?,
            Cnot { control, target } => reg.cnot(control, target)?,
            T { q } | Tdg { q } | S { q } => reg.phase_power(q, mode.eighths(&gate) * n as i64 / 8, gate.name())?,
        };
        breakdown.push(GateCost {
            gate,
            timesteps: part.timesteps(),
            fredkins: part.fredkin_count(),
            exchanges: part.exchange_count(),
        });
        schedule.append(part)?;
    }
    Ok(ToffoliBuild {
        n,
        mode,
        schedule,
        breakdown,
    })
}

/// `10n + 2`: two Hadamards at `2n + 1` and six CNOTs at `n`.
pub fn toffoli_timesteps_formula(n: usize) -> usize {
    10 * n + 2
}

/// Counts the baseline charges for the circuit: the seven `T`/`T†` gates as
/// single-qubit gates plus the six CNOTs.
pub fn toffoli_counts() -> CircuitCounts {
    CircuitCounts {
        single_qubit: TOFFOLI_CIRCUIT
            .iter()
            .filter(|g| matches!(g, T { .. } | Tdg { .. }))
            .count(),
        cnot: TOFFOLI_CIRCUIT.iter().filter(|g| matches!(g, Cnot { .. })).count(),
    }
}

/// `8 × 8` matrix of the circuit on three bits, register 1 most
/// significant, with phase gates as `mode` maps them.
pub fn reference_matrix(mode: PhaseMode) -> DMatrix<Complex64> {
    let bit = |idx: usize, q: usize| (idx >> (3 - q)) & 1;
    let mut m = DMatrix::<Complex64>::identity(8, 8);
    for gate in TOFFOLI_CIRCUIT {
        let g = DMatrix::from_fn(8, 8, |row, col| match gate {
            H { q } => {
                if row & !(1 << (3 - q)) != col & !(1 << (3 - q)) {
                    return Complex64::new(0.0, 0.0);
                }
                let sign = if bit(row, q) == 1 && bit(col, q) == 1 {
                    -1.0
                } else {
                    1.0
                };
                Complex64::new(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0)
            }
            Cnot { control, target } => {
                let image = col ^ (bit(col, control) << (3 - target));
                Complex64::new((row == image) as u8 as f64, 0.0)
            }
            T { q } | Tdg { q } | S { q } => {
                if row != col {
                    return Complex64::new(0.0, 0.0);
                }
                let angle = std::f64::consts::FRAC_PI_4 * mode.eighths(&gate) as f64 * bit(col, q) as f64;
                Complex64::from_polar(1.0, angle)
            }
        });
        m = g * m;
    }
    m
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareReport {
    pub schema_version: u32,
    pub n: usize,
    pub extended_dual_rail: usize,
    /// Timesteps of an actually built schedule, when `n` admits one.
    pub measured: Option<usize>,
    pub divincenzo: usize,
    pub divincenzo_alt_cnot: usize,
    /// Baseline minus extended; positive favors the extended scheme.
    pub delta: i64,
    pub permutational_gates: usize,
    pub counts: CircuitCounts,
    pub breakdown: Vec<GateCost>,
}

pub fn compare_report(n: usize) -> Result<CompareReport> {
    let counts = toffoli_counts();
    let formula = toffoli_timesteps_formula(n);
    let built = match PhaseMode::for_width(n) {
        Ok(_) => Some(toffoli_schedule(n)?),
        Err(_) => None,
    };
    let breakdown = match &built {
        Some(b) => b.breakdown.clone(),
        None => TOFFOLI_CIRCUIT
            .iter()
            .map(|&gate| GateCost {
                gate,
                timesteps: match gate {
                    H { .. } => 2 * n + 1,
                    Cnot { .. } => n,
                    _ => 0,
                },
                fredkins: match gate {
                    H { .. } => 2 * n * n,
                    Cnot { .. } => 2 * n * n,
                    _ => 0,
                },
                exchanges: if matches!(gate, H { .. }) { n } else { 0 },
            })
            .collect(),
    };
    let baseline = baseline_divincenzo(counts);
    Ok(CompareReport {
        schema_version: SCHEMA_VERSION,
        n,
        extended_dual_rail: formula,
        measured: built.as_ref().map(|b| b.schedule.timesteps()),
        divincenzo: baseline,
        divincenzo_alt_cnot: baseline_with_cnot_cost(counts, BASELINE_CNOT_COST_ALT),
        delta: baseline as i64 - formula as i64,
        permutational_gates: TOFFOLI_CIRCUIT.iter().filter(|g| g.is_permutational()).count(),
        counts,
        breakdown,
    })
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:<12} {:>9} {:>8} {:>9}",
            "step", "gate", "timesteps", "fredkins", "exchanges"
        );
        for (i, c) in self.breakdown.iter().enumerate() {
            let label = match c.gate {
                H { q } | T { q } | Tdg { q } | S { q } => format!("{} q{q}", c.gate.name()),
                Cnot { control, target } => format!("CNOT q{control}->q{target}"),
            };
            let _ = writeln!(
                s,
                "{:<5} {:<12} {:>9} {:>8} {:>9}",
                i + 1,
                label,
                c.timesteps,
                c.fredkins,
                c.exchanges
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<34} {:>6}",
            format!("extended dual-rail (10n+2, n={})", self.n),
            self.extended_dual_rail
        );
        if let Some(m) = self.measured {
            let _ = writeln!(s, "{:<34} {:>6}", "measured from schedule", m);
        }
        let _ = writeln!(s, "{:<34} {:>6}", "exchange-only baseline (CNOT=13)", self.divincenzo);
        let _ = writeln!(
            s,
            "{:<34} {:>6}",
            "exchange-only baseline (CNOT=11)", self.divincenzo_alt_cnot
        );
        let _ = writeln!(s, "{:<34} {:>6}", "delta (baseline - extended)", self.delta);
        let _ = writeln!(
            s,
            "{:<34} {:>6}",
            "zero-cost permutational gates", self.permutational_gates
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circuit_shape() {
        let count = |name: &str| TOFFOLI_CIRCUIT.iter().filter(|g| g.name() == name).count();
        assert_eq!(count("H"), 2);
        assert_eq!(count("CNOT"), 6);
        assert_eq!(count("T") + count("Tdg"), 7);
        assert_eq!(count("S"), 1);
        assert_eq!(
            toffoli_counts(),
            CircuitCounts {
                single_qubit: 7,
                cnot: 6
            }
        );
    }

    #[test]
    fn widths() {
        assert_eq!(PhaseMode::for_width(8).unwrap(), PhaseMode::Exact);
        assert_eq!(PhaseMode::for_width(4).unwrap(), PhaseMode::Squared);
        assert!(PhaseMode::for_width(6).is_err());
    }

    #[test]
    fn compare_without_schedule() {
        let r = compare_report(6).unwrap();
        assert_eq!(r.measured, None);
        assert_eq!(r.extended_dual_rail, 62);
        assert_eq!(r.delta, 23);
    }
}

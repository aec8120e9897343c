use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use permqc::clifford::{self, CliffordIndex, TableId};
use permqc::dualrail::{logical_basis, LogicalRegister};
use permqc::error::Error;
use permqc::reports::{self, compiled_deviation};
use permqc::schedule::{baseline_divincenzo, compile_relabeling, CircuitCounts, Schedule};
use permqc::toffoli::{compare_report, reference_matrix, toffoli_schedule, PhaseMode};

fn idx(i: usize, j: usize) -> CliffordIndex {
    CliffordIndex::new(i, j).unwrap()
}

#[test]
fn hadamard_images_share_one_phase() {
    for n in [4, 8] {
        let reg = LogicalRegister::new(n, 1).unwrap();
        let cal = reg.calibrate_hadamard().unwrap();
        let h = reg.hadamard(1, &cal).unwrap();
        let (zero, one) = logical_basis(n).unwrap();
        let a = reg.decode(&h.apply(&zero).unwrap()).unwrap();
        let b = reg.decode(&h.apply(&one).unwrap()).unwrap();
        let phase = a.amplitudes[0] / FRAC_1_SQRT_2;
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        let want = [
            phase * FRAC_1_SQRT_2,
            phase * FRAC_1_SQRT_2,
            phase * FRAC_1_SQRT_2,
            -phase * FRAC_1_SQRT_2,
        ];
        let got = [a.amplitudes[0], a.amplitudes[1], b.amplitudes[0], b.amplitudes[1]];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < 1e-12, "n={n}: {g} vs {w}");
        }
        assert!(a.residual < 1e-12 && b.residual < 1e-12);
        assert_eq!(h.timesteps(), 2 * n + 1);
    }
}

#[test]
fn hadamard_calibration_is_pinned() {
    for (n, power) in [(4, 3), (8, 6)] {
        let cal = LogicalRegister::new(n, 1).unwrap().calibrate_hadamard().unwrap();
        assert_eq!(
            (cal.pre_power, cal.post_power, cal.left_only_power),
            (power, power, None)
        );
        assert!(cal.fidelity > 1.0 - 1e-12);
    }
    let err = LogicalRegister::new(6, 1).unwrap().calibrate_hadamard().unwrap_err();
    assert_eq!(err, Error::NoCalibration(6));
}

#[test]
fn timestep_counts() {
    let reg = LogicalRegister::new(8, 2).unwrap();
    let cal = reg.calibrate_hadamard().unwrap();
    assert_eq!(reg.hadamard(1, &cal).unwrap().timesteps(), 17);
    assert_eq!(reg.cnot(1, 2).unwrap().timesteps(), 8);
    assert_eq!(reg.cnot(1, 2).unwrap().fredkin_count(), 128);
    let mut gammas = Schedule::new(reg.num_qubits());
    gammas.append(reg.t(1).unwrap()).unwrap();
    gammas.append(reg.s(2).unwrap()).unwrap();
    gammas.append(reg.bit_flip(1).unwrap()).unwrap();
    assert_eq!(gammas.timesteps(), 0);
}

#[test]
fn cnot_truth_table_at_n4_both_directions() {
    let reg = LogicalRegister::new(4, 2).unwrap();
    for (c, t) in [(1, 2), (2, 1)] {
        let sched = reg.cnot(c, t).unwrap();
        for input in 0..4usize {
            let cbit = (input >> (2 - c)) & 1;
            let expected = input ^ (cbit << (2 - t));
            let out = reg
                .decode(&sched.apply(&reg.basis_index(input).unwrap()).unwrap())
                .unwrap();
            assert!((out.amplitudes[expected] - 1.0).norm() < 1e-12);
            assert!(out.residual < 1e-12);
        }
    }
    assert_eq!(reg.cnot(1, 1).unwrap_err(), Error::RegisterOverlap);
}

#[test]
fn cnot_on_three_registers_leaves_spectator_alone() {
    let reg = LogicalRegister::new(2, 3).unwrap();
    let sched = reg.cnot(1, 3).unwrap();
    for input in 0..8usize {
        let expected = input ^ ((input >> 2) & 1);
        let out = reg
            .decode(&sched.apply(&reg.basis_index(input).unwrap()).unwrap())
            .unwrap();
        assert!((out.amplitudes[expected] - 1.0).norm() < 1e-12);
    }
}

#[test]
fn toffoli_squared_variant_at_n4() {
    let build = toffoli_schedule(4).unwrap();
    assert_eq!(build.mode, PhaseMode::Squared);
    assert_eq!(build.schedule.timesteps(), 42);
    let rep = reports::toffoli_report(4, true).unwrap();
    let sim = rep.simulation.as_ref().unwrap();
    assert!(sim.passed);
    assert!(sim.fidelity > 1.0 - 1e-10);
    assert!(rep.passed);
    // With every phase doubled the circuit is no longer a Toffoli.
    let squared = reference_matrix(PhaseMode::Squared);
    let exact = reference_matrix(PhaseMode::Exact);
    let diff = (&squared - &exact).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff > 0.1);
}

#[test]
fn exact_reference_is_toffoli() {
    let m = reference_matrix(PhaseMode::Exact);
    for col in 0..8usize {
        let row = if col >> 1 == 0b11 { col ^ 1 } else { col };
        for r in 0..8 {
            let want = if r == row { 1.0 } else { 0.0 };
            assert!((m[(r, col)] - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn toffoli_structure_and_costs() {
    for n in [8, 16] {
        let build = toffoli_schedule(n).unwrap();
        assert_eq!(build.schedule.timesteps(), 10 * n + 2);
        let count = |name: &str| build.breakdown.iter().filter(|c| c.gate.name() == name).count();
        assert_eq!(
            (count("H"), count("CNOT"), count("T") + count("Tdg") + count("S")),
            (2, 6, 8)
        );
    }
    let r8 = compare_report(8).unwrap();
    assert_eq!(
        (r8.extended_dual_rail, r8.measured, r8.divincenzo, r8.delta),
        (82, Some(82), 85, 3)
    );
    assert_eq!(r8.divincenzo_alt_cnot, 73);
    assert_eq!(r8.permutational_gates, 8);
    let r16 = compare_report(16).unwrap();
    assert_eq!((r16.extended_dual_rail, r16.divincenzo, r16.delta), (162, 85, -77));
    assert!(r8.to_text().contains("82"));
    assert_eq!(
        baseline_divincenzo(CircuitCounts {
            single_qubit: 0,
            cnot: 1
        }),
        13
    );
    assert_eq!(
        baseline_divincenzo(CircuitCounts {
            single_qubit: 0,
            cnot: 0
        }),
        0
    );
    assert!(toffoli_schedule(6).is_err());
}

#[test]
fn compiled_schedules_match() {
    let build = toffoli_schedule(4).unwrap();
    let (compiled, _) = compile_relabeling(&build.schedule).unwrap();
    assert_eq!(compiled.perm_count(), 0);
    assert_eq!(compiled.timesteps(), build.schedule.timesteps());
    let reg = LogicalRegister::new(4, 3).unwrap();
    assert!(compiled_deviation(&reg, &build.schedule).unwrap() < 1e-10);
}

#[test]
fn encoding_group_and_t_gate() {
    for n in [2, 4, 8] {
        assert!(reports::encoding_report(n).unwrap().passed, "n={n}");
    }
    let r8 = reports::encoding_report(8).unwrap();
    assert_eq!(r8.is_t_gate, Some(true));
    let group = r8.phase_bit_flip_group.unwrap();
    assert_eq!(group.elements.len(), 8);
    assert!(group.matches_table);
}

#[test]
fn clifford_tables_and_errata() {
    let s4 = clifford::verify_s4_profile();
    assert_eq!(s4.group_order, 24);
    assert!(s4.matches_s4);
    let t1 = clifford::verify_table(TableId::PhaseBitFlip);
    assert_eq!(t1.generated.len(), 8);
    assert_eq!(t1.errata, vec![idx(2, 2), idx(2, 3), idx(2, 4)]);
    assert!(t1.all_cells_verified);
    let t2 = clifford::verify_table(TableId::HadamardPhaseFlip);
    assert_eq!(t2.generated.len(), 8);
    assert_eq!(t2.errata, vec![idx(4, 1)]);
    assert!(t2.all_cells_verified);
    assert_eq!(
        clifford::table_intersection(),
        vec![idx(1, 2), idx(1, 4), idx(2, 2), idx(2, 4)]
    );
}

#[test]
fn perm_hadamard_report() {
    let rep = permqc::perm_hadamard::run_report().unwrap();
    assert!(rep.passed());
    assert_eq!(rep.group.permutation_group_order, 16);
    assert_eq!(rep.group.logical_elements.len(), 8);
    assert_eq!(rep.hadamard.clifford, Some(idx(3, 1)));
    assert_eq!(rep.phase_flip.clifford, Some(idx(1, 2)));
}

#[test]
fn theorem_and_lemma() {
    for n in 1..=8 {
        assert!(reports::theorem1_report(n, 100, 7, 1e-12).unwrap().passed);
    }
    assert!(reports::lemma_report(6).unwrap().passed);
}

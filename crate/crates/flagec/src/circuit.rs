//! One-flag syndrome-extraction circuits: sub-block decomposition, the
//! coupling schedule, exact Pauli-frame propagation semantics, fault
//! injection, and the circuit-level verifiers.
//!
//! Wires are the data qubits 1..n plus ancillas: `m0` (prepared |0>,
//! measured in Z) collects the parity, and flags `f0..fm` (prepared |+>,
//! measured in X) detect ancilla Z-errors that would spread to the data.
//! Every coupling targets `m0`: data couplings in the basis of their
//! sub-block, flag couplings as plain CNOTs with the flag as control.

use std::fmt;

use thiserror::Error;

use crate::pauli::{Pauli, PauliKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("cannot build a measurement circuit for the identity operator")]
    IdentityOperator,
    #[error("fault location {location} out of range (circuit has {len} locations)")]
    LocationOutOfRange { location: usize, len: usize },
    #[error("fault kind does not match the location it references")]
    KindMismatch,
    #[error("injected fault error is trivial")]
    TrivialFault,
    #[error("operator must not be the identity on any code block")]
    EmptyBlock,
}

/// One maximal run of a single Pauli basis plus the identity gap that
/// follows it. `start` is the 1-based data qubit of the first run element;
/// `code_block` tags which code block the run belongs to (0 for
/// single-block operators).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBlock {
    pub basis: PauliKind,
    pub a: usize,
    pub b: usize,
    pub start: usize,
    pub code_block: usize,
}

impl SubBlock {
    /// Last data qubit of the run.
    pub fn end(&self) -> usize {
        self.start + self.a - 1
    }
}

/// Maximal-run decomposition P_1^{a_1} I^{b_1} … P_m^{a_m} I^{b_m} of a
/// Pauli operator. A leading identity run is folded into the trailing gap
/// b_m; physical qubit positions are kept in `SubBlock::start` so shift
/// computations stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBlockDecomposition {
    pub n: usize,
    pub blocks: Vec<SubBlock>,
    /// Number of qubits per code block, in order (one entry for
    /// single-block operators).
    pub block_sizes: Vec<usize>,
}

impl SubBlockDecomposition {
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Rebuild the decomposed operator.
    pub fn operator(&self) -> Pauli {
        let mut p = Pauli::identity(self.n);
        for block in &self.blocks {
            for q in block.start..=block.end() {
                p.set(q, block.basis);
            }
        }
        p
    }

    /// 1-based first data qubit of a code block.
    pub fn code_block_offset(&self, code_block: usize) -> usize {
        1 + self.block_sizes[..code_block].iter().sum::<usize>()
    }

    pub fn code_block_len(&self, code_block: usize) -> usize {
        self.block_sizes[code_block]
    }

    /// Trailing correction after a flagged sub-block: the product of every
    /// later sub-block's run.
    pub fn trailing_correction(&self, flagged: usize) -> Pauli {
        let mut p = Pauli::identity(self.n);
        for block in &self.blocks[flagged + 1..] {
            for q in block.start..=block.end() {
                p.set(q, block.basis);
            }
        }
        p
    }

    /// The consecutive-set shift for a flagged sub-block, measured in its
    /// own code block's coordinates: l = (n_block − local run end) mod
    /// n_block, which matches n − c + b_i when the operator starts at
    /// qubit 1 of a single block.
    pub fn shift_for(&self, flagged: usize) -> usize {
        let block = &self.blocks[flagged];
        let n_block = self.block_sizes[block.code_block];
        let local_end = block.end() - (self.code_block_offset(block.code_block) - 1);
        (n_block - local_end) % n_block
    }

    /// Cumulative form extent c_i = Σ_{j≤i}(a_j + b_j) through sub-block
    /// i, in that sub-block's code-block coordinates.
    pub fn cumulative(&self, i: usize) -> usize {
        let block = &self.blocks[i];
        let local_end = block.end() - (self.code_block_offset(block.code_block) - 1);
        local_end + block.b
    }
}

/// Maximal-run decomposition of a single-block operator.
pub fn decompose_operator(p: &Pauli) -> Result<SubBlockDecomposition, CircuitError> {
    decompose_parts(std::slice::from_ref(p))
}

/// Decomposition of a multi-block operator; sub-blocks never span code
/// block boundaries and every part must be nontrivial.
///
/// A part whose single run covers its whole code block is split into two
/// flag windows: otherwise one ancilla fault could deposit an error on
/// every qubit of that block, which has zero syndrome there and so could
/// never be told from no error at all. (A single-block full run stays
/// whole, where the spread error equals the measured operator itself.)
pub fn decompose_parts(parts: &[Pauli]) -> Result<SubBlockDecomposition, CircuitError> {
    if parts.is_empty() {
        return Err(CircuitError::IdentityOperator);
    }
    let n: usize = parts.iter().map(|p| p.n()).sum();
    let mut blocks: Vec<SubBlock> = Vec::new();
    let mut offset = 0usize;
    for (cb, part) in parts.iter().enumerate() {
        if part.is_identity() {
            return Err(if parts.len() == 1 {
                CircuitError::IdentityOperator
            } else {
                CircuitError::EmptyBlock
            });
        }
        let mut part_runs: Vec<SubBlock> = Vec::new();
        let mut q = 1;
        while q <= part.n() {
            let kind = part.get(q);
            if kind == PauliKind::I {
                q += 1;
                continue;
            }
            let start = q;
            while q <= part.n() && part.get(q) == kind {
                q += 1;
            }
            part_runs.push(SubBlock {
                basis: kind,
                a: q - start,
                b: 0,
                start: offset + start,
                code_block: cb,
            });
        }
        if parts.len() > 1 && part_runs.len() == 1 && part_runs[0].a == part.n() {
            let full = part_runs.pop().expect("one run");
            let first = full.a.div_ceil(2);
            part_runs.push(SubBlock {
                a: first,
                ..full.clone()
            });
            part_runs.push(SubBlock {
                a: full.a - first,
                start: full.start + first,
                ..full
            });
        }
        blocks.append(&mut part_runs);
        offset += part.n();
    }
    // gap after each run extends to the next run's start (or to the end of
    // the whole wire space for the last one, absorbing any leading gap)
    let count = blocks.len();
    for i in 0..count {
        let gap_end = if i + 1 < count {
            blocks[i + 1].start
        } else {
            n + 1
        };
        blocks[i].b = gap_end - blocks[i].end() - 1;
    }
    Ok(SubBlockDecomposition {
        n,
        blocks,
        block_sizes: parts.iter().map(|p| p.n()).collect(),
    })
}

/// Measurement basis of a prepared/measured ancilla wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireBasis {
    X,
    Z,
}

/// Ancilla wires of a flag circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaWire {
    M0,
    Flag(usize),
}

/// One scheduled location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Prep {
        wire: AncillaWire,
        basis: WireBasis,
    },
    /// Coupling between a data qubit (control side, in `basis`) and m0.
    DataCoupling {
        qubit: usize,
        basis: PauliKind,
        sub_block: usize,
        pos_in_block: usize,
    },
    /// CNOT with flag control and m0 target; `closing` marks the second of
    /// the pair.
    FlagCoupling {
        flag: usize,
        closing: bool,
    },
    Measure {
        wire: AncillaWire,
        basis: WireBasis,
    },
}

impl Location {
    pub fn is_coupling(&self) -> bool {
        matches!(
            self,
            Location::DataCoupling { .. } | Location::FlagCoupling { .. }
        )
    }
}

/// An ordered measurement circuit for one operator. Fault-free execution
/// produces all-+1 flag outcomes and reports the parity of the input error
/// against the measured operator on m0.
#[derive(Debug, Clone)]
pub struct FlagCircuit {
    pub operator: Pauli,
    pub decomposition: Option<SubBlockDecomposition>,
    pub locations: Vec<Location>,
    /// Number of numbered flags m (flag wires are f0..fm); meaningless for
    /// non-flag circuits.
    pub flag_count: usize,
    pub flagged: bool,
}

impl FlagCircuit {
    pub fn n(&self) -> usize {
        self.operator.n()
    }

    /// Logical ancilla wire count: m + 2 for flagged circuits, 1 otherwise.
    pub fn ancilla_wires(&self) -> usize {
        if self.flagged {
            self.flag_count + 2
        } else {
            1
        }
    }

    /// Physical ancillas with flag reuse (odd flags share one wire, even
    /// flags another): never more than four.
    pub fn physical_ancillas(&self) -> usize {
        self.ancilla_wires().min(4)
    }

    /// Location-per-line dump, bit-exact for golden-file comparisons.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for loc in &self.locations {
            out.push_str(&format!("{loc}\n"));
        }
        out
    }
}

fn wire_name(w: AncillaWire) -> String {
    match w {
        AncillaWire::M0 => "m0".to_string(),
        AncillaWire::Flag(j) => format!("f{j}"),
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Prep { wire, basis } => {
                write!(f, "PREP {} {:?}", wire_name(*wire), basis)
            }
            Location::DataCoupling { qubit, basis, .. } => {
                write!(f, "CPL q{qubit} {}", basis.letter())
            }
            Location::FlagCoupling { flag, closing } => {
                write!(f, "{} f{flag}", if *closing { "CLOSE" } else { "OPEN" })
            }
            Location::Measure { wire, basis } => {
                write!(f, "MEAS {} {:?}", wire_name(*wire), basis)
            }
        }
    }
}

/// The flag schedule: prepare all ancillas, open f0, then per sub-block i
/// open f_i, close f_{i-1} (absent for i = 1), couple the block's qubits
/// in ascending order; after the last block close f_m, close f0, then
/// measure everything. Each sub-block sits strictly inside its own flag
/// window and outside every other numbered window.
pub fn build_flag_circuit(decomposition: SubBlockDecomposition) -> FlagCircuit {
    let m = decomposition.m();
    let mut locations = Vec::new();
    locations.push(Location::Prep {
        wire: AncillaWire::M0,
        basis: WireBasis::Z,
    });
    for j in 0..=m {
        locations.push(Location::Prep {
            wire: AncillaWire::Flag(j),
            basis: WireBasis::X,
        });
    }
    locations.push(Location::FlagCoupling {
        flag: 0,
        closing: false,
    });
    for (i, block) in decomposition.blocks.iter().enumerate() {
        locations.push(Location::FlagCoupling {
            flag: i + 1,
            closing: false,
        });
        if i >= 1 {
            locations.push(Location::FlagCoupling {
                flag: i,
                closing: true,
            });
        }
        for offset in 0..block.a {
            locations.push(Location::DataCoupling {
                qubit: block.start + offset,
                basis: block.basis,
                sub_block: i,
                pos_in_block: offset + 1,
            });
        }
    }
    locations.push(Location::FlagCoupling {
        flag: m,
        closing: true,
    });
    locations.push(Location::FlagCoupling {
        flag: 0,
        closing: true,
    });
    locations.push(Location::Measure {
        wire: AncillaWire::M0,
        basis: WireBasis::Z,
    });
    for j in 0..=m {
        locations.push(Location::Measure {
            wire: AncillaWire::Flag(j),
            basis: WireBasis::X,
        });
    }
    FlagCircuit {
        operator: decomposition.operator(),
        flag_count: m,
        decomposition: Some(decomposition),
        locations,
        flagged: true,
    }
}

/// The bare parity-measurement circuit: prep m0, couple every support
/// qubit in ascending order, measure m0. No flag wires at all.
pub fn build_nonflag_circuit(p: &Pauli) -> Result<FlagCircuit, CircuitError> {
    if p.is_identity() {
        return Err(CircuitError::IdentityOperator);
    }
    let mut locations = Vec::new();
    locations.push(Location::Prep {
        wire: AncillaWire::M0,
        basis: WireBasis::Z,
    });
    for q in p.support() {
        locations.push(Location::DataCoupling {
            qubit: q,
            basis: p.get(q),
            sub_block: 0,
            pos_in_block: 0,
        });
    }
    locations.push(Location::Measure {
        wire: AncillaWire::M0,
        basis: WireBasis::Z,
    });
    Ok(FlagCircuit {
        operator: p.clone(),
        decomposition: None,
        locations,
        flag_count: 0,
        flagged: false,
    })
}

/// The error a single fault injects, composed at its location's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultKind {
    /// Two-qubit Pauli on (control, target) of a coupling; not both I.
    Coupling {
        control: PauliKind,
        target: PauliKind,
    },
    /// Basis flip on a freshly prepared wire (X after a Z-basis prep,
    /// Z after an X-basis prep).
    PrepFlip,
    /// The recorded outcome of a measurement flips.
    MeasureFlip,
    /// Single-qubit Pauli on an idle ancilla wire, injected in the slot
    /// after the referenced location.
    AncillaIdle { wire: AncillaWire, pauli: PauliKind },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultEvent {
    pub location: usize,
    pub kind: FaultKind,
}

impl fmt::Display for FaultEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FaultKind::Coupling { control, target } => {
                write!(
                    f,
                    "loc {}: coupling {}x{}",
                    self.location,
                    control.letter(),
                    target.letter()
                )
            }
            FaultKind::PrepFlip => write!(f, "loc {}: prep flip", self.location),
            FaultKind::MeasureFlip => write!(f, "loc {}: measurement flip", self.location),
            FaultKind::AncillaIdle { wire, pauli } => {
                write!(
                    f,
                    "after loc {}: idle {} on {}",
                    self.location,
                    pauli.letter(),
                    wire_name(*wire)
                )
            }
        }
    }
}

/// Result of one circuit execution in the Pauli frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitRun {
    /// Net data error at the output (input error included).
    pub residual: Pauli,
    /// Measured m0 bit: the parity of the input error against the
    /// operator, XOR any fault-induced flips.
    pub outcome_flip: bool,
    /// Flag outcomes f0..fm (1 = flagged); empty for non-flag circuits.
    pub flags: Vec<bool>,
}

impl CircuitRun {
    pub fn any_flag(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    /// Indices of numbered flags (>= 1) that fired.
    pub fn fired_numbered(&self) -> Vec<usize> {
        self.flags
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, &f)| if f { Some(i) } else { None })
            .collect()
    }

    pub fn f0_fired(&self) -> bool {
        self.flags.first().copied().unwrap_or(false)
    }
}

#[derive(Clone, Copy, Default)]
struct WireError {
    x: bool,
    z: bool,
}

impl WireError {
    fn compose(&mut self, kind: PauliKind) {
        let (x, z) = kind.bits();
        self.x ^= x;
        self.z ^= z;
    }

    fn clear(&mut self) {
        *self = WireError::default();
    }
}

/// Execute a circuit on an input data error under a set of injected
/// faults.
///
/// Propagation rules per location:
/// - data coupling in basis B: a data error anticommuting with B adds X on
///   m0; a Z on m0 adds B on the data qubit and stays on m0; X on m0
///   passes through.
/// - flag coupling (CNOT f -> m0): X on f adds X on m0; Z on m0 adds Z on f.
/// - measurement: m0 reports its X component (Z basis), flags report their
///   Z component (X basis); measurement faults flip the recorded bit.
/// - prep faults place the basis flip on the fresh wire; idle faults
///   compose a Pauli on an ancilla wire in the slot after their location.
pub fn propagate(
    circuit: &FlagCircuit,
    input_error: &Pauli,
    faults: &[FaultEvent],
) -> Result<CircuitRun, CircuitError> {
    assert_eq!(input_error.n(), circuit.n(), "input error size mismatch");
    let len = circuit.locations.len();
    for fault in faults {
        if fault.location >= len {
            return Err(CircuitError::LocationOutOfRange {
                location: fault.location,
                len,
            });
        }
        let loc = &circuit.locations[fault.location];
        let ok = match &fault.kind {
            FaultKind::Coupling { control, target } => {
                if *control == PauliKind::I && *target == PauliKind::I {
                    return Err(CircuitError::TrivialFault);
                }
                loc.is_coupling()
            }
            FaultKind::PrepFlip => matches!(loc, Location::Prep { .. }),
            FaultKind::MeasureFlip => matches!(loc, Location::Measure { .. }),
            FaultKind::AncillaIdle { pauli, wire } => {
                if *pauli == PauliKind::I {
                    return Err(CircuitError::TrivialFault);
                }
                match wire {
                    AncillaWire::M0 => true,
                    AncillaWire::Flag(j) => circuit.flagged && *j <= circuit.flag_count,
                }
            }
        };
        if !ok {
            return Err(CircuitError::KindMismatch);
        }
    }

    let flag_slots = if circuit.flagged {
        circuit.flag_count + 1
    } else {
        0
    };
    let mut data = input_error.clone();
    let mut m0 = WireError::default();
    let mut flags = vec![WireError::default(); flag_slots];
    let mut m0_outcome = false;
    let mut flag_outcomes = vec![false; flag_slots];

    for (idx, loc) in circuit.locations.iter().enumerate() {
        match loc {
            Location::Prep { wire, .. } => match wire {
                AncillaWire::M0 => m0.clear(),
                AncillaWire::Flag(j) => flags[*j].clear(),
            },
            Location::DataCoupling { qubit, basis, .. } => {
                if data.get(*qubit).anticommutes(*basis) {
                    m0.x ^= true;
                }
                if m0.z {
                    data.mul_at(*qubit, *basis);
                }
            }
            Location::FlagCoupling { flag, .. } => {
                if flags[*flag].x {
                    m0.x ^= true;
                }
                if m0.z {
                    flags[*flag].z ^= true;
                }
            }
            Location::Measure { wire, basis } => match (wire, basis) {
                (AncillaWire::M0, WireBasis::Z) => m0_outcome = m0.x,
                (AncillaWire::Flag(j), WireBasis::X) => flag_outcomes[*j] = flags[*j].z,
                _ => unreachable!("prep/measure bases are fixed by construction"),
            },
        }
        for fault in faults.iter().filter(|f| f.location == idx) {
            match (&fault.kind, loc) {
                (FaultKind::Coupling { control, target }, Location::DataCoupling { qubit, .. }) => {
                    data.mul_at(*qubit, *control);
                    m0.compose(*target);
                }
                (FaultKind::Coupling { control, target }, Location::FlagCoupling { flag, .. }) => {
                    flags[*flag].compose(*control);
                    m0.compose(*target);
                }
                (FaultKind::PrepFlip, Location::Prep { wire, basis }) => {
                    let flip = match basis {
                        WireBasis::Z => PauliKind::X,
                        WireBasis::X => PauliKind::Z,
                    };
                    match wire {
                        AncillaWire::M0 => m0.compose(flip),
                        AncillaWire::Flag(j) => flags[*j].compose(flip),
                    }
                }
                (FaultKind::MeasureFlip, Location::Measure { wire, .. }) => match wire {
                    AncillaWire::M0 => m0_outcome ^= true,
                    AncillaWire::Flag(j) => flag_outcomes[*j] ^= true,
                },
                (FaultKind::AncillaIdle { wire, pauli }, _) => match wire {
                    AncillaWire::M0 => m0.compose(*pauli),
                    AncillaWire::Flag(j) => flags[*j].compose(*pauli),
                },
                _ => unreachable!("fault kinds were validated against locations"),
            }
        }
    }

    Ok(CircuitRun {
        residual: data,
        outcome_flip: m0_outcome,
        flags: flag_outcomes,
    })
}

/// Live window of an ancilla wire: (prep index, measure index).
fn wire_window(circuit: &FlagCircuit, wire: AncillaWire) -> Option<(usize, usize)> {
    let mut prep = None;
    let mut meas = None;
    for (i, loc) in circuit.locations.iter().enumerate() {
        match loc {
            Location::Prep { wire: w, .. } if *w == wire => prep = Some(i),
            Location::Measure { wire: w, .. } if *w == wire => meas = Some(i),
            _ => {}
        }
    }
    Some((prep?, meas?))
}

/// All single-fault events for a circuit, in deterministic order: per
/// location ascending, couplings carry all 15 nontrivial Pauli pairs,
/// preparations a basis flip, measurements an outcome flip; then idle
/// injections on every live ancilla-wire slot.
pub fn enumerate_fault_events(circuit: &FlagCircuit) -> Vec<FaultEvent> {
    let mut events = Vec::new();
    const KINDS: [PauliKind; 4] = [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z];
    for (idx, loc) in circuit.locations.iter().enumerate() {
        match loc {
            Location::Prep { .. } => events.push(FaultEvent {
                location: idx,
                kind: FaultKind::PrepFlip,
            }),
            Location::Measure { .. } => events.push(FaultEvent {
                location: idx,
                kind: FaultKind::MeasureFlip,
            }),
            Location::DataCoupling { .. } | Location::FlagCoupling { .. } => {
                for control in KINDS {
                    for target in KINDS {
                        if control == PauliKind::I && target == PauliKind::I {
                            continue;
                        }
                        events.push(FaultEvent {
                            location: idx,
                            kind: FaultKind::Coupling { control, target },
                        });
                    }
                }
            }
        }
    }
    // idle slots: between a wire's prep and its measurement
    let mut wires = vec![AncillaWire::M0];
    if circuit.flagged {
        for j in 0..=circuit.flag_count {
            wires.push(AncillaWire::Flag(j));
        }
    }
    for wire in wires {
        if let Some((prep, meas)) = wire_window(circuit, wire) {
            for slot in prep..meas {
                for pauli in PauliKind::NONTRIVIAL {
                    events.push(FaultEvent {
                        location: slot,
                        kind: FaultKind::AncillaIdle { wire, pauli },
                    });
                }
            }
        }
    }
    events
}

/// The three fault-effect forms of a coupling fault on a data coupling:
/// target I/X leaves a weight ≤ 1 data error (a); target Y/Z spreads along
/// the schedule, pure (b) or combined with a control error (c).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultForm {
    A,
    B,
    C,
}

pub fn classify_fault_effect(
    circuit: &FlagCircuit,
    fault: &FaultEvent,
) -> Result<FaultForm, CircuitError> {
    let loc = circuit
        .locations
        .get(fault.location)
        .ok_or(CircuitError::LocationOutOfRange {
            location: fault.location,
            len: circuit.locations.len(),
        })?;
    let FaultKind::Coupling { control, target } = &fault.kind else {
        return Err(CircuitError::KindMismatch);
    };
    if !matches!(loc, Location::DataCoupling { .. }) {
        return Err(CircuitError::KindMismatch);
    }
    Ok(match (control, target) {
        (_, PauliKind::I | PauliKind::X) => FaultForm::A,
        (PauliKind::I, _) => FaultForm::B,
        _ => FaultForm::C,
    })
}

/// Exhaustive circuit-level check of the five flag-signature claims, plus
/// the consecutive-form property that step 4(b) of the protocols relies
/// on. Violations are reported as human-readable fault descriptions.
#[derive(Debug, Clone, Default)]
pub struct Claim1Report {
    /// No-fault runs must not flag and must leave the data untouched.
    pub item1: Vec<String>,
    /// A coupling fault composing the propagated pair equals a pure
    /// target-Z fault at the previous coupling.
    pub item2: Vec<String>,
    /// Z-on-m0 at a data coupling of sub-block i flags exactly {f0, f_i}
    /// and leaves the trailing run (plus at most the control error).
    pub item3: Vec<String>,
    /// Z-on-m0 at a numbered flag coupling flags the window pattern:
    /// opening {f0, f_{i-1}, f_i} (f_1: {f0, f_1}); closing {f0, f_{i+1}}
    /// (f_m: {f0} only).
    pub item4: Vec<String>,
    /// Faults at f0 couplings never put an error on the data beyond the
    /// measured operator itself, and only f0 can flag.
    pub item5: Vec<String>,
    /// Each flagged {f0, f_i} residual, after the trailing correction,
    /// lies in the matching consecutive set up to one extra single-qubit
    /// error.
    pub residual_consecutive: Vec<String>,
}

impl Claim1Report {
    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn violation_count(&self) -> usize {
        self.item1.len()
            + self.item2.len()
            + self.item3.len()
            + self.item4.len()
            + self.item5.len()
            + self.residual_consecutive.len()
    }
}

/// Build the flag circuit for `p` and check it; `p` must commute with all
/// generators of `code`.
pub fn verify_claim1(code: &crate::css::CssCode, p: &Pauli) -> Result<Claim1Report, CircuitError> {
    let circuit = build_flag_circuit(decompose_operator(p)?);
    Ok(check_claim1(code, &circuit))
}

/// Check an already-built circuit; used directly by mutation tests.
pub fn check_claim1(code: &crate::css::CssCode, circuit: &FlagCircuit) -> Claim1Report {
    let mut report = Claim1Report::default();
    let n = circuit.n();
    let identity = Pauli::identity(n);
    let decomposition = circuit
        .decomposition
        .as_ref()
        .expect("claim checks apply to flagged circuits");
    debug_assert!(code
        .generators()
        .iter()
        .all(|g| circuit.operator.commutes(&g.pauli)));

    // item 1
    let clean = propagate(circuit, &identity, &[]).expect("no faults");
    if clean.any_flag() || clean.outcome_flip || !clean.residual.is_identity() {
        report
            .item1
            .push("fault-free run flagged or left an error".to_string());
    }

    // item 2: each coupling against its predecessor in the m0 order
    let couplings: Vec<usize> = circuit
        .locations
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_coupling())
        .map(|(i, _)| i)
        .collect();
    for w in couplings.windows(2) {
        let (prev, here) = (w[0], w[1]);
        let control = match &circuit.locations[here] {
            Location::DataCoupling { basis, .. } => *basis,
            Location::FlagCoupling { .. } => PauliKind::Z,
            _ => unreachable!(),
        };
        let pair = propagate(
            circuit,
            &identity,
            &[FaultEvent {
                location: here,
                kind: FaultKind::Coupling {
                    control,
                    target: PauliKind::Z,
                },
            }],
        )
        .expect("valid fault");
        let prior = propagate(
            circuit,
            &identity,
            &[FaultEvent {
                location: prev,
                kind: FaultKind::Coupling {
                    control: PauliKind::I,
                    target: PauliKind::Z,
                },
            }],
        )
        .expect("valid fault");
        if pair != prior {
            report.item2.push(format!(
                "pair fault at location {here} differs from target-Z at {prev}"
            ));
        }
    }

    // item 3 and the consecutive-residual property
    for (idx, loc) in circuit.locations.iter().enumerate() {
        let Location::DataCoupling {
            qubit,
            sub_block,
            pos_in_block,
            ..
        } = loc
        else {
            continue;
        };
        let block = &decomposition.blocks[*sub_block];
        // expected residual from a pure target-Z fault: rest of this run
        // plus every later run
        let mut expected = decomposition.trailing_correction(*sub_block);
        for q in (block.start + pos_in_block)..=block.end() {
            expected.set(q, block.basis);
        }
        for control in [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z] {
            for target in [PauliKind::Z, PauliKind::Y] {
                let run = propagate(
                    circuit,
                    &identity,
                    &[FaultEvent {
                        location: idx,
                        kind: FaultKind::Coupling { control, target },
                    }],
                )
                .expect("valid fault");
                let fired = run.fired_numbered();
                if !(run.f0_fired() && fired == vec![*sub_block + 1]) {
                    report.item3.push(format!(
                        "coupling {}x{} at loc {idx}: flags f0={} numbered={fired:?}, expected {{f0, f{}}}",
                        control.letter(),
                        target.letter(),
                        run.f0_fired(),
                        *sub_block + 1
                    ));
                }
                let mut diff = run.residual.multiply(&expected);
                diff.mul_at(*qubit, control);
                if !diff.is_identity() {
                    report.item3.push(format!(
                        "residual mismatch at loc {idx} (coupling {}x{})",
                        control.letter(),
                        target.letter()
                    ));
                }
                // flagged residual must reduce to a consecutive-set element
                // (of the sub-block's type, at its shift) up to one extra
                // single-qubit error
                let after_trailing = run
                    .residual
                    .multiply(&decomposition.trailing_correction(*sub_block));
                if !within_one_of_consecutive(decomposition, *sub_block, &after_trailing) {
                    report.residual_consecutive.push(format!(
                        "residual at loc {idx} (coupling {}x{}) is not consecutive after the trailing correction",
                        control.letter(),
                        target.letter()
                    ));
                }
            }
        }
    }

    // item 4: pure target errors on numbered flag couplings
    let m = circuit.flag_count;
    for (idx, loc) in circuit.locations.iter().enumerate() {
        let Location::FlagCoupling { flag, closing } = loc else {
            continue;
        };
        if *flag == 0 {
            continue;
        }
        let mut expected: Vec<usize> = if *closing {
            if *flag == m {
                vec![]
            } else {
                vec![flag + 1]
            }
        } else if *flag == 1 {
            vec![1]
        } else {
            vec![flag - 1, *flag]
        };
        expected.sort_unstable();
        for target in [PauliKind::Z, PauliKind::Y] {
            let run = propagate(
                circuit,
                &identity,
                &[FaultEvent {
                    location: idx,
                    kind: FaultKind::Coupling {
                        control: PauliKind::I,
                        target,
                    },
                }],
            )
            .expect("valid fault");
            let fired = run.fired_numbered();
            if !(run.f0_fired() && fired == expected) {
                report.item4.push(format!(
                    "target {} at {} f{flag} (loc {idx}): flags f0={} numbered={fired:?}, expected f0 plus {expected:?}",
                    target.letter(),
                    if *closing { "CLOSE" } else { "OPEN" },
                    run.f0_fired()
                ));
            }
        }
    }

    // item 5: all fault pairs on f0 couplings
    for (idx, loc) in circuit.locations.iter().enumerate() {
        let Location::FlagCoupling { flag: 0, .. } = loc else {
            continue;
        };
        for event in enumerate_fault_events(circuit) {
            if event.location != idx || !matches!(event.kind, FaultKind::Coupling { .. }) {
                continue;
            }
            let run = propagate(circuit, &identity, std::slice::from_ref(&event)).expect("valid");
            if !run.fired_numbered().is_empty() {
                report
                    .item5
                    .push(format!("{event} flags a numbered ancilla"));
            }
            let data_ok = run.residual.is_identity() || run.residual == circuit.operator;
            if !data_ok {
                report.item5.push(format!(
                    "{event} caused data error {}",
                    run.residual.sparse_string()
                ));
            }
        }
    }

    report
}

/// True iff `residual` equals an element of the sub-block's consecutive
/// set (X/Z/product per its basis, at its shift, within its code block) up
/// to one extra single-qubit error.
fn within_one_of_consecutive(
    decomposition: &SubBlockDecomposition,
    sub_block: usize,
    residual: &Pauli,
) -> bool {
    use crate::consecutive::{consecutive_set, SetKind};
    let block = &decomposition.blocks[sub_block];
    let n_block = decomposition.block_sizes[block.code_block];
    let offset = decomposition.code_block_offset(block.code_block) - 1;
    // the residual must be confined to the flagged code block
    for q in 1..=decomposition.n {
        if (q <= offset || q > offset + n_block) && residual.get(q) != PauliKind::I {
            return false;
        }
    }
    let mut local = Pauli::identity(n_block);
    for q in 1..=n_block {
        local.set(q, residual.get(offset + q));
    }
    let kind = match block.basis {
        PauliKind::X => SetKind::X,
        PauliKind::Z => SetKind::Z,
        _ => SetKind::Product,
    };
    let set = consecutive_set(kind, decomposition.shift_for(sub_block), n_block);
    set.elements.iter().any(|e| local.multiply(e).weight() <= 1)
}

/// Outcome of the t=1 flag-property check: every un-flagged single fault
/// must leave a residual within weight 1 of the group generated by the
/// measured operator and the stabilizer generators.
#[derive(Debug, Clone)]
pub struct TFlagReport {
    /// Condition 1: a fault-free run must not flag.
    pub flags_without_fault: bool,
    /// Condition 2 failures: un-flagged faults whose residual is more than
    /// one qubit away from the operator/stabilizer group.
    pub violations: Vec<(FaultEvent, Pauli)>,
}

impl TFlagReport {
    pub fn ok(&self) -> bool {
        !self.flags_without_fault && self.violations.is_empty()
    }
}

pub fn verify_t_flag(code: &crate::css::CssCode, circuit: &FlagCircuit) -> TFlagReport {
    use crate::bits::RowSpace;
    let n = circuit.n();
    let group = RowSpace::from_rows(
        2 * n,
        code.generators()
            .iter()
            .map(|g| g.pauli.symplectic())
            .chain(std::iter::once(circuit.operator.symplectic())),
    );
    let mut violations = Vec::new();
    let clean = propagate(circuit, &Pauli::identity(n), &[]).expect("no faults");
    let flags_without_fault = clean.any_flag();
    for event in enumerate_fault_events(circuit) {
        let run = propagate(circuit, &Pauli::identity(n), std::slice::from_ref(&event))
            .expect("enumerated faults are valid");
        if run.any_flag() {
            continue;
        }
        if group.contains(&run.residual.symplectic()) {
            continue;
        }
        let mut within_one = false;
        'outer: for q in 1..=n {
            for kind in PauliKind::NONTRIVIAL {
                let mut candidate = run.residual.clone();
                candidate.mul_at(q, kind);
                if group.contains(&candidate.symplectic()) {
                    within_one = true;
                    break 'outer;
                }
            }
        }
        if !within_one {
            violations.push((event, run.residual));
        }
    }
    TFlagReport {
        flags_without_fault,
        violations,
    }
}

/// Swap two randomly chosen coupling locations; instrumentation for the
/// verifier sensitivity checks.
pub fn mutate_swap_couplings(circuit: &FlagCircuit, seed: u64) -> FlagCircuit {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let couplings: Vec<usize> = circuit
        .locations
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_coupling())
        .map(|(i, _)| i)
        .collect();
    assert!(couplings.len() >= 2, "not enough couplings to mutate");
    let a = couplings[rng.gen_range(0..couplings.len())];
    let b = loop {
        let b = couplings[rng.gen_range(0..couplings.len())];
        if b != a {
            break b;
        }
    };
    let mut mutated = circuit.clone();
    mutated.locations.swap(a, b);
    mutated
}

//! Executable state machines for flag fault-tolerant error correction and
//! flag fault-tolerant operator measurement, including measurements that
//! span several code blocks.
//!
//! Runs are Pauli-frame simulations: the machine tracks the net data error
//! relative to the input codeword, measures generators through their flag
//! or non-flag circuits (consuming planned faults addressed to each
//! circuit execution slot), branches exactly on the observed syndrome and
//! flag pattern, and composes every correction it applies back into the
//! frame. Measurement runs assume the input codeword is a +1 eigenstate of
//! the measured operator, so the fault-free reported outcome is +1.

use serde::Serialize;
use thiserror::Error;

use crate::bits::Bits;
use crate::circuit::{
    build_flag_circuit, build_nonflag_circuit, decompose_operator, decompose_parts, propagate,
    CircuitError, CircuitRun, FaultEvent, FlagCircuit, SubBlockDecomposition,
};
use crate::consecutive::{consecutive_set, ConsecutiveSet, SetKind};
use crate::css::{CapExceeded, CssCode, GenKind, MinWeightDecoder, Syndrome, TieBreak};
use crate::pauli::{Pauli, PauliKind};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("circuit error: {0}")]
    Circuit(#[from] CircuitError),
    #[error("correction search failed: {0}")]
    Decode(#[from] CapExceeded),
    #[error("operator anticommutes with generator {index}")]
    OperatorAnticommutes { index: usize },
    #[error("unexpected flag pattern {pattern:?} (not produced by a single fault)")]
    UnexpectedFlags { pattern: Vec<usize> },
    #[error("input error length {found} does not match the code space {expected}")]
    InputLengthMismatch { found: usize, expected: usize },
    #[error("multi-block measurement needs at least two blocks")]
    TooFewBlocks,
}

/// Protocol mutations for verifier sensitivity checks; `None` in normal
/// operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Skip the trailing correction of step 4(b)/4(c).
    SkipTrailingCorrection,
}

#[derive(Debug, Clone, Copy)]
pub struct ProtocolOptions {
    pub cap: usize,
    pub tie_break: TieBreak,
    pub mutation: Mutation,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            cap: MinWeightDecoder::DEFAULT_CAP,
            tie_break: TieBreak::LexSmallest,
            mutation: Mutation::None,
        }
    }
}

/// Identifies one circuit execution a fault plan can address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    /// Flagged syndrome-measurement rounds (1-based), per generator in
    /// joint measurement order.
    SyndromeRound { round: u8, generator: usize },
    /// Flagged operator-measurement rounds (1-based).
    OperatorRound { round: u8 },
}

/// A schedule of fault events keyed by execution slot.
#[derive(Debug, Clone, Default)]
pub struct FaultPlan {
    pub events: Vec<(Slot, FaultEvent)>,
}

impl FaultPlan {
    pub fn empty() -> Self {
        FaultPlan::default()
    }

    pub fn single(slot: Slot, event: FaultEvent) -> Self {
        FaultPlan {
            events: vec![(slot, event)],
        }
    }

    fn for_slot(&self, slot: Slot) -> Vec<FaultEvent> {
        self.events
            .iter()
            .filter(|(s, _)| *s == slot)
            .map(|(_, e)| e.clone())
            .collect()
    }
}

/// Branches of the error-correction protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FtecBranch {
    B1,
    B2,
    B3,
    B4a,
    B4b,
    B4c,
}

impl FtecBranch {
    pub fn label(self) -> &'static str {
        match self {
            FtecBranch::B1 => "1",
            FtecBranch::B2 => "2",
            FtecBranch::B3 => "3",
            FtecBranch::B4a => "4(a)",
            FtecBranch::B4b => "4(b)",
            FtecBranch::B4c => "4(c)",
        }
    }
}

/// Branches of the operator-measurement protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MeasBranch {
    B1a,
    B1b,
    B1c,
    B2,
    B3,
    B4a,
    B4bI,
    B4bII,
    B4bIII,
    B4c,
}

impl MeasBranch {
    pub fn label(self) -> &'static str {
        match self {
            MeasBranch::B1a => "1(a)",
            MeasBranch::B1b => "1(b)",
            MeasBranch::B1c => "1(c)",
            MeasBranch::B2 => "2",
            MeasBranch::B3 => "3",
            MeasBranch::B4a => "4(a)",
            MeasBranch::B4bI => "4(b)-i",
            MeasBranch::B4bII => "4(b)-ii",
            MeasBranch::B4bIII => "4(b)-iii",
            MeasBranch::B4c => "4(c)",
        }
    }

    /// The coarse step label used by the fault tables.
    pub fn coarse(self) -> &'static str {
        match self {
            MeasBranch::B4bI | MeasBranch::B4bII | MeasBranch::B4bIII => "4(b)",
            other => other.label(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ftec(FtecBranch),
    Meas(MeasBranch),
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Ftec(b) => b.label(),
            Branch::Meas(b) => b.label(),
        }
    }
}

/// One measured circuit that flagged, recorded in the transcript.
#[derive(Debug, Clone, Serialize)]
pub struct FlagFire {
    /// Generator index for syndrome rounds; None for operator rounds.
    pub generator: Option<usize>,
    /// Fired flag wires (0 = f0).
    pub fired: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub kind: &'static str,
    /// Code block when the round was restricted to one block.
    pub scope: Option<usize>,
    /// Measured bits in generator order for syndrome rounds, or the single
    /// operator outcome bit.
    pub bits: String,
    pub flags: Vec<FlagFire>,
    pub halted_at_generator: Option<usize>,
}

/// Result of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub branch: Branch,
    pub corrections: Vec<Pauli>,
    /// Net data error at exit, relative to the input codeword frame.
    pub residual: Pauli,
    /// ±1 measured eigenvalue (measurement protocol only).
    pub reported_outcome: Option<i8>,
    pub transcript: Vec<RoundRecord>,
    /// The 4(b) consecutive-set lookup found no matching element and fell
    /// back to a plain minimal-weight correction.
    pub lookup_miss: bool,
    pub syndrome_rounds: usize,
    pub operator_rounds: usize,
}

/// Per-block execution context: the block's code, decoder, wire offset and
/// prebuilt generator circuits on the joint wire space.
struct BlockSlot {
    code: CssCode,
    decoder: MinWeightDecoder,
    offset: usize,
    flag_circuits: Vec<FlagCircuit>,
    nonflag_circuits: Vec<FlagCircuit>,
}

/// Reference to one generator in the joint measurement order.
#[derive(Clone, Copy)]
struct GenRef {
    block: usize,
    local: usize,
    kind: GenKind,
}

/// Shared context for protocol runs over one code or a tensor product of
/// blocks. Circuits and decoders are built once and reused across runs.
pub struct ProtocolEnv {
    blocks: Vec<BlockSlot>,
    gens: Vec<GenRef>,
    combined: CssCode,
    combined_decoder: MinWeightDecoder,
    total_n: usize,
    options: ProtocolOptions,
}

/// Block-diagonal direct sum of CSS codes; logicals are padded onto the
/// joint wire space when every block carries them.
pub fn direct_sum(codes: &[&CssCode]) -> CssCode {
    use crate::bits::BitMatrix;
    let total: usize = codes.iter().map(|c| c.n()).sum();
    let embed_row = |row: &Bits, offset: usize| {
        let mut out = Bits::zeros(total);
        for i in row.ones() {
            out.set(offset + i, true);
        }
        out
    };
    let mut hx = BitMatrix::zeros(0, total);
    let mut hz = BitMatrix::zeros(0, total);
    let mut offset = 0;
    for code in codes {
        for row in code.hx().rows() {
            hx.push_row(embed_row(row, offset));
        }
        offset += code.n();
    }
    offset = 0;
    for code in codes {
        for row in code.hz().rows() {
            hz.push_row(embed_row(row, offset));
        }
        offset += code.n();
    }
    let mut combined = CssCode::from_check_matrices(hx, hz).expect("blocks are valid CSS codes");
    if codes.iter().all(|c| c.logicals().is_some()) {
        let mut logicals = Vec::new();
        let mut offset = 0;
        for code in codes {
            for (x_bar, z_bar) in code.logicals().unwrap() {
                let embed = |p: &Pauli| {
                    let mut out = Pauli::identity(total);
                    for q in 1..=p.n() {
                        out.set(offset + q, p.get(q));
                    }
                    out
                };
                logicals.push((embed(x_bar), embed(z_bar)));
            }
            offset += code.n();
        }
        combined
            .set_logicals(logicals)
            .expect("embedded logicals stay valid");
    }
    let label = codes
        .iter()
        .map(|c| c.label())
        .collect::<Vec<_>>()
        .join(" x ");
    combined.set_label(label);
    combined
}

/// Embed a sub-block decomposition of one block's operator into the joint
/// wire space.
fn embed_decomposition(
    local: SubBlockDecomposition,
    offset: usize,
    block_sizes: Vec<usize>,
    code_block: usize,
    total: usize,
) -> SubBlockDecomposition {
    let mut blocks = local.blocks;
    for b in &mut blocks {
        b.start += offset;
        b.code_block = code_block;
    }
    let count = blocks.len();
    for i in 0..count {
        let gap_end = if i + 1 < count {
            blocks[i + 1].start
        } else {
            total + 1
        };
        blocks[i].b = gap_end - blocks[i].end() - 1;
    }
    SubBlockDecomposition {
        n: total,
        blocks,
        block_sizes,
    }
}

impl ProtocolEnv {
    pub fn new(code: &CssCode, options: ProtocolOptions) -> Self {
        Self::multi(&[code], options)
    }

    pub fn multi(codes: &[&CssCode], options: ProtocolOptions) -> Self {
        let total: usize = codes.iter().map(|c| c.n()).sum();
        let block_sizes: Vec<usize> = codes.iter().map(|c| c.n()).collect();
        let mut blocks = Vec::with_capacity(codes.len());
        let mut offset = 0;
        for (bi, code) in codes.iter().enumerate() {
            let mut flag_circuits = Vec::new();
            let mut nonflag_circuits = Vec::new();
            for g in code.generators() {
                let mut joint = Pauli::identity(total);
                for q in 1..=code.n() {
                    joint.set(offset + q, g.pauli.get(q));
                }
                let local = decompose_operator(&g.pauli).expect("generators are nontrivial");
                let embedded = embed_decomposition(local, offset, block_sizes.clone(), bi, total);
                debug_assert_eq!(embedded.operator(), joint);
                flag_circuits.push(build_flag_circuit(embedded));
                nonflag_circuits.push(build_nonflag_circuit(&joint).expect("nontrivial"));
            }
            blocks.push(BlockSlot {
                code: (*code).clone(),
                decoder: MinWeightDecoder::with_options(code, options.cap, options.tie_break),
                offset,
                flag_circuits,
                nonflag_circuits,
            });
            offset += code.n();
        }
        // joint generator order: all blocks' X generators, then all Z
        let mut gens = Vec::new();
        for (bi, code) in codes.iter().enumerate() {
            for (li, g) in code.generators().iter().enumerate() {
                if g.kind == GenKind::X {
                    gens.push(GenRef {
                        block: bi,
                        local: li,
                        kind: GenKind::X,
                    });
                }
            }
        }
        for (bi, code) in codes.iter().enumerate() {
            for (li, g) in code.generators().iter().enumerate() {
                if g.kind == GenKind::Z {
                    gens.push(GenRef {
                        block: bi,
                        local: li,
                        kind: GenKind::Z,
                    });
                }
            }
        }
        let combined = if codes.len() == 1 {
            codes[0].clone()
        } else {
            direct_sum(codes)
        };
        let combined_decoder =
            MinWeightDecoder::with_options(&combined, options.cap, options.tie_break);
        ProtocolEnv {
            blocks,
            gens,
            combined,
            combined_decoder,
            total_n: total,
            options,
        }
    }

    pub fn total_n(&self) -> usize {
        self.total_n
    }

    pub fn combined(&self) -> &CssCode {
        &self.combined
    }

    pub fn combined_decoder(&self) -> &MinWeightDecoder {
        &self.combined_decoder
    }

    pub fn options(&self) -> &ProtocolOptions {
        &self.options
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    /// The flag circuit executed for joint generator index `j`.
    pub fn generator_flag_circuit(&self, j: usize) -> &FlagCircuit {
        let g = self.gens[j];
        &self.blocks[g.block].flag_circuits[g.local]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_code(&self, block: usize) -> &CssCode {
        &self.blocks[block].code
    }

    fn embed(&self, block: usize, p: &Pauli) -> Pauli {
        let offset = self.blocks[block].offset;
        let mut out = Pauli::identity(self.total_n);
        for q in 1..=p.n() {
            out.set(offset + q, p.get(q));
        }
        out
    }
}

/// Context for operator-measurement runs: a protocol environment plus the
/// measured operator's circuits.
pub struct MeasurementEnv {
    pub env: ProtocolEnv,
    operator: Pauli,
    op_flag: FlagCircuit,
    op_nonflag: FlagCircuit,
}

impl MeasurementEnv {
    pub fn new(
        code: &CssCode,
        operator: &Pauli,
        options: ProtocolOptions,
    ) -> Result<Self, ProtocolError> {
        Self::multi(&[code], std::slice::from_ref(operator), options)
    }

    /// Multi-block measurement of parts[0] ⊗ parts[1] ⊗ …; every part must
    /// commute with its own block's generators and act nontrivially.
    pub fn multi(
        codes: &[&CssCode],
        parts: &[Pauli],
        options: ProtocolOptions,
    ) -> Result<Self, ProtocolError> {
        assert_eq!(codes.len(), parts.len(), "one operator part per code block");
        for (code, part) in codes.iter().zip(parts) {
            if part.n() != code.n() {
                return Err(ProtocolError::InputLengthMismatch {
                    found: part.n(),
                    expected: code.n(),
                });
            }
            for (gi, g) in code.generators().iter().enumerate() {
                if !part.commutes(&g.pauli) {
                    return Err(ProtocolError::OperatorAnticommutes { index: gi });
                }
            }
        }
        let env = ProtocolEnv::multi(codes, options);
        let decomposition = decompose_parts(parts)?;
        let operator = decomposition.operator();
        let op_flag = build_flag_circuit(decomposition);
        let op_nonflag = build_nonflag_circuit(&operator)?;
        Ok(MeasurementEnv {
            env,
            operator,
            op_flag,
            op_nonflag,
        })
    }

    pub fn operator(&self) -> &Pauli {
        &self.operator
    }

    pub fn operator_flag_circuit(&self) -> &FlagCircuit {
        &self.op_flag
    }
}

/// The running state of one protocol execution.
struct Machine<'e> {
    env: &'e ProtocolEnv,
    plan: &'e FaultPlan,
    error: Pauli,
    corrections: Vec<Pauli>,
    transcript: Vec<RoundRecord>,
    flagged_syndrome_round: u8,
    operator_round: u8,
    syndrome_rounds: usize,
    operator_rounds: usize,
    lookup_miss: bool,
}

enum RoundEvent {
    Completed(Syndrome),
    Flagged { generator: usize, flags: Vec<bool> },
}

impl<'e> Machine<'e> {
    fn new(
        env: &'e ProtocolEnv,
        input_error: &Pauli,
        plan: &'e FaultPlan,
    ) -> Result<Self, ProtocolError> {
        if input_error.n() != env.total_n {
            return Err(ProtocolError::InputLengthMismatch {
                found: input_error.n(),
                expected: env.total_n,
            });
        }
        Ok(Machine {
            env,
            plan,
            error: input_error.clone(),
            corrections: Vec::new(),
            transcript: Vec::new(),
            flagged_syndrome_round: 0,
            operator_round: 0,
            syndrome_rounds: 0,
            operator_rounds: 0,
            lookup_miss: false,
        })
    }

    /// Execute one circuit against the live frame; takes the frame and the
    /// circuit as disjoint borrows so prebuilt circuits need no cloning.
    fn step(
        error: &mut Pauli,
        circuit: &FlagCircuit,
        faults: &[FaultEvent],
    ) -> Result<CircuitRun, ProtocolError> {
        let run = propagate(circuit, error, faults)?;
        *error = run.residual.clone();
        Ok(run)
    }

    fn apply(&mut self, correction: Pauli) {
        if !correction.is_identity() {
            self.error.mul_assign(&correction);
            self.corrections.push(correction);
        }
    }

    /// Assemble a joint syndrome from per-generator outcome bits.
    fn syndrome_from_bits(&self, bits: &[bool]) -> Syndrome {
        let rx: usize = self.env.blocks.iter().map(|b| b.code.rx()).sum();
        let rz: usize = self.env.blocks.iter().map(|b| b.code.rz()).sum();
        let mut sx = Bits::zeros(rx);
        let mut sz = Bits::zeros(rz);
        for (j, &bit) in bits.iter().enumerate() {
            if bit {
                if j < rx {
                    sx.set(j + 1, true);
                } else {
                    sz.set(j - rx + 1, true);
                }
            }
        }
        Syndrome { sx, sz }
    }

    /// One flagged syndrome round: measure each generator through its flag
    /// circuit, halting at the first circuit that flags.
    fn flagged_syndrome_round(&mut self) -> Result<RoundEvent, ProtocolError> {
        self.flagged_syndrome_round += 1;
        self.syndrome_rounds += 1;
        let round = self.flagged_syndrome_round;
        let mut bits = Vec::with_capacity(self.env.gens.len());
        let mut fires = Vec::new();
        for j in 0..self.env.gens.len() {
            let faults = self.plan.for_slot(Slot::SyndromeRound {
                round,
                generator: j,
            });
            let run = Self::step(&mut self.error, self.env.generator_flag_circuit(j), &faults)?;
            bits.push(run.outcome_flip);
            if run.any_flag() {
                let fired: Vec<usize> = run
                    .flags
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &f)| if f { Some(i) } else { None })
                    .collect();
                fires.push(FlagFire {
                    generator: Some(j),
                    fired,
                });
                self.transcript.push(RoundRecord {
                    kind: "syndrome-flag",
                    scope: None,
                    bits: bits.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                    flags: fires,
                    halted_at_generator: Some(j),
                });
                return Ok(RoundEvent::Flagged {
                    generator: j,
                    flags: run.flags,
                });
            }
        }
        self.transcript.push(RoundRecord {
            kind: "syndrome-flag",
            scope: None,
            bits: bits.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            flags: fires,
            halted_at_generator: None,
        });
        Ok(RoundEvent::Completed(self.syndrome_from_bits(&bits)))
    }

    /// One non-flag syndrome round over the whole code space.
    fn nonflag_syndrome_round(&mut self) -> Result<Syndrome, ProtocolError> {
        self.syndrome_rounds += 1;
        let mut bits = Vec::with_capacity(self.env.gens.len());
        for j in 0..self.env.gens.len() {
            let g = self.env.gens[j];
            let circuit = &self.env.blocks[g.block].nonflag_circuits[g.local];
            let run = Self::step(&mut self.error, circuit, &[])?;
            bits.push(run.outcome_flip);
        }
        let syndrome = self.syndrome_from_bits(&bits);
        self.transcript.push(RoundRecord {
            kind: "syndrome-nonflag",
            scope: None,
            bits: bits.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            flags: Vec::new(),
            halted_at_generator: None,
        });
        Ok(syndrome)
    }

    /// One non-flag syndrome round restricted to a single code block,
    /// returning the block-local syndrome.
    fn nonflag_syndrome_round_block(&mut self, block: usize) -> Result<Syndrome, ProtocolError> {
        self.syndrome_rounds += 1;
        let slot = &self.env.blocks[block];
        let mut sx = Bits::zeros(slot.code.rx());
        let mut sz = Bits::zeros(slot.code.rz());
        let gen_count = slot.code.generators().len();
        let mut bits = String::new();
        for li in 0..gen_count {
            let circuit = &self.env.blocks[block].nonflag_circuits[li];
            let run = Self::step(&mut self.error, circuit, &[])?;
            bits.push(if run.outcome_flip { '1' } else { '0' });
            if run.outcome_flip {
                let g = &self.env.blocks[block].code.generators()[li];
                match g.kind {
                    GenKind::X => sx.set(g.row, true),
                    GenKind::Z => sz.set(g.row, true),
                }
            }
        }
        self.transcript.push(RoundRecord {
            kind: "syndrome-nonflag",
            scope: Some(block),
            bits,
            flags: Vec::new(),
            halted_at_generator: None,
        });
        Ok(Syndrome { sx, sz })
    }

    fn apply_combined_min_weight(&mut self, syndrome: &Syndrome) -> Result<(), ProtocolError> {
        let correction = self
            .env
            .combined_decoder
            .correction(&self.env.combined, syndrome)?
            .clone();
        self.apply(correction);
        Ok(())
    }

    fn apply_block_min_weight(
        &mut self,
        block: usize,
        syndrome: &Syndrome,
    ) -> Result<(), ProtocolError> {
        let slot = &self.env.blocks[block];
        let correction = slot.decoder.correction(&slot.code, syndrome)?.clone();
        let embedded = self.env.embed(block, &correction);
        self.apply(embedded);
        Ok(())
    }

    fn lookup_by_sx(&self, block: usize, set: &ConsecutiveSet, sx: &Bits) -> Option<Pauli> {
        let code = &self.env.blocks[block].code;
        set.elements
            .iter()
            .find(|e| &code.syndrome(e).sx == sx)
            .cloned()
    }

    fn lookup_by_sz(&self, block: usize, set: &ConsecutiveSet, sz: &Bits) -> Option<Pauli> {
        let code = &self.env.blocks[block].code;
        set.elements
            .iter()
            .find(|e| &code.syndrome(e).sz == sz)
            .cloned()
    }

    fn lookup_full(&self, block: usize, set: &ConsecutiveSet, s: &Syndrome) -> Option<Pauli> {
        let code = &self.env.blocks[block].code;
        set.elements
            .iter()
            .find(|e| &code.syndrome(e) == s)
            .cloned()
    }

    /// The consecutive-correction sequence shared by step 4(b)/4(c) of
    /// both protocols: trailing correction, one block-restricted non-flag
    /// syndrome round, then the consecutive-set lookup in the sub-block's
    /// basis with a plain minimal-weight fallback.
    fn consecutive_correction(
        &mut self,
        decomposition: &SubBlockDecomposition,
        flagged_sub: usize,
        basis: PauliKind,
    ) -> Result<(), ProtocolError> {
        if self.env.options.mutation != Mutation::SkipTrailingCorrection {
            self.apply(decomposition.trailing_correction(flagged_sub));
        }
        let block = decomposition.blocks[flagged_sub].code_block;
        let s = self.nonflag_syndrome_round_block(block)?;
        let l = decomposition.shift_for(flagged_sub);
        let n_block = self.env.blocks[block].code.n();
        match basis {
            PauliKind::Z => {
                let set = consecutive_set(SetKind::Z, l, n_block);
                match self.lookup_by_sx(block, &set, &s.sx) {
                    Some(e) => {
                        let embedded = self.env.embed(block, &e);
                        self.apply(embedded);
                        let rest = Syndrome {
                            sx: Bits::zeros(s.sx.len()),
                            sz: s.sz.clone(),
                        };
                        self.apply_block_min_weight(block, &rest)?;
                    }
                    None => {
                        self.lookup_miss = true;
                        self.apply_block_min_weight(block, &s)?;
                    }
                }
            }
            PauliKind::X => {
                let set = consecutive_set(SetKind::X, l, n_block);
                match self.lookup_by_sz(block, &set, &s.sz) {
                    Some(e) => {
                        let embedded = self.env.embed(block, &e);
                        self.apply(embedded);
                        let rest = Syndrome {
                            sx: s.sx.clone(),
                            sz: Bits::zeros(s.sz.len()),
                        };
                        self.apply_block_min_weight(block, &rest)?;
                    }
                    None => {
                        self.lookup_miss = true;
                        self.apply_block_min_weight(block, &s)?;
                    }
                }
            }
            PauliKind::Y => {
                let set = consecutive_set(SetKind::Product, l, n_block);
                match self.lookup_full(block, &set, &s) {
                    Some(e) => {
                        let embedded = self.env.embed(block, &e);
                        self.apply(embedded);
                    }
                    None => {
                        self.lookup_miss = true;
                        self.apply_block_min_weight(block, &s)?;
                    }
                }
            }
            PauliKind::I => unreachable!("sub-blocks carry nontrivial bases"),
        }
        Ok(())
    }

    /// Step 4 of the error-correction protocol: f0 flagged while measuring
    /// a generator through `circuit`.
    fn ftec_step4(
        &mut self,
        circuit: &FlagCircuit,
        kind: GenKind,
        flags: &[bool],
    ) -> Result<FtecBranch, ProtocolError> {
        let fired: Vec<usize> = flags
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, &f)| if f { Some(i) } else { None })
            .collect();
        if fired.is_empty() {
            let s = self.nonflag_syndrome_round()?;
            self.apply_combined_min_weight(&s)?;
            return Ok(FtecBranch::B4a);
        }
        let (flagged_sub, branch) = match fired.as_slice() {
            [i] => (i - 1, FtecBranch::B4b),
            [i, j] if *j == i + 1 => (i - 1, FtecBranch::B4c),
            other => {
                return Err(ProtocolError::UnexpectedFlags {
                    pattern: other.to_vec(),
                })
            }
        };
        let decomposition = circuit
            .decomposition
            .as_ref()
            .expect("flagged circuits carry their decomposition")
            .clone();
        self.consecutive_correction(&decomposition, flagged_sub, kind.basis())?;
        Ok(branch)
    }

    /// The error-correction state machine. Returns the branch taken and,
    /// for branch 1, the repeated syndrome.
    fn ftec(&mut self) -> Result<(FtecBranch, Option<Syndrome>), ProtocolError> {
        let round1 = self.flagged_syndrome_round()?;
        let s1 = match round1 {
            RoundEvent::Flagged { generator, flags } => {
                let circuit = self.env.generator_flag_circuit(generator).clone();
                let kind = self.env.gens[generator].kind;
                if !flags[0] {
                    // a numbered flag alone: remeasure without flags and
                    // correct on the fresh syndrome
                    let s2 = self.nonflag_syndrome_round()?;
                    self.apply_combined_min_weight(&s2)?;
                    return Ok((FtecBranch::B3, None));
                }
                return Ok((self.ftec_step4(&circuit, kind, &flags)?, None));
            }
            RoundEvent::Completed(s) => s,
        };
        let round2 = self.flagged_syndrome_round()?;
        let s2 = match round2 {
            RoundEvent::Flagged { generator, flags } => {
                let circuit = self.env.generator_flag_circuit(generator).clone();
                let kind = self.env.gens[generator].kind;
                if !flags[0] {
                    // round-one syndrome is trustworthy: the round-two flag
                    // consumed the fault budget
                    self.apply_combined_min_weight(&s1)?;
                    return Ok((FtecBranch::B3, None));
                }
                return Ok((self.ftec_step4(&circuit, kind, &flags)?, None));
            }
            RoundEvent::Completed(s) => s,
        };
        if s1 == s2 {
            self.apply_combined_min_weight(&s1)?;
            Ok((FtecBranch::B1, Some(s1)))
        } else {
            let s3 = self.nonflag_syndrome_round()?;
            self.apply_combined_min_weight(&s3)?;
            Ok((FtecBranch::B2, None))
        }
    }

    /// One flagged operator-measurement round. Returns the outcome bit and
    /// the flag vector when any flag fired.
    fn flagged_operator_round(
        &mut self,
        menv: &MeasurementEnv,
    ) -> Result<(bool, Option<Vec<bool>>), ProtocolError> {
        self.operator_round += 1;
        self.operator_rounds += 1;
        let round = self.operator_round;
        let faults = self.plan.for_slot(Slot::OperatorRound { round });
        let run = Self::step(&mut self.error, &menv.op_flag, &faults)?;
        let flagged = run.any_flag();
        let fires = if flagged {
            vec![FlagFire {
                generator: None,
                fired: run
                    .flags
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &f)| if f { Some(i) } else { None })
                    .collect(),
            }]
        } else {
            Vec::new()
        };
        self.transcript.push(RoundRecord {
            kind: "operator-flag",
            scope: None,
            bits: if run.outcome_flip { "1" } else { "0" }.to_string(),
            flags: fires,
            halted_at_generator: None,
        });
        Ok((
            run.outcome_flip,
            if flagged { Some(run.flags) } else { None },
        ))
    }

    fn nonflag_operator_round(&mut self, menv: &MeasurementEnv) -> Result<bool, ProtocolError> {
        self.operator_rounds += 1;
        let run = Self::step(&mut self.error, &menv.op_nonflag, &[])?;
        self.transcript.push(RoundRecord {
            kind: "operator-nonflag",
            scope: None,
            bits: if run.outcome_flip { "1" } else { "0" }.to_string(),
            flags: Vec::new(),
            halted_at_generator: None,
        });
        Ok(run.outcome_flip)
    }

    /// Step 4 of the measurement protocol: f0 flagged during an operator
    /// round.
    fn meas_step4(
        &mut self,
        menv: &MeasurementEnv,
        flags: &[bool],
    ) -> Result<(MeasBranch, bool), ProtocolError> {
        let fired: Vec<usize> = flags
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, &f)| if f { Some(i) } else { None })
            .collect();
        if fired.is_empty() {
            let m = self.nonflag_operator_round(menv)?;
            return Ok((MeasBranch::B4a, m));
        }
        let (flagged_sub, is_pair) = match fired.as_slice() {
            [i] => (i - 1, false),
            [i, j] if *j == i + 1 => (i - 1, true),
            other => {
                return Err(ProtocolError::UnexpectedFlags {
                    pattern: other.to_vec(),
                })
            }
        };
        let decomposition = menv
            .op_flag
            .decomposition
            .as_ref()
            .expect("flag circuit carries its decomposition")
            .clone();
        let basis = decomposition.blocks[flagged_sub].basis;
        self.consecutive_correction(&decomposition, flagged_sub, basis)?;
        let m = self.nonflag_operator_round(menv)?;
        let branch = if is_pair {
            MeasBranch::B4c
        } else {
            match basis {
                PauliKind::Z => MeasBranch::B4bI,
                PauliKind::X => MeasBranch::B4bII,
                PauliKind::Y => MeasBranch::B4bIII,
                PauliKind::I => unreachable!(),
            }
        };
        Ok((branch, m))
    }

    fn finish(self, branch: Branch, reported: Option<bool>) -> ProtocolOutcome {
        ProtocolOutcome {
            branch,
            corrections: self.corrections,
            residual: self.error,
            reported_outcome: reported.map(|bit| if bit { -1 } else { 1 }),
            transcript: self.transcript,
            lookup_miss: self.lookup_miss,
            syndrome_rounds: self.syndrome_rounds,
            operator_rounds: self.operator_rounds,
        }
    }
}

/// Run the flag error-correction protocol on an input error under a fault
/// plan. The environment's code must have distinguishable consecutive
/// error sets for all shifts (checked once, out of band).
pub fn run_ftec(
    env: &ProtocolEnv,
    input_error: &Pauli,
    plan: &FaultPlan,
) -> Result<ProtocolOutcome, ProtocolError> {
    let mut machine = Machine::new(env, input_error, plan)?;
    let (branch, _) = machine.ftec()?;
    Ok(machine.finish(Branch::Ftec(branch), None))
}

/// Run the flag operator-measurement protocol. The input codeword is
/// assumed to be a +1 eigenstate of the measured operator.
pub fn run_ft_measurement(
    menv: &MeasurementEnv,
    input_error: &Pauli,
    plan: &FaultPlan,
) -> Result<ProtocolOutcome, ProtocolError> {
    let env = &menv.env;
    let mut machine = Machine::new(env, input_error, plan)?;

    let (m1, flags1) = machine.flagged_operator_round(menv)?;
    if let Some(flags) = flags1 {
        if !flags[0] {
            let m2 = machine.nonflag_operator_round(menv)?;
            return Ok(machine.finish(Branch::Meas(MeasBranch::B3), Some(m2)));
        }
        let (branch, m) = machine.meas_step4(menv, &flags)?;
        return Ok(machine.finish(Branch::Meas(branch), Some(m)));
    }

    let (m2, flags2) = machine.flagged_operator_round(menv)?;
    if let Some(flags) = flags2 {
        if !flags[0] {
            // the round-two flag used up the fault budget, so m1 stands
            return Ok(machine.finish(Branch::Meas(MeasBranch::B3), Some(m1)));
        }
        let (branch, m) = machine.meas_step4(menv, &flags)?;
        return Ok(machine.finish(Branch::Meas(branch), Some(m)));
    }

    if m1 == m2 {
        let (fbranch, repeated) = machine.ftec()?;
        match (fbranch, repeated) {
            (FtecBranch::B1, Some(s)) if s.is_zero() => {
                Ok(machine.finish(Branch::Meas(MeasBranch::B1a), Some(m1)))
            }
            (FtecBranch::B1, _) => {
                let m3 = machine.nonflag_operator_round(menv)?;
                Ok(machine.finish(Branch::Meas(MeasBranch::B1c), Some(m3)))
            }
            _ => Ok(machine.finish(Branch::Meas(MeasBranch::B1b), Some(m1))),
        }
    } else {
        let s = machine.nonflag_syndrome_round()?;
        machine.apply_combined_min_weight(&s)?;
        let m3 = machine.nonflag_operator_round(menv)?;
        Ok(machine.finish(Branch::Meas(MeasBranch::B2), Some(m3)))
    }
}

/// Measure an operator spanning several code blocks: parts are treated as
/// sub-blocks of one joint circuit, and post-flag syndrome measurement is
/// restricted to the implicated block.
pub fn run_multiblock_measurement(
    codes: &[&CssCode],
    parts: &[Pauli],
    input_errors: &[Pauli],
    plan: &FaultPlan,
    options: ProtocolOptions,
) -> Result<ProtocolOutcome, ProtocolError> {
    if codes.len() < 2 {
        return Err(ProtocolError::TooFewBlocks);
    }
    let menv = MeasurementEnv::multi(codes, parts, options)?;
    assert_eq!(input_errors.len(), codes.len(), "one input error per block");
    let mut joint = Pauli::identity(menv.env.total_n());
    let mut offset = 0;
    for (code, e) in codes.iter().zip(input_errors) {
        for q in 1..=e.n() {
            joint.set(offset + q, e.get(q));
        }
        offset += code.n();
    }
    run_ft_measurement(&menv, &joint, plan)
}

//! Communication ledger.
//!
//! Every modeled message is appended as a [`MessageRecord`]. Entries are never
//! edited or removed, and the cached totals always equal the sum of the
//! entries. An [`inert`](CommLedger::inert) ledger validates charges but keeps
//! nothing; protocols must behave identically on either kind.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::Add;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("message amount must be at least 1 (phase {phase:?})")]
    ZeroAmount { phase: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::AliceToBob => Direction::BobToAlice,
            Direction::BobToAlice => Direction::AliceToBob,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AliceToBob => "alice-to-bob",
            Direction::BobToAlice => "bob-to-alice",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    ClassicalBits,
    Qubits,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::ClassicalBits => "classical-bits",
            Kind::Qubits => "qubits",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageRecord {
    pub direction: Direction,
    pub kind: Kind,
    pub amount: u64,
    pub phase: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Totals {
    pub classical_bits: u64,
    pub qubits: u64,
}

impl Totals {
    /// Classical bits plus qubits.
    pub fn total(&self) -> u64 {
        self.classical_bits + self.qubits
    }

    fn add_record(&mut self, kind: Kind, amount: u64) {
        match kind {
            Kind::ClassicalBits => self.classical_bits += amount,
            Kind::Qubits => self.qubits += amount,
        }
    }
}

impl Add for Totals {
    type Output = Totals;

    fn add(self, rhs: Totals) -> Totals {
        Totals {
            classical_bits: self.classical_bits + rhs.classical_bits,
            qubits: self.qubits + rhs.qubits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommLedger {
    entries: Vec<MessageRecord>,
    totals: Totals,
    recording: bool,
}

impl Default for CommLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl CommLedger {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            totals: Totals::default(),
            recording: true,
        }
    }

    /// A ledger that accepts (and validates) charges without recording them.
    pub fn inert() -> Self {
        Self {
            recording: false,
            ..Self::new()
        }
    }

    /// A fresh ledger with the same recording mode.
    pub fn sibling(&self) -> Self {
        Self {
            recording: self.recording,
            ..Self::new()
        }
    }

    pub fn is_recording(&self) -> bool {
        self.recording
    }

    pub fn charge(
        &mut self,
        direction: Direction,
        kind: Kind,
        amount: u64,
        phase: &str,
    ) -> Result<(), LedgerError> {
        if amount == 0 {
            return Err(LedgerError::ZeroAmount {
                phase: phase.to_owned(),
            });
        }
        if self.recording {
            self.totals.add_record(kind, amount);
            self.entries.push(MessageRecord {
                direction,
                kind,
                amount,
                phase: phase.to_owned(),
            });
        }
        Ok(())
    }

    pub fn charge_bits(
        &mut self,
        direction: Direction,
        amount: u64,
        phase: &str,
    ) -> Result<(), LedgerError> {
        self.charge(direction, Kind::ClassicalBits, amount, phase)
    }

    pub fn charge_qubits(
        &mut self,
        direction: Direction,
        amount: u64,
        phase: &str,
    ) -> Result<(), LedgerError> {
        self.charge(direction, Kind::Qubits, amount, phase)
    }

    /// Appends all entries of `other`, in order.
    pub fn append(&mut self, other: &CommLedger) {
        if !self.recording {
            return;
        }
        for e in &other.entries {
            self.totals.add_record(e.kind, e.amount);
            self.entries.push(e.clone());
        }
    }

    pub fn entries(&self) -> &[MessageRecord] {
        &self.entries
    }

    pub fn totals(&self) -> Totals {
        self.totals
    }

    pub fn report(&self) -> Report {
        let mut phases: BTreeMap<String, Totals> = BTreeMap::new();
        for e in &self.entries {
            phases.entry(e.phase.clone()).or_default().add_record(e.kind, e.amount);
        }
        Report {
            phases,
            grand: self.totals,
        }
    }

    /// Writes one row per entry using the ledger CSV schema.
    pub fn write_csv<W: Write>(&self, trial_id: u64, out: &mut W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(
                out,
                "{trial_id},{},{},{},{}",
                e.phase,
                e.direction.as_str(),
                e.kind.as_str(),
                e.amount
            )?;
        }
        Ok(())
    }
}

/// Header of the per-message CSV.
pub const LEDGER_CSV_HEADER: &str = "trial_id,phase,direction,kind,amount";

/// Per-phase and grand totals of a ledger. Phases are ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub phases: BTreeMap<String, Totals>,
    pub grand: Totals,
}

impl Report {
    /// Phase rows followed by a `total` row: `phase,classical_bits,qubits`.
    pub fn rows(&self) -> Vec<(String, Totals)> {
        self.phases
            .iter()
            .map(|(p, t)| (p.clone(), *t))
            .chain(std::iter::once(("total".to_owned(), self.grand)))
            .collect()
    }
}

impl Add for Report {
    type Output = Report;

    fn add(mut self, rhs: Report) -> Report {
        for (phase, t) in rhs.phases {
            let slot = self.phases.entry(phase).or_default();
            *slot = *slot + t;
        }
        self.grand = self.grand + rhs.grand;
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "phase,classical_bits,qubits")?;
        for (phase, t) in self.rows() {
            writeln!(f, "{phase},{},{}", t.classical_bits, t.qubits)?;
        }
        Ok(())
    }
}

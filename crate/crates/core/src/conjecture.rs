//! Grid exploration of the Dold condition for discriminant-scaled Lucas
//! sequences: for each (P, Q) in a rectangle, scan whether
//! ((P^2-4Q) U_{n^2}(P,Q)) satisfies the Dold condition up to max_n.
//!
//! Only the Dold condition is tested here, not the sign condition; the
//! multiplier P^2-4Q may be negative, and the companion V-family needs no
//! multiplier at all (it satisfies the Dold condition on its own).

use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::arith::{factorize, mobius_convolve_mod};
use crate::error::Result;
use crate::sequences::{LucasParams, SequenceBase, SequenceSpec};

/// Structural class of a discriminant, annotated because a cell is only
/// informative when D contributes prime factors of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscriminantClass {
    /// D = 0: the scaled sequence is identically zero.
    Zero,
    /// |D| = 1.
    Unit,
    /// |D| is a prime power.
    PrimePower,
    General,
}

pub fn discriminant_class(d: i64) -> DiscriminantClass {
    match d.unsigned_abs() {
        0 => DiscriminantClass::Zero,
        1 => DiscriminantClass::Unit,
        m => {
            if factorize(m)
                .map(|f| f.entries().len() == 1)
                .unwrap_or(false)
            {
                DiscriminantClass::PrimePower
            } else {
                DiscriminantClass::General
            }
        }
    }
}

/// Verdict for one (P, Q) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CellStatus {
    Pass,
    Fail {
        first_n: u64,
        residue: u64,
    },
    /// D = 0, so every term is zero and the scan is vacuous.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjectureCell {
    pub p: i64,
    pub q: i64,
    pub discriminant: i64,
    pub class: DiscriminantClass,
    #[serde(flatten)]
    pub status: CellStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjectureSummary {
    pub pass: u64,
    pub fail: u64,
    pub degenerate: u64,
}

/// Grid scan result; cells are row-major (P outer, Q inner), each (P, Q)
/// exactly once.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub p_range: (i64, i64),
    pub q_range: (i64, i64),
    pub max_n: u64,
    pub cells: Vec<ConjectureCell>,
    pub summary: ConjectureSummary,
}

/// Runs the per-n modular Dold rows for `multiplier * U_{n^j}(params)` and
/// returns the first failure, if any. Shared by the public cell check and
/// the failure-injection tests.
fn scan_spec_status(spec: &SequenceSpec, max_n: u64) -> Result<CellStatus> {
    for n in 1..=max_n {
        let residue = mobius_convolve_mod(n, n, |d| spec.eval_mod(d, n))?;
        if residue != 0 {
            return Ok(CellStatus::Fail {
                first_n: n,
                residue,
            });
        }
    }
    Ok(CellStatus::Pass)
}

/// Scans the Dold condition of ((P^2-4Q) U_{n^2}(P,Q)) up to max_n.
pub fn conjecture_check(params: &LucasParams, max_n: u64) -> Result<CellStatus> {
    let d = params.discriminant();
    if d == 0 {
        return Ok(CellStatus::Degenerate);
    }
    let spec = SequenceSpec::new(SequenceBase::LucasU(*params), 2, d)?;
    scan_spec_status(&spec, max_n)
}

fn make_cell(p: i64, q: i64, max_n: u64) -> Result<ConjectureCell> {
    let params = LucasParams::new(p, q);
    let status = conjecture_check(&params, max_n)?;
    Ok(ConjectureCell {
        p,
        q,
        discriminant: params.discriminant(),
        class: discriminant_class(params.discriminant()),
        status,
    })
}

/// Scans the full inclusive grid; cells are independent and run in
/// parallel, assembled in row-major order regardless of worker count.
pub fn conjecture_scan(
    p_range: (i64, i64),
    q_range: (i64, i64),
    max_n: u64,
) -> Result<ConjectureReport> {
    let mut coords = Vec::new();
    for p in p_range.0..=p_range.1 {
        for q in q_range.0..=q_range.1 {
            coords.push((p, q));
        }
    }
    let cells: Vec<ConjectureCell> = coords
        .into_par_iter()
        .map(|(p, q)| make_cell(p, q, max_n))
        .collect::<Result<_>>()?;
    let mut summary = ConjectureSummary {
        pass: 0,
        fail: 0,
        degenerate: 0,
    };
    for cell in &cells {
        match cell.status {
            CellStatus::Pass => summary.pass += 1,
            CellStatus::Fail { .. } => summary.fail += 1,
            CellStatus::Degenerate => summary.degenerate += 1,
        }
    }
    Ok(ConjectureReport {
        p_range,
        q_range,
        max_n,
        cells,
        summary,
    })
}

impl ConjectureReport {
    pub fn fail_count(&self) -> u64 {
        self.summary.fail
    }

    /// Compact terminal rendering: one row per P, one status character per
    /// cell (`.` pass, `o` degenerate, `X` fail).
    pub fn render_matrix(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "P \\ Q in [{}, {}], max_n = {}",
            self.q_range.0, self.q_range.1, self.max_n
        );
        let width = if self.q_range.0 <= self.q_range.1 {
            (self.q_range.1 - self.q_range.0 + 1) as usize
        } else {
            0
        };
        for (i, chunk) in self.cells.chunks(width.max(1)).enumerate() {
            if width == 0 {
                break;
            }
            let p = self.p_range.0 + i as i64;
            let line: String = chunk
                .iter()
                .map(|cell| match cell.status {
                    CellStatus::Pass => '.',
                    CellStatus::Degenerate => 'o',
                    CellStatus::Fail { .. } => 'X',
                })
                .collect();
            let _ = writeln!(out, "{p:>6} | {line}");
        }
        out
    }
}

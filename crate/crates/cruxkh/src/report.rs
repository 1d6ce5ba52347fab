//! Machine-readable reports for the CLI: homology tables and verification
//! suites, deterministic for fixed input.

use serde::Serialize;

use crate::exactalg::HomologyGroup;

#[derive(Serialize, Clone, Debug)]
pub struct HomologyRow {
    pub i: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<i64>,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl HomologyRow {
    pub fn from_group(i: i64, j: Option<i64>, h: &HomologyGroup) -> Self {
        HomologyRow {
            i,
            j,
            free_rank: h.free_rank,
            torsion: h.torsion.iter().map(|t| t.to_string()).collect(),
        }
    }

    pub fn tsv(&self) -> String {
        let torsion = if self.torsion.is_empty() {
            "-".to_string()
        } else {
            self.torsion.join(",")
        };
        match self.j {
            Some(j) => format!("{}\t{}\t{}\t{}", self.i, j, self.free_rank, torsion),
            None => format!("{}\t{}\t{}", self.i, self.free_rank, torsion),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct HomologyReport {
    pub command: String,
    pub diagram_digest: String,
    pub ring: String,
    pub h: i64,
    pub t: i64,
    pub graded: bool,
    pub rows: Vec<HomologyRow>,
    pub elapsed_ms: u128,
}

#[derive(Serialize, Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct VerifyReport {
    pub command: String,
    pub suite: String,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn new(suite: &str) -> Self {
        VerifyReport {
            command: "verify".into(),
            suite: suite.into(),
            checks: Vec::new(),
            pass: true,
            elapsed_ms: 0,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(CheckLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn print_tsv(&self) {
        for c in &self.checks {
            println!(
                "{}\t{}\t{}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!(
            "{}\tsuite:{}\t{} checks",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.checks.len()
        );
    }
}

/// Stable 64-bit FNV-1a digest of the canonical serialization.
pub fn digest(text: &str) -> String {
    let mut h = 0xcbf29ce484222325u64;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

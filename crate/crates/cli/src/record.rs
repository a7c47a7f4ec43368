//! One-line run records.

use serde::{Deserialize, Serialize};

/// Result of checking one certificate against an exact optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub factor: String,
    pub value: u64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Certificates {
    pub pre_trim_cost: Option<u64>,
    pub pre_trim_prize: Option<u64>,
    pub pre_trim_factor: Option<String>,
    pub final_factor: Option<String>,
    /// Exact optimum, when it was computed.
    pub optimum: Option<u64>,
    pub within_budget: Option<bool>,
    pub checks: Vec<CheckRecord>,
}

/// Field order here is the order in the serialized line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub digest: String,
    pub seed: Option<u64>,
    pub variant: String,
    pub epsilon: Option<String>,
    pub budget: u64,
    pub cost: u64,
    pub prize: u64,
    pub budget_factor: String,
    pub nodes: Vec<usize>,
    pub root: Option<usize>,
    pub run: Option<String>,
    pub trim_case: Option<String>,
    /// Sets visited by an exact search.
    pub states: Option<u64>,
    pub certificates: Certificates,
    pub wall_ms: f64,
}

impl RunRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    /// The record with the wall time zeroed, for reproducibility checks.
    pub fn timeless(&self) -> RunRecord {
        RunRecord {
            wall_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn passed(&self) -> bool {
        self.certificates.within_budget != Some(false)
            && self.certificates.checks.iter().all(|c| c.holds)
    }

    pub fn to_human(&self) -> String {
        let mut out = format!(
            "{} {} [{}]\n  cost {} of budget {} (factor {}), prize {}\n  tree {:?}",
            self.command,
            self.variant,
            &self.digest[..12.min(self.digest.len())],
            self.cost,
            self.budget,
            self.budget_factor,
            self.prize,
            self.nodes,
        );
        if let Some(e) = &self.epsilon {
            out.push_str(&format!("\n  epsilon {e}"));
        }
        if let Some(r) = &self.run {
            out.push_str(&format!("\n  run {r}"));
        }
        if let Some(c) = &self.trim_case {
            out.push_str(&format!("\n  trim {c}"));
        }
        let c = &self.certificates;
        if let (Some(p), Some(f)) = (c.pre_trim_prize, &c.pre_trim_factor) {
            out.push_str(&format!("\n  pre-trim prize {p}, promised {f} of OPT"));
        }
        if let Some(f) = &c.final_factor {
            out.push_str(&format!("\n  final promise {f} of OPT"));
        }
        if let Some(o) = c.optimum {
            out.push_str(&format!("\n  optimum {o}"));
        }
        if let Some(s) = self.states {
            out.push_str(&format!("\n  states {s}"));
        }
        for check in &c.checks {
            out.push_str(&format!(
                "\n  {} {}: {} >= {:.6} ({})",
                if check.holds { "ok  " } else { "FAIL" },
                check.name,
                check.value,
                check.bound,
                check.factor
            ));
        }
        if c.within_budget == Some(false) {
            out.push_str("\n  FAIL budget contract");
        }
        out.push_str(&format!("\n  {:.3} ms", self.wall_ms));
        out
    }
}

//! Machine-readable run reports with a stable field order, so fixed-seed
//! runs are byte-identical.

use serde::Serialize;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub conditions: Vec<ConditionResult>,
    pub exit_status: i32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, digest: String) -> Self {
        Report {
            command: command.to_string(),
            input_digest: digest,
            conditions: Vec::new(),
            exit_status: EXIT_PASS,
            notes: Vec::new(),
        }
    }

    pub fn condition(&mut self, name: &str, pass: bool, residual: Option<f64>, detail: Option<String>) {
        self.conditions.push(ConditionResult {
            name: name.to_string(),
            pass,
            residual,
            detail,
        });
        if !pass && self.exit_status == EXIT_PASS {
            self.exit_status = EXIT_VIOLATED;
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} ({})\n", self.command, self.input_digest));
        for c in &self.conditions {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {name}", name = c.name));
            if let Some(r) = c.residual {
                out.push_str(&format!("  residual={r:.3e}"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!("  {d}"));
            }
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!("exit: {}\n", self.exit_status));
        out
    }
}

/// FNV-1a over the input bytes; enough to pin report identity in tests.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

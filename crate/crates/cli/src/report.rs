use std::fmt::Write;

/// Fixed-width scientific notation, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// A hard contract of the invoked operation; failure makes the run fail.
    Contract,
    /// Reported for inspection only.
    Diagnostic,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Contract => "contract",
            Kind::Diagnostic => "diagnostic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub kind: Kind,
    pub value: f64,
    pub tolerance: String,
    pub oracle: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: String,
    pub seed: u64,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: String, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            config,
            seed,
            notes: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// value ≤ tolerance.
    pub fn le(&mut self, name: &str, kind: Kind, value: f64, tolerance: f64, oracle: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            kind,
            value,
            tolerance: num(tolerance),
            oracle: oracle.to_string(),
            pass: value <= tolerance,
        });
    }

    /// lo ≤ value ≤ hi.
    pub fn within(&mut self, name: &str, kind: Kind, value: f64, lo: f64, hi: f64, oracle: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            kind,
            value,
            tolerance: format!("[{} {}]", num(lo), num(hi)),
            oracle: oracle.to_string(),
            pass: lo <= value && value <= hi,
        });
    }

    pub fn failed_contracts(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.kind == Kind::Contract && !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# pertkit {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config: {}", self.config);
        let _ = writeln!(out, "# seed: {}", self.seed);
        for n in &self.notes {
            let _ = writeln!(out, "# note: {n}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "# table: {}", t.name);
            let _ = writeln!(out, "{}", t.columns.join(","));
            for r in &t.rows {
                let _ = writeln!(out, "{}", r.iter().map(|c| field(c)).collect::<Vec<_>>().join(","));
            }
        }
        let _ = writeln!(out, "# residuals");
        let _ = writeln!(out, "check,kind,value,tolerance,oracle,status");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                field(&c.name),
                c.kind.name(),
                num(c.value),
                field(&c.tolerance),
                field(&c.oracle),
                if c.pass { "pass" } else { "fail" }
            );
        }
        out
    }
}

/// Quotes a CSV field when it contains a separator or quote.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

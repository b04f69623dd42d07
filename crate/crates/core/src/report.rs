//! Plain-text and CSV verification reports.
//!
//! One check per line: `CHECK <name> <PASS|FAIL|INFO> <max-abs-error>`.

use std::fmt;
use std::io::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never counts as a failure.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_abs_error: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} {:.3e}",
            self.name, self.status, self.max_abs_error
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a check that passes when `error <= tol` (NaN fails).
    pub fn tol(&mut self, name: impl Into<String>, error: f64, tol: f64) -> bool {
        let ok = error <= tol;
        self.push(name, if ok { Status::Pass } else { Status::Fail }, error);
        ok
    }

    /// Records a boolean check; the error column is 0 on success and 1 otherwise.
    pub fn flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.push(
            name,
            if ok { Status::Pass } else { Status::Fail },
            if ok { 0.0 } else { 1.0 },
        );
        ok
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.push(name, Status::Info, value);
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, max_abs_error: f64) {
        let name: String = name.into();
        debug_assert!(!name.contains(char::is_whitespace), "check names are single tokens");
        self.checks.push(Check {
            name,
            status,
            max_abs_error,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "name,status,max_abs_error")?;
        for c in &self.checks {
            writeln!(w, "{},{},{:.3e}", c.name, c.status, c.max_abs_error)?;
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

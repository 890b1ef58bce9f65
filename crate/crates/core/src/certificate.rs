//! Machine-checkable records of contract clauses.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    /// Strict clauses require `measured < bound * (1 + slack)`.
    pub strict: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub clauses: Vec<Clause>,
    pub grid_size: usize,
    pub slack: f64,
}

impl Certificate {
    pub fn new(grid_size: usize, slack: f64) -> Self {
        Certificate {
            clauses: Vec::new(),
            grid_size,
            slack,
        }
    }

    /// Records `measured <= bound * (1 + slack)`.
    pub fn le(&mut self, name: &str, bound: f64, measured: f64) -> &mut Self {
        self.push(name, bound, measured, false)
    }

    /// Records `measured < bound * (1 + slack)`.
    pub fn lt(&mut self, name: &str, bound: f64, measured: f64) -> &mut Self {
        self.push(name, bound, measured, true)
    }

    /// Records a boolean fact as the clause `measured (0 or 1) <= 0`.
    pub fn holds(&mut self, name: &str, ok: bool) -> &mut Self {
        self.push(name, 0.0, if ok { 0.0 } else { 1.0 }, false)
    }

    fn push(&mut self, name: &str, bound: f64, measured: f64, strict: bool) -> &mut Self {
        let pass = clause_passes(bound, measured, strict, self.slack);
        self.clauses.push(Clause {
            name: name.to_string(),
            bound,
            measured,
            strict,
            pass,
        });
        self
    }

    pub fn extend(&mut self, prefix: &str, other: &Certificate) {
        for c in &other.clauses {
            let mut c = c.clone();
            c.name = format!("{prefix}{}", c.name);
            self.clauses.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// Re-evaluates every clause with half the relative tolerance.
    pub fn strict_failures(&self) -> Vec<&Clause> {
        self.clauses
            .iter()
            .filter(|c| !clause_passes(c.bound, c.measured, c.strict, self.slack / 2.0))
            .collect()
    }

    /// Parses the text produced by `Display`.
    pub fn parse(text: &str) -> crate::Result<Certificate> {
        let mut grid_size = 0;
        let mut slack = 0.0;
        let mut clauses = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(v) = line.strip_prefix("# grid_size ") {
                grid_size = v.trim().parse().map_err(|e| bad(line, e))?;
            } else if let Some(v) = line.strip_prefix("# slack ") {
                slack = v.trim().parse().map_err(|e| bad(line, e))?;
            } else if line.starts_with('#') || line.starts_with("clause,") {
                continue;
            } else {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 5 {
                    return Err(crate::Error::Parse(format!("certificate row: {line}")));
                }
                clauses.push(Clause {
                    name: f[0].to_string(),
                    strict: f[1] == "<",
                    bound: f[2].parse().map_err(|e| bad(line, e))?,
                    measured: f[3].parse().map_err(|e| bad(line, e))?,
                    pass: f[4] == "pass",
                });
            }
        }
        Ok(Certificate {
            clauses,
            grid_size,
            slack,
        })
    }
}

fn bad(line: &str, e: impl fmt::Display) -> crate::Error {
    crate::Error::Parse(format!("{line}: {e}"))
}

fn clause_passes(bound: f64, measured: f64, strict: bool, slack: f64) -> bool {
    let limit = bound * (1.0 + slack);
    if strict {
        measured < limit
    } else {
        measured <= limit
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# grid_size {}", self.grid_size)?;
        writeln!(f, "# slack {:e}", self.slack)?;
        writeln!(f, "clause,relation,bound,measured,verdict")?;
        for c in &self.clauses {
            writeln!(
                f,
                "{},{},{:e},{:e},{}",
                c.name,
                if c.strict { "<" } else { "<=" },
                c.bound,
                c.measured,
                if c.pass { "pass" } else { "fail" }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_slack() {
        let mut c = Certificate::new(64, 1e-9);
        c.le("a", 1.0, 1.0 + 1e-12).lt("b", 1.0, 0.5).lt("c", 1.0, 1.1);
        assert!(c.clauses[0].pass && c.clauses[1].pass && !c.clauses[2].pass);
        assert_eq!(c.first_failure().unwrap().name, "c");
    }

    #[test]
    fn text_round_trip() {
        let mut c = Certificate::new(128, 1e-6);
        c.le("x", 2.5, 0.125).lt("y", 0.5, 0.75).holds("z", true);
        let back = Certificate::parse(&c.to_string()).unwrap();
        assert_eq!(back, c);
    }
}

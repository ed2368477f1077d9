use std::fmt::Write as _;

/// Partial weighted MaxSAT instance with DIMACS literals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WcnfInstance {
    pub num_vars: u32,
    pub hard: Vec<Vec<i32>>,
    pub soft: Vec<(u64, Vec<i32>)>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum WcnfError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("missing `p wcnf` header")]
    NoHeader,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

impl WcnfInstance {
    pub fn new() -> WcnfInstance {
        WcnfInstance::default()
    }

    /// Allocates a fresh variable (1-based).
    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    fn touch(&mut self, lits: &[i32]) {
        if let Some(m) = lits.iter().map(|l| l.unsigned_abs()).max() {
            self.num_vars = self.num_vars.max(m);
        }
    }

    pub fn add_hard(&mut self, lits: Vec<i32>) {
        self.touch(&lits);
        self.hard.push(lits);
    }

    pub fn add_soft(&mut self, weight: u64, lits: Vec<i32>) {
        assert!(weight > 0, "soft clause weights must be positive");
        self.touch(&lits);
        self.soft.push((weight, lits));
    }

    pub fn total_soft_weight(&self) -> u64 {
        self.soft.iter().map(|s| s.0).sum()
    }

    /// Weight marking hard clauses: one more than the total soft weight.
    pub fn top(&self) -> u64 {
        self.total_soft_weight() + 1
    }

    pub fn num_clauses(&self) -> usize {
        self.hard.len() + self.soft.len()
    }

    /// `(variables, clauses, total soft weight)`.
    pub fn stats(&self) -> (u32, usize, u64) {
        (self.num_vars, self.num_clauses(), self.total_soft_weight())
    }

    /// Cost (falsified soft weight) of a model indexed by variable - 1, or
    /// `None` if a hard clause is falsified.
    pub fn cost(&self, model: &[bool]) -> Option<u64> {
        let holds = |c: &[i32]| {
            c.iter().any(|&l| {
                let v = model.get(l.unsigned_abs() as usize - 1).copied().unwrap_or(false);
                v == (l > 0)
            })
        };
        if !self.hard.iter().all(|c| holds(c)) {
            return None;
        }
        Some(self.soft.iter().filter(|(_, c)| !holds(c)).map(|s| s.0).sum())
    }

    pub fn to_wdimacs(&self) -> String {
        let top = self.top();
        let mut s = String::new();
        let _ = writeln!(s, "p wcnf {} {} {}", self.num_vars, self.num_clauses(), top);
        let mut line = |w: u64, c: &[i32]| {
            let _ = write!(s, "{w}");
            for l in c {
                let _ = write!(s, " {l}");
            }
            let _ = writeln!(s, " 0");
        };
        for c in &self.hard {
            line(top, c);
        }
        for (w, c) in &self.soft {
            line(*w, c);
        }
        s
    }

    /// Parses WDIMACS. Clauses with weight `>= top` are hard.
    pub fn parse_wdimacs(text: &str) -> Result<WcnfInstance, WcnfError> {
        let mut inst = WcnfInstance::new();
        let mut header: Option<(u32, usize, u64)> = None;
        let mut pending: Vec<i64> = Vec::new();
        let mut pending_line = 0;
        let mut found = 0;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 5 || f[1] != "wcnf" {
                    return Err(WcnfError::Parse(ln + 1, "expected `p wcnf <vars> <clauses> <top>`".into()));
                }
                let num = |s: &str| s.parse::<u64>().map_err(|_| WcnfError::Parse(ln + 1, format!("bad number `{s}`")));
                header = Some((num(f[2])? as u32, num(f[3])? as usize, num(f[4])?));
                continue;
            }
            let Some((nv, _, top)) = header else {
                return Err(WcnfError::NoHeader);
            };
            for tok in line.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| WcnfError::Parse(ln + 1, format!("bad token `{tok}`")))?;
                if pending.is_empty() {
                    pending_line = ln + 1;
                    if x <= 0 {
                        return Err(WcnfError::Parse(ln + 1, "clause weight must be positive".into()));
                    }
                    pending.push(x);
                } else if x == 0 {
                    let w = pending[0] as u64;
                    let lits: Vec<i32> = pending[1..].iter().map(|&l| l as i32).collect();
                    if lits.iter().any(|l| l.unsigned_abs() > nv) {
                        return Err(WcnfError::Parse(pending_line, "literal exceeds declared variable count".into()));
                    }
                    if w >= top {
                        inst.hard.push(lits);
                    } else {
                        inst.soft.push((w, lits));
                    }
                    found += 1;
                    pending.clear();
                } else {
                    pending.push(x);
                }
            }
        }
        let (nv, nc, _) = header.ok_or(WcnfError::NoHeader)?;
        if !pending.is_empty() {
            return Err(WcnfError::Parse(pending_line, "clause not terminated by 0".into()));
        }
        if found != nc {
            return Err(WcnfError::ClauseCount { declared: nc, found });
        }
        inst.num_vars = nv;
        Ok(inst)
    }
}

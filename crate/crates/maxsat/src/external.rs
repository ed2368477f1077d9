//! Runs an external MaxSAT solver on a temporary WDIMACS file and reads its
//! answer in the MaxSAT Evaluation output format (`s`, `o`, `v` lines).

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use crate::{MaxSatError, MaxSatOutcome, Status, WcnfInstance};

/// Invokes `command[0] command[1..] <wcnf-path>`. The child is killed when
/// `timeout` expires, giving an `Unknown` outcome.
pub fn solve_external(
    inst: &WcnfInstance,
    command: &[String],
    timeout: Option<Duration>,
) -> Result<MaxSatOutcome, MaxSatError> {
    let (prog, args) = command
        .split_first()
        .ok_or_else(|| MaxSatError::SolverCrash("empty solver command".into()))?;
    let mut file = tempfile::Builder::new().suffix(".wcnf").tempfile()?;
    file.write_all(inst.to_wdimacs().as_bytes())?;
    file.flush()?;
    let mut child = Command::new(prog)
        .args(args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| MaxSatError::SolverCrash(format!("cannot start `{prog}`: {e}")))?;
    // drain pipes on threads so a chatty solver cannot block on a full pipe
    let mut out_pipe = child.stdout.take().expect("stdout piped");
    let mut err_pipe = child.stderr.take().expect("stderr piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });
    let status = match timeout {
        Some(t) => match child.wait_timeout(t)? {
            Some(st) => st,
            None => {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(MaxSatOutcome {
                    status: Status::Unknown,
                    model: None,
                    cost: None,
                    total_soft: inst.total_soft_weight(),
                });
            }
        },
        None => child.wait()?,
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    let parsed = parse_output(&stdout, inst.num_vars)?;
    let Some(s) = parsed.status else {
        let tail: String = stderr.lines().rev().take(5).collect::<Vec<_>>().join(" | ");
        return Err(MaxSatError::SolverCrash(format!(
            "solver exited with {status} and no `s` line (stderr: {tail})"
        )));
    };
    match s.as_str() {
        "UNSATISFIABLE" => Ok(MaxSatOutcome {
            status: Status::HardUnsat,
            model: None,
            cost: None,
            total_soft: inst.total_soft_weight(),
        }),
        "OPTIMUM FOUND" | "SATISFIABLE" => {
            let model = parsed
                .model
                .ok_or_else(|| MaxSatError::Parse("no `v` line in solver output".into()))?;
            let cost = inst
                .cost(&model)
                .ok_or_else(|| MaxSatError::Parse("solver model falsifies a hard clause".into()))?;
            if let Some(o) = parsed.cost {
                if o != cost {
                    return Err(MaxSatError::Parse(format!(
                        "solver reports cost {o} but its model has cost {cost}"
                    )));
                }
            }
            Ok(MaxSatOutcome {
                status: if s == "OPTIMUM FOUND" {
                    Status::Optimum
                } else {
                    Status::Unknown
                },
                model: Some(model),
                cost: Some(cost),
                total_soft: inst.total_soft_weight(),
            })
        }
        "UNKNOWN" => Ok(MaxSatOutcome {
            status: Status::Unknown,
            model: None,
            cost: None,
            total_soft: inst.total_soft_weight(),
        }),
        other => Err(MaxSatError::Parse(format!("unknown status `s {other}`"))),
    }
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct SolverOutput {
    pub status: Option<String>,
    /// Last reported cost.
    pub cost: Option<u64>,
    pub model: Option<Vec<bool>>,
}

/// Parses `s`/`o`/`v` lines. `v` lines hold either DIMACS literals or a
/// single 0/1 string with one character per variable.
pub fn parse_output(text: &str, num_vars: u32) -> Result<SolverOutput, MaxSatError> {
    let mut out = SolverOutput::default();
    let mut model = vec![false; num_vars as usize];
    let mut any_v = false;
    for line in text.lines() {
        let line = line.trim();
        let (tag, rest) = line.split_at(line.find(' ').unwrap_or(line.len()));
        let rest = rest.trim();
        match tag {
            "s" => out.status = Some(rest.to_string()),
            "o" => {
                out.cost = Some(
                    rest.parse()
                        .map_err(|_| MaxSatError::Parse(format!("bad cost line `{line}`")))?,
                )
            }
            "v" => {
                any_v = true;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let binary = toks.len() == 1
                    && toks[0].len() == num_vars as usize
                    && toks[0].chars().all(|c| c == '0' || c == '1')
                    && num_vars != 1;
                if binary {
                    for (i, c) in toks[0].chars().enumerate() {
                        model[i] = c == '1';
                    }
                    continue;
                }
                for t in toks {
                    let l: i64 = t
                        .parse()
                        .map_err(|_| MaxSatError::Parse(format!("bad literal `{t}`")))?;
                    if l == 0 {
                        continue;
                    }
                    let v = l.unsigned_abs() as usize;
                    if v > num_vars as usize {
                        continue; // auxiliary variables of the solver
                    }
                    model[v - 1] = l > 0;
                }
            }
            _ => {}
        }
    }
    if any_v {
        out.model = Some(model);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_and_binary_models() {
        let o = parse_output("c hi\ns OPTIMUM FOUND\no 3\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(o.status.as_deref(), Some("OPTIMUM FOUND"));
        assert_eq!(o.cost, Some(3));
        assert_eq!(o.model, Some(vec![true, false, true]));
        let o = parse_output("s OPTIMUM FOUND\nv 101\n", 3).unwrap();
        assert_eq!(o.model, Some(vec![true, false, true]));
        let o = parse_output("s UNSATISFIABLE\n", 3).unwrap();
        assert_eq!(o.model, None);
        assert!(parse_output("o x\n", 1).is_err());
    }
}

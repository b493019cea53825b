use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use bcirc::json;
use bcirc::{CircleMeasure, Error, HerglotzData};

use crate::Failure;

pub fn read_source(path: &str, stdin_used: &mut bool) -> Result<String, Failure> {
    if path == "-" {
        if *stdin_used {
            return Err(Failure::input("standard input can be read only once"));
        }
        *stdin_used = true;
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::input(format!("reading {path}: {e}")))
    }
}

pub fn read_measure(path: &str, stdin_used: &mut bool) -> Result<CircleMeasure, Failure> {
    let text = read_source(path, stdin_used)?;
    let mu = json::parse_measure(&text).map_err(|e| Failure::input(format!("{path}: {e}")))?;
    let report = mu.validate();
    if !report.is_ok() {
        return Err(Failure::input(format!(
            "{path}: not a probability measure: {report}"
        )));
    }
    Ok(mu)
}

pub fn read_pair(path: &str, stdin_used: &mut bool) -> Result<HerglotzData, Failure> {
    let text = read_source(path, stdin_used)?;
    let pair = json::parse_pair_str(&text).map_err(|e| Failure::input(format!("{path}: {e}")))?;
    let violations = pair.rho.violations();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Failure::from(Error::InvalidMeasure(format!(
            "{path}: rho is not a finite positive measure: {}",
            list.join("; ")
        ))));
    }
    Ok(pair)
}

/// Write to `out`, or to stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::input(format!("writing {}: {e}", p.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::input(format!("writing stdout: {e}")))
        }
    }
}

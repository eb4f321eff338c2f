//! Plain-text persistence: ground-state profile files, trace CSVs and
//! key-value manifests.
//!
//! Every float is written with `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly.
//!
//! Profile file layout:
//!
//! ```text
//! # cnls ground-state profile
//! # N = 2
//! # p = 2.5000000000000000e0
//! # m = 1
//! # coupling = 1.0000000000000000e0
//! # grid.n_r = 4096
//! # grid.R = 1.6000000000000000e1
//! # level = ...
//! # residual = ...
//! # config.<key> = <value>        (zero or more)
//! r psi_1 ... psi_m
//! <n_r rows of whitespace-separated values>
//! ```
//!
//! Coupling rows are separated by `;` and entries by `,`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::EvolutionTrace;
use crate::field::FieldVector;
use crate::grid::RadialGrid;
use crate::params::SystemParams;

const PROFILE_MAGIC: &str = "# cnls ground-state profile";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

pub fn format_coupling(params: &SystemParams) -> String {
    params
        .coupling()
        .rows()
        .iter()
        .map(|row| row.iter().map(|&a| fmt_f64(a)).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn parse_coupling(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(|row| row.split(',').map(parse_f64).collect::<Result<Vec<_>>>()).collect()
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; repeated keys are errors.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Format(format!("line {}: malformed key {key:?}", n + 1)));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(Error::Format(format!("line {}: duplicate key {key}", n + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// A persisted ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFile {
    pub params: SystemParams,
    pub grid: Arc<RadialGrid>,
    pub profile: FieldVector,
    pub level: f64,
    pub residual: f64,
    /// Configuration entries embedded in the header.
    pub config: Vec<(String, String)>,
}

impl ProfileFile {
    pub fn render(&self) -> String {
        let m = self.params.components();
        let mut s = String::new();
        let _ = writeln!(s, "{PROFILE_MAGIC}");
        let _ = writeln!(s, "# N = {}", self.params.dim());
        let _ = writeln!(s, "# p = {}", fmt_f64(self.params.exponent()));
        let _ = writeln!(s, "# m = {m}");
        let _ = writeln!(s, "# coupling = {}", format_coupling(&self.params));
        let _ = writeln!(s, "# grid.n_r = {}", self.grid.len());
        let _ = writeln!(s, "# grid.R = {}", fmt_f64(self.grid.radius()));
        let _ = writeln!(s, "# level = {}", fmt_f64(self.level));
        let _ = writeln!(s, "# residual = {}", fmt_f64(self.residual));
        for (k, v) in &self.config {
            let _ = writeln!(s, "# config.{k} = {v}");
        }
        let names: Vec<String> = (1..=m).map(|j| format!("psi_{j}")).collect();
        let _ = writeln!(s, "r {}", names.join(" "));
        let profiles = self.profile.real_profiles();
        for (i, r) in self.grid.nodes().iter().enumerate() {
            s.push_str(&fmt_f64(*r));
            for p in &profiles {
                s.push(' ');
                s.push_str(&fmt_f64(p[i]));
            }
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(fs::write(path, self.render())?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(PROFILE_MAGIC) {
            return Err(Error::Format("missing profile header".into()));
        }
        let mut header = Vec::new();
        let mut config = Vec::new();
        let mut columns = None;
        for line in lines.by_ref() {
            match line.strip_prefix("# ") {
                Some(entry) => {
                    let (k, v) =
                        entry.split_once(" = ").ok_or_else(|| Error::Format(format!("bad header line {line:?}")))?;
                    match k.strip_prefix("config.") {
                        Some(ck) => config.push((ck.to_string(), v.to_string())),
                        None => header.push((k.to_string(), v.to_string())),
                    }
                }
                None => {
                    columns = Some(line);
                    break;
                }
            }
        }
        let get = |key: &str| {
            header
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Format(format!("profile header lacks {key}")))
        };
        let int = |key: &str| get(key)?.parse::<usize>().map_err(|_| Error::Format(format!("bad integer for {key}")));
        let params = SystemParams::new(int("N")?, parse_f64(get("p")?)?, parse_coupling(get("coupling")?)?)?;
        let m = int("m")?;
        if m != params.components() {
            return Err(Error::Format(format!("m = {m} disagrees with the coupling matrix")));
        }
        let grid = Arc::new(RadialGrid::new(params.dim(), int("grid.n_r")?, parse_f64(get("grid.R")?)?)?);
        let expected_columns = 1 + m;
        match columns {
            Some(c) if c.split_whitespace().count() == expected_columns => {}
            _ => return Err(Error::Format("missing or malformed column header".into())),
        }
        let mut profiles = vec![Vec::with_capacity(grid.len()); m];
        let mut rows = 0;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let vals = line.split_whitespace().map(parse_f64).collect::<Result<Vec<_>>>()?;
            if vals.len() != expected_columns || rows >= grid.len() {
                return Err(Error::Format(format!("bad data row {}", rows + 1)));
            }
            if vals[0] != grid.nodes()[rows] {
                return Err(Error::Format(format!("radius in row {} does not match the grid", rows + 1)));
            }
            for (p, v) in profiles.iter_mut().zip(&vals[1..]) {
                p.push(*v);
            }
            rows += 1;
        }
        if rows != grid.len() {
            return Err(Error::Format(format!("expected {} rows, found {rows}", grid.len())));
        }
        let profile = FieldVector::from_real_profiles(grid.clone(), &profiles)?;
        Ok(ProfileFile {
            params,
            grid,
            profile,
            level: parse_f64(get("level")?)?,
            residual: parse_f64(get("residual")?)?,
            config,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// Renders a trace as CSV with columns
/// `t, M_1..M_m, E, G_1..G_m, Q, K_virial, flag`, where `flag` is 1 for
/// localized rows and 0 otherwise.
pub fn render_trace(trace: &EvolutionTrace, components: usize) -> String {
    let mut s = String::from("t");
    for j in 1..=components {
        let _ = write!(s, ",M_{j}");
    }
    s.push_str(",E");
    for j in 1..=components {
        let _ = write!(s, ",G_{j}");
    }
    s.push_str(",Q,K_virial,flag\n");
    for row in &trace.rows {
        s.push_str(&fmt_f64(row.t));
        for v in row.moments.masses.iter().chain(std::iter::once(&row.energy)).chain(&row.moments.gradients) {
            s.push(',');
            s.push_str(&fmt_f64(*v));
        }
        let _ = writeln!(s, ",{},{},{}", fmt_f64(row.variance), fmt_f64(row.virial), u8::from(row.localized));
    }
    s
}

pub fn write_trace(path: &Path, trace: &EvolutionTrace, components: usize) -> Result<()> {
    Ok(fs::write(path, render_trace(trace, components))?)
}

/// Ordered `key = value` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets a key, replacing an earlier value.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn set_f64(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.set(key, fmt_f64(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Adds the system parameters under `problem.*`.
    pub fn set_params(&mut self, params: &SystemParams) -> &mut Self {
        self.set("problem.N", params.dim())
            .set_f64("problem.p", params.exponent())
            .set("problem.m", params.components())
            .set("problem.coupling", format_coupling(params))
    }

    /// Embeds configuration entries under `config.*`.
    pub fn embed_config(&mut self, config: &[(String, String)]) -> &mut Self {
        for (k, v) in config {
            self.set(format!("config.{k}"), v);
        }
        self
    }

    pub fn render(&self) -> String {
        self.entries.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k} = {v}");
            s
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Manifest { entries: parse_key_values(text)? })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(fs::write(path, self.render())?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ProfileFile {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
        let grid = Arc::new(RadialGrid::new(2, 64, 8.0).unwrap());
        let a: Vec<f64> = grid.nodes().iter().map(|r| (-r * r / 3.0).exp() / 3.0).collect();
        let b: Vec<f64> = grid.nodes().iter().map(|r| 0.1 / r.mul_add(*r, 1.0)).collect();
        let profile = FieldVector::from_real_profiles(grid.clone(), &[a, b]).unwrap();
        ProfileFile {
            params,
            grid,
            profile,
            level: 4.0 / 7.0,
            residual: 1e-9 / 3.0,
            config: vec![("problem.N".into(), "2".into()), ("solver.tau".into(), "10".into())],
        }
    }

    #[test]
    fn profile_round_trip_is_bit_exact() {
        let file = sample();
        let text = file.render();
        let back = ProfileFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.render(), text);
    }

    #[test]
    fn corrupted_profiles_are_rejected() {
        let text = sample().render();
        assert!(ProfileFile::parse(&text.replacen("# level", "# lvl", 1)).is_err());
        let truncated: String = text.lines().take(30).map(|l| format!("{l}\n")).collect();
        assert!(ProfileFile::parse(&truncated).is_err());
        assert!(ProfileFile::parse("hello").is_err());
    }

    #[test]
    fn key_values_reject_duplicates_and_garbage() {
        let kv = parse_key_values("# c\n\na.b = 1\n c = x y \n").unwrap();
        assert_eq!(kv, vec![("a.b".into(), "1".into()), ("c".into(), "x y".into())]);
        assert!(parse_key_values("a = 1\na = 2").is_err());
        assert!(parse_key_values("no equals").is_err());
        assert!(parse_key_values("a b = 1").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::new();
        m.set("verdict", "A_plus").set_f64("level", 0.1).set("verdict", "A_minus");
        let back = Manifest::parse(&m.render()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get("verdict"), Some("A_minus"));
        assert_eq!(back.get("level").map(parse_f64).unwrap().unwrap(), 0.1);
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}

//! Plain-text instance files.
//!
//! ```text
//! c optional comment lines
//! p MUBQP <rho> <m> <n> <d>
//! <m numbers for entry (0,0)>
//! <m numbers for entry (0,1)>
//! ...
//! ```
//!
//! Exactly `n * n` data lines follow the problem line in row-major order.
//! Blank lines are ignored.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use mubqp_core::{MubqpInstance, QuboMatrix};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: duplicate problem line")]
    DuplicateProblemLine { line: usize },
    #[error("no problem line `p MUBQP <rho> <m> <n> <d>` found")]
    MissingProblemLine,
    #[error("line {line}: malformed problem line: {reason}")]
    MalformedProblemLine { line: usize, reason: String },
    #[error("line {line}: data line before the problem line")]
    DataBeforeProblem { line: usize },
    #[error("line {line}: `{token}` is not a finite number")]
    NonNumeric { line: usize, token: String },
    #[error("line {line}: expected {expected} values (one per objective), found {found}")]
    ObjectiveCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} data lines, found {found}")]
    LineCount { expected: usize, found: usize },
    #[error("invalid instance: {0}")]
    Instance(#[from] mubqp_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

/// Parameters of a corpus instance, as encoded in its file name
/// `<rho>_<m>_<n>_<d>_<id>`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceHeader {
    pub rho: f64,
    pub m: usize,
    pub n: usize,
    pub density: f64,
    pub name: String,
}

impl InstanceHeader {
    /// `None` when the name does not follow the convention or the values are
    /// out of range.
    pub fn from_name(name: &str) -> Option<Self> {
        let path = Path::new(name);
        // in `0.0_2_1000_0.4_0` the density's decimal point looks like an
        // extension separator, so only strip extensions without underscores
        let stem = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if !ext.contains('_') => path.file_stem()?,
            _ => path.file_name()?,
        };
        Self::from_stem(stem.to_str()?)
    }

    fn from_stem(stem: &str) -> Option<Self> {
        // a leading minus sign belongs to rho, so split from the right
        let mut parts = stem.rsplitn(5, '_');
        let _id = parts.next()?;
        let density: f64 = parts.next()?.parse().ok()?;
        let n: usize = parts.next()?.parse().ok()?;
        let m: usize = parts.next()?.parse().ok()?;
        let rho: f64 = parts.next()?.parse().ok()?;
        let header = Self {
            rho,
            m,
            n,
            density,
            name: stem.to_owned(),
        };
        header.is_valid().then_some(header)
    }

    fn is_valid(&self) -> bool {
        self.m >= 1
            && self.n >= 1
            && self.density > 0.0
            && self.density <= 1.0
            && (-1.0..=1.0).contains(&self.rho)
    }
}

impl fmt::Display for InstanceHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (rho={}, m={}, n={}, d={})",
            self.name, self.rho, self.m, self.n, self.density
        )
    }
}

struct Problem {
    rho: f64,
    m: usize,
    n: usize,
    density: f64,
}

fn parse_problem(line_no: usize, rest: &str) -> Result<Problem> {
    let malformed = |reason: &str| FormatError::MalformedProblemLine {
        line: line_no,
        reason: reason.to_owned(),
    };
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() != 5 {
        return Err(malformed("expected `p MUBQP <rho> <m> <n> <d>`"));
    }
    if !tokens[0].eq_ignore_ascii_case("MUBQP") {
        return Err(malformed("problem type must be MUBQP"));
    }
    let rho: f64 = tokens[1]
        .parse()
        .map_err(|_| malformed("rho is not a number"))?;
    let m: usize = tokens[2]
        .parse()
        .map_err(|_| malformed("m is not an integer"))?;
    let n: usize = tokens[3]
        .parse()
        .map_err(|_| malformed("n is not an integer"))?;
    let density: f64 = tokens[4]
        .parse()
        .map_err(|_| malformed("d is not a number"))?;
    if m == 0 || n == 0 {
        return Err(malformed("m and n must be positive"));
    }
    n.checked_mul(n)
        .and_then(|nn| nn.checked_mul(m))
        .ok_or_else(|| malformed("instance too large"))?;
    Ok(Problem { rho, m, n, density })
}

pub fn parse_instance<R: BufRead>(reader: R) -> Result<MubqpInstance> {
    let mut problem: Option<Problem> = None;
    let mut coeffs: Vec<Vec<f64>> = Vec::new();
    let mut data_lines = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if problem.is_some() {
                return Err(FormatError::DuplicateProblemLine { line: line_no });
            }
            let p = parse_problem(line_no, rest)?;
            coeffs = vec![Vec::with_capacity((p.n * p.n).min(1 << 20)); p.m];
            problem = Some(p);
            continue;
        }
        let Some(p) = &problem else {
            return Err(FormatError::DataBeforeProblem { line: line_no });
        };
        data_lines += 1;
        if data_lines > p.n * p.n {
            continue;
        }
        let mut found = 0;
        for token in trimmed.split_whitespace() {
            let value: f64 = token
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| FormatError::NonNumeric {
                    line: line_no,
                    token: token.to_owned(),
                })?;
            if found < p.m {
                coeffs[found].push(value);
            }
            found += 1;
        }
        if found != p.m {
            return Err(FormatError::ObjectiveCount {
                line: line_no,
                expected: p.m,
                found,
            });
        }
    }
    let p = problem.ok_or(FormatError::MissingProblemLine)?;
    if data_lines != p.n * p.n {
        return Err(FormatError::LineCount {
            expected: p.n * p.n,
            found: data_lines,
        });
    }
    let objectives = coeffs
        .into_iter()
        .map(|c| QuboMatrix::new(p.n, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MubqpInstance::new(p.rho, p.density, objectives)?)
}

/// Round-trip inverse of [`parse_instance`]; every value is written in its
/// shortest exact decimal form.
pub fn write_instance<W: Write>(instance: &MubqpInstance, mut out: W) -> io::Result<()> {
    let (m, n) = (instance.m(), instance.n());
    writeln!(
        out,
        "p MUBQP {} {} {} {}",
        instance.rho(),
        m,
        n,
        instance.density()
    )?;
    let mats: Vec<&[f64]> = instance.objectives().iter().map(|q| q.as_slice()).collect();
    let mut line = String::new();
    for idx in 0..n * n {
        line.clear();
        for (k, q) in mats.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&q[idx].to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn load_instance(path: &Path) -> Result<MubqpInstance> {
    parse_instance(BufReader::new(File::open(path)?))
}

pub fn save_instance(instance: &MubqpInstance, path: &Path) -> io::Result<()> {
    write_instance(instance, BufWriter::new(File::create(path)?))
}

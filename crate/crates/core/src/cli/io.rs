use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::tensor::{AmplitudeTensor, CMatrix, PartySignature};

pub const STATE_SCHEMA: &str = "qmarginals.state/1";
pub const REPORT_SCHEMA: &str = "qmarginals.report/1";

/// On-disk pure state: signature plus flat row-major `(re, im)` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub schema: String,
    pub signature: PartySignature,
    pub amplitudes: Vec<(f64, f64)>,
}

impl StateFile {
    pub fn from_state(state: &AmplitudeTensor) -> Self {
        Self {
            schema: STATE_SCHEMA.to_owned(),
            signature: state.signature().clone(),
            amplitudes: state.amplitudes().iter().map(|z| (z.re, z.im)).collect(),
        }
    }

    pub fn to_state(&self) -> Result<AmplitudeTensor, CliError> {
        if self.schema != STATE_SCHEMA {
            return Err(CliError::Usage(format!(
                "unsupported state schema {:?} (expected {STATE_SCHEMA:?})",
                self.schema
            )));
        }
        let amplitudes = self.amplitudes.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        AmplitudeTensor::new(self.signature.clone(), amplitudes).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Complex matrix as `side` plus flat row-major `(re, im)` entries.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixJson {
    pub side: usize,
    pub entries: Vec<(f64, f64)>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let side = m.nrows();
        let entries = (0..side)
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| (m[(r, c)].re, m[(r, c)].im))
            .collect();
        Self { side, entries }
    }
}

/// Common envelope of every JSON report. `timings_ms` holds all wall-clock data so the
/// rest of the payload is reproducible byte for byte.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub version: &'static str,
    pub config: C,
    pub result: R,
    pub timings_ms: serde_json::Value,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &'static str, config: C, result: R, timings_ms: serde_json::Value) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            result,
            timings_ms,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Failed(e.to_string()))
}

/// Writes `text` to `out`, or stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

/// `"01,02,12"` → `[[0,1],[0,2],[1,2]]`. Within a group, indices are single digits or,
/// for parties past 9, separated by `-` (`"0-10-11"`); a lone index past 9 takes a
/// trailing `-` (`"10-"`).
pub fn parse_subsets(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("malformed --subsets {text:?}: {why}"));
    let groups: Vec<&str> = text.split(',').map(str::trim).collect();
    if groups.iter().any(|g| g.is_empty()) {
        return Err(bad("empty group"));
    }
    groups
        .into_iter()
        .map(|g| {
            if g.contains('-') {
                g.strip_suffix('-')
                    .unwrap_or(g)
                    .split('-')
                    .map(|p| p.parse::<usize>().map_err(|_| bad("non-numeric index")))
                    .collect()
            } else {
                g.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|v| v as usize)
                            .ok_or_else(|| bad("non-numeric index"))
                    })
                    .collect()
            }
        })
        .collect()
}

pub fn format_subsets(subsets: &[Vec<usize>]) -> String {
    subsets
        .iter()
        .map(|s| {
            if s.iter().all(|&p| p < 10) {
                s.iter().map(|p| p.to_string()).collect::<String>()
            } else if s.len() == 1 {
                format!("{}-", s[0])
            } else {
                s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SeededRng;

    #[test]
    fn subsets_parse() {
        assert_eq!(
            parse_subsets("01,02,12").unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(parse_subsets("0-10,3").unwrap(), vec![vec![0, 10], vec![3]]);
        assert!(parse_subsets("01,,2").is_err());
        assert!(parse_subsets("0a").is_err());
        assert_eq!(format_subsets(&[vec![0, 1], vec![2, 11]]), "01,2-11");
        assert_eq!(parse_subsets("10-,1").unwrap(), vec![vec![10], vec![1]]);
        assert_eq!(format_subsets(&[vec![10]]), "10-");
    }

    #[test]
    fn state_file_round_trip_is_exact() {
        let sig = PartySignature::new(vec![2, 3]).unwrap();
        let state = AmplitudeTensor::haar_random(&sig, &mut SeededRng::new(1));
        let text = to_json(&StateFile::from_state(&state)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_state().unwrap(), state);
    }

    #[test]
    fn csv_rows() {
        #[derive(Serialize)]
        struct Row {
            a: usize,
            b: f64,
        }
        let text = to_csv([Row { a: 1, b: 0.5 }]).unwrap();
        assert_eq!(text, "a,b\n1,0.5\n");
    }
}

//! JSON file formats for states, channels and reports.
//!
//! Complex entries are two-element `[re, im]` arrays. Floats are written by
//! serde_json's shortest round-trip formatting, so writing the same value
//! twice gives the same bytes and reading a written file restores every bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::MultipartiteState;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format_version: String,
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub format_version: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<CMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Gap,
    Markov,
    Theorem1,
    ArakiLieb,
    BiSsa,
    ChannelSaturation,
    HolevoSaturation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format_version: String,
    pub kind: ReportKind,
    pub payload: serde_json::Value,
    pub tolerances: BTreeMap<String, f64>,
    /// Seed of the generator run that produced the input, when known.
    pub seed: Option<u64>,
}

impl StateFile {
    pub fn from_state(state: &MultipartiteState) -> Self {
        StateFile {
            format_version: FORMAT_VERSION.into(),
            labels: state.labels().to_vec(),
            dims: state.dims().to_vec(),
            matrix: state.matrix().clone(),
        }
    }

    pub fn into_state(self) -> Result<MultipartiteState> {
        check_version(&self.format_version)?;
        MultipartiteState::new(self.matrix, self.dims, self.labels).map_err(|e| invariant(&e))
    }
}

impl ChannelFile {
    pub fn from_channel(channel: &KrausChannel) -> Self {
        ChannelFile {
            format_version: FORMAT_VERSION.into(),
            dim_in: channel.dim_in(),
            dim_out: channel.dim_out(),
            kraus: channel.kraus().to_vec(),
        }
    }

    pub fn into_channel(self) -> Result<KrausChannel> {
        check_version(&self.format_version)?;
        for (k, m) in self.kraus.iter().enumerate() {
            if m.rows() != self.dim_out || m.cols() != self.dim_in {
                return Err(Error::FileInvariant {
                    field: format!("kraus[{k}]"),
                    detail: format!(
                        "is {}x{}, expected dim_out x dim_in = {}x{}",
                        m.rows(),
                        m.cols(),
                        self.dim_out,
                        self.dim_in
                    ),
                });
            }
        }
        KrausChannel::new(self.kraus).map_err(|e| Error::FileInvariant {
            field: "kraus".into(),
            detail: e.to_string(),
        })
    }
}

impl ReportFile {
    /// Wraps `payload`, refusing non-finite numbers (JSON would turn them into `null`).
    pub fn new<T: Serialize + DeserializeOwned>(
        kind: ReportKind,
        payload: &T,
        tolerances: &[(&str, f64)],
        seed: Option<u64>,
    ) -> Result<Self> {
        let value = serde_json::to_value(payload).map_err(|e| Error::Internal(e.to_string()))?;
        // a NaN in a plain f64 field comes back as null and fails to parse
        serde_json::from_value::<T>(value.clone())
            .map_err(|e| Error::Internal(format!("report payload is not finite: {e}")))?;
        if tolerances.iter().any(|(_, t)| !t.is_finite()) {
            return Err(Error::invalid("tolerances must be finite"));
        }
        Ok(ReportFile {
            format_version: FORMAT_VERSION.into(),
            kind,
            payload: value,
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed,
        })
    }

    pub fn payload_as<T: DeserializeOwned>(&self) -> Result<T> {
        let mut track = serde_path_to_error::Track::new();
        let de = serde_path_to_error::Deserializer::new(&self.payload, &mut track);
        T::deserialize(de).map_err(|e| Error::Schema {
            path: format!("payload.{}", track.path()),
            detail: e.to_string(),
        })
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Schema {
            path: "format_version".into(),
            detail: format!("unsupported version {v:?}, expected {FORMAT_VERSION:?}"),
        });
    }
    Ok(())
}

fn invariant(e: &Error) -> Error {
    let field = match e {
        Error::InvalidTrace(_) | Error::NotHermitian(_) | Error::NotPsd(_) => "matrix",
        Error::DimensionMismatch(_) => "dims",
        _ => "labels",
    };
    Error::FileInvariant {
        field: field.into(),
        detail: e.to_string(),
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema {
            path: if matches!(path.as_str(), "" | "." | "?") { "<root>".into() } else { path },
            detail: e.into_inner().to_string(),
        }
    })
}

/// Compact single-line JSON with a trailing newline.
pub fn to_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Indented JSON with a trailing newline, used for reports.
pub fn to_pretty_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_state(path: impl AsRef<Path>) -> Result<MultipartiteState> {
    parse::<StateFile>(&read(path.as_ref())?)?.into_state()
}

pub fn save_state(state: &MultipartiteState, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &to_text(&StateFile::from_state(state))?)
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<KrausChannel> {
    parse::<ChannelFile>(&read(path.as_ref())?)?.into_channel()
}

pub fn save_channel(channel: &KrausChannel, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &to_text(&ChannelFile::from_channel(channel))?)
}

pub fn load_report(path: impl AsRef<Path>) -> Result<ReportFile> {
    let r = parse::<ReportFile>(&read(path.as_ref())?)?;
    check_version(&r.format_version)?;
    Ok(r)
}

pub fn save_report(report: &ReportFile, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &to_pretty_text(report)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_density, Seed};
    use crate::linalg::C64;

    fn ghz_text() -> String {
        let h = 0.5;
        let mut rows = vec![vec![[0.0, 0.0]; 8]; 8];
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            rows[i][j] = [h, 0.0];
        }
        serde_json::json!({
            "format_version": "1",
            "labels": ["A", "B", "C"],
            "dims": [2, 2, 2],
            "matrix": rows,
        })
        .to_string()
    }

    #[test]
    fn loads_ghz() {
        let st = parse::<StateFile>(&ghz_text()).unwrap().into_state().unwrap();
        assert_eq!(st.dims(), &[2, 2, 2]);
        assert_eq!(st.labels(), &["A", "B", "C"]);
    }

    #[test]
    fn trace_violation_names_trace() {
        let text = ghz_text().replace("0.5", "0.45");
        let err = parse::<StateFile>(&text).unwrap().into_state().unwrap_err();
        assert!(matches!(err, Error::FileInvariant { ref field, .. } if field == "matrix"));
        assert!(err.to_string().contains("trace"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = ghz_text().replace("\"dims\":[2,2,2]", "\"dims\":[2,\"x\",2]");
        match parse::<StateFile>(&text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "dims[1]"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse::<StateFile>("{"), Err(Error::Schema { .. })));
        let text = ghz_text().replace("\"format_version\":\"1\"", "\"format_version\":\"9\"");
        assert!(matches!(
            parse::<StateFile>(&text).unwrap().into_state(),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = random_density(6, 6, Seed(3)).unwrap();
        let st = MultipartiteState::with_labels(m, &[2, 3], &["A", "B"]).unwrap();
        let text = to_text(&StateFile::from_state(&st)).unwrap();
        let back = parse::<StateFile>(&text).unwrap().into_state().unwrap();
        assert_eq!(back.matrix().as_slice(), st.matrix().as_slice());
        assert_eq!(to_text(&StateFile::from_state(&back)).unwrap(), text);
    }

    #[test]
    fn channel_file_checks_completeness() {
        let ch = KrausChannel::dephasing(2);
        let text = to_text(&ChannelFile::from_channel(&ch)).unwrap();
        assert_eq!(parse::<ChannelFile>(&text).unwrap().into_channel().unwrap(), ch);
        let mut bad = ChannelFile::from_channel(&ch);
        bad.kraus[0][(0, 0)] = C64::new(0.9, 0.0);
        assert!(matches!(bad.into_channel(), Err(Error::FileInvariant { .. })));
    }

    #[test]
    fn reports_reject_nan() {
        #[derive(Serialize, Deserialize)]
        struct P {
            x: f64,
        }
        assert!(ReportFile::new(ReportKind::Gap, &P { x: 1.0 }, &[("tol", 1e-8)], Some(1)).is_ok());
        assert!(ReportFile::new(ReportKind::Gap, &P { x: f64::NAN }, &[], None).is_err());
    }
}

//! JSON strategy documents.
//!
//! Matrices are four `[re, im]` pairs in row-major order. Floats are written
//! with 17 significant digits so a document survives a parse/write cycle
//! byte for byte.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use seqrac_core::qubit::{state_from_bloch, validate_povm, Bloch, ComplexMatrix2, QubitState, C64};
use seqrac_core::report::fmt_sig17;
use seqrac_core::scenario::{BinaryInstrument, PreparationEnsemble, Strategy};
use seqrac_core::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest allowed gap between the two forms of a preparation.
const FORM_AGREEMENT_TOL: f64 = 1e-9;

pub type MatrixEntries = [[f64; 2]; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDocument {
    pub schema_version: u32,
    pub preparations: [PreparationEntry; 4],
    pub instruments: [InstrumentEntry; 2],
    pub measurements: [MeasurementEntry; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PreparationEntry {
    Bloch([f64; 3]),
    Matrix(MatrixEntries),
    Both {
        bloch: [f64; 3],
        matrix: MatrixEntries,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentEntry {
    /// Kraus operators for outcomes 0 and 1.
    pub kraus: [KrausEntry; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KrausEntry {
    Single(MatrixEntries),
    Several(Vec<MatrixEntries>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementEntry {
    pub effects: [MatrixEntries; 2],
}

#[derive(Debug)]
pub enum DocumentError {
    /// Malformed text, with the JSON path of the offending value.
    Parse { path: String, message: String },
}

impl std::fmt::Display for DocumentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DocumentError::Parse { path, message } => write!(f, "parse error at {path}: {message}"),
        }
    }
}

fn to_matrix(m: &MatrixEntries) -> ComplexMatrix2 {
    let c = |i: usize| C64::new(m[i][0], m[i][1]);
    ComplexMatrix2::new(c(0), c(1), c(2), c(3))
}

fn from_matrix(m: &ComplexMatrix2) -> MatrixEntries {
    let e = &m.entries;
    [e[0][0], e[0][1], e[1][0], e[1][1]].map(|z| [z.re, z.im])
}

impl PreparationEntry {
    fn to_state(&self) -> Result<QubitState, Error> {
        match self {
            PreparationEntry::Bloch(n) => state_from_bloch(&Bloch::from(*n)),
            PreparationEntry::Matrix(m) => {
                let m = to_matrix(m);
                m.check_finite()?;
                QubitState::from_matrix(m)
            }
            PreparationEntry::Both { bloch, matrix } => {
                let m = to_matrix(matrix);
                m.check_finite()?;
                let state = QubitState::from_matrix(m)?;
                let gap = (state.bloch() - Bloch::from(*bloch)).norm();
                if gap.is_nan() || gap > FORM_AGREEMENT_TOL {
                    return Err(Error::InvalidStrategy {
                        component: "bloch".into(),
                        reason: format!("disagrees with the matrix by {gap:e}"),
                    });
                }
                Ok(state)
            }
        }
    }
}

impl KrausEntry {
    fn operators(&self) -> Vec<ComplexMatrix2> {
        match self {
            KrausEntry::Single(m) => vec![to_matrix(m)],
            KrausEntry::Several(ms) => ms.iter().map(to_matrix).collect(),
        }
    }
}

impl StrategyDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: StrategyDocument =
            serde_path_to_error::deserialize(de).map_err(|e| DocumentError::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Parse {
                path: "schema_version".into(),
                message: format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    doc.schema_version
                ),
            });
        }
        Ok(doc)
    }

    pub fn to_strategy(&self) -> Result<Strategy, Error> {
        let mut states = Vec::with_capacity(4);
        for (x, p) in self.preparations.iter().enumerate() {
            states.push(
                p.to_state()
                    .map_err(|e| e.at(&format!("preparations[{x}]")))?,
            );
        }
        let states: [QubitState; 4] = states.try_into().expect("four preparations");

        let mut instruments = Vec::with_capacity(2);
        for (y, inst) in self.instruments.iter().enumerate() {
            let [k0, k1] = &inst.kraus;
            let built = BinaryInstrument::from_kraus_sets(k0.operators(), k1.operators())
                .map_err(|e| e.at(&format!("instruments[{y}]")))?;
            instruments.push(built);
        }
        let instruments: [BinaryInstrument; 2] = instruments.try_into().expect("two settings");

        let mut measurements = Vec::with_capacity(2);
        for (z, m) in self.measurements.iter().enumerate() {
            let [e0, e1] = m.effects.each_ref().map(to_matrix);
            let path = format!("measurements[{z}]");
            for e in [&e0, &e1] {
                e.check_finite().map_err(|err| err.at(&path))?;
            }
            measurements.push(validate_povm(e0, e1).map_err(|err| err.at(&path))?);
        }
        let measurements = measurements.try_into().expect("two settings");
        Ok(Strategy::new(
            PreparationEnsemble::new(states),
            instruments,
            measurements,
        ))
    }

    /// Document with Bloch-vector preparations.
    pub fn from_strategy(s: &Strategy) -> Self {
        let preparations = s
            .preparations()
            .blochs()
            .map(|n| PreparationEntry::Bloch(n.into()));
        let instruments = s.instruments().each_ref().map(|inst| InstrumentEntry {
            kraus: [0, 1].map(|b| match inst.kraus(b) {
                [k] => KrausEntry::Single(from_matrix(k)),
                ks => KrausEntry::Several(ks.iter().map(from_matrix).collect()),
            }),
        });
        let measurements = s.measurements().each_ref().map(|m| MeasurementEntry {
            effects: m.effects().each_ref().map(from_matrix),
        });
        StrategyDocument {
            schema_version: SCHEMA_VERSION,
            preparations,
            instruments,
            measurements,
        }
    }

    pub fn write<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut ser = serde_json::Serializer::with_formatter(out, Sig17Formatter::default());
        self.serialize(&mut ser).map_err(io::Error::other)?;
        let mut out = ser.into_inner();
        out.write_all(b"\n")
    }

    #[cfg(test)]
    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Pretty layout with every float in 17-significant-digit positional form.
#[derive(Default)]
struct Sig17Formatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_sig17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

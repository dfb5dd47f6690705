//! Versioned binary container for persisted models.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "GLRM"
//! 4       2     format version (u16 LE, currently 1)
//! 6       1     payload kind: 1 mlp, 2 svm, 3 scaler, 4 fusion
//! 7       1     reserved, 0
//! 8       8     payload length in bytes (u64 LE)
//! 16      n     payload
//! ```
//!
//! Integers are little-endian, counts are u32, reals are IEEE-754 binary64
//! little-endian. Matrices are row-major.
//!
//! * mlp: input, hidden, output, epochs (u32); seed (u64); learning rate,
//!   momentum (f64); w1 (hidden × input); b1; w2 (output × hidden); b2.
//! * svm: scheme (u8: 0 one-vs-rest, 1 one-vs-one); classes, dim, machines
//!   (u32); then per machine: target (u8: 0 rest, 1 pair), class a, class b
//!   (u32, b = 0 for rest); kernel (u8: 0 linear, 1 rbf, 2 poly); kernel
//!   parameter (f64: 0, σ, or degree); C, bias (f64); support vector count
//!   (u32); coefficients; support vectors (count × dim).
//! * scaler: dim (u32); clamp (u8); mins; maxs.
//! * fusion: mode (u8: 0 binary votes, 1 soft scores); four weights in
//!   chain code, shadow, view-based, longest run order.

use std::path::Path;

use glyphrec_core::ensemble::{FusionWeights, VoteMode};
use glyphrec_core::mlp::{MlpConfig, MlpModel};
use glyphrec_core::svm::{Kernel, MachineTarget, Scheme, SvmBinaryModel, SvmModel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaler::ScalerModel;

pub const MAGIC: &[u8; 4] = b"GLRM";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

/// Weighted-majority fusion settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub mode: VoteMode,
    pub weights: FusionWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "lowercase")]
pub enum Payload {
    Mlp(MlpModel),
    Svm(SvmModel),
    Scaler(ScalerModel),
    Fusion(FusionModel),
}

impl Payload {
    fn tag(&self) -> u8 {
        match self {
            Payload::Mlp(_) => 1,
            Payload::Svm(_) => 2,
            Payload::Scaler(_) => 3,
            Payload::Fusion(_) => 4,
        }
    }
}

impl From<MlpModel> for Payload {
    fn from(m: MlpModel) -> Self {
        Payload::Mlp(m)
    }
}

impl From<SvmModel> for Payload {
    fn from(m: SvmModel) -> Self {
        Payload::Svm(m)
    }
}

impl From<ScalerModel> for Payload {
    fn from(m: ScalerModel) -> Self {
        Payload::Scaler(m)
    }
}

impl From<FusionModel> for Payload {
    fn from(m: FusionModel) -> Self {
        Payload::Fusion(m)
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::format("model container", "count exceeds u32"))?;
        self.0.extend(v.to_le_bytes());
        Ok(())
    }

    fn u64(&mut self, v: u64) {
        self.0.extend(v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.0.extend(v.to_le_bytes());
    }

    fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::format("model container", "truncated payload"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.array()?) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        // bound the allocation by what is actually present
        if n.saturating_mul(8) > self.bytes.len() - self.pos {
            return Err(Error::format("model container", "truncated payload"));
        }
        (0..n).map(|_| self.f64()).collect()
    }
}

fn bad(detail: &str) -> Error {
    Error::format("model container", detail)
}

fn write_mlp(w: &mut Writer, m: &MlpModel) -> Result<()> {
    let c = &m.config;
    w.u32(c.input_dim)?;
    w.u32(c.hidden_dim)?;
    w.u32(c.output_dim)?;
    w.u32(c.epochs)?;
    w.u64(c.seed);
    w.f64(c.learning_rate);
    w.f64(c.momentum);
    w.f64s(&m.w1);
    w.f64s(&m.b1);
    w.f64s(&m.w2);
    w.f64s(&m.b2);
    Ok(())
}

fn read_mlp(r: &mut Reader) -> Result<MlpModel> {
    let input_dim = r.u32()?;
    let hidden_dim = r.u32()?;
    let output_dim = r.u32()?;
    let epochs = r.u32()?;
    let seed = r.u64()?;
    let config = MlpConfig {
        input_dim,
        hidden_dim,
        output_dim,
        learning_rate: r.f64()?,
        momentum: r.f64()?,
        epochs,
        seed,
    };
    config.validate()?;
    Ok(MlpModel {
        w1: r.f64s(hidden_dim * input_dim)?,
        b1: r.f64s(hidden_dim)?,
        w2: r.f64s(output_dim * hidden_dim)?,
        b2: r.f64s(output_dim)?,
        config,
    })
}

fn write_svm(w: &mut Writer, m: &SvmModel) -> Result<()> {
    w.u8(match m.scheme {
        Scheme::OneVsRest => 0,
        Scheme::OneVsOne => 1,
    });
    w.u32(m.num_classes)?;
    w.u32(m.dim)?;
    w.u32(m.machines.len())?;
    for (target, machine) in &m.machines {
        let (tag, a, b) = match *target {
            MachineTarget::Rest(a) => (0, a, 0),
            MachineTarget::Pair(a, b) => (1, a, b),
        };
        w.u8(tag);
        w.u32(a)?;
        w.u32(b)?;
        let (tag, param) = match machine.kernel {
            Kernel::Linear => (0, 0.0),
            Kernel::Rbf { sigma } => (1, sigma),
            Kernel::Poly { degree } => (2, f64::from(degree)),
        };
        w.u8(tag);
        w.f64(param);
        w.f64(machine.c);
        w.f64(machine.bias);
        w.u32(machine.coef.len())?;
        w.f64s(&machine.coef);
        for sv in &machine.support_vectors {
            if sv.len() != m.dim {
                return Err(bad("support vector dimension differs from model dimension"));
            }
            w.f64s(sv);
        }
    }
    Ok(())
}

fn read_svm(r: &mut Reader) -> Result<SvmModel> {
    let scheme = match r.u8()? {
        0 => Scheme::OneVsRest,
        1 => Scheme::OneVsOne,
        _ => return Err(bad("unknown multiclass scheme")),
    };
    let num_classes = r.u32()?;
    let dim = r.u32()?;
    let n = r.u32()?;
    let mut machines = Vec::new();
    for _ in 0..n {
        let tag = r.u8()?;
        let (a, b) = (r.u32()?, r.u32()?);
        if a >= num_classes || b >= num_classes {
            return Err(bad("machine class out of range"));
        }
        let target = match tag {
            0 => MachineTarget::Rest(a),
            1 => MachineTarget::Pair(a, b),
            _ => return Err(bad("unknown machine target")),
        };
        let tag = r.u8()?;
        let param = r.f64()?;
        let kernel = match tag {
            0 => Kernel::Linear,
            1 => Kernel::Rbf { sigma: param },
            2 if param >= 0.0 && param <= f64::from(u32::MAX) && param.fract() == 0.0 => {
                Kernel::Poly { degree: param as u32 }
            }
            _ => return Err(bad("unknown kernel")),
        };
        kernel.validate()?;
        let c = r.f64()?;
        let bias = r.f64()?;
        let n_sv = r.u32()?;
        let coef = r.f64s(n_sv)?;
        let support_vectors = (0..n_sv).map(|_| r.f64s(dim)).collect::<Result<_>>()?;
        machines.push((
            target,
            SvmBinaryModel {
                kernel,
                c,
                bias,
                support_vectors,
                coef,
            },
        ));
    }
    Ok(SvmModel {
        scheme,
        num_classes,
        dim,
        machines,
    })
}

fn write_scaler(w: &mut Writer, s: &ScalerModel) -> Result<()> {
    if s.mins.len() != s.maxs.len() {
        return Err(bad("scaler bounds differ in length"));
    }
    w.u32(s.dim())?;
    w.u8(u8::from(s.clamp));
    w.f64s(&s.mins);
    w.f64s(&s.maxs);
    Ok(())
}

fn read_scaler(r: &mut Reader) -> Result<ScalerModel> {
    let dim = r.u32()?;
    let clamp = match r.u8()? {
        0 => false,
        1 => true,
        _ => return Err(bad("clamp flag must be 0 or 1")),
    };
    Ok(ScalerModel {
        mins: r.f64s(dim)?,
        maxs: r.f64s(dim)?,
        clamp,
    })
}

fn write_fusion(w: &mut Writer, f: &FusionModel) {
    w.u8(match f.mode {
        VoteMode::BinaryVotes => 0,
        VoteMode::SoftScores => 1,
    });
    w.f64s(&f.weights.as_array());
}

fn read_fusion(r: &mut Reader) -> Result<FusionModel> {
    let mode = match r.u8()? {
        0 => VoteMode::BinaryVotes,
        1 => VoteMode::SoftScores,
        _ => return Err(bad("unknown vote mode")),
    };
    let mut weights = [0.0; 4];
    for w in &mut weights {
        *w = r.f64()?;
    }
    Ok(FusionModel {
        mode,
        weights: FusionWeights::new(weights)?,
    })
}

pub fn encode(payload: &Payload) -> Result<Vec<u8>> {
    let mut body = Writer::default();
    match payload {
        Payload::Mlp(m) => write_mlp(&mut body, m)?,
        Payload::Svm(m) => write_svm(&mut body, m)?,
        Payload::Scaler(m) => write_scaler(&mut body, m)?,
        Payload::Fusion(m) => write_fusion(&mut body, m),
    }
    let mut out = Vec::with_capacity(HEADER_LEN + body.0.len());
    out.extend_from_slice(MAGIC);
    out.extend(VERSION.to_le_bytes());
    out.push(payload.tag());
    out.push(0);
    out.extend((body.0.len() as u64).to_le_bytes());
    out.extend(body.0);
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<Payload> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).ok() != Some(MAGIC.as_slice()) {
        return Err(bad("missing magic bytes"));
    }
    let version = u16::from_le_bytes(r.array()?);
    if version != VERSION {
        return Err(bad(&format!("unsupported format version {version}")));
    }
    let tag = r.u8()?;
    r.u8()?;
    let len = r.u64()?;
    if len != (bytes.len() - HEADER_LEN) as u64 {
        return Err(bad("payload length does not match file size"));
    }
    let payload = match tag {
        1 => Payload::Mlp(read_mlp(&mut r)?),
        2 => Payload::Svm(read_svm(&mut r)?),
        3 => Payload::Scaler(read_scaler(&mut r)?),
        4 => Payload::Fusion(read_fusion(&mut r)?),
        _ => return Err(bad("unknown payload kind")),
    };
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes after payload"));
    }
    Ok(payload)
}

pub fn save(path: &Path, payload: &Payload) -> Result<()> {
    crate::write_atomic(path, &encode(payload)?)
}

pub fn load(path: &Path) -> Result<Payload> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Pretty JSON rendering of a payload, for inspection.
pub fn to_json(payload: &Payload) -> Result<String> {
    serde_json::to_string_pretty(payload).map_err(|e| Error::format("JSON", e.to_string()))
}

macro_rules! typed_loader {
    ($name:ident, $variant:ident, $ty:ty) => {
        pub fn $name(path: &Path) -> Result<$ty> {
            match load(path)? {
                Payload::$variant(m) => Ok(m),
                _ => Err(bad(concat!("expected a ", stringify!($variant), " payload"))),
            }
        }
    };
}

typed_loader!(load_mlp, Mlp, MlpModel);
typed_loader!(load_svm, Svm, SvmModel);
typed_loader!(load_scaler, Scaler, ScalerModel);
typed_loader!(load_fusion, Fusion, FusionModel);

#[cfg(test)]
mod tests {
    use super::*;

    fn fusion() -> Payload {
        Payload::Fusion(FusionModel {
            mode: VoteMode::SoftScores,
            weights: FusionWeights::published(),
        })
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&fusion()).unwrap();
        assert_eq!(&bytes[..4], b"GLRM");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 4);
        assert_eq!(bytes[7], 0);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 33);
        assert_eq!(bytes.len(), 16 + 33);
        assert_eq!(bytes[16], 1);
        assert_eq!(f64::from_le_bytes(bytes[17..25].try_into().unwrap()), 0.316);
    }

    #[test]
    fn corrupted_headers_are_rejected() {
        let good = encode(&fusion()).unwrap();
        let mut b = good.clone();
        b[0] = b'X';
        assert!(decode(&b).is_err());
        let mut b = good.clone();
        b[4] = 2;
        assert!(decode(&b).is_err());
        let mut b = good.clone();
        b[6] = 9;
        assert!(decode(&b).is_err());
        assert!(decode(&good[..good.len() - 1]).is_err());
        let mut b = good;
        b.push(0);
        assert!(decode(&b).is_err());
    }

    #[test]
    fn scaler_round_trip() {
        let s = Payload::Scaler(ScalerModel {
            mins: vec![-0.0, f64::MIN_POSITIVE, 1e300],
            maxs: vec![0.1 + 0.2, 5e-324, f64::MAX],
            clamp: false,
        });
        let back = decode(&encode(&s).unwrap()).unwrap();
        let (Payload::Scaler(a), Payload::Scaler(b)) = (&s, &back) else {
            panic!("kind changed");
        };
        assert!(a.mins.iter().zip(&b.mins).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a.maxs.iter().zip(&b.maxs).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.clamp, b.clamp);
    }

    #[test]
    fn json_dump_names_the_kind() {
        let text = to_json(&fusion()).unwrap();
        assert!(text.contains("\"kind\": \"fusion\""));
        assert!(text.contains("soft-scores"));
    }
}

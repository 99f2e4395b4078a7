//! Binary tensor files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "CFFT1"            5 bytes
//! field tag          u32   0 = complex, 1 = prime
//! modulus            u64   0 for complex
//! rank               u32
//! shape              rank x u64
//! payload            row-major; complex as (re, im) f64 pairs, prime as u64 residues
//! ```

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Tensor;
use crate::field::{FieldSpec, PrimeField};

pub const MAGIC: &[u8; 5] = b"CFFT1";
const TAG_COMPLEX: u32 = 0;
const TAG_PRIME: u32 = 1;

/// Contents of a vector file.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorFile {
    Complex(Tensor<Complex64>),
    Prime { modulus: u64, tensor: Tensor<u64> },
}

impl VectorFile {
    pub fn shape(&self) -> &[usize] {
        match self {
            VectorFile::Complex(t) => t.shape(),
            VectorFile::Prime { tensor, .. } => tensor.shape(),
        }
    }

    /// Field the payload lives in. Complex files carry no tolerance, so the
    /// default is reported.
    pub fn field_spec(&self) -> FieldSpec {
        match self {
            VectorFile::Complex(_) => FieldSpec::complex(),
            VectorFile::Prime { modulus, .. } => FieldSpec::prime(*modulus),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let shape = self.shape();
        let mut out =
            Vec::with_capacity(5 + 16 + 8 * shape.len() + 16 * shape.iter().product::<usize>());
        out.extend_from_slice(MAGIC);
        let (tag, modulus) = match self {
            VectorFile::Complex(_) => (TAG_COMPLEX, 0),
            VectorFile::Prime { modulus, .. } => (TAG_PRIME, *modulus),
        };
        out.extend_from_slice(&tag.to_le_bytes());
        out.extend_from_slice(&modulus.to_le_bytes());
        out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
        for &d in shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        match self {
            VectorFile::Complex(t) => {
                for z in t.data() {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
            VectorFile::Prime { tensor, .. } => {
                for v in tensor.data() {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(5)? != MAGIC {
            return Err(malformed("bad magic"));
        }
        let tag = r.u32()?;
        let modulus = r.u64()?;
        let rank = r.u32()? as usize;
        if rank == 0 {
            return Err(malformed("rank 0"));
        }
        let mut shape = Vec::with_capacity(rank.min(64));
        for _ in 0..rank {
            let d = usize::try_from(r.u64()?).map_err(|_| malformed("axis too long"))?;
            shape.push(d);
        }
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| malformed("shape overflows"))?;
        let elem = match tag {
            TAG_COMPLEX => 16,
            TAG_PRIME => 8,
            t => return Err(malformed(&format!("unknown field tag {t}"))),
        };
        let expected = len
            .checked_mul(elem)
            .ok_or_else(|| malformed("shape overflows"))?;
        if r.remaining() != expected {
            return Err(malformed(&format!(
                "payload is {} bytes, shape {:?} needs {expected}",
                r.remaining(),
                shape
            )));
        }
        let file = match tag {
            TAG_COMPLEX => {
                if modulus != 0 {
                    return Err(malformed("complex file with nonzero modulus"));
                }
                let data = (0..len)
                    .map(|_| Ok(Complex64::new(r.f64()?, r.f64()?)))
                    .collect::<Result<Vec<_>>>()?;
                VectorFile::Complex(
                    Tensor::new(shape, data).map_err(|e| malformed(&e.to_string()))?,
                )
            }
            _ => {
                PrimeField::new(modulus).map_err(|e| malformed(&e.to_string()))?;
                let data = (0..len).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
                if let Some(v) = data.iter().find(|&&v| v >= modulus) {
                    return Err(malformed(&format!("residue {v} >= modulus {modulus}")));
                }
                VectorFile::Prime {
                    modulus,
                    tensor: Tensor::new(shape, data).map_err(|e| malformed(&e.to_string()))?,
                }
            }
        };
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::MalformedFile(msg) => Error::MalformedFile(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }
}

fn malformed(msg: &str) -> Error {
    Error::MalformedFile(msg.to_string())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| malformed("truncated"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

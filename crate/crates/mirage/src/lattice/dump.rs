//! Versioned little-endian binary dumps of operators and states.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic  b"MIRG"        4 bytes
//! version u16 = 1
//! kind    u8            1 = operator, 2 = state
//! operator: boundary u8 (0 periodic, 1 open), sheet u8 (0 first, 1 second),
//!           n_b u64, n_emitters u64, dimension u64,
//!           dimension basis labels, nnz u64,
//!           nnz entries of (row u64, col u64, re f64, im f64)
//! state:    length u64, length pairs of (re f64, im f64)
//! label:    tag u8 then 0 = emitter (index u64), 1 = bath (sublattice u8, cell i64),
//!           2 = pair (i u64, j u64)
//! ```

use alloc::vec::Vec;

use super::{BasisLabel, Boundary, CsrMatrix, LatticeOperator, StateVector};
use crate::bath::Sheet;
use crate::error::{Error, Result};
use crate::self_energy::{Site, Sublattice};
use crate::Complex64;

pub const MAGIC: &[u8; 4] = b"MIRG";
pub const VERSION: u16 = 1;
const KIND_OPERATOR: u8 = 1;
const KIND_STATE: u8 = 2;
const CORRUPT: Error = Error::InvalidParams("corrupt or unsupported dump");

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn header(&mut self, kind: u8) {
        self.0.extend_from_slice(MAGIC);
        self.0.extend_from_slice(&VERSION.to_le_bytes());
        self.u8(kind);
    }
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(CORRUPT);
        }
        let (head, tail) = self.0.split_at(N);
        self.0 = tail;
        Ok(head.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| CORRUPT)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn header(&mut self, kind: u8) -> Result<()> {
        if &self.take::<4>()? != MAGIC || u16::from_le_bytes(self.take()?) != VERSION || self.u8()? != kind {
            return Err(CORRUPT);
        }
        Ok(())
    }
    /// Guards allocations against absurd counts in corrupt input.
    fn count(&mut self, min_bytes_each: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(min_bytes_each) > self.0.len() {
            return Err(CORRUPT);
        }
        Ok(n)
    }
}

pub fn operator_to_bytes(op: &LatticeOperator) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.header(KIND_OPERATOR);
    w.u8(match op.boundary {
        Boundary::Periodic => 0,
        Boundary::Open => 1,
    });
    w.u8(match op.sheet {
        Sheet::First => 0,
        Sheet::Second => 1,
    });
    w.u64(op.n_b as u64);
    w.u64(op.n_emitters as u64);
    w.u64(op.dimension() as u64);
    for label in &op.basis {
        match *label {
            BasisLabel::Emitter(m) => {
                w.u8(0);
                w.u64(m as u64);
            }
            BasisLabel::Bath(site) => {
                w.u8(1);
                w.u8(if site.sublattice == Sublattice::A { 0 } else { 1 });
                w.0.extend_from_slice(&site.cell.to_le_bytes());
            }
            BasisLabel::Pair(i, j) => {
                w.u8(2);
                w.u64(i as u64);
                w.u64(j as u64);
            }
        }
    }
    w.u64(op.matrix.nnz() as u64);
    for (r, c, v) in op.matrix.triplets() {
        w.u64(r as u64);
        w.u64(c as u64);
        w.f64(v.re);
        w.f64(v.im);
    }
    w.0
}

pub fn operator_from_bytes(bytes: &[u8]) -> Result<LatticeOperator> {
    let mut r = Reader(bytes);
    r.header(KIND_OPERATOR)?;
    let boundary = match r.u8()? {
        0 => Boundary::Periodic,
        1 => Boundary::Open,
        _ => return Err(CORRUPT),
    };
    let sheet = match r.u8()? {
        0 => Sheet::First,
        1 => Sheet::Second,
        _ => return Err(CORRUPT),
    };
    let n_b = r.usize()?;
    let n_emitters = r.usize()?;
    let dim = r.count(9)?;
    let mut basis = Vec::with_capacity(dim);
    for _ in 0..dim {
        basis.push(match r.u8()? {
            0 => BasisLabel::Emitter(r.usize()?),
            1 => {
                let sublattice = match r.u8()? {
                    0 => Sublattice::A,
                    1 => Sublattice::B,
                    _ => return Err(CORRUPT),
                };
                BasisLabel::Bath(Site::new(sublattice, i64::from_le_bytes(r.take()?)))
            }
            2 => BasisLabel::Pair(r.usize()?, r.usize()?),
            _ => return Err(CORRUPT),
        });
    }
    let nnz = r.count(32)?;
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (row, col) = (r.usize()?, r.usize()?);
        triplets.push((row, col, Complex64::new(r.f64()?, r.f64()?)));
    }
    if !r.0.is_empty() {
        return Err(CORRUPT);
    }
    let matrix = CsrMatrix::from_triplets(dim, triplets).map_err(|_| CORRUPT)?;
    Ok(LatticeOperator { matrix, basis, boundary, sheet, n_b, n_emitters })
}

pub fn state_to_bytes(state: &StateVector) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.header(KIND_STATE);
    w.u64(state.amplitudes.len() as u64);
    for a in &state.amplitudes {
        w.f64(a.re);
        w.f64(a.im);
    }
    w.0
}

pub fn state_from_bytes(bytes: &[u8]) -> Result<StateVector> {
    let mut r = Reader(bytes);
    r.header(KIND_STATE)?;
    let n = r.count(16)?;
    let mut amplitudes = Vec::with_capacity(n);
    for _ in 0..n {
        amplitudes.push(Complex64::new(r.f64()?, r.f64()?));
    }
    if !r.0.is_empty() {
        return Err(CORRUPT);
    }
    Ok(StateVector { amplitudes })
}

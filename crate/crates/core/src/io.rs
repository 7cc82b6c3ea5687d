//! Artifact serialization: the QDNLS1 binary snapshot format, CSV tables with
//! config fingerprints, and atomic writes.
//!
//! Snapshot layout (little-endian):
//!
//! ```text
//! magic   7 bytes  "QDNLS1\0"
//! version u32
//! d       u32
//! n       u32
//! period  f64
//! repr    u8       0 = physical, 1 = spectral
//! count   u32      number of components (d for a field, 3d for a state)
//! data    count × n^d × (f64 re, f64 im), row-major
//! ```

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::field::{Repr, SpectralField, StateTriple};
use crate::grid::TorusGrid;
use crate::{Error, Result};

pub const MAGIC: &[u8; 7] = b"QDNLS1\0";
pub const VERSION: u32 = 1;

/// Writes bytes to a temporary file in the target directory, then renames:
/// interrupted runs leave no partial artifacts.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "artifact".into())
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn push_header(buf: &mut Vec<u8>, grid: &TorusGrid, repr: Repr, count: u32) {
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.d as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.n as u32).to_le_bytes());
    buf.extend_from_slice(&grid.period.to_le_bytes());
    buf.push(match repr {
        Repr::Physical => 0,
        Repr::Spectral => 1,
    });
    buf.extend_from_slice(&count.to_le_bytes());
}

fn push_component(buf: &mut Vec<u8>, data: &[Complex64]) {
    for v in data {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
}

pub fn encode_field(field: &SpectralField) -> Vec<u8> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(32 + grid.d * grid.modes() * 16);
    push_header(&mut buf, grid, field.repr(), grid.d as u32);
    for c in 0..grid.d {
        push_component(&mut buf, field.component(c));
    }
    buf
}

/// A state snapshot stores the three fields' components consecutively
/// (u then v then w), so count = 3d.
pub fn encode_state(state: &StateTriple) -> Vec<u8> {
    let state = state.to_spectral();
    let grid = state.grid();
    let mut buf = Vec::with_capacity(32 + 3 * grid.d * grid.modes() * 16);
    push_header(&mut buf, grid, Repr::Spectral, (3 * grid.d) as u32);
    for f in state.fields() {
        for c in 0..grid.d {
            push_component(&mut buf, f.component(c));
        }
    }
    buf
}

pub fn write_state_snapshot(path: &Path, state: &StateTriple) -> Result<()> {
    atomic_write(path, &encode_state(state))
}

pub fn write_field_snapshot(path: &Path, field: &SpectralField) -> Result<()> {
    atomic_write(path, &encode_field(field))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Field(SpectralField),
    State(StateTriple),
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::BadSnapshot("truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(7)? != MAGIC {
        return Err(Error::BadSnapshot("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::BadSnapshot(format!("unsupported version {version}")));
    }
    let d = r.u32()? as usize;
    let n = r.u32()? as usize;
    let period = r.f64()?;
    let repr = match r.u8()? {
        0 => Repr::Physical,
        1 => Repr::Spectral,
        x => return Err(Error::BadSnapshot(format!("bad repr byte {x}"))),
    };
    let count = r.u32()? as usize;
    let grid = TorusGrid::new(d, n, period).map_err(|e| Error::BadSnapshot(e.to_string()))?;
    let modes = grid.modes();

    let mut comps = Vec::with_capacity(count);
    for _ in 0..count {
        let mut c = Vec::with_capacity(modes);
        for _ in 0..modes {
            let re = r.f64()?;
            let im = r.f64()?;
            c.push(Complex64::new(re, im));
        }
        comps.push(c);
    }
    if r.pos != bytes.len() {
        return Err(Error::BadSnapshot("trailing bytes".into()));
    }

    if count == d {
        Ok(Snapshot::Field(SpectralField::from_components(grid, repr, comps)?))
    } else if count == 3 * d {
        let mut it = comps.into_iter();
        let mut field = |_tag: &str| -> Result<SpectralField> {
            let cs: Vec<_> = (&mut it).take(d).collect();
            SpectralField::from_components(grid, repr, cs)
        };
        let u = field("u")?;
        let v = field("v")?;
        let w = field("w")?;
        Ok(Snapshot::State(StateTriple::new(u, v, w)?))
    } else {
        Err(Error::BadSnapshot(format!("component count {count} is neither d nor 3d")))
    }
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&fs::read(path)?)
}

/// Shortest round-trip decimal for byte-stable CSV baselines.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        serde_json::Number::from_f64(v)
            .map(|n| n.to_string())
            .unwrap_or_else(|| format!("{v}"))
    } else {
        format!("{v}")
    }
}

/// sha-256 of the canonical config serialization; stamped into every CSV.
pub fn fingerprint(canonical_config: &str) -> String {
    let mut h = Sha256::new();
    h.update(canonical_config.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV with a header row and a trailing `# fingerprint=<hash>` footer.
pub fn csv_document(header: &[&str], rows: &[Vec<String>], fingerprint_hex: &str) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s.push_str("# fingerprint=");
    s.push_str(fingerprint_hex);
    s.push('\n');
    s
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>], fingerprint_hex: &str) -> Result<()> {
    atomic_write(path, csv_document(header, rows, fingerprint_hex).as_bytes())
}

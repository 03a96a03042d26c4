//! Binary snapshots: `FWAV`, a little-endian `u32` version, the header
//! `(n_x, d_active, m_max: u64; box_length, torus_period, time: f64)`,
//! then `u` and `u_t` as little-endian `f64` in `[slot][blade][z][y][x]`
//! order over all 165 blades.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::algebra::blade::{blade_count, mask_of};
use crate::error::{Error, Result};
use crate::field::{FieldState, FormField};
use crate::grid::{Grid, GridSpec};

pub const MAGIC: &[u8; 4] = b"FWAV";
pub const VERSION: u32 = 1;
const HEADER_BYTES: u64 = 4 + 4 + 6 * 8;

fn payload_bytes(spec: &GridSpec) -> u64 {
    2 * (spec.n_x as u64).pow(3) * blade_count(3) as u64 * spec.mode_count() as u64 * 8
}

fn write_field(w: &mut impl Write, f: &FormField) -> std::io::Result<()> {
    let grid = f.grid();
    let zeros = vec![0u8; grid.point_count() * 8];
    let mut buf = Vec::with_capacity(grid.point_count() * 8);
    for s in 0..grid.slot_count() {
        for ord in 0..blade_count(3) {
            match f.get(s, mask_of(3, ord)) {
                Some(v) => {
                    buf.clear();
                    for x in v {
                        buf.extend_from_slice(&x.to_le_bytes());
                    }
                    w.write_all(&buf)?;
                }
                None => w.write_all(&zeros)?,
            }
        }
    }
    Ok(())
}

pub fn save_snapshot(state: &FieldState, path: &Path) -> Result<()> {
    if state.u.degree() != 3 || state.ut.degree() != 3 {
        return Err(Error::DegreeMismatch(state.u.degree(), 3));
    }
    let grid = state.grid();
    let spec = &grid.spec;
    let io = |e| Error::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    let mut head = Vec::with_capacity(HEADER_BYTES as usize);
    head.extend_from_slice(MAGIC);
    head.extend_from_slice(&VERSION.to_le_bytes());
    for v in [spec.n_x as u64, spec.d_active as u64, spec.m_max as u64] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    for v in [spec.box_length, spec.torus_period, state.time] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&head).map_err(io)?;
    write_field(&mut w, &state.u).map_err(io)?;
    write_field(&mut w, &state.ut).map_err(io)?;
    w.flush().map_err(io)?;
    Ok(())
}

fn read_field(r: &mut impl Read, grid: &std::sync::Arc<Grid>) -> std::io::Result<FormField> {
    let np = grid.point_count();
    let mut f = FormField::zero(grid, 3);
    let mut bytes = vec![0u8; np * 8];
    for s in 0..grid.slot_count() {
        for ord in 0..blade_count(3) {
            r.read_exact(&mut bytes)?;
            if bytes.iter().all(|b| *b == 0) {
                continue;
            }
            let v = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            f.insert(s, mask_of(3, ord), v);
        }
    }
    Ok(f)
}

pub fn load_snapshot(path: &Path) -> Result<FieldState> {
    let io = |e| Error::io(path, e);
    let file = File::open(path).map_err(io)?;
    let found = file.metadata().map_err(io)?.len();
    let mut r = BufReader::new(file);
    let mut head = [0u8; HEADER_BYTES as usize];
    if found < HEADER_BYTES {
        return Err(Error::SnapshotTruncated {
            expected: HEADER_BYTES,
            found,
        });
    }
    r.read_exact(&mut head).map_err(io)?;
    if &head[0..4] != MAGIC {
        return Err(Error::SnapshotMagic);
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::SnapshotVersion(version));
    }
    let word = |i: usize| -> [u8; 8] { head[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes") };
    let spec = GridSpec {
        n_x: u64::from_le_bytes(word(0)) as usize,
        d_active: u64::from_le_bytes(word(1)) as usize,
        m_max: u64::from_le_bytes(word(2)) as usize,
        box_length: f64::from_le_bytes(word(3)),
        torus_period: f64::from_le_bytes(word(4)),
    };
    let time = f64::from_le_bytes(word(5));
    spec.validate()?;
    let expected = HEADER_BYTES + payload_bytes(&spec);
    if found != expected {
        return Err(Error::SnapshotTruncated { expected, found });
    }
    let grid = Grid::new(spec)?;
    let u = read_field(&mut r, &grid).map_err(io)?;
    let ut = read_field(&mut r, &grid).map_err(io)?;
    Ok(FieldState { u, ut, time })
}

//! GridMask encodings: a versioned run-length binary container and a plain
//! text debug picture.
//!
//! Binary layout (little endian):
//! `b"FDGM"`, `u16` version, `f64` h, `f64` origin x, `f64` origin y,
//! `i64` i0, `i64` j0, `u32` width, `u32` height, then for each row from
//! `j0` upwards: `u32` run count followed by that many `u32` run lengths,
//! alternating empty/filled and starting with an empty run.

use std::io::{self, Read, Write};

use super::mask::{Grid, GridMask, IRect};
use super::point::Point;
use crate::hexfloat;

const MAGIC: &[u8; 4] = b"FDGM";
const VERSION: u16 = 1;

pub fn write_binary<W: Write>(mask: &GridMask, mut w: W) -> io::Result<()> {
    let g = mask.grid();
    let r = mask.bbox();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [g.h, g.origin.x, g.origin.y] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&r.i0.to_le_bytes())?;
    w.write_all(&r.j0.to_le_bytes())?;
    w.write_all(&(r.width() as u32).to_le_bytes())?;
    w.write_all(&(r.height() as u32).to_le_bytes())?;
    let bits = mask.bits();
    for row in bits.chunks(r.width().max(1)).take(r.height()) {
        let mut runs: Vec<u32> = Vec::new();
        let mut current = false;
        let mut len = 0u32;
        for &b in row {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        w.write_all(&(runs.len() as u32).to_le_bytes())?;
        for run in runs {
            w.write_all(&run.to_le_bytes())?;
        }
    }
    Ok(())
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_binary<R: Read>(mut r: R) -> io::Result<GridMask> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a grid mask container"));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    if u16::from_le_bytes(b2) != VERSION {
        return Err(bad("unsupported grid mask version"));
    }
    let mut b8 = [0u8; 8];
    let mut f = || -> io::Result<f64> {
        r.read_exact(&mut b8)?;
        Ok(f64::from_le_bytes(b8))
    };
    let (h, ox, oy) = (f()?, f()?, f()?);
    if !(h > 0.0 && h.is_finite()) {
        return Err(bad("invalid resolution"));
    }
    r.read_exact(&mut b8)?;
    let i0 = i64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let j0 = i64::from_le_bytes(b8);
    let mut b4 = [0u8; 4];
    let mut u = |r: &mut R| -> io::Result<u32> {
        r.read_exact(&mut b4)?;
        Ok(u32::from_le_bytes(b4))
    };
    let width = u(&mut r)? as usize;
    let height = u(&mut r)? as usize;
    let grid = Grid::new(Point::new(ox, oy), h);
    let rect = IRect::new(i0, j0, i0 + width as i64, j0 + height as i64);
    let mut bits = Vec::with_capacity(width * height);
    for _ in 0..height {
        let n = u(&mut r)?;
        let mut filled = false;
        let mut total = 0usize;
        for _ in 0..n {
            let len = u(&mut r)? as usize;
            total += len;
            if total > width {
                return Err(bad("row overflows width"));
            }
            bits.extend(std::iter::repeat_n(filled, len));
            filled = !filled;
        }
        if total != width {
            return Err(bad("row length mismatch"));
        }
    }
    Ok(GridMask::from_raw(grid, rect, bits))
}

/// Debug text: a header line, then one line per row (top row first),
/// `1` for a filled cell and `0` otherwise.
pub fn to_text(mask: &GridMask) -> String {
    let g = mask.grid();
    let r = mask.bbox();
    let mut out = format!(
        "gridmask v1 h={} ox={} oy={} i0={} j0={} w={} hgt={}\n",
        hexfloat::format(g.h),
        hexfloat::format(g.origin.x),
        hexfloat::format(g.origin.y),
        r.i0,
        r.j0,
        r.width(),
        r.height()
    );
    for j in (r.j0..r.j1).rev() {
        for i in r.i0..r.i1 {
            out.push(if mask.contains(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn from_text(text: &str) -> Option<GridMask> {
    let mut lines = text.lines();
    let header = lines.next()?;
    let mut fields = header.split_whitespace();
    if fields.next()? != "gridmask" || fields.next()? != "v1" {
        return None;
    }
    let mut get = |key: &str| -> Option<String> {
        let f = fields.next()?;
        f.strip_prefix(key)?.strip_prefix('=').map(str::to_string)
    };
    let h = hexfloat::parse(&get("h")?)?;
    let ox = hexfloat::parse(&get("ox")?)?;
    let oy = hexfloat::parse(&get("oy")?)?;
    let i0: i64 = get("i0")?.parse().ok()?;
    let j0: i64 = get("j0")?.parse().ok()?;
    let w: usize = get("w")?.parse().ok()?;
    let hgt: usize = get("hgt")?.parse().ok()?;
    let grid = Grid::new(Point::new(ox, oy), h);
    let rows: Vec<&str> = lines.collect();
    if rows.len() != hgt {
        return None;
    }
    let mut cells = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        if row.len() != w {
            return None;
        }
        let j = j0 + (hgt - 1 - k) as i64;
        for (di, ch) in row.chars().enumerate() {
            match ch {
                '1' => cells.push((i0 + di as i64, j)),
                '0' => {}
                _ => return None,
            }
        }
    }
    Some(GridMask::from_cells(grid, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn binary_and_text_round_trip(cells in proptest::collection::vec((-20i64..20, -20i64..20), 0..80)) {
            let g = Grid::new(Point::new(-0.5, 0.25), 0.125);
            let m = GridMask::from_cells(g, cells);
            let mut buf = Vec::new();
            write_binary(&m, &mut buf).unwrap();
            prop_assert_eq!(&read_binary(buf.as_slice()).unwrap(), &m);
            prop_assert_eq!(&from_text(&to_text(&m)).unwrap(), &m);
        }
    }

    #[test]
    fn text_picture_is_upright() {
        let g = Grid::new(Point::ORIGIN, 1.0);
        let m = GridMask::from_cells(g, [(0, 0), (1, 1)]);
        let t = to_text(&m);
        assert!(t.ends_with("01\n10\n"), "{t}");
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(read_binary(&b"XXXX"[..]).is_err());
    }
}

//! Transport efficiency read from a recorded output-facet intensity image.
//!
//! Pixel `(row, col)` has coordinates `x = col`, `y = row`.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
}

impl Ellipse {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        let dx = (col as f64 - self.cx) / self.rx;
        let dy = (row as f64 - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }

    fn in_bounds(&self, rows: usize, cols: usize) -> bool {
        self.rx > 0.0
            && self.ry > 0.0
            && self.cx - self.rx >= 0.0
            && self.cy - self.ry >= 0.0
            && self.cx + self.rx <= (cols - 1) as f64
            && self.cy + self.ry <= (rows - 1) as f64
    }
}

/// Axis-aligned pixel rectangle covering columns `x..x + w` and rows `y..y + h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.x..self.x + self.w).contains(&col) && (self.y..self.y + self.h).contains(&row)
    }

    fn in_bounds(&self, rows: usize, cols: usize) -> bool {
        self.w > 0 && self.h > 0 && self.x + self.w <= cols && self.y + self.h <= rows
    }
}

fn parse_list<const N: usize, T: FromStr>(
    s: &str,
    what: &str,
) -> std::result::Result<[T; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!(
            "{what} needs {N} comma-separated values, got {}",
            parts.len()
        ));
    }
    let vals: Vec<T> = parts
        .iter()
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| format!("{what}: cannot parse `{p}`"))
        })
        .collect::<std::result::Result<_, _>>()?;
    vals.try_into()
        .map_err(|_| format!("{what}: wrong number of values"))
}

impl FromStr for Ellipse {
    type Err = String;

    /// `cx,cy,rx,ry`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let [cx, cy, rx, ry] = parse_list::<4, f64>(s, "ellipse")?;
        Ok(Ellipse { cx, cy, rx, ry })
    }
}

impl FromStr for Rect {
    type Err = String;

    /// `x,y,w,h`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let [x, y, w, h] = parse_list::<4, usize>(s, "rect")?;
        Ok(Rect { x, y, w, h })
    }
}

/// Reads a whitespace-separated numeric matrix, one image row per line.
/// Blank lines are ignored; rows of unequal length are rejected.
pub fn parse_pixel_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: k + 1,
                    reason: format!("`{tok}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: k + 1,
                    reason: format!(
                        "{} values where earlier rows have {}",
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty("image"));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageEfficiency {
    pub efficiency: f64,
    pub fmo_intensity: f64,
    pub sink_intensity: f64,
}

/// eta = S_sink / (S_fmo + S_sink), sums taken over the masks after
/// subtracting `background` from every masked pixel.
pub fn efficiency_from_intensity_image(
    pixels: &DMatrix<f64>,
    fmo_mask: &Ellipse,
    sink_mask: &Rect,
    background: f64,
) -> Result<ImageEfficiency> {
    let (rows, cols) = pixels.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Empty("image"));
    }
    if !fmo_mask.in_bounds(rows, cols) {
        return Err(Error::MaskOutOfBounds("ellipse"));
    }
    if !sink_mask.in_bounds(rows, cols) {
        return Err(Error::MaskOutOfBounds("rectangle"));
    }
    let mut fmo = 0.0;
    let mut sink = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let in_e = fmo_mask.contains(r, c);
            let in_r = sink_mask.contains(r, c);
            if in_e && in_r {
                return Err(Error::OverlappingMasks { row: r, col: c });
            }
            if in_e {
                fmo += pixels[(r, c)] - background;
            } else if in_r {
                sink += pixels[(r, c)] - background;
            }
        }
    }
    let total = fmo + sink;
    if !(total > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    Ok(ImageEfficiency {
        efficiency: sink / total,
        fmo_intensity: fmo,
        sink_intensity: sink,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (DMatrix<f64>, Ellipse, Rect) {
        let mut m = DMatrix::zeros(10, 20);
        m[(4, 4)] = 30.0;
        m[(3, 14)] = 35.0;
        m[(6, 16)] = 35.0;
        let e = Ellipse {
            cx: 4.0,
            cy: 4.0,
            rx: 3.0,
            ry: 2.0,
        };
        let r = Rect {
            x: 12,
            y: 2,
            w: 6,
            h: 6,
        };
        (m, e, r)
    }

    #[test]
    fn thirty_seventy_split() {
        let (m, e, r) = fixture();
        let out = efficiency_from_intensity_image(&m, &e, &r, 0.0).unwrap();
        assert_eq!(out.efficiency, 0.7);
    }

    #[test]
    fn rejects_zero_image_and_overlap() {
        let (_, e, r) = fixture();
        let z = DMatrix::zeros(10, 20);
        assert!(matches!(
            efficiency_from_intensity_image(&z, &e, &r, 0.0),
            Err(Error::ZeroIntensity)
        ));
        let (m, e, _) = fixture();
        let bad = Rect {
            x: 5,
            y: 3,
            w: 4,
            h: 2,
        };
        assert!(matches!(
            efficiency_from_intensity_image(&m, &e, &bad, 0.0),
            Err(Error::OverlappingMasks { .. })
        ));
        let outside = Rect {
            x: 15,
            y: 0,
            w: 6,
            h: 2,
        };
        assert!(matches!(
            efficiency_from_intensity_image(&m, &e, &outside, 0.0),
            Err(Error::MaskOutOfBounds(_))
        ));
    }

    #[test]
    fn ragged_rows_name_line() {
        match parse_pixel_matrix("1 2 3\n4 5 6\n7 8\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let m = parse_pixel_matrix("1 2\n\n3 4\n").unwrap();
        assert_eq!(m.shape(), (2, 2));
    }

    #[test]
    fn mask_specs_parse() {
        assert_eq!(
            "1,2,3,4".parse::<Rect>().unwrap(),
            Rect {
                x: 1,
                y: 2,
                w: 3,
                h: 4
            }
        );
        assert!("1,2,3".parse::<Rect>().is_err());
        assert_eq!("1.5, 2, 3, 4".parse::<Ellipse>().unwrap().cx, 1.5);
    }
}

//! Rendering of the chamber decomposition of the coordinate plane
//! `(v(x_1), v(x_2))` for height 3: each grid cell is sampled at its centre,
//! mapped to a polygon through the lower hull, and coloured by its chamber.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Signed;

use crate::building::SimplexB;
use crate::error::{arg_err, Result};
use crate::hecke::chamber_of;
use crate::newton::{Context, NewtonPolygon};
use crate::rational::{int, join_list, Rational};

/// Pixel size of one grid cell.
pub const CELL_PX: usize = 24;

const PALETTE: [&str; 12] = [
    "#e8d5b7", "#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc", "#fc9272", "#c7e9c0", "#fdd0a2", "#dadaeb", "#c6dbef",
    "#d9d9d9", "#fee391",
];

/// One sampled cell: grid position, sample point and its chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
    pub v1: Rational,
    pub v2: Rational,
    pub chamber: SimplexB,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub cells: Vec<Cell>,
    pub document: String,
}

/// Samples `res × res` cells of `(0, vmax]^2` and renders them.
pub fn decomposition(q: u32, n: usize, vmax: &Rational, res: usize) -> Result<Decomposition> {
    if n != 3 {
        return Err(arg_err(format!("the decomposition figure is drawn for n = 3, not {n}")));
    }
    if !vmax.is_positive() {
        return Err(arg_err("the coordinate range must be positive"));
    }
    if !(1..=128).contains(&res) {
        return Err(arg_err("resolution must be between 1 and 128"));
    }
    let ctx = Context::new(q, n)?;
    let step = vmax / int(res as i64);
    let half = &step / int(2);
    let mut cells = Vec::with_capacity(res * res);
    for row in 0..res {
        for col in 0..res {
            let v1 = &step * int(col as i64) + &half;
            let v2 = &step * int(row as i64) + &half;
            let p = NewtonPolygon::from_coordinates(ctx, &[v1.clone(), v2.clone()])?;
            let (chamber, _) = chamber_of(&p)?;
            cells.push(Cell { col, row, v1, v2, chamber });
        }
    }
    let document = render(q, vmax, res, &cells);
    Ok(Decomposition { cells, document })
}

fn render(q: u32, vmax: &Rational, res: usize, cells: &[Cell]) -> String {
    let side = res * CELL_PX;
    let mut colors: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for c in cells {
        let next = colors.len();
        colors.entry(c.chamber.b().to_vec()).or_insert(next);
    }
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
    );
    let _ = writeln!(
        s,
        "<desc>Chamber decomposition, q={q} n=3, v1 and v2 in (0,{vmax}], {res}x{res} cells of {CELL_PX}px; \
         pixel x = col*{CELL_PX}, pixel y = (res-1-row)*{CELL_PX}, cell (col,row) sampled at its centre.</desc>"
    );
    let _ = writeln!(s, r#"<g id="cells" stroke="none">"#);
    for c in cells {
        let x = c.col * CELL_PX;
        let y = (res - 1 - c.row) * CELL_PX;
        let color = PALETTE[colors[c.chamber.b()] % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" fill="{color}" data-v1="{}" data-v2="{}" data-b="{}"/>"#,
            c.v1,
            c.v2,
            join_list(c.chamber.b(), ",")
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="walls" stroke="#222222" stroke-width="2">"##);
    let at = |col: usize, row: usize| &cells[row * res + col];
    for row in 0..res {
        for col in 0..res {
            let here = at(col, row);
            let x = col * CELL_PX;
            let y = (res - 1 - row) * CELL_PX;
            if col + 1 < res && at(col + 1, row).chamber != here.chamber {
                let _ = writeln!(s, r#"<line x1="{0}" y1="{y}" x2="{0}" y2="{1}"/>"#, x + CELL_PX, y + CELL_PX);
            }
            if row + 1 < res && at(col, row + 1).chamber != here.chamber {
                let _ = writeln!(s, r#"<line x1="{x}" y1="{y}" x2="{0}" y2="{y}"/>"#, x + CELL_PX);
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

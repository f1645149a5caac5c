//! Escape-time images of the model map with the graph skeleton drawn on top.

use num_complex::Complex;
use qcfold::disk::DiskMapParams;
use qcfold::graph::{model_g, GraphModel, ModelParams};
use rayon::prelude::*;

use crate::config::RenderConfig;

type C = Complex<f64>;

/// Pixels whose own point has no explicit formula.
pub const SENTINEL: [u8; 3] = [255, 0, 255];
pub const BOUNDED: [u8; 3] = [0, 0, 0];
pub const STRIP_LINE: [u8; 3] = [255, 255, 255];
pub const CIRCLE: [u8; 3] = [0, 255, 255];
pub const MARKER: [u8; 3] = [255, 40, 40];

/// What happened to the orbit of one pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    /// `|g^k(z)|` exceeded the bailout at step `k`.
    Escaped(usize),
    /// `g^k(z)` landed where `g` is not explicit, `k >= 1`.
    Left(usize),
    Unsupported,
    Bounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Image {
    /// Binary portable pixmap.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenderStats {
    pub escaped: usize,
    pub left: usize,
    pub unsupported: usize,
    pub bounded: usize,
}

pub fn model_params(cfg: &RenderConfig) -> qcfold::Result<ModelParams<f64>> {
    let mut p = ModelParams::new(GraphModel::solve(cfg.lambda, cfg.disks)?, cfg.m)?;
    let w = C::new(cfg.w[0], cfg.w[1]);
    for n in 1..=cfg.disks {
        p.disks.insert(n, DiskMapParams::new(cfg.m, cfg.delta, w)?);
    }
    Ok(p)
}

/// Pixel centre. Offsets are formed from exact integers so a window centred on the real axis maps row `i` to the conjugate of row `h - 1 - i`.
pub fn pixel_point(cfg: &RenderConfig, row: usize, col: usize) -> C {
    let hw = cfg.half_width;
    let hh = hw * cfg.height as f64 / cfg.width as f64;
    let x = (2 * col as i64 + 1 - cfg.width as i64) as f64 / cfg.width as f64 * hw;
    let y = (cfg.height as i64 - 1 - 2 * row as i64) as f64 / cfg.height as f64 * hh;
    C::new(cfg.center[0] + x, cfg.center[1] + y)
}

pub fn fate(z: C, p: &ModelParams<f64>, max_iter: usize, bailout: f64) -> Fate {
    let mut z = z;
    for k in 0..max_iter {
        match model_g(z, p) {
            Ok(v) => z = v,
            Err(_) if k == 0 => return Fate::Unsupported,
            Err(_) => return Fate::Left(k),
        }
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > bailout {
            return Fate::Escaped(k + 1);
        }
    }
    Fate::Bounded
}

fn colour(f: Fate, max_iter: usize) -> [u8; 3] {
    let shade = |k: usize| (k as f64 / max_iter.max(1) as f64).clamp(0.0, 1.0);
    match f {
        Fate::Escaped(k) => {
            let t = shade(k);
            [(255.0 * t) as u8, (180.0 * t + 40.0) as u8, (255.0 * (1.0 - t)) as u8]
        }
        Fate::Left(k) => [0, (120.0 + 120.0 * shade(k)) as u8, 60],
        Fate::Unsupported => SENTINEL,
        Fate::Bounded => BOUNDED,
    }
}

fn overlay(z: C, p: &ModelParams<f64>, disks: usize, px: f64) -> Option<[u8; 3]> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let line = 0.75 * px;
    for n in 1..=disks {
        let zn = p.graph.z(n);
        for c in [zn, zn.conj(), -zn, -zn.conj()] {
            let d = (z - c).norm();
            if d <= 2.0 * px {
                return Some(MARKER);
            }
            if (d - 1.0).abs() <= line {
                return Some(CIRCLE);
            }
        }
    }
    if (z.im.abs() - half_pi).abs() <= line || (z.re.abs() <= line && z.im.abs() <= half_pi) {
        return Some(STRIP_LINE);
    }
    None
}

pub fn render_escape(cfg: &RenderConfig) -> qcfold::Result<(Image, RenderStats)> {
    let p = model_params(cfg)?;
    let px = 2.0 * cfg.half_width / cfg.width as f64;
    let cells: Vec<([u8; 3], Fate)> = (0..cfg.width * cfg.height)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / cfg.width, idx % cfg.width);
            let z = pixel_point(cfg, row, col);
            let f = fate(z, &p, cfg.max_iter, cfg.bailout);
            let c = if cfg.overlay { overlay(z, &p, cfg.disks, px).unwrap_or_else(|| colour(f, cfg.max_iter)) } else { colour(f, cfg.max_iter) };
            (c, f)
        })
        .collect();
    let mut stats = RenderStats::default();
    for (_, f) in &cells {
        match f {
            Fate::Escaped(_) => stats.escaped += 1,
            Fate::Left(_) => stats.left += 1,
            Fate::Unsupported => stats.unsupported += 1,
            Fate::Bounded => stats.bounded += 1,
        }
    }
    Ok((Image { width: cfg.width, height: cfg.height, pixels: cells.into_iter().map(|c| c.0).collect() }, stats))
}

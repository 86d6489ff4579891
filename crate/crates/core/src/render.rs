//! Deterministic data-parallel classification sweeps over a rectangle of
//! the parameter plane.
//!
//! Every pixel is an independent computation over private state; the raster
//! is assembled from per-pixel results keyed by index, so the output is
//! byte-identical for any worker count and any evaluation order.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dynamics::{
    integrate_dde, iterate_orbit, DdeConfig, DiscreteParams, OrbitOutcome, OutcomeKind,
};
use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Which dynamical system a sweep (or scan) runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode<T: Scalar> {
    /// Iterate the map `z -> z^2 + c` from 0.
    Discrete(DiscreteParams<T>),
    /// Integrate the delay equation from the zero history.
    Dde(DdeConfig<T>),
}

/// Pixel-to-parameter mapping. Pixel `(i, j)` (column, row; row 0 on top)
/// maps to the center of its cell:
///
/// ```text
/// c = ( re_min + (i + 0.5) (re_max - re_min) / width ,
///       im_max - (j + 0.5) (im_max - im_min) / height )
/// ```
///
/// This exact expression is part of the output contract; bit-exact rasters
/// depend on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T: Scalar> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(
        re_min: T,
        re_max: T,
        im_min: T,
        im_max: T,
        width: usize,
        height: usize,
    ) -> Result<Self, Error> {
        let ordered = re_min.is_finite()
            && re_max.is_finite()
            && im_min.is_finite()
            && im_max.is_finite()
            && re_min < re_max
            && im_min < im_max;
        if !ordered {
            return Err(Error::InvalidConfig(
                "grid extents must be finite and non-empty".into(),
            ));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig("grid must be at least 1x1".into()));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            width,
            height,
        })
    }

    /// Parameter at the center of pixel `(i, j)`.
    pub fn pixel_to_c(&self, i: usize, j: usize) -> Complex<T> {
        let half = lit::<T>(0.5);
        let re = self.re_min
            + (lit::<T>(i as f64) + half) * (self.re_max - self.re_min)
                / lit::<T>(self.width as f64);
        let im = self.im_max
            - (lit::<T>(j as f64) + half) * (self.im_max - self.im_min)
                / lit::<T>(self.height as f64);
        Complex::new(re, im)
    }

    /// Fractional pixel coordinates of a parameter value (inverse of
    /// [`Self::pixel_to_c`]; may fall outside the raster).
    pub fn c_to_pixel(&self, c: Complex<T>) -> (T, T) {
        let half = lit::<T>(0.5);
        let x =
            (c.re - self.re_min) / (self.re_max - self.re_min) * lit::<T>(self.width as f64) - half;
        let y = (self.im_max - c.im) / (self.im_max - self.im_min) * lit::<T>(self.height as f64)
            - half;
        (x, y)
    }
}

/// Per-pixel classification raster. Class codes: 0 = Escaped,
/// 1 = Converged, 2 = Oscillating, 3 = Undecided; the scalar channel holds
/// the escape time / iteration, the residual, or the amplitude. Flag bit 0
/// marks escapes by non-finite state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRaster<T: Scalar> {
    pub width: usize,
    pub height: usize,
    pub classes: Vec<u8>,
    pub scalars: Vec<T>,
    pub flags: Vec<u8>,
}

impl<T: Scalar> ClassRaster<T> {
    pub fn class_at(&self, i: usize, j: usize) -> u8 {
        self.classes[j * self.width + i]
    }

    pub fn scalar_at(&self, i: usize, j: usize) -> T {
        self.scalars[j * self.width + i]
    }
}

/// Pixel-space rectangle `[x, x + width) x [y, y + height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubRect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl SubRect {
    pub fn full(raster_width: usize, raster_height: usize) -> Self {
        Self {
            x: 0,
            y: 0,
            width: raster_width,
            height: raster_height,
        }
    }
}

/// Exact per-class pixel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassTallies {
    pub escaped: usize,
    pub converged: usize,
    pub oscillating: usize,
    pub undecided: usize,
}

impl ClassTallies {
    pub fn total(&self) -> usize {
        self.escaped + self.converged + self.oscillating + self.undecided
    }

    pub fn non_escaped(&self) -> usize {
        self.converged + self.oscillating + self.undecided
    }
}

fn classify_pixel<T: Scalar>(c: Complex<T>, mode: &Mode<T>) -> OrbitOutcome<T> {
    match mode {
        Mode::Discrete(p) => iterate_orbit(c, p.max_iter, p.escape_radius)
            .expect("discrete parameters validated before the sweep"),
        Mode::Dde(config) => {
            let (_, outcome) = integrate_dde(c, config, 1).expect("stride 1 is always valid");
            outcome
        }
    }
}

/// Classifies every pixel of the grid independently.
///
/// The output is identical regardless of evaluation order or degree of
/// parallelism; per-pixel diagnostics (non-finite escapes) land in the flag
/// channel instead of aborting the sweep.
pub fn render_grid<T: Scalar>(grid: &GridSpec<T>, mode: &Mode<T>) -> Result<ClassRaster<T>, Error> {
    if let Mode::Discrete(p) = mode {
        if p.max_iter == 0 {
            return Err(Error::InvalidParam("max_iter must be at least 1".into()));
        }
    }
    let len = grid.width * grid.height;
    let cells: Vec<(u8, T, u8)> = (0..len)
        .into_par_iter()
        .map(|idx| {
            let c = grid.pixel_to_c(idx % grid.width, idx / grid.width);
            let outcome = classify_pixel(c, mode);
            let flag = match outcome {
                OrbitOutcome::Escaped {
                    non_finite: true, ..
                } => 1u8,
                _ => 0u8,
            };
            (outcome.class_code(), outcome.class_scalar(), flag)
        })
        .collect();

    let mut classes = Vec::with_capacity(len);
    let mut scalars = Vec::with_capacity(len);
    let mut flags = Vec::with_capacity(len);
    for (class, scalar, flag) in cells {
        classes.push(class);
        scalars.push(scalar);
        flags.push(flag);
    }
    Ok(ClassRaster {
        width: grid.width,
        height: grid.height,
        classes,
        scalars,
        flags,
    })
}

/// Exact per-class counts over a sub-rectangle (must lie within the
/// raster).
pub fn count_classes<T: Scalar>(raster: &ClassRaster<T>, rect: SubRect) -> ClassTallies {
    assert!(
        rect.x + rect.width <= raster.width && rect.y + rect.height <= raster.height,
        "sub-rectangle exceeds the raster"
    );
    let mut t = ClassTallies::default();
    for j in rect.y..rect.y + rect.height {
        for i in rect.x..rect.x + rect.width {
            match raster.classes[j * raster.width + i] {
                0 => t.escaped += 1,
                1 => t.converged += 1,
                2 => t.oscillating += 1,
                _ => t.undecided += 1,
            }
        }
    }
    t
}

/// Renders the same grid at each horizon and tallies the full raster;
/// quantifies how the non-escaped area decays as the horizon grows.
pub fn decay_counts<T: Scalar>(
    grid: &GridSpec<T>,
    config: &DdeConfig<T>,
    tau_ends: &[T],
) -> Result<Vec<(T, ClassTallies)>, Error> {
    let mut out = Vec::with_capacity(tau_ends.len());
    for &tau_end in tau_ends {
        let cfg = config.with_tau_end(tau_end)?;
        let raster = render_grid(grid, &Mode::Dde(cfg))?;
        let tallies = count_classes(&raster, SubRect::full(grid.width, grid.height));
        out.push((tau_end, tallies));
    }
    Ok(out)
}

/// Row-major 8-bit RGB image, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&color);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, color: [u8; 3]) {
        let at = (j * self.width + i) * 3;
        self.data[at..at + 3].copy_from_slice(&color);
    }

    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        let at = (j * self.width + i) * 3;
        [self.data[at], self.data[at + 1], self.data[at + 2]]
    }
}

/// Fixed per-class colors plus a ramp endpoint for escapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaletteSpec {
    pub converged: [u8; 3],
    pub oscillating: [u8; 3],
    pub undecided: [u8; 3],
    /// Color of the largest escape scalar; smaller scalars scale towards
    /// black.
    pub escape_max: [u8; 3],
}

impl Default for PaletteSpec {
    fn default() -> Self {
        Self {
            converged: [0, 0, 0],
            oscillating: [128, 128, 128],
            undecided: [64, 64, 64],
            escape_max: [255, 255, 255],
        }
    }
}

/// Deterministic per-class / per-scalar coloring. Escaped pixels ramp by
/// their scalar relative to the raster's largest escape scalar (the
/// maximum maps to `escape_max`).
pub fn colorize<T: Scalar>(raster: &ClassRaster<T>, palette: &PaletteSpec) -> RgbImage {
    let v_max = raster
        .classes
        .iter()
        .zip(&raster.scalars)
        .filter(|(class, _)| **class == OutcomeKind::Escaped as u8)
        .map(|(_, s)| s.to_f64().unwrap_or(0.0))
        .fold(0.0_f64, f64::max);
    let mut img = RgbImage::filled(raster.width, raster.height, [0, 0, 0]);
    for j in 0..raster.height {
        for i in 0..raster.width {
            let at = j * raster.width + i;
            let color = match raster.classes[at] {
                0 => {
                    let ratio = if v_max > 0.0 {
                        (raster.scalars[at].to_f64().unwrap_or(0.0) / v_max).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    let mut c = [0u8; 3];
                    for (ch, out) in palette.escape_max.iter().zip(c.iter_mut()) {
                        *out = (f64::from(*ch) * ratio).round() as u8;
                    }
                    c
                }
                1 => palette.converged,
                2 => palette.oscillating,
                _ => palette.undecided,
            };
            img.set(i, j, color);
        }
    }
    img
}

/// Rasterizes polylines (in parameter coordinates) onto an image in the
/// given color; segments are clipped to the grid.
pub fn overlay_curves<T: Scalar>(
    mut image: RgbImage,
    polylines: &[Vec<Complex<T>>],
    grid: &GridSpec<T>,
    color: [u8; 3],
) -> RgbImage {
    assert_eq!(image.width, grid.width, "image does not match the grid");
    assert_eq!(image.height, grid.height, "image does not match the grid");
    for line in polylines {
        if line.len() == 1 {
            let (x, y) = to_f64_pixel(grid, line[0]);
            plot_rounded(&mut image, x, y, color);
            continue;
        }
        for pair in line.windows(2) {
            let (x0, y0) = to_f64_pixel(grid, pair[0]);
            let (x1, y1) = to_f64_pixel(grid, pair[1]);
            if let Some(((ax, ay), (bx, by))) =
                clip_segment((x0, y0), (x1, y1), image.width, image.height)
            {
                bresenham(&mut image, ax, ay, bx, by, color);
            }
        }
    }
    image
}

fn to_f64_pixel<T: Scalar>(grid: &GridSpec<T>, c: Complex<T>) -> (f64, f64) {
    let (x, y) = grid.c_to_pixel(c);
    (
        x.to_f64().unwrap_or(f64::NAN),
        y.to_f64().unwrap_or(f64::NAN),
    )
}

fn plot_rounded(img: &mut RgbImage, x: f64, y: f64, color: [u8; 3]) {
    if !x.is_finite() || !y.is_finite() {
        return;
    }
    let (i, j) = (x.round(), y.round());
    if i >= 0.0 && j >= 0.0 && (i as usize) < img.width && (j as usize) < img.height {
        img.set(i as usize, j as usize, color);
    }
}

/// Liang-Barsky clip against the half-pixel-expanded raster box.
fn clip_segment(
    a: (f64, f64),
    b: (f64, f64),
    width: usize,
    height: usize,
) -> Option<((f64, f64), (f64, f64))> {
    if !(a.0.is_finite() && a.1.is_finite() && b.0.is_finite() && b.1.is_finite()) {
        return None;
    }
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let bounds = [
        (-dx, a.0 + 0.5),                // x >= -0.5
        (dx, width as f64 - 0.5 - a.0),  // x <= w - 0.5
        (-dy, a.1 + 0.5),                // y >= -0.5
        (dy, height as f64 - 0.5 - a.1), // y <= h - 0.5
    ];
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for (p, q) in bounds {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (a.0 + t0 * dx, a.1 + t0 * dy),
        (a.0 + t1 * dx, a.1 + t1 * dy),
    ))
}

/// Integer line between rounded endpoints; bounds-checked per pixel.
fn bresenham(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64, color: [u8; 3]) {
    let (mut x, mut y) = (x0.round() as i64, y0.round() as i64);
    let (xe, ye) = (x1.round() as i64, y1.round() as i64);
    let dx = (xe - x).abs();
    let dy = -(ye - y).abs();
    let sx = if x < xe { 1 } else { -1 };
    let sy = if y < ye { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if x >= 0 && y >= 0 && (x as usize) < img.width && (y as usize) < img.height {
            img.set(x as usize, y as usize, color);
        }
        if x == xe && y == ye {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

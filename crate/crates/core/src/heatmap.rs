//! PNG rendering of Re ρ with wavelength axes, and a perceptual image
//! distance for regression checks.

use std::path::Path;

use image::{ImageBuffer, Rgb, RgbImage};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::units::{omega_from_wavelength_nm, wavelength_nm_from_omega};

const PLOT: u32 = 480;
const LEFT: u32 = 56;
const BOTTOM: u32 = 40;
const TOP: u32 = 12;
const RIGHT: u32 = 52;
const BAR_W: u32 = 14;
const SCALE: u32 = 2;

const BG: Rgb<u8> = Rgb([255, 255, 255]);
const INK: Rgb<u8> = Rgb([0, 0, 0]);

// 5-row glyphs; each row holds `width` bits, most significant on the left.
fn glyph(c: char) -> Option<(u32, [u8; 5])> {
    let g3 = |rows| Some((3, rows));
    match c {
        '0' => g3([0b111, 0b101, 0b101, 0b101, 0b111]),
        '1' => g3([0b010, 0b110, 0b010, 0b010, 0b111]),
        '2' => g3([0b111, 0b001, 0b111, 0b100, 0b111]),
        '3' => g3([0b111, 0b001, 0b111, 0b001, 0b111]),
        '4' => g3([0b101, 0b101, 0b111, 0b001, 0b001]),
        '5' => g3([0b111, 0b100, 0b111, 0b001, 0b111]),
        '6' => g3([0b111, 0b100, 0b111, 0b101, 0b111]),
        '7' => g3([0b111, 0b001, 0b010, 0b010, 0b010]),
        '8' => g3([0b111, 0b101, 0b111, 0b101, 0b111]),
        '9' => g3([0b111, 0b101, 0b111, 0b001, 0b111]),
        'n' => g3([0b000, 0b110, 0b101, 0b101, 0b101]),
        'm' => Some((5, [0b00000, 0b11110, 0b10101, 0b10101, 0b10101])),
        '-' => g3([0b000, 0b000, 0b111, 0b000, 0b000]),
        '+' => g3([0b000, 0b010, 0b111, 0b010, 0b000]),
        '.' => g3([0b000, 0b000, 0b000, 0b000, 0b010]),
        ' ' => g3([0; 5]),
        _ => None,
    }
}

fn text_width(s: &str) -> u32 {
    let cols: u32 = s.chars().filter_map(glyph).map(|(w, _)| w + 1).sum();
    cols.saturating_sub(1) * SCALE
}

fn draw_text(img: &mut RgbImage, x: u32, y: u32, s: &str) {
    let mut cx = x;
    for (w, rows) in s.chars().filter_map(glyph) {
        for (r, bits) in rows.iter().enumerate() {
            for c in 0..w {
                if bits & (1 << (w - 1 - c)) == 0 {
                    continue;
                }
                for dy in 0..SCALE {
                    for dx in 0..SCALE {
                        let (px, py) = (cx + c * SCALE + dx, y + r as u32 * SCALE + dy);
                        if px < img.width() && py < img.height() {
                            img.put_pixel(px, py, INK);
                        }
                    }
                }
            }
        }
        cx += (w + 1) * SCALE;
    }
}

/// Blue–white–red map of `t ∈ [−1, 1]`.
pub fn diverging(t: f64) -> Rgb<u8> {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (1.0, 1.0 - 0.85 * t, 1.0 - t)
    } else {
        (1.0 + t, 1.0 + 0.85 * t, 1.0)
    };
    Rgb([(255.0 * r).round() as u8, (255.0 * g).round() as u8, (255.0 * b).round() as u8])
}

fn nice_step(span_nm: f64) -> f64 {
    let raw = span_nm / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

/// Re ρ as an image. Wavelength grows to the right and upward; the color
/// scale is symmetric about zero and saturates at `max |Re ρ|`.
pub fn render(rho: &DensityMatrix) -> Result<RgbImage> {
    let n = rho.dim();
    if n < 2 {
        return Err(Error::Contract("heatmap needs at least a 2-point grid".into()));
    }
    let omegas = &rho.grid.omegas;
    let (w_lo, w_hi) = (omegas[0], omegas[n - 1]);
    let vmax = rho.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    let vmax = if vmax > 0.0 { vmax } else { 1.0 };

    let width = LEFT + PLOT + RIGHT;
    let height = TOP + PLOT + BOTTOM;
    let mut img: RgbImage = ImageBuffer::from_pixel(width, height, BG);

    // shortest wavelength (highest ω) at the left and at the bottom
    let omega_at = |p: u32| w_hi - (p as f64 + 0.5) / PLOT as f64 * (w_hi - w_lo);
    let index_of = |w: f64| -> usize {
        let t = (w - w_lo) / (w_hi - w_lo) * (n - 1) as f64;
        (t.round().max(0.0) as usize).min(n - 1)
    };
    for py in 0..PLOT {
        let row = index_of(omega_at(PLOT - 1 - py));
        for px in 0..PLOT {
            let col = index_of(omega_at(px));
            let v = rho.values[(row, col)].re / vmax;
            img.put_pixel(LEFT + px, TOP + py, diverging(v));
        }
    }

    // frame
    for p in 0..=PLOT {
        for (x, y) in [(LEFT + p, TOP), (LEFT + p, TOP + PLOT), (LEFT, TOP + p), (LEFT + PLOT, TOP + p)] {
            img.put_pixel(x.min(width - 1), y.min(height - 1), INK);
        }
    }

    // wavelength ticks
    let (l_lo, l_hi) = (wavelength_nm_from_omega(w_hi), wavelength_nm_from_omega(w_lo));
    let step = nice_step(l_hi - l_lo);
    let mut tick = (l_lo / step).ceil() * step;
    while tick <= l_hi + 1e-9 {
        let frac = (w_hi - omega_from_wavelength_nm(tick)) / (w_hi - w_lo);
        let off = (frac * PLOT as f64).round().clamp(0.0, PLOT as f64) as u32;
        let label = format!("{}", tick.round() as i64);
        for d in 0..6 {
            img.put_pixel(LEFT + off.min(PLOT), TOP + PLOT + d, INK);
            img.put_pixel(LEFT - d, TOP + PLOT - off.min(PLOT), INK);
        }
        let tw = text_width(&label);
        draw_text(&mut img, (LEFT + off).saturating_sub(tw / 2), TOP + PLOT + 9, &label);
        draw_text(&mut img, LEFT.saturating_sub(tw + 9), (TOP + PLOT - off).saturating_sub(5), &label);
        tick += step;
    }
    let unit = "nm";
    draw_text(&mut img, LEFT + PLOT - text_width(unit), TOP + PLOT + 25, unit);
    draw_text(&mut img, 4, TOP, unit);

    // color bar
    let bx = LEFT + PLOT + 12;
    for py in 0..PLOT {
        let t = 1.0 - 2.0 * (py as f64 + 0.5) / PLOT as f64;
        for dx in 0..BAR_W {
            img.put_pixel(bx + dx, TOP + py, diverging(t));
        }
    }
    draw_text(&mut img, bx + BAR_W + 4, TOP, "+");
    draw_text(&mut img, bx + BAR_W + 4, TOP + PLOT / 2 - 5, "0");
    draw_text(&mut img, bx + BAR_W + 4, TOP + PLOT - 10, "-");
    Ok(img)
}

pub fn write_png(rho: &DensityMatrix, path: &Path) -> Result<()> {
    render(rho)?
        .save(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Mean and maximum absolute color difference, in [0, 1], after both
/// images are box-averaged onto a 48×48 grid per channel. Small
/// misregistrations and rasterization differences average out; changed
/// structure does not.
pub fn perceptual_distance(a: &RgbImage, b: &RgbImage) -> Result<(f64, f64)> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::GridMismatch(format!(
            "image sizes differ: {:?} vs {:?}",
            a.dimensions(),
            b.dimensions()
        )));
    }
    const CELLS: u32 = 48;
    let average = |img: &RgbImage| -> Vec<[f64; 3]> {
        let (w, h) = img.dimensions();
        let mut acc = vec![[0.0f64; 3]; (CELLS * CELLS) as usize];
        let mut cnt = vec![0.0f64; (CELLS * CELLS) as usize];
        for (x, y, p) in img.enumerate_pixels() {
            let cell = ((y * CELLS / h) * CELLS + x * CELLS / w) as usize;
            for ch in 0..3 {
                acc[cell][ch] += p.0[ch] as f64 / 255.0;
            }
            cnt[cell] += 1.0;
        }
        acc.iter().zip(cnt).map(|(a, c)| a.map(|v| v / c.max(1.0))).collect()
    };
    let (la, lb) = (average(a), average(b));
    let diffs: Vec<f64> = la
        .iter()
        .zip(&lb)
        .map(|(x, y)| (0..3).map(|c| (x[c] - y[c]).abs()).sum::<f64>() / 3.0)
        .collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let max = diffs.iter().cloned().fold(0.0, f64::max);
    Ok((mean, max))
}

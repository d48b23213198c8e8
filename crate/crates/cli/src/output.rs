//! Artifact emission: CSV/JSON text, atomic file writes, and PNG heatmaps.
//!
//! Floats are printed with Rust's shortest-round-trip formatting, so every
//! emitted number re-parses to exactly the in-memory value.

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use nalgebra::DMatrix;
use std::path::{Path, PathBuf};

/// Writes `bytes` to a sibling temp file, then renames it over `path`, so
/// readers never observe a partially written artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = tmp_sibling(path);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "artifact".into());
    name.push(".tmp");
    path.with_file_name(name)
}

/// Grid CSV: the first row is the column axis (after a corner label), the
/// first column is the row axis, and the body holds the values.
pub fn grid_csv(corner: &str, row_axis: &[f64], col_axis: &[f64], values: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(16 * row_axis.len() * col_axis.len());
    out.push_str(corner);
    for v in col_axis {
        out.push(',');
        out.push_str(&v.to_string());
    }
    out.push('\n');
    for (i, r) in row_axis.iter().enumerate() {
        out.push_str(&r.to_string());
        for j in 0..col_axis.len() {
            out.push(',');
            out.push_str(&values[(i, j)].to_string());
        }
        out.push('\n');
    }
    out
}

/// Series CSV: a header row followed by numeric rows.
pub fn series_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// CSV from pre-formatted string cells (for tables that mix text and
/// numbers, like per-setting count records).
pub fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Renders a grid as a PNG heatmap.
///
/// The palette diverges around 0 (blue for negative, red for positive,
/// white at zero) and is normalized to ±`limit`, so equal colors mean equal
/// values across every emitted image.  Cells where |value| crosses
/// `contour` are drawn black, making the threshold an explicit line.  The
/// rendering is pure integer math over the grid, hence byte-identical for
/// identical inputs.
pub fn heatmap_png(values: &DMatrix<f64>, limit: f64, contour: f64) -> Result<Vec<u8>, String> {
    let (rows, cols) = values.shape();
    let scale = (512 / rows.max(cols).max(1)).clamp(1, 32);
    let (width, height) = ((cols * scale) as u32, (rows * scale) as u32);
    let mut pixels = vec![0u8; (width * height * 3) as usize];
    for i in 0..rows {
        for j in 0..cols {
            let rgb = if on_contour(values, i, j, contour) {
                [0, 0, 0]
            } else {
                diverging(values[(i, j)] / limit)
            };
            for di in 0..scale {
                for dj in 0..scale {
                    let px = ((i * scale + di) * width as usize + (j * scale + dj)) * 3;
                    pixels[px..px + 3].copy_from_slice(&rgb);
                }
            }
        }
    }
    let mut bytes = Vec::new();
    PngEncoder::new(&mut bytes)
        .write_image(&pixels, width, height, ExtendedColorType::Rgb8)
        .map_err(|e| e.to_string())?;
    Ok(bytes)
}

/// True when the magnitude of the cell's value crosses `contour` against a
/// 4-neighbor, with the closer side of the crossing taking the mark.
fn on_contour(values: &DMatrix<f64>, i: usize, j: usize, contour: f64) -> bool {
    let (rows, cols) = values.shape();
    let f = values[(i, j)].abs() - contour;
    if f == 0.0 {
        return true;
    }
    let neighbors = [
        (i.wrapping_sub(1), j),
        (i + 1, j),
        (i, j.wrapping_sub(1)),
        (i, j + 1),
    ];
    neighbors.into_iter().any(|(ni, nj)| {
        if ni >= rows || nj >= cols {
            return false;
        }
        let g = values[(ni, nj)].abs() - contour;
        f * g < 0.0 && f.abs() <= g.abs()
    })
}

/// Diverging color for t ∈ [−1, 1]: white at 0, saturated blue/red at ∓1.
fn diverging(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(-1.0, 1.0) };
    let (target, mag) = if t >= 0.0 {
        ([178.0, 24.0, 43.0], t)
    } else {
        ([33.0, 102.0, 172.0], -t)
    };
    [0, 1, 2].map(|k: usize| {
        let channel: f64 = 255.0 + (target[k] - 255.0) * mag;
        channel.round() as u8
    })
}

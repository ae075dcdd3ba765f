//! Minimal SVG line chart of envelope curves (log-scale C axis).

use std::fmt::Write;

use super::EnvelopeRow;
use crate::coders::{cap_snr, Method, SNR_CAP_DB};

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

pub fn render_svg(env: &[EnvelopeRow], methods: &[Method]) -> String {
    let pts: Vec<(Method, f64, f64)> = env
        .iter()
        .filter(|r| methods.contains(&r.method) && r.c > 0.0)
        .map(|r| (r.method, r.c.log10(), cap_snr(r.best_snr_db, SNR_CAP_DB)))
        .collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.1));
    let (y0, y1) = bounds(pts.iter().map(|p| p.2));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">compression factor C (log)</text>"#,
        W / 2.0,
        H - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">SNR (dB)</text>"#,
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    for decade in (x0.floor() as i32)..=(x1.ceil() as i32) {
        let x = decade as f64;
        if x < x0 || x > x1 {
            continue;
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">1e{decade}</text>"#,
            sx(x),
            H - PAD + 14.0
        )
        .unwrap();
    }
    for y in [y0, (y0 + y1) / 2.0, y1] {
        writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="10">{y:.1}</text>"#,
            PAD - 4.0,
            sy(y) + 3.0
        )
        .unwrap();
    }
    for (i, &m) in methods.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|p| p.0 == m)
            .map(|p| format!("{:.2},{:.2}", sx(p.1), sy(p.2)))
            .collect();
        if path.is_empty() {
            continue;
        }
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{m}</text>"#,
            W - PAD + 6.0,
            PAD + 16.0 * i as f64
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

//! Static SVG of the upper half-plane picture: the reference ray, the
//! generator axes and, for runs, the wound rays.

use std::f64::consts::PI;
use std::fmt::Write;

use hypwind::{BoundaryPoint, HPoint, UnitVector};

use crate::schema::Input;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const PAD: f64 = 40.0;
const KNEE: f64 = 10.0;
const ARC_SAMPLES: usize = 256;

/// Identity up to `KNEE`, logarithmic beyond, matched to first order.
fn compress(v: f64) -> f64 {
    let a = v.abs();
    let c = if a <= KNEE {
        a
    } else {
        KNEE + KNEE * (a / KNEE).ln()
    };
    c.copysign(v)
}

struct Canvas {
    x_max: f64,
    y_max: f64,
}

impl Canvas {
    fn px(&self, z: (f64, f64)) -> (f64, f64) {
        let sx = (WIDTH - 2.0 * PAD) / (2.0 * self.x_max);
        let sy = (HEIGHT - 2.0 * PAD) / self.y_max;
        (
            PAD + (compress(z.0) + self.x_max) * sx,
            HEIGHT - PAD - compress(z.1) * sy,
        )
    }

    fn points(&self, pts: impl Iterator<Item = (f64, f64)>) -> String {
        let mut s = String::new();
        for (i, p) in pts.enumerate() {
            let (x, y) = self.px(p);
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{x:.3},{y:.3}").unwrap();
        }
        s
    }
}

pub fn render(input: &Input) -> anyhow::Result<String> {
    let seq = input.sequence();
    if seq.generators.is_empty() {
        anyhow::bail!("nothing to plot: sequence has no generators");
    }
    let radii: Vec<(f64, f64)> = seq
        .axes
        .iter()
        .map(|a| {
            (
                0.5 * (a.plus.0 - a.minus.0).abs(),
                0.5 * (a.plus.0 + a.minus.0),
            )
        })
        .collect();
    if radii.iter().any(|(r, c)| !r.is_finite() || !c.is_finite()) {
        anyhow::bail!("cannot plot an axis ending at infinity");
    }
    let reach = radii.iter().fold(KNEE, |m, (r, c)| m.max(r + c.abs()));
    let canvas = Canvas {
        x_max: compress(reach * 1.1),
        y_max: compress(reach * 1.2),
    };

    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<g font-family="sans-serif" font-size="11">"#
    )?;
    let (bx0, by) = canvas.px((-reach * 1.1, 0.0));
    let (bx1, _) = canvas.px((reach * 1.1, 0.0));
    writeln!(
        out,
        r#"<line class="boundary" x1="{bx0:.3}" y1="{by:.3}" x2="{bx1:.3}" y2="{by:.3}" stroke="black" stroke-width="1"/>"#
    )?;

    for (n, (r, c)) in radii.iter().enumerate() {
        let arc = (0..=ARC_SAMPLES).map(|i| {
            let th = PI * i as f64 / ARC_SAMPLES as f64;
            (c + r * th.cos(), r * th.sin())
        });
        writeln!(
            out,
            r##"<polyline class="axis" data-index="{n}" points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.2"/>"##,
            canvas.points(arc)
        )?;
    }

    let (rx, ry0) = canvas.px((0.0, 1.0));
    let (_, ry1) = canvas.px((0.0, reach * 1.2));
    writeln!(
        out,
        r##"<line class="ray" x1="{rx:.3}" y1="{ry0:.3}" x2="{rx:.3}" y2="{ry1:.3}" stroke="#b22222" stroke-width="1.5"/>"##
    )?;

    for (n, t) in seq.scales_log.iter().enumerate() {
        if !t.0.is_finite() {
            continue;
        }
        let (x, y) = canvas.px((0.0, t.0.exp()));
        writeln!(
            out,
            r#"<circle class="crossing" cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>
<text class="label" x="{:.3}" y="{:.3}">t{n} = {:.3}</text>"#,
            x + 6.0,
            y + 4.0,
            t.0
        )?;
    }

    if let Input::Run(run) = input {
        for (n, x) in run.endpoints.iter().enumerate() {
            let v = UnitVector::frame_from(HPoint::I, BoundaryPoint::Real(x.0));
            let path = (0..=400).map(|i| {
                let p = v.eval(i as f64 * 0.05);
                (p.x(), p.y())
            });
            writeln!(
                out,
                r##"<polyline class="wound" data-index="{n}" points="{}" fill="none" stroke="#2e8b57" stroke-width="1"/>"##,
                canvas.points(path)
            )?;
        }
    }

    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compression_is_continuous_and_monotone() {
        assert_eq!(compress(3.0), 3.0);
        assert!((compress(10.0 + 1e-9) - 10.0).abs() < 1e-8);
        assert!(compress(1e30) > compress(1e20));
        assert_eq!(compress(-50.0), -compress(50.0));
    }
}

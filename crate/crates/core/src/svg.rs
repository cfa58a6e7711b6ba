//! Deterministic SVG rendering of wall diagrams in a 1-dimensional slice:
//! x along a chosen eta-direction, vertical axis t with t^2 = s/(H^2).
//! All geometry is exact until the final coordinate formatting.

use crate::config::{slice_chart, SliceChart};
use crate::surface::{NSClass, SurfaceData};
use crate::walls::{CategoryWall, StabilityWall};
use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 40.0;

fn f(x: f64) -> String {
    format!("{x:.4}")
}

struct Chart {
    x_min: f64,
    x_max: f64,
    t_max: f64,
}

impl Chart {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (W - 2.0 * MARGIN)
    }

    fn py(&self, t: f64) -> f64 {
        H - MARGIN - t / self.t_max * (H - 2.0 * MARGIN)
    }

    fn sx(&self) -> f64 {
        (W - 2.0 * MARGIN) / (self.x_max - self.x_min)
    }

    fn sy(&self) -> f64 {
        (H - 2.0 * MARGIN) / self.t_max
    }
}

fn rat_f64(r: &crate::ratio::Rat) -> f64 {
    // rationals in plots are small; go through strings to avoid precision
    // surprises with huge numerators
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(0.0)
}

fn ellipse_for(chart: &Chart, sc: &SliceChart, color: &str, label: &str) -> String {
    let cx = rat_f64(&sc.center_x);
    let rx = rat_f64(&sc.radius_sq_x).max(0.0).sqrt();
    let ry = rat_f64(&sc.radius_sq_t).max(0.0).sqrt();
    format!(
        "  <ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" clip-path=\"url(#upper)\"><title>{label}</title></ellipse>\n",
        f(chart.px(cx)),
        f(chart.py(0.0)),
        f(rx * chart.sx()),
        f(ry * chart.sy()),
    )
}

/// Render category walls (blue) and stability walls (red) meeting the slice.
pub fn render_walls(
    surface: &SurfaceData,
    xi0: &NSClass,
    category: &[CategoryWall],
    stability: &[StabilityWall],
    x_range: (f64, f64),
    t_max: f64,
) -> String {
    let chart = Chart { x_min: x_range.0, x_max: x_range.1, t_max };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(
        out,
        "  <defs><clipPath id=\"upper\"><rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{}\"/></clipPath></defs>",
        f(chart.py(0.0))
    );
    let _ = writeln!(out, "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    // axes
    let _ = writeln!(
        out,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\" stroke-width=\"1\"/>",
        f(MARGIN),
        f(chart.py(0.0)),
        f(W - MARGIN),
        f(chart.py(0.0))
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\" stroke-width=\"1\"/>",
        f(chart.px(0.0)),
        f(MARGIN),
        f(chart.px(0.0)),
        f(chart.py(0.0))
    );
    for w in category {
        if let Some(sc) = slice_chart(&w.geometry, xi0, surface) {
            out.push_str(&ellipse_for(&chart, &sc, "#1f4e9c", &format!("category {}", w.u)));
        }
    }
    for w in stability {
        if let Some(sc) = slice_chart(&w.geometry, xi0, surface) {
            out.push_str(&ellipse_for(&chart, &sc, "#b03030", &format!("stability {}", w.v1)));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SurfaceConfig;
    use crate::walls::enumerate_r_beta;

    #[test]
    fn svg_is_deterministic_and_draws_circles() {
        let cfg = SurfaceConfig::from_json(
            r#"{
            "epsilon": 1, "gram": [[-2, 1], [1, 0]], "H": [1, 4],
            "beta": ["1/3", "-2/3"], "eta_direction": [1, -2]
        }"#,
        )
        .unwrap();
        let frame = cfg.frame().unwrap();
        let xi = cfg.eta_direction_class(&frame.surface).unwrap();
        let walls = enumerate_r_beta(&frame).unwrap();
        let a = render_walls(&frame.surface, &xi, &walls, &[], (-0.5, 1.5), 1.0);
        let b = render_walls(&frame.surface, &xi, &walls, &[], (-0.5, 1.5), 1.0);
        assert_eq!(a, b);
        assert_eq!(a.matches("<ellipse").count(), 2);
        assert!(a.starts_with("<svg"));
    }
}

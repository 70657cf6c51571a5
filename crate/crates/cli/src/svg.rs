//! Self-contained SVG line charts for trajectories. No plotting dependency:
//! output is deterministic, diffable text.

use crate::csvio::TrajectoryRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// played actions per stage
    Actions,
    /// belief modes (each player's estimate of the opponent) per stage
    Beliefs,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    values: Vec<f64>,
}

fn nice_step(span: f64, target_ticks: usize) -> f64 {
    let raw = span / target_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if mag * m >= raw {
            return mag * m;
        }
    }
    mag * 10.0
}

fn f(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders one trajectory as an SVG line chart with dashed reference lines
/// at the equilibrium values.
pub fn render_plot(
    rows: &[TrajectoryRow],
    kind: PlotKind,
    nash: (f64, f64),
    title: &str,
) -> String {
    let (series, refs): (Vec<Series>, Vec<(f64, String)>) = match kind {
        PlotKind::Actions => (
            vec![
                Series {
                    label: "player 1 action",
                    color: "#1f77b4",
                    values: rows.iter().map(|r| r.y1).collect(),
                },
                Series {
                    label: "player 2 action",
                    color: "#d62728",
                    values: rows.iter().map(|r| r.y2).collect(),
                },
            ],
            vec![
                (nash.0, format!("y1* = {}", f(nash.0))),
                (nash.1, format!("y2* = {}", f(nash.1))),
            ],
        ),
        PlotKind::Beliefs => (
            vec![
                Series {
                    label: "p1 estimate of p2",
                    color: "#1f77b4",
                    values: rows.iter().map(|r| r.map1).collect(),
                },
                Series {
                    label: "p2 estimate of p1",
                    color: "#d62728",
                    values: rows.iter().map(|r| r.map2).collect(),
                },
            ],
            vec![
                (nash.1, format!("y2* = {}", f(nash.1))),
                (nash.0, format!("y1* = {}", f(nash.0))),
            ],
        ),
    };

    let n = rows.len().max(1);
    let x_max = n as f64;
    let data_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .chain(refs.iter().map(|r| r.0))
        .fold(0.0_f64, f64::max);
    let y_max = (data_max * 1.1).max(0.1);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |stage: f64| -> f64 {
        if n == 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + (stage - 1.0) / (x_max - 1.0) * plot_w
        }
    };
    let y_of = |v: f64| MARGIN_TOP + plot_h - (v / y_max) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        f(MARGIN_LEFT + plot_w / 2.0),
        xml_escape(title)
    ));

    // axes
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        f(MARGIN_LEFT),
        f(MARGIN_TOP + plot_h),
        f(MARGIN_LEFT + plot_w),
        f(MARGIN_TOP + plot_h)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        f(MARGIN_LEFT),
        f(MARGIN_TOP),
        f(MARGIN_LEFT),
        f(MARGIN_TOP + plot_h)
    ));

    // x ticks; the axis starts at stage 1
    let x_step = nice_step(x_max, 8).max(1.0);
    let mut tick = 0.0;
    while tick <= x_max + 1e-9 {
        let stage = tick.max(1.0);
        let x = x_of(stage);
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"black\"/>\n",
            x = f(x),
            y0 = f(MARGIN_TOP + plot_h),
            y1 = f(MARGIN_TOP + plot_h + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            f(x),
            f(MARGIN_TOP + plot_h + 20.0),
            stage as u64
        ));
        tick += x_step;
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">stage</text>\n",
        f(MARGIN_LEFT + plot_w / 2.0),
        f(HEIGHT - 12.0)
    ));

    // y ticks
    let y_step = nice_step(y_max, 6);
    let mut tick = 0.0;
    while tick <= y_max + 1e-9 {
        let y = y_of(tick);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"black\"/>\n",
            x0 = f(MARGIN_LEFT - 5.0),
            x1 = f(MARGIN_LEFT),
            y = f(y)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            f(MARGIN_LEFT - 9.0),
            f(y + 4.0),
            f(tick)
        ));
        tick += y_step;
    }
    let y_label = match kind {
        PlotKind::Actions => "inventory action",
        PlotKind::Beliefs => "estimated opponent action",
    };
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
        f(MARGIN_TOP + plot_h / 2.0),
        f(MARGIN_TOP + plot_h / 2.0),
        y_label
    ));

    // reference lines at the equilibrium
    for (value, label) in &refs {
        let y = y_of(*value);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#555555\" \
             stroke-dasharray=\"6 4\"/>\n",
            x0 = f(MARGIN_LEFT),
            x1 = f(MARGIN_LEFT + plot_w),
            y = f(y)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"#555555\">{}</text>\n",
            f(MARGIN_LEFT + plot_w + 6.0),
            f(y + 4.0),
            xml_escape(label)
        ));
    }

    // series
    for s in &series {
        if s.values.len() == 1 {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                f(x_of(1.0)),
                f(y_of(s.values[0])),
                s.color
            ));
        } else {
            let points: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| format!("{},{}", f(x_of(i as f64 + 1.0)), f(y_of(v))))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                s.color,
                points.join(" ")
            ));
        }
    }

    // legend
    let legend_x = MARGIN_LEFT + plot_w + 6.0;
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 * i as f64;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"4\" fill=\"{}\"/>\n",
            f(legend_x),
            f(y),
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            f(legend_x + 18.0),
            f(y + 6.0),
            xml_escape(s.label)
        ));
    }

    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(stage: usize, v: f64) -> TrajectoryRow {
        TrajectoryRow {
            stage,
            y1: v,
            y2: v * 1.5,
            map1: v,
            map2: v,
            s1: v,
            s2: v,
            dist_to_nash: 0.0,
        }
    }

    #[test]
    fn single_point_renders_markers() {
        let svg = render_plot(&[row(1, 0.5)], PlotKind::Actions, (0.45, 0.8), "t");
        assert!(svg.contains("<circle"));
        assert!(svg.contains("viewBox"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn multi_point_renders_polyline() {
        let rows: Vec<_> = (1..=10).map(|i| row(i, 0.1 * i as f64)).collect();
        let svg = render_plot(&rows, PlotKind::Beliefs, (0.45, 0.8), "beliefs");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
    }
}

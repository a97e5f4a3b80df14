//! Deterministic report rendering: copula scatterplots and panel grids as
//! self-contained SVG strings, network diagrams, and aligned text tables.
//! Output is a pure function of the input data (fixed-precision coordinates,
//! no timestamps), so artifacts can be hashed and compared across runs.

use crate::error::Result;
use crate::intervals::{fpt_pair_indices, joint_delta_pairs, neuron_letter, CaseSet, Direction};
use crate::network::{FptSample, NetworkSpec, SpikeTrains};
use crate::stats::{pseudo_observations, DependenceSummary};

/// Titles and axis labels for a single scatterplot. Marker size and opacity
/// are derived from the sample size, not configured.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

/// Marker radius (px) and fill opacity for a scatter of `n` points. Radius
/// is fixed; opacity steps down so dense clouds stay readable.
pub fn marker_style(n: usize) -> (f64, f64) {
    let opacity = if n <= 200 {
        0.85
    } else if n <= 2000 {
        0.55
    } else if n <= 6000 {
        0.35
    } else {
        0.25
    };
    (1.5, opacity)
}

fn fmt(x: f64) -> String {
    format!("{x:.2}")
}

const MARKER_FILL: &str = "#1f4e79";
const FRAME_STROKE: &str = "#222222";
const TEXT_FILL: &str = "#222222";
const GRID_STROKE: &str = "#cccccc";

/// Appends the square copula frame with ticks at 0, 0.5, 1 and the point
/// cloud. `(ox, oy)` is the top-left corner of the plot area, `side` its
/// pixel size. Points are in copula coordinates (0, 1].
fn push_copula_panel(
    out: &mut String,
    ox: f64,
    oy: f64,
    side: f64,
    points: &[(f64, f64)],
    tick_labels: bool,
) {
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"{FRAME_STROKE}\" stroke-width=\"1\"/>\n",
        fmt(ox), fmt(oy), fmt(side), fmt(side)
    ));
    // Midline gridlines at u = 0.5 and v = 0.5.
    let mid_x = ox + 0.5 * side;
    let mid_y = oy + 0.5 * side;
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{GRID_STROKE}\" stroke-width=\"0.5\"/>\n",
        fmt(mid_x),
        fmt(oy),
        fmt(mid_x),
        fmt(oy + side)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{GRID_STROKE}\" stroke-width=\"0.5\"/>\n",
        fmt(ox),
        fmt(mid_y),
        fmt(ox + side),
        fmt(mid_y)
    ));
    if tick_labels {
        for t in [0.0, 0.5, 1.0] {
            let x = ox + t * side;
            let y = oy + (1.0 - t) * side;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{t}</text>\n",
                fmt(x), fmt(oy + side + 16.0)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" fill=\"{TEXT_FILL}\">{t}</text>\n",
                fmt(ox - 6.0), fmt(y + 4.0)
            ));
        }
    }
    let (r, opacity) = marker_style(points.len());
    for &(u, v) in points {
        let cx = ox + u * side;
        let cy = oy + (1.0 - v) * side;
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{MARKER_FILL}\" fill-opacity=\"{opacity}\"/>\n",
            fmt(cx), fmt(cy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\" fill=\"{TEXT_FILL}\">n = {}</text>\n",
        fmt(ox + side - 4.0),
        fmt(oy + 12.0),
        points.len()
    ));
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
        w = fmt(width),
        h = fmt(height)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders one copula scatterplot on the unit square. Points must already be
/// pseudo-observations (computed from ranks), so the picture depends on the
/// data only through its ranks.
pub fn scatterplot_svg(points: &[(f64, f64)], spec: &PlotSpec) -> String {
    let margin = 56.0;
    let side = 368.0;
    let width = margin + side + 32.0;
    let height = margin + side + 56.0;
    let mut out = svg_open(width, height);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"26\" font-size=\"15\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
        fmt(margin + side / 2.0),
        xml_escape(&spec.title)
    ));
    push_copula_panel(&mut out, margin, margin, side, points, true);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
        fmt(margin + side / 2.0),
        fmt(margin + side + 40.0),
        xml_escape(&spec.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\" fill=\"{TEXT_FILL}\">{}</text>\n",
        fmt(margin + side / 2.0),
        fmt(margin + side / 2.0),
        xml_escape(&spec.y_label)
    ));
    out.push_str("</svg>\n");
    out
}

/// One cell of a panel grid: a small copula scatter with its own labels.
/// An empty `points` vector renders as a bare frame.
#[derive(Debug, Clone)]
pub struct PanelCell {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

/// A rows x cols matrix of optional scatter cells under one title. `None`
/// cells (e.g. the diagonal of a pairwise matrix) are left blank.
#[derive(Debug, Clone)]
pub struct PanelGrid {
    pub title: String,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Option<PanelCell>>,
}

impl PanelGrid {
    pub fn cell(&self, row: usize, col: usize) -> Option<&PanelCell> {
        self.cells[row * self.cols + col].as_ref()
    }
}

/// Renders a panel grid to SVG. Layout is fixed by (rows, cols) alone.
pub fn panel_grid_svg(grid: &PanelGrid) -> String {
    let cell_side = 190.0;
    let pad = 64.0;
    let top = 48.0;
    let width = pad + grid.cols as f64 * (cell_side + pad);
    let height = top + grid.rows as f64 * (cell_side + pad);
    let mut out = svg_open(width, height);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
        fmt(width / 2.0),
        xml_escape(&grid.title)
    ));
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let cell = match &grid.cells[row * grid.cols + col] {
                Some(c) => c,
                None => continue,
            };
            let ox = pad + col as f64 * (cell_side + pad);
            let oy = top + row as f64 * (cell_side + pad) + 18.0;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
                fmt(ox + cell_side / 2.0),
                fmt(oy - 6.0),
                xml_escape(&cell.title)
            ));
            push_copula_panel(&mut out, ox, oy, cell_side, &cell.points, false);
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
                fmt(ox + cell_side / 2.0),
                fmt(oy + cell_side + 16.0),
                xml_escape(&cell.x_label)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\" fill=\"{TEXT_FILL}\">{}</text>\n",
                fmt(ox - 14.0),
                fmt(oy + cell_side / 2.0),
                fmt(ox - 14.0),
                fmt(oy + cell_side / 2.0),
                xml_escape(&cell.y_label)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Pseudo-observation points for a raw pair list, or an empty cloud when
/// fewer than two pairs (or a degenerate margin) make ranks meaningless.
fn cell_points(pairs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if pairs.len() < 2 {
        return Vec::new();
    }
    match pseudo_observations(pairs) {
        Ok(p) => p.pairs().to_vec(),
        Err(_) => Vec::new(),
    }
}

/// Pairwise copula matrix of first-passage times: cell (i, j) plots the
/// ranks of neuron j's times against neuron i's, diagonal left blank. The
/// matrix is symmetric up to transposition of each panel.
pub fn fpt_panel_grid(sample: &FptSample, title: &str) -> Result<PanelGrid> {
    let n = sample.n_neurons();
    let mut cells = vec![None; n * n];
    for (i, j) in fpt_pair_indices(n) {
        let pairs: Vec<(f64, f64)> = sample.column(j).into_iter().zip(sample.column(i)).collect();
        let points = cell_points(&pairs);
        let transposed: Vec<(f64, f64)> = points.iter().map(|&(u, v)| (v, u)).collect();
        cells[i * n + j] = Some(PanelCell {
            title: format!("FPT-{}{}", i + 1, j + 1),
            x_label: format!("rank FPT {}", j + 1),
            y_label: format!("rank FPT {}", i + 1),
            points,
        });
        cells[j * n + i] = Some(PanelCell {
            title: format!("FPT-{}{}", i + 1, j + 1),
            x_label: format!("rank FPT {}", i + 1),
            y_label: format!("rank FPT {}", j + 1),
            points: transposed,
        });
    }
    Ok(PanelGrid {
        title: title.to_string(),
        rows: n,
        cols: n,
        cells,
    })
}

/// Grid of forward/backward interval copulas, one cell per extracted case.
/// Two-neuron networks give a 2x2 grid (rows = target neuron, columns =
/// forward/backward); three-neuron networks a 6x2 grid over (target,
/// partner) rows.
pub fn case_panel_grid(cases: &CaseSet, n_neurons: usize, title: &str) -> PanelGrid {
    let cols = 2;
    let rows = cases.samples.len() / cols;
    let mut cells = Vec::with_capacity(rows * cols);
    for sample in &cases.samples {
        let label = sample.label(n_neurons);
        cells.push(Some(PanelCell {
            title: label,
            x_label: "rank T".into(),
            y_label: "rank D".into(),
            points: cell_points(&sample.pairs),
        }));
    }
    PanelGrid {
        title: title.to_string(),
        rows,
        cols,
        cells,
    }
}

/// For a three-neuron spike train: the 3x3 copula matrix of the variables
/// (T, D_p, D_q) seen from one target neuron in one direction, where p and q
/// are the two partners. Off-diagonal cell (i, j) plots variable j against
/// variable i; the diagonal is blank.
pub fn target_panel_grid(
    trains: &SpikeTrains,
    target: usize,
    direction: Direction,
    burn_in: usize,
    title: &str,
) -> Result<PanelGrid> {
    let n = trains.n_neurons();
    let partners: Vec<usize> = (0..n).filter(|&p| p != target).collect();
    let var_name = |k: usize| -> String {
        if k == 0 {
            format!("T_{}", neuron_letter(target))
        } else {
            format!("D_{}", neuron_letter(partners[k - 1]))
        }
    };
    // Raw pair list for the (row i, col j) variable pair, i < j.
    let pairs_for = |i: usize, j: usize| -> Result<Vec<(f64, f64)>> {
        if i == 0 {
            let sample = match direction {
                Direction::Forward => {
                    crate::intervals::forward_pairs(trains, target, partners[j - 1], burn_in)?
                }
                Direction::Backward => {
                    crate::intervals::backward_pairs(trains, target, partners[j - 1], burn_in)?
                }
            };
            Ok(sample.pairs)
        } else {
            joint_delta_pairs(
                trains,
                target,
                partners[i - 1],
                partners[j - 1],
                direction,
                burn_in,
            )
        }
    };
    let dim = 3;
    let mut cells = vec![None; dim * dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let raw = pairs_for(i, j)?;
            // pairs_for returns (var_i, var_j); x-axis carries var_j.
            let swapped: Vec<(f64, f64)> = raw.iter().map(|&(a, b)| (b, a)).collect();
            let points = cell_points(&swapped);
            let transposed: Vec<(f64, f64)> = points.iter().map(|&(u, v)| (v, u)).collect();
            cells[i * dim + j] = Some(PanelCell {
                title: format!("{} vs {}", var_name(i), var_name(j)),
                x_label: format!("rank {}", var_name(j)),
                y_label: format!("rank {}", var_name(i)),
                points,
            });
            cells[j * dim + i] = Some(PanelCell {
                title: format!("{} vs {}", var_name(i), var_name(j)),
                x_label: format!("rank {}", var_name(i)),
                y_label: format!("rank {}", var_name(j)),
                points: transposed,
            });
        }
    }
    Ok(PanelGrid {
        title: title.to_string(),
        rows: dim,
        cols: dim,
        cells,
    })
}

/// Node centers for the network diagram, canvas size depends on N.
fn node_positions(n: usize) -> (Vec<(f64, f64)>, f64, f64) {
    match n {
        2 => (vec![(160.0, 180.0), (440.0, 180.0)], 600.0, 360.0),
        _ => (
            vec![(300.0, 120.0), (140.0, 400.0), (460.0, 400.0)],
            600.0,
            520.0,
        ),
    }
}

fn trim_num(x: f64) -> String {
    let s = format!("{x}");
    s
}

/// Diagram of the network: numbered nodes, one directed edge per nonzero
/// jump weight (arrowhead for excitatory, disc terminal for inhibitory,
/// labelled with |h| in mV), and a dashed undirected edge labelled with the
/// noise correlation where it is nonzero.
pub fn network_diagram(spec: &NetworkSpec) -> String {
    let n = spec.n_neurons();
    let (pos, width, height) = node_positions(n);
    let node_r = 34.0;
    let mut out = svg_open(width, height);
    out.push_str(
        "<defs>\n<marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#222222\"/></marker>\n<marker id=\"disc\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"9\" markerHeight=\"9\"><circle cx=\"5\" cy=\"5\" r=\"4\" fill=\"#222222\"/></marker>\n</defs>\n",
    );
    // Dashed noise-correlation edges, undirected, drawn under everything.
    for i in 0..n {
        for j in (i + 1)..n {
            let c = spec.noise_corr().get(i, j);
            if c != 0.0 {
                let (x1, y1) = pos[i];
                let (x2, y2) = pos[j];
                out.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-width=\"1.5\" stroke-dasharray=\"6 5\"/>\n",
                    fmt(x1), fmt(y1), fmt(x2), fmt(y2)
                ));
                out.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#555555\">c = {}</text>\n",
                    fmt((x1 + x2) / 2.0),
                    fmt((y1 + y2) / 2.0 - 10.0),
                    trim_num(c)
                ));
            }
        }
    }
    // Directed jump edges; when both directions are present each is offset
    // sideways so the pair reads as two distinct arrows.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let h = spec.jump_mv(i, j);
            if h == 0.0 {
                continue;
            }
            let (x1, y1) = pos[i];
            let (x2, y2) = pos[j];
            let dx = x2 - x1;
            let dy = y2 - y1;
            let len = (dx * dx + dy * dy).sqrt();
            let (ux, uy) = (dx / len, dy / len);
            let both = spec.jump_mv(j, i) != 0.0;
            let (px, py) = if both {
                let side = if i < j { 1.0 } else { -1.0 };
                (-uy * 14.0 * side, ux * 14.0 * side)
            } else {
                (0.0, 0.0)
            };
            let sx = x1 + ux * node_r + px;
            let sy = y1 + uy * node_r + py;
            let tip_gap = node_r + 8.0;
            let ex = x2 - ux * tip_gap + px;
            let ey = y2 - uy * tip_gap + py;
            let marker = if h > 0.0 { "arrow" } else { "disc" };
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222222\" stroke-width=\"2\" marker-end=\"url(#{marker})\"/>\n",
                fmt(sx), fmt(sy), fmt(ex), fmt(ey)
            ));
            let lx = (sx + ex) / 2.0 - uy * 16.0;
            let ly = (sy + ey) / 2.0 + ux * 16.0;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{} mV</text>\n",
                fmt(lx),
                fmt(ly),
                trim_num(h.abs())
            ));
        }
    }
    for (k, &(x, y)) in pos.iter().enumerate() {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{node_r}\" fill=\"#f5f5f5\" stroke=\"{FRAME_STROKE}\" stroke-width=\"2\"/>\n",
            fmt(x), fmt(y)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"18\" text-anchor=\"middle\" fill=\"{TEXT_FILL}\">{}</text>\n",
            fmt(x),
            fmt(y + 6.0),
            k + 1
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Text table plus CSV for a batch of dependence summaries. The text table
/// renders a Kendall tau whose test is insignificant (p > 0.05) as 0, per
/// reporting convention; the CSV always carries raw values.
#[derive(Debug, Clone)]
pub struct TableOutput {
    pub text: String,
    pub csv: String,
}

pub fn dependence_table(summaries: &[DependenceSummary]) -> TableOutput {
    let label_w = summaries
        .iter()
        .map(|s| s.label.len())
        .chain(std::iter::once("label".len()))
        .max()
        .unwrap_or(5);
    let mut text = format!(
        "{:<label_w$}  {:>7}  {:>10}  {:>12}  {:>13}  {:>12}\n",
        "label", "n", "pearson_r", "kendall_tau", "spearman_rho", "tau_p_value"
    );
    for s in summaries {
        let tau_cell = if s.tau_p_value > 0.05 {
            "0".to_string()
        } else {
            format!("{:.4}", s.kendall_tau)
        };
        let mark = if s.low_confidence { " (low n)" } else { "" };
        text.push_str(&format!(
            "{:<label_w$}  {:>7}  {:>10.4}  {:>12}  {:>13.4}  {:>12.4}{mark}\n",
            s.label, s.n, s.pearson_r, tau_cell, s.spearman_rho, s.tau_p_value
        ));
    }
    TableOutput {
        text,
        csv: crate::io::write_summary_csv(summaries),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::enumerate_cases;
    use crate::network::{simulate_spike_trains, NeuronParams, SimConfig};

    /// Minimal XML well-formedness check: tags balance, attributes stay
    /// quoted, no stray angle brackets.
    fn assert_well_formed(svg: &str) {
        let mut stack: Vec<String> = Vec::new();
        let bytes = svg.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'<' => {
                    let end = svg[i..].find('>').map(|e| i + e).unwrap_or_else(|| {
                        panic!("unterminated tag at byte {i}");
                    });
                    let tag = &svg[i + 1..end];
                    assert_eq!(
                        tag.bytes().filter(|&b| b == b'"').count() % 2,
                        0,
                        "unbalanced quotes in <{tag}>"
                    );
                    if let Some(name) = tag.strip_prefix('/') {
                        let open = stack
                            .pop()
                            .unwrap_or_else(|| panic!("closing </{name}> with empty stack"));
                        assert_eq!(open, name.trim(), "mismatched close tag");
                    } else if !tag.starts_with('?') && !tag.starts_with('!') && !tag.ends_with('/')
                    {
                        let name = tag.split_whitespace().next().unwrap().to_string();
                        stack.push(name);
                    }
                    i = end + 1;
                }
                b'>' => panic!("stray `>` at byte {i}"),
                _ => i += 1,
            }
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    fn demo_points() -> Vec<(f64, f64)> {
        (1..=40)
            .map(|k| (k as f64 / 40.0, ((k * 17) % 40 + 1) as f64 / 40.0))
            .collect()
    }

    fn demo_spec() -> PlotSpec {
        PlotSpec {
            title: "demo".into(),
            x_label: "rank T".into(),
            y_label: "rank D".into(),
        }
    }

    #[test]
    fn scatterplot_is_well_formed_and_deterministic() {
        let pts = demo_points();
        let a = scatterplot_svg(&pts, &demo_spec());
        let b = scatterplot_svg(&pts, &demo_spec());
        assert_eq!(a, b);
        assert_well_formed(&a);
        assert!(a.contains("n = 40"));
    }

    #[test]
    fn marker_opacity_steps_down_with_sample_size() {
        assert_eq!(marker_style(40), (1.5, 0.85));
        assert_eq!(marker_style(10_000), (1.5, 0.25));
        assert!(marker_style(500).1 > marker_style(10_000).1);
    }

    #[test]
    fn comonotone_points_land_on_the_rising_diagonal() {
        let pts: Vec<(f64, f64)> = (1..=4).map(|k| (k as f64 / 4.0, k as f64 / 4.0)).collect();
        let svg = scatterplot_svg(&pts, &demo_spec());
        // (1, 1) maps to the top-right plot corner: x = 56 + 368, y = 56.
        assert!(svg.contains("<circle cx=\"424.00\" cy=\"56.00\""));
        // (0.25, 0.25) maps to x = 56 + 92, y = 56 + 276.
        assert!(svg.contains("<circle cx=\"148.00\" cy=\"332.00\""));
    }

    #[test]
    fn escapes_markup_in_labels() {
        let svg = scatterplot_svg(
            &demo_points(),
            &PlotSpec {
                title: "a < b & c".into(),
                x_label: "x".into(),
                y_label: "y".into(),
            },
        );
        assert!(svg.contains("a &lt; b &amp; c"));
        assert_well_formed(&svg);
    }

    fn two_neuron_trains() -> SpikeTrains {
        let spec = NetworkSpec::correlated(
            vec![NeuronParams::standard(), NeuronParams::standard()],
            crate::engine::CorrelationMatrix::pair(0.5).unwrap(),
        )
        .unwrap();
        simulate_spike_trains(&spec, &SimConfig::spike_train(3000.0)).unwrap()
    }

    #[test]
    fn case_grid_covers_all_cases_and_renders() {
        let trains = two_neuron_trains();
        let cases = enumerate_cases(&trains, 5).unwrap();
        let grid = case_panel_grid(&cases, 2, "intervals");
        assert_eq!((grid.rows, grid.cols), (2, 2));
        assert_eq!(grid.cell(0, 0).unwrap().title, "FWD-A");
        assert_eq!(grid.cell(1, 1).unwrap().title, "BWD-B");
        let svg = panel_grid_svg(&grid);
        assert_well_formed(&svg);
        assert!(svg.contains("FWD-B"));
    }

    #[test]
    fn fpt_grid_has_blank_diagonal_and_transposed_mirror() {
        let sample = crate::network::FptSample::new(
            3,
            vec![0, 1, 2, 3],
            vec![
                1.0, 10.0, 5.0, 2.0, 20.0, 6.0, 3.0, 30.0, 4.0, 4.0, 40.0, 7.0,
            ],
            vec![],
        )
        .unwrap();
        let grid = fpt_panel_grid(&sample, "first passage").unwrap();
        assert!(grid.cell(0, 0).is_none());
        assert!(grid.cell(1, 1).is_none());
        let upper = grid.cell(0, 1).unwrap();
        let lower = grid.cell(1, 0).unwrap();
        let swapped: Vec<(f64, f64)> = lower.points.iter().map(|&(u, v)| (v, u)).collect();
        assert_eq!(upper.points, swapped);
        assert_well_formed(&panel_grid_svg(&grid));
    }

    #[test]
    fn target_grid_renders_for_three_neurons() {
        let spec = NetworkSpec::jump_coupled(
            vec![
                NeuronParams::standard(),
                NeuronParams::standard(),
                NeuronParams::standard(),
            ],
            vec![
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let trains = simulate_spike_trains(&spec, &SimConfig::spike_train(3000.0)).unwrap();
        let grid = target_panel_grid(&trains, 0, Direction::Forward, 5, "target A").unwrap();
        assert_eq!((grid.rows, grid.cols), (3, 3));
        assert!(grid.cell(2, 2).is_none());
        let cell = grid.cell(0, 1).unwrap();
        assert_eq!(cell.title, "T_A vs D_B");
        assert_eq!(cell.x_label, "rank D_B");
        assert_well_formed(&panel_grid_svg(&grid));
    }

    #[test]
    fn network_diagram_marks_excitation_inhibition_and_noise() {
        let spec = NetworkSpec::new(
            vec![
                NeuronParams::standard(),
                NeuronParams::standard(),
                NeuronParams::standard(),
            ],
            crate::engine::CorrelationMatrix::identity(3),
            vec![
                vec![0.0, 3.0, 0.0],
                vec![0.0, 0.0, -1.5],
                vec![0.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let svg = network_diagram(&spec);
        assert_well_formed(&svg);
        assert!(svg.contains("marker-end=\"url(#arrow)\""));
        assert!(svg.contains("marker-end=\"url(#disc)\""));
        assert!(svg.contains("3 mV"));
        assert!(svg.contains("1.5 mV"));

        let noisy = NetworkSpec::correlated(
            vec![NeuronParams::standard(), NeuronParams::standard()],
            crate::engine::CorrelationMatrix::pair(0.91).unwrap(),
        )
        .unwrap();
        let svg2 = network_diagram(&noisy);
        assert_well_formed(&svg2);
        assert!(svg2.contains("c = 0.91"));
        assert!(svg2.contains("stroke-dasharray"));
        assert!(!svg2.contains("marker-end"));
    }

    #[test]
    fn diagram_is_deterministic() {
        let spec = NetworkSpec::jump_coupled(
            vec![NeuronParams::standard(), NeuronParams::standard()],
            vec![vec![0.0, 3.0], vec![-3.0, 0.0]],
        )
        .unwrap();
        assert_eq!(network_diagram(&spec), network_diagram(&spec));
        // Bidirectional pair renders two offset edges.
        let svg = network_diagram(&spec);
        assert_eq!(svg.matches("marker-end").count(), 2);
    }

    #[test]
    fn table_zeroes_insignificant_tau_in_text_only() {
        let rows = vec![
            DependenceSummary {
                label: "FWD-A".into(),
                n: 5000,
                pearson_r: 0.16,
                kendall_tau: 0.09,
                spearman_rho: 0.13,
                tau_p_value: 0.0001,
                low_confidence: false,
            },
            DependenceSummary {
                label: "BWD-B".into(),
                n: 5000,
                pearson_r: 0.01,
                kendall_tau: 0.0042,
                spearman_rho: 0.01,
                tau_p_value: 0.62,
                low_confidence: false,
            },
        ];
        let out = dependence_table(&rows);
        let lines: Vec<&str> = out.text.lines().collect();
        assert!(lines[1].contains("0.0900"));
        assert!(!lines[2].contains("0.0042"));
        let cells: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(cells[3], "0");
        assert!(out.csv.contains("BWD-B,5000,0.0100,0.0042,0.0100,0.6200"));
    }
}

//! Graphviz DOT export.

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::fmt::sig12;

/// Number of colour buckets used for scalar node attributes.
const BUCKETS: usize = 5;

/// Optional decorations for [`render_dot`].
#[derive(Debug, Clone, Default)]
pub struct DotStyle {
    /// Per-node scalar shown in the label and mapped to a colour bucket.
    pub values: Option<Vec<f64>>,
    /// Nodes drawn with a double outline (e.g. flagged desync regions).
    pub highlighted: Vec<usize>,
    /// Node drawn as the stabilizer.
    pub stabilizer: Option<usize>,
}

/// DOT text for `g`, optionally labelling and colouring each node by a scalar.
pub fn export_dot(g: &WeightedGraph, node_attrs: Option<&[f64]>) -> Result<String> {
    render_dot(
        g,
        &DotStyle {
            values: node_attrs.map(<[f64]>::to_vec),
            ..DotStyle::default()
        },
    )
}

pub fn render_dot(g: &WeightedGraph, style: &DotStyle) -> Result<String> {
    let n = g.node_count();
    let buckets = match &style.values {
        Some(values) => {
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: values.len(),
                });
            }
            Some(quantile_buckets(values))
        }
        None => None,
    };
    for &node in style.highlighted.iter().chain(style.stabilizer.iter()) {
        if node >= n {
            return Err(Error::InvalidNode { node, n });
        }
    }

    let (keyword, arrow) = if g.is_directed() {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut out = format!("{keyword} G {{\n");
    out.push_str("  node [shape=circle];\n");
    for u in 0..n {
        let mut attrs = Vec::new();
        match (&style.values, &buckets) {
            (Some(values), Some(buckets)) => {
                attrs.push(format!("label=\"{}\\n{}\"", u, sig12(values[u])));
                attrs.push("colorscheme=ylorrd5".to_string());
                attrs.push("style=filled".to_string());
                attrs.push(format!("fillcolor={}", buckets[u] + 1));
            }
            _ => attrs.push(format!("label=\"{u}\"")),
        }
        if style.highlighted.contains(&u) {
            attrs.push("peripheries=2".to_string());
        }
        if style.stabilizer == Some(u) {
            attrs.push("shape=doublecircle".to_string());
            attrs.push("xlabel=\"stabilizer\"".to_string());
        }
        out.push_str(&format!("  {} [{}];\n", u, attrs.join(", ")));
    }
    for e in g.edges() {
        if e.w == 1.0 {
            out.push_str(&format!("  {} {} {};\n", e.u, arrow, e.v));
        } else {
            out.push_str(&format!(
                "  {} {} {} [label=\"{}\"];\n",
                e.u,
                arrow,
                e.v,
                sig12(e.w)
            ));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Quantile bucket in `0..BUCKETS` per value. Equal values share a bucket:
/// a value's bucket is determined by the fraction of values strictly below it.
fn quantile_buckets(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    values
        .iter()
        .map(|&x| {
            let below = values.iter().filter(|&&y| y < x).count();
            (below * BUCKETS / n).min(BUCKETS - 1)
        })
        .collect()
}

//! Directory-tree view of a recovery, rendered as Graphviz DOT.
//!
//! Packages are inner nodes and entities are leaves. Every node carries one
//! weight per concern plus a last slot for Unknown. A package's weights are
//! the sums over its leaf descendants, and its prevailing concern is the
//! heaviest slot.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::base_name;
use crate::deps::DepGraph;
use crate::recover::{cluster_of, ClusterId, RecoveryResult, WeightMeasure};
use crate::UNKNOWN;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VizError {
    #[error("{0} concerns exceed the bundled 12-color palette; supply a palette")]
    PaletteTooSmall(usize),
    #[error("palette has {given} colors but {needed} concerns need one each")]
    NotEnoughColors { given: usize, needed: usize },
    #[error("`{0}` is not a #RRGGBB color")]
    BadColor(String),
    #[error("palette color {0} is used twice")]
    DuplicateColor(String),
    #[error("`{0}` is both an entity and a package")]
    PathConflict(String),
    #[error("duplicate entity path `{0}`")]
    DuplicateLeaf(String),
    #[error("detail mode needs a dependency graph")]
    DetailNeedsDependencies,
    #[error("width and height must both be given and positive")]
    BadSize,
}

pub type NodeId = usize;

/// Data carried by an entity leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub path: String,
    pub cluster: ClusterId,
    /// Value of the selected weight measure.
    pub weight: u64,
    pub byte_size: u64,
    pub logical_sloc: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Package,
    Entity(Leaf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    /// Last path segment; `.` for the root.
    pub name: String,
    /// Full slash-separated path; `.` for the root.
    pub path: String,
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    /// One slot per concern, then Unknown.
    pub weights: Vec<u64>,
    pub prevailing: ClusterId,
}

impl Node {
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn is_package(&self) -> bool {
        matches!(self.kind, NodeKind::Package)
    }
}

/// Heaviest slot of a weight vector; ties go to the earlier slot, an
/// all-zero vector is Unknown.
pub fn prevailing(weights: &[u64]) -> ClusterId {
    let n = weights.len().saturating_sub(1);
    let mut best = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0 && best.is_none_or(|(_, bw)| w > bw) {
            best = Some((i, w));
        }
    }
    match best {
        Some((i, _)) if i < n => ClusterId::Concern(i),
        _ => ClusterId::Unknown,
    }
}

/// Package tree under a synthetic root `.`. Node 0 is the root and node ids
/// follow a depth-first preorder with children sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirTree {
    concerns: Vec<String>,
    nodes: Vec<Node>,
}

#[derive(Default)]
struct Builder {
    children: BTreeMap<String, Builder>,
    leaf: Option<Leaf>,
}

impl DirTree {
    pub fn from_leaves(concerns: Vec<String>, leaves: Vec<Leaf>) -> Result<Self, VizError> {
        let mut root = Builder::default();
        for leaf in leaves {
            let segments: Vec<&str> = leaf.path.split('/').filter(|s| !s.is_empty()).collect();
            let mut node = &mut root;
            for (depth, seg) in segments.iter().enumerate() {
                if node.leaf.is_some() {
                    return Err(VizError::PathConflict(segments[..depth].join("/")));
                }
                node = node.children.entry(seg.to_string()).or_default();
            }
            if node.leaf.is_some() {
                return Err(VizError::DuplicateLeaf(leaf.path));
            }
            if !node.children.is_empty() {
                return Err(VizError::PathConflict(leaf.path));
            }
            node.leaf = Some(leaf);
        }
        let mut tree = DirTree {
            concerns,
            nodes: Vec::new(),
        };
        tree.flatten(".".to_string(), ".".to_string(), root);
        Ok(tree)
    }

    fn flatten(&mut self, name: String, path: String, b: Builder) -> NodeId {
        let slots = self.concerns.len() + 1;
        let id = self.nodes.len();
        let kind = match b.leaf {
            Some(leaf) => NodeKind::Entity(leaf),
            None => NodeKind::Package,
        };
        self.nodes.push(Node {
            name,
            path: path.clone(),
            kind,
            children: Vec::new(),
            weights: vec![0; slots],
            prevailing: ClusterId::Unknown,
        });
        let mut children = Vec::with_capacity(b.children.len());
        for (seg, child) in b.children {
            let child_path = if id == 0 { seg.clone() } else { format!("{path}/{seg}") };
            children.push(self.flatten(seg, child_path, child));
        }
        let mut weights = vec![0u64; slots];
        let prevailing = match &self.nodes[id].kind {
            NodeKind::Entity(leaf) => {
                weights[leaf.cluster.slot(slots - 1)] = leaf.weight;
                leaf.cluster
            }
            NodeKind::Package => {
                for &c in &children {
                    for (w, cw) in weights.iter_mut().zip(&self.nodes[c].weights) {
                        *w += cw;
                    }
                }
                prevailing(&weights)
            }
        };
        let node = &mut self.nodes[id];
        node.children = children;
        node.weights = weights;
        node.prevailing = prevailing;
        id
    }

    pub fn concerns(&self) -> &[String] {
        &self.concerns
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn find(&self, path: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.path == path)
    }

    /// Packages (root included) with their prevailing concern names, in
    /// preorder.
    pub fn package_prevailing(&self) -> Vec<(&str, &str)> {
        self.nodes
            .iter()
            .filter(|n| n.is_package())
            .map(|n| (n.path.as_str(), n.prevailing.name(&self.concerns)))
            .collect()
    }
}

/// Tree of a recovery, weighting each leaf with `measure`.
pub fn build_tree(result: &RecoveryResult, measure: WeightMeasure) -> Result<DirTree, VizError> {
    let concerns = result.concerns().to_vec();
    let leaves = result
        .records()
        .iter()
        .map(|r| Leaf {
            path: r.entity.path.clone(),
            cluster: cluster_of(r, &concerns),
            weight: r.weight(measure),
            byte_size: r.entity.byte_size,
            logical_sloc: r.entity.logical_sloc,
        })
        .collect();
    DirTree::from_leaves(concerns, leaves)
}

/// Qualitative colors in assignment order.
pub const BUNDLED_PALETTE: [&str; 12] = [
    "#1f78b4", "#e31a1c", "#33a02c", "#ff7f00", "#6a3d9a", "#b15928", "#a6cee3", "#fb9a99",
    "#b2df8a", "#fdbf6f", "#cab2d6", "#ffff99",
];

pub const UNKNOWN_COLOR: &str = "#808080";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    concerns: Vec<String>,
    colors: Vec<String>,
}

impl Palette {
    pub fn color(&self, cluster: ClusterId) -> &str {
        match cluster {
            ClusterId::Concern(i) => &self.colors[i],
            ClusterId::Unknown => UNKNOWN_COLOR,
        }
    }

    pub fn color_of(&self, name: &str) -> Option<&str> {
        if name == UNKNOWN {
            return Some(UNKNOWN_COLOR);
        }
        let i = self.concerns.iter().position(|c| c == name)?;
        Some(&self.colors[i])
    }

    /// Concern names with their colors, Unknown last.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.concerns
            .iter()
            .map(String::as_str)
            .zip(self.colors.iter().map(String::as_str))
            .chain([(UNKNOWN, UNKNOWN_COLOR)])
    }
}

/// Colors from the bundled palette in concern order.
pub fn assign_palette(concerns: &[String]) -> Result<Palette, VizError> {
    if concerns.len() > BUNDLED_PALETTE.len() {
        return Err(VizError::PaletteTooSmall(concerns.len()));
    }
    Ok(Palette {
        concerns: concerns.to_vec(),
        colors: BUNDLED_PALETTE[..concerns.len()]
            .iter()
            .map(|c| c.to_string())
            .collect(),
    })
}

/// Colors from a user list, in concern order. Extra colors are ignored.
pub fn user_palette(concerns: &[String], colors: &[String]) -> Result<Palette, VizError> {
    if colors.len() < concerns.len() {
        return Err(VizError::NotEnoughColors {
            given: colors.len(),
            needed: concerns.len(),
        });
    }
    let mut used = vec![UNKNOWN_COLOR.to_string()];
    let mut chosen = Vec::with_capacity(concerns.len());
    for c in &colors[..concerns.len()] {
        let ok = c.len() == 7
            && c.starts_with('#')
            && c[1..].chars().all(|ch| ch.is_ascii_hexdigit());
        if !ok {
            return Err(VizError::BadColor(c.clone()));
        }
        let c = c.to_ascii_lowercase();
        if used.contains(&c) {
            return Err(VizError::DuplicateColor(c));
        }
        used.push(c.clone());
        chosen.push(c);
    }
    Ok(Palette {
        concerns: concerns.to_vec(),
        colors: chosen,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DotOptions {
    /// Drawing size in inches.
    pub width: Option<f64>,
    pub height: Option<f64>,
    /// Render each entity as a record with its size and dependencies.
    pub detail: bool,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn html(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Black or white, whichever reads better on `bg`.
fn text_color(bg: &str) -> &'static str {
    let channel = |i: usize| u32::from_str_radix(&bg[i..i + 2], 16).unwrap_or(0);
    let luma = 299 * channel(1) + 587 * channel(3) + 114 * channel(5);
    if luma > 128_000 {
        "#000000"
    } else {
        "#ffffff"
    }
}

/// DOT digraph of the tree. Edges take the parent's prevailing color; the
/// legend lists every concern and Unknown.
pub fn emit_dot(
    tree: &DirTree,
    palette: &Palette,
    deps: Option<&DepGraph>,
    options: &DotOptions,
) -> Result<String, VizError> {
    let size = match (options.width, options.height) {
        (None, None) => None,
        (Some(w), Some(h)) if w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() => Some((w, h)),
        _ => return Err(VizError::BadSize),
    };
    if options.detail && deps.is_none() {
        return Err(VizError::DetailNeedsDependencies);
    }
    let cluster_of_path: BTreeMap<&str, ClusterId> = tree
        .nodes()
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Entity(l) => Some((n.path.as_str(), l.cluster)),
            NodeKind::Package => None,
        })
        .collect();

    let mut out = String::from("digraph concerns {\n");
    out.push_str("  graph [rankdir=TB, fontname=\"Helvetica\"");
    if let Some((w, h)) = size {
        let _ = write!(out, ", size=\"{w},{h}\"");
    }
    out.push_str("];\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  edge [arrowhead=none];\n");

    if !tree.is_empty() {
        for (id, n) in tree.nodes().iter().enumerate() {
            match &n.kind {
                NodeKind::Package => {
                    let fill = palette.color(n.prevailing);
                    let _ = writeln!(
                        out,
                        "  n{id} [label={}, shape=folder, style=filled, fillcolor=\"{fill}\", fontcolor=\"{}\", tooltip={}];",
                        quote(&n.name),
                        text_color(fill),
                        quote(&n.path),
                    );
                }
                NodeKind::Entity(leaf) if options.detail => {
                    let graph = deps.expect("checked above");
                    let _ = writeln!(
                        out,
                        "  n{id} [shape=plain, label=<{}>];",
                        detail_table(leaf, &n.name, graph, palette, &cluster_of_path)
                    );
                }
                NodeKind::Entity(leaf) => {
                    let fill = palette.color(leaf.cluster);
                    let _ = writeln!(
                        out,
                        "  n{id} [label={}, shape=box, style=filled, fillcolor=\"{fill}\", fontcolor=\"{}\", fontsize=8, height=0.2, tooltip={}];",
                        quote(&n.name),
                        text_color(fill),
                        quote(&n.path),
                    );
                }
            }
        }
        for (id, n) in tree.nodes().iter().enumerate() {
            let color = palette.color(n.prevailing);
            for &c in &n.children {
                if n.is_package() {
                    let _ = writeln!(out, "  n{id} -> n{c} [color=\"{color}\"];");
                }
            }
        }
    }

    out.push_str("  subgraph cluster_legend {\n    label=\"Legend\";\n");
    for (i, (name, color)) in palette.entries().enumerate() {
        let _ = writeln!(
            out,
            "    legend{i} [label={}, shape=box, style=filled, fillcolor=\"{color}\", fontcolor=\"{}\"];",
            quote(name),
            text_color(color),
        );
    }
    out.push_str("  }\n}\n");
    Ok(out)
}

fn detail_table(
    leaf: &Leaf,
    name: &str,
    deps: &DepGraph,
    palette: &Palette,
    cluster_of_path: &BTreeMap<&str, ClusterId>,
) -> String {
    let color = palette.color(leaf.cluster);
    let (outgoing, incoming) = deps.fan(&leaf.path).unwrap_or_default();
    let row = |targets: &[&str]| -> String {
        if targets.is_empty() {
            return "<TD>-</TD>".to_string();
        }
        targets
            .iter()
            .map(|t| {
                let c = cluster_of_path.get(t).map_or(UNKNOWN_COLOR, |c| palette.color(*c));
                format!(
                    "<TD BGCOLOR=\"{c}\"><FONT COLOR=\"{}\">{}</FONT></TD>",
                    text_color(c),
                    html(base_name(t))
                )
            })
            .collect()
    };
    let nested = |cells: String| {
        format!("<TR><TD><TABLE BORDER=\"0\" CELLBORDER=\"1\" CELLSPACING=\"0\"><TR>{cells}</TR></TABLE></TD></TR>")
    };
    format!(
        "<TABLE BORDER=\"0\" CELLBORDER=\"1\" CELLSPACING=\"0\"><TR><TD>{}</TD></TR>\
         <TR><TD BGCOLOR=\"{color}\"><FONT COLOR=\"{}\">{} B, {} LSLOC</FONT></TD></TR>{}{}</TABLE>",
        html(name),
        text_color(color),
        leaf.byte_size,
        leaf.logical_sloc,
        nested(row(&outgoing)),
        nested(row(&incoming)),
    )
}

use crate::graph::{CommGraph, EdgeId, Label, Labelling, NodeId};

/// One incident edge as seen by its endpoint: old and new label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidentEdge {
    pub neighbor: NodeId,
    pub old: Label,
    pub new: Label,
}

impl IncidentEdge {
    pub fn changed(&self) -> bool {
        self.old != self.new
    }
}

/// A node's local input of a batch: labels of its incident edges in both
/// labellings, ordered by neighbour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidentLabels {
    pub me: NodeId,
    pub edges: Vec<IncidentEdge>,
}

impl IncidentLabels {
    pub fn edge(&self, e: &IncidentEdge) -> EdgeId {
        EdgeId::new(self.me, e.neighbor)
    }

    pub fn changed(&self) -> impl Iterator<Item = &IncidentEdge> {
        self.edges.iter().filter(|e| e.changed())
    }

    pub fn get(&self, u: NodeId) -> Option<&IncidentEdge> {
        self.edges.binary_search_by_key(&u, |e| e.neighbor).ok().map(|i| &self.edges[i])
    }
}

#[derive(Debug, Clone)]
pub struct BatchInput<A> {
    pub labels: IncidentLabels,
    pub aux: A,
}

pub fn incident_labels(graph: &CommGraph, l1: &Labelling, l2: &Labelling) -> Vec<IncidentLabels> {
    graph
        .nodes()
        .map(|v| IncidentLabels {
            me: v,
            edges: graph
                .neighbors(v)
                .iter()
                .map(|&u| {
                    let e = EdgeId::new(u, v);
                    IncidentEdge { neighbor: u, old: l1.label(e), new: l2.label(e) }
                })
                .collect(),
        })
        .collect()
}

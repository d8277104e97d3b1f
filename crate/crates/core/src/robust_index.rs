//! Robust security index `δ_r(u_i)` from a minimum `u_i`–`t` cut.
//!
//! The structural model is turned into the extended graph `G_t`, and from
//! it a per-actuator flow network in which removable states (those driven
//! by another actuator) are split into a unit-capacity arc and each sensed
//! state drains into the sink with capacity equal to its number of
//! unprotected sensors. `δ_r = maxflow + 1`, or infinity.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ComponentSet, StructuralModel};
use crate::IndexValue;

/// Exhaustive oracle limit on `n_u + n_y + n_e`.
pub const ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum GraphNode {
    State(usize),
    Actuator(usize),
    Sensor(usize),
    Sink,
}

/// The extended graph `G_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    pub n_x: usize,
    pub n_u: usize,
    /// Protection flag per sensor.
    pub protected: Vec<bool>,
    /// `(actuator, state)`
    pub e_ux: Vec<(usize, usize)>,
    /// `(from, to)`, self-loops included.
    pub e_xx: Vec<(usize, usize)>,
    /// `(state, sensor)`
    pub e_xy: Vec<(usize, usize)>,
    /// Sensors, each with an edge to the sink.
    pub e_yt: Vec<usize>,
}

impl ExtendedGraph {
    pub fn edges(&self) -> impl Iterator<Item = (GraphNode, GraphNode)> + '_ {
        use GraphNode::*;
        self.e_ux
            .iter()
            .map(|&(u, x)| (Actuator(u), State(x)))
            .chain(self.e_xx.iter().map(|&(a, b)| (State(a), State(b))))
            .chain(self.e_xy.iter().map(|&(x, y)| (State(x), Sensor(y))))
            .chain(self.e_yt.iter().map(|&y| (Sensor(y), Sink)))
    }

    pub fn edge_count(&self) -> usize {
        self.e_ux.len() + self.e_xx.len() + self.e_xy.len() + self.e_yt.len()
    }

    fn actuator_on(&self, state: usize) -> Option<usize> {
        self.e_ux.iter().find(|&&(_, x)| x == state).map(|&(u, _)| u)
    }

    fn target_of(&self, actuator: usize) -> usize {
        self.e_ux
            .iter()
            .find(|&&(u, _)| u == actuator)
            .map(|&(_, x)| x)
            .expect("every actuator has a target")
    }

    /// Whether `t` is reachable from `actuator` once the given states and
    /// sensors are deleted.
    pub fn reaches_sink(
        &self,
        actuator: usize,
        removed_states: &BTreeSet<usize>,
        removed_sensors: &BTreeSet<usize>,
    ) -> bool {
        let mut succ = vec![Vec::new(); self.n_x];
        for &(a, b) in &self.e_xx {
            succ[a].push(b);
        }
        let mut sensed = vec![false; self.n_x];
        for &(x, y) in &self.e_xy {
            if !removed_sensors.contains(&y) {
                sensed[x] = true;
            }
        }
        let start = self.target_of(actuator);
        if removed_states.contains(&start) {
            return false;
        }
        let mut seen = vec![false; self.n_x];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            if sensed[x] {
                return true;
            }
            for &n in &succ[x] {
                if !seen[n] && !removed_states.contains(&n) {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        false
    }

    /// States driven by the actuators of `set` other than `actuator`
    /// together with the attacked sensors.
    pub fn separator_of(&self, set: &ComponentSet, actuator: usize) -> Separator {
        Separator {
            states: set
                .actuators
                .iter()
                .filter(|&&k| k != actuator)
                .map(|&k| self.target_of(k))
                .collect(),
            sensors: set.sensors.clone(),
        }
    }
}

pub fn build_extended_graph(m: &StructuralModel) -> ExtendedGraph {
    let mut e_xx: Vec<(usize, usize)> = m.a_pattern().map(|(i, j)| (j, i)).collect();
    e_xx.sort_unstable();
    ExtendedGraph {
        n_x: m.n_x(),
        n_u: m.n_u(),
        protected: (0..m.sensor_count()).map(|l| m.is_protected(l)).collect(),
        e_ux: (0..m.n_u()).map(|k| (k, m.b_target(k))).collect(),
        e_xx,
        e_xy: (0..m.sensor_count()).map(|l| (m.c_target(l), l)).collect(),
        e_yt: (0..m.sensor_count()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum FlowNode {
    Source,
    Sink,
    StateIn(usize),
    StateOut(usize),
    State(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacity {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

/// The network `G_{u_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub actuator: usize,
    pub nodes: Vec<FlowNode>,
    pub arcs: Vec<FlowArc>,
    pub source: usize,
    pub sink: usize,
}

impl FlowNetwork {
    /// Capacity standing in for infinity: one more than every finite
    /// capacity combined.
    pub fn sentinel(&self) -> u64 {
        1 + self
            .arcs
            .iter()
            .map(|a| match a.capacity {
                Capacity::Finite(c) => c,
                Capacity::Infinite => 0,
            })
            .sum::<u64>()
    }

    pub fn node_label(&self, node: usize, m: &StructuralModel) -> String {
        match self.nodes[node] {
            FlowNode::Source => m.actuator_label(self.actuator),
            FlowNode::Sink => "t".to_owned(),
            FlowNode::StateIn(x) => format!("{}_in", m.state_label(x)),
            FlowNode::StateOut(x) => format!("{}_out", m.state_label(x)),
            FlowNode::State(x) => m.state_label(x),
        }
    }

    pub fn find_arc(&self, from: FlowNode, to: FlowNode) -> Option<&FlowArc> {
        self.arcs
            .iter()
            .find(|a| self.nodes[a.from] == from && self.nodes[a.to] == to)
    }

    /// Edge list, one `src dst capacity` line per arc.
    pub fn edge_list(&self, m: &StructuralModel) -> String {
        let mut out = String::new();
        for a in &self.arcs {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.node_label(a.from, m),
                self.node_label(a.to, m),
                a.capacity
            );
        }
        out
    }
}

/// Builds `G_{u_i}` for `actuator`.
pub fn build_flow_network(g: &ExtendedGraph, actuator: usize) -> FlowNetwork {
    let mut nodes = vec![FlowNode::Source, FlowNode::Sink];
    // (entry, exit) node per state
    let mut ends = Vec::with_capacity(g.n_x);
    let mut arcs = Vec::new();
    for x in 0..g.n_x {
        let split = g.actuator_on(x).is_some_and(|k| k != actuator);
        if split {
            let i = nodes.len();
            nodes.push(FlowNode::StateIn(x));
            nodes.push(FlowNode::StateOut(x));
            arcs.push(FlowArc {
                from: i,
                to: i + 1,
                capacity: Capacity::Finite(1),
            });
            ends.push((i, i + 1));
        } else {
            nodes.push(FlowNode::State(x));
            ends.push((nodes.len() - 1, nodes.len() - 1));
        }
    }
    arcs.push(FlowArc {
        from: 0,
        to: ends[g.target_of(actuator)].0,
        capacity: Capacity::Infinite,
    });
    for &(a, b) in &g.e_xx {
        if a != b {
            arcs.push(FlowArc {
                from: ends[a].1,
                to: ends[b].0,
                capacity: Capacity::Infinite,
            });
        }
    }
    let mut drain: Vec<Option<Capacity>> = vec![None; g.n_x];
    for &(x, y) in &g.e_xy {
        drain[x] = Some(match (drain[x], g.protected[y]) {
            (_, true) | (Some(Capacity::Infinite), _) => Capacity::Infinite,
            (Some(Capacity::Finite(c)), false) => Capacity::Finite(c + 1),
            (None, false) => Capacity::Finite(1),
        });
    }
    for (x, cap) in drain.into_iter().enumerate() {
        if let Some(capacity) = cap {
            arcs.push(FlowArc {
                from: ends[x].1,
                to: 1,
                capacity,
            });
        }
    }
    FlowNetwork {
        actuator,
        nodes,
        arcs,
        source: 0,
        sink: 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: IndexValue,
    /// Indices into the network's arcs, crossing from the source side.
    pub cut: Vec<usize>,
    /// Nodes on the source side of the cut.
    pub source_side: Vec<bool>,
}

/// Maximum flow by shortest augmenting paths. The returned cut is the one
/// closest to the source.
pub fn max_flow(net: &FlowNetwork) -> MaxFlow {
    assert_ne!(net.source, net.sink);
    let sentinel = net.sentinel();
    let n = net.nodes.len();
    // residual graph: arc 2k forward, 2k+1 backward
    let mut head = Vec::with_capacity(2 * net.arcs.len());
    let mut residual = Vec::with_capacity(2 * net.arcs.len());
    let mut adjacent = vec![Vec::new(); n];
    for a in &net.arcs {
        let cap = match a.capacity {
            Capacity::Finite(c) => c,
            Capacity::Infinite => sentinel,
        };
        adjacent[a.from].push(head.len());
        head.push(a.to);
        residual.push(cap);
        adjacent[a.to].push(head.len());
        head.push(a.from);
        residual.push(0);
    }

    let reach = |residual: &[u64], parent: &mut Vec<Option<usize>>| -> Vec<bool> {
        let mut seen = vec![false; n];
        parent.iter_mut().for_each(|p| *p = None);
        let mut queue = VecDeque::from([net.source]);
        seen[net.source] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &adjacent[v] {
                let w = head[e];
                if residual[e] > 0 && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        seen
    };

    let mut flow: u64 = 0;
    let mut parent = vec![None; n];
    let source_side = loop {
        let seen = reach(&residual, &mut parent);
        if !seen[net.sink] || flow >= sentinel {
            break seen;
        }
        let mut bottleneck = u64::MAX;
        let mut v = net.sink;
        while let Some(e) = parent[v] {
            bottleneck = bottleneck.min(residual[e]);
            v = head[e ^ 1];
        }
        let mut v = net.sink;
        while let Some(e) = parent[v] {
            residual[e] -= bottleneck;
            residual[e ^ 1] += bottleneck;
            v = head[e ^ 1];
        }
        flow += bottleneck;
    };

    let value = if flow >= sentinel {
        IndexValue::Infinite
    } else {
        IndexValue::Finite(flow as usize)
    };
    let cut = net
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| source_side[a.from] && !source_side[a.to])
        .map(|(k, _)| k)
        .collect();
    MaxFlow {
        value,
        cut,
        source_side,
    }
}

/// Deleted node set `𝒳_a ∪ 𝒴_a`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Separator {
    pub states: BTreeSet<usize>,
    pub sensors: BTreeSet<usize>,
}

impl Separator {
    pub fn label(&self, m: &StructuralModel) -> String {
        let parts: Vec<String> = self
            .states
            .iter()
            .map(|&x| m.state_label(x))
            .chain(self.sensors.iter().map(|&l| m.sensor_label(l)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RobustReport {
    pub actuator: usize,
    pub value: IndexValue,
    /// Present when the value is finite.
    pub witness: Option<ComponentSet>,
    pub separator: Option<Separator>,
}

/// `δ_r(actuator)` with a witness read off the minimum cut.
pub fn delta_r(m: &StructuralModel, actuator: usize) -> RobustReport {
    let g = build_extended_graph(m);
    delta_r_in(m, &g, actuator)
}

fn delta_r_in(m: &StructuralModel, g: &ExtendedGraph, actuator: usize) -> RobustReport {
    let net = build_flow_network(g, actuator);
    let flow = max_flow(&net);
    let IndexValue::Finite(cut_value) = flow.value else {
        return RobustReport {
            actuator,
            value: IndexValue::Infinite,
            witness: None,
            separator: None,
        };
    };
    let mut witness = ComponentSet::new([actuator], []);
    let mut separator = Separator::default();
    for &k in &flow.cut {
        let arc = net.arcs[k];
        match (net.nodes[arc.from], net.nodes[arc.to]) {
            (FlowNode::StateIn(x), FlowNode::StateOut(_)) => {
                let owner = m.actuator_on(x).expect("split states are actuated");
                witness.actuators.insert(owner);
                separator.states.insert(x);
            }
            (FlowNode::StateOut(x) | FlowNode::State(x), FlowNode::Sink) => {
                for l in m.sensors_on(x).filter(|&l| !m.is_protected(l)) {
                    witness.sensors.insert(l);
                    separator.sensors.insert(l);
                }
            }
            other => unreachable!("finite cut through an unbounded arc {other:?}"),
        }
    }
    debug_assert_eq!(witness.len(), cut_value + 1);
    debug_assert!(!g.reaches_sink(actuator, &separator.states, &separator.sensors));
    RobustReport {
        actuator,
        value: IndexValue::Finite(cut_value + 1),
        witness: Some(witness),
        separator: Some(separator),
    }
}

/// `δ_r` for every actuator, in actuator order.
pub fn delta_r_all(m: &StructuralModel) -> Vec<RobustReport> {
    let g = build_extended_graph(m);
    (0..m.n_u())
        .into_par_iter()
        .map(|k| delta_r_in(m, &g, k))
        .collect()
}

/// Whether the attacked set's induced states and sensors separate
/// `actuator` from the sink.
pub fn is_separator(m: &StructuralModel, set: &ComponentSet, actuator: usize) -> bool {
    let g = build_extended_graph(m);
    let sep = g.separator_of(set, actuator);
    !g.reaches_sink(actuator, &sep.states, &sep.sensors)
}

/// `δ_r` by enumerating every admissible attacked set.
pub fn delta_r_oracle(m: &StructuralModel, actuator: usize) -> Result<IndexValue> {
    let size = m.n_u() + m.sensor_count();
    if size > ORACLE_LIMIT {
        return Err(Error::SizeGuard {
            size,
            limit: ORACLE_LIMIT,
        });
    }
    let g = build_extended_graph(m);
    let others: Vec<usize> = (0..m.n_u()).filter(|&k| k != actuator).collect();
    let n_y = m.n_y();
    let total = others.len() + n_y;
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << total) {
        let count = mask.count_ones() as usize + 1;
        if best.is_some_and(|b| b <= count) {
            continue;
        }
        let states: BTreeSet<usize> = others
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &k)| m.b_target(k))
            .collect();
        let sensors: BTreeSet<usize> = (0..n_y)
            .filter(|l| mask & (1 << (others.len() + l)) != 0)
            .collect();
        if !g.reaches_sink(actuator, &states, &sensors) {
            best = Some(count);
        }
    }
    Ok(best.map_or(IndexValue::Infinite, IndexValue::Finite))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example3() -> StructuralModel {
        StructuralModel::new(
            3,
            [(0, 1), (1, 0), (1, 2), (2, 1)],
            [0, 1],
            [(0, false), (2, true)],
        )
        .unwrap()
    }

    fn example4() -> StructuralModel {
        StructuralModel::new(2, [(1, 0), (1, 1)], [0], [(1, false)]).unwrap()
    }

    #[test]
    fn extended_graph_edges() {
        let g = build_extended_graph(&example4());
        assert_eq!(g.e_ux, vec![(0, 0)]);
        assert_eq!(g.e_xx, vec![(0, 1), (1, 1)]);
        assert_eq!(g.e_xy, vec![(1, 0)]);
        assert_eq!(g.e_yt, vec![0]);

        let lone = StructuralModel::new(1, [], [0], []).unwrap();
        let g = build_extended_graph(&lone);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(GraphNode::Actuator(0), GraphNode::State(0))]);
    }

    #[test]
    fn example3_network_shape() {
        let net = build_flow_network(&build_extended_graph(&example3()), 0);
        use FlowNode::*;
        let cap = |a, b| net.find_arc(a, b).map(|arc| arc.capacity);
        assert_eq!(cap(Source, State(0)), Some(Capacity::Infinite));
        assert_eq!(cap(StateIn(1), StateOut(1)), Some(Capacity::Finite(1)));
        assert_eq!(cap(State(0), StateIn(1)), Some(Capacity::Infinite));
        assert_eq!(cap(StateOut(1), State(0)), Some(Capacity::Infinite));
        assert_eq!(cap(StateOut(1), State(2)), Some(Capacity::Infinite));
        assert_eq!(cap(State(0), Sink), Some(Capacity::Finite(1)));
        assert_eq!(cap(State(2), Sink), Some(Capacity::Infinite));
        assert_eq!(net.nodes.len(), 6);
        assert_eq!(net.sentinel(), 3);
    }

    #[test]
    fn example3_cut() {
        let net = build_flow_network(&build_extended_graph(&example3()), 0);
        let flow = max_flow(&net);
        assert_eq!(flow.value, IndexValue::Finite(2));
        let mut cut: Vec<_> = flow
            .cut
            .iter()
            .map(|&k| (net.nodes[net.arcs[k].from], net.nodes[net.arcs[k].to]))
            .collect();
        cut.sort();
        assert_eq!(
            cut,
            vec![
                (FlowNode::StateIn(1), FlowNode::StateOut(1)),
                (FlowNode::State(0), FlowNode::Sink)
            ]
        );
    }

    #[test]
    fn single_arc_and_disconnected() {
        let mut net = FlowNetwork {
            actuator: 0,
            nodes: vec![FlowNode::Source, FlowNode::Sink],
            arcs: vec![FlowArc {
                from: 0,
                to: 1,
                capacity: Capacity::Finite(5),
            }],
            source: 0,
            sink: 1,
        };
        let flow = max_flow(&net);
        assert_eq!(flow.value, IndexValue::Finite(5));
        assert_eq!(flow.cut, vec![0]);
        net.arcs.clear();
        let flow = max_flow(&net);
        assert_eq!(flow.value, IndexValue::Finite(0));
        assert!(flow.cut.is_empty());
    }

    #[test]
    fn robust_examples() {
        let m = example3();
        let rep = delta_r(&m, 0);
        assert_eq!(rep.value, IndexValue::Finite(3));
        assert_eq!(rep.witness, Some(ComponentSet::new([0, 1], [0])));
        let sep = rep.separator.unwrap();
        assert_eq!(sep.label(&m), "{x2,y1}");
        assert_eq!(delta_r_oracle(&m, 0).unwrap(), IndexValue::Finite(3));

        let m = example4();
        assert_eq!(delta_r(&m, 0).value, IndexValue::Finite(2));
        assert_eq!(delta_r_oracle(&m, 0).unwrap(), IndexValue::Finite(2));

        let ex1 = StructuralModel::new(2, [(0, 0), (1, 0), (1, 1)], [0], [(1, true)]).unwrap();
        assert_eq!(delta_r(&ex1, 0).value, IndexValue::Infinite);
        assert_eq!(delta_r_oracle(&ex1, 0).unwrap(), IndexValue::Infinite);
    }

    #[test]
    fn doubly_sensed_state() {
        let m = StructuralModel::new(1, [], [0], [(0, false), (0, false)]).unwrap();
        let net = build_flow_network(&build_extended_graph(&m), 0);
        let arc = net.find_arc(FlowNode::State(0), FlowNode::Sink).unwrap();
        assert_eq!(arc.capacity, Capacity::Finite(2));
        assert_eq!(delta_r(&m, 0).value, IndexValue::Finite(3));
    }

    #[test]
    fn oracle_downstream_sensor() {
        let m = StructuralModel::new(2, [(1, 0)], [0], [(1, false)]).unwrap();
        assert_eq!(delta_r_oracle(&m, 0).unwrap(), IndexValue::Finite(2));
    }

    #[test]
    fn edge_list_format() {
        let m = example4();
        let net = build_flow_network(&build_extended_graph(&m), 0);
        assert_eq!(net.edge_list(&m), "u1 x1 inf\nx1 x2 inf\nx2 t 1\n");
    }
}

//! Epidemic broadcast among mobile nodes in a `[0, L]^D` box.
//!
//! Nodes move at constant speed `v`, reflect specularly on the walls and
//! redraw an isotropic direction at the epochs of a Poisson process of
//! rate `τ`. Time advances in steps of `dt`; after each step every node
//! that shares a unit-disk component with an informed node is informed
//! at the current time.
//!
//! Each node draws from its own random stream, keyed by the run seed and
//! the node id, so its trajectory does not depend on `dt` or on the other
//! nodes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ModelParams;
use crate::specfun::Dim;
use crate::unionfind::UnionFind;

pub type Vector = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourcePlacement {
    /// Node 0 is moved to the centre of the box.
    Center,
    /// Node 0 keeps its uniformly drawn position.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub d: Dim,
    pub box_length: f64,
    pub n: usize,
    pub v: f64,
    pub tau: f64,
    pub radio_range: f64,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub source_placement: SourcePlacement,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            d: Dim::TWO,
            box_length: 40.0,
            n: 160,
            v: 1.0,
            tau: 0.0,
            radio_range: 1.0,
            dt: 0.05,
            t_max: 5000.0,
            seed: 1,
            source_placement: SourcePlacement::Center,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut violated = Vec::new();
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !finite_pos(self.radio_range) {
            violated.push(format!("radio_range > 0 (got {})", self.radio_range));
        }
        if !(self.box_length.is_finite() && self.box_length > 2.0 * self.radio_range) {
            violated.push(format!(
                "L > 2 * radio_range (got L = {}, radio_range = {})",
                self.box_length, self.radio_range
            ));
        }
        if self.n < 2 {
            violated.push(format!("n >= 2 (got {})", self.n));
        }
        if !finite_pos(self.v) {
            violated.push(format!("v > 0 (got {})", self.v));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            violated.push(format!("tau >= 0 (got {})", self.tau));
        }
        if !finite_pos(self.dt) {
            violated.push(format!("dt > 0 (got {})", self.dt));
        } else if self.dt > 0.1 * self.radio_range / self.v * (1.0 + 1e-12) {
            violated.push(format!(
                "dt <= 0.1 * radio_range / v = {} (got {})",
                0.1 * self.radio_range / self.v,
                self.dt
            ));
        }
        if !finite_pos(self.t_max) {
            violated.push(format!("t_max > 0 (got {})", self.t_max));
        }
        if violated.is_empty() {
            Ok(())
        } else {
            Err(Error::config(violated.join("; ")))
        }
    }

    /// `n / L^D`.
    pub fn density(&self) -> f64 {
        self.n as f64 / self.box_length.powi(self.d.get() as i32)
    }

    /// Analytical model matching this scenario. Lengths are measured in
    /// units of the radio range.
    pub fn model_params(&self) -> Result<ModelParams> {
        let r = self.radio_range;
        let volume_scale = r.powi(self.d.get() as i32);
        ModelParams::new(self.d, self.density() * volume_scale, self.v / r, self.tau)
    }

    /// Number of `dt` steps that fit in `[0, t_max]`.
    pub fn steps(&self) -> u64 {
        (self.t_max / self.dt + 1e-9).floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub position: Vector,
    pub direction: Vector,
    /// Absolute time of the next direction change; `+inf` when `τ = 0`.
    pub next_turn_time: f64,
    pub infection_time: Option<f64>,
    /// Direction changes made so far (wall reflections not counted).
    pub turns: u64,
}

impl NodeState {
    pub fn is_infected(&self) -> bool {
        self.infection_time.is_some()
    }
}

/// First reception of the beacon by one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfectionRecord {
    pub node_id: usize,
    pub infection_time: f64,
    /// Distance from the source's position at `t = 0` to the node's
    /// position at `infection_time`.
    pub distance: f64,
}

/// Reflects coordinate `p` into `[0, L]`. Returns the folded coordinate
/// and whether an odd number of walls was crossed.
pub fn fold(p: f64, l: f64) -> (f64, bool) {
    let k = (p / l).floor();
    let r = (p - k * l).clamp(0.0, l);
    if k.rem_euclid(2.0) == 0.0 {
        (r, false)
    } else {
        (l - r, true)
    }
}

fn isotropic_direction(d: Dim, rng: &mut ChaCha8Rng) -> Vector {
    match d.get() {
        1 => [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0, 0.0],
        2 => {
            let phi = rng.random_range(0.0..2.0 * PI);
            let (s, c) = phi.sin_cos();
            [c, s, 0.0]
        }
        _ => {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi = rng.random_range(0.0..2.0 * PI);
            let rxy = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = phi.sin_cos();
            [rxy * c, rxy * s, z]
        }
    }
}

fn distance(a: &Vector, b: &Vector, d: usize) -> f64 {
    a[..d]
        .iter()
        .zip(&b[..d])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Full mutable state of one epidemic run.
#[derive(Debug, Clone)]
pub struct World {
    pub config: SimConfig,
    pub time: f64,
    pub nodes: Vec<NodeState>,
    pub source_index: usize,
    pub source_origin: Vector,
    step: u64,
    rngs: Vec<ChaCha8Rng>,
    turn_dist: Option<Exp<f64>>,
    infected_count: usize,
    uf: UnionFind,
    cells: Vec<(u64, u32)>,
}

impl World {
    /// Places nodes uniformly at random with isotropic directions and
    /// informs the source at time 0.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let d = config.d;
        let l = config.box_length;
        let turn_dist = if config.tau > 0.0 {
            Some(Exp::new(config.tau).map_err(|e| Error::config(e.to_string()))?)
        } else {
            None
        };

        let mut rngs = Vec::with_capacity(config.n);
        let mut nodes = Vec::with_capacity(config.n);
        for id in 0..config.n {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(id as u64);
            let mut position = [0.0; 3];
            for x in &mut position[..d.get()] {
                *x = rng.random_range(0.0..=l);
            }
            let direction = isotropic_direction(d, &mut rng);
            let next_turn_time = turn_dist.map_or(f64::INFINITY, |e| e.sample(&mut rng));
            nodes.push(NodeState {
                position,
                direction,
                next_turn_time,
                infection_time: None,
                turns: 0,
            });
            rngs.push(rng);
        }

        let source_index = 0;
        if config.source_placement == SourcePlacement::Center {
            let mut centre = [0.0; 3];
            centre[..d.get()].fill(0.5 * l);
            nodes[source_index].position = centre;
        }
        nodes[source_index].infection_time = Some(0.0);
        let source_origin = nodes[source_index].position;

        Ok(World {
            uf: UnionFind::new(config.n),
            cells: Vec::with_capacity(config.n),
            config,
            time: 0.0,
            nodes,
            source_index,
            source_origin,
            step: 0,
            rngs,
            turn_dist,
            infected_count: 1,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn infected_count(&self) -> usize {
        self.infected_count
    }

    pub fn all_infected(&self) -> bool {
        self.infected_count == self.nodes.len()
    }

    pub fn source_record(&self) -> InfectionRecord {
        let d = self.config.d.get();
        InfectionRecord {
            node_id: self.source_index,
            infection_time: 0.0,
            distance: distance(
                &self.nodes[self.source_index].position,
                &self.source_origin,
                d,
            ),
        }
    }

    fn move_node(node: &mut NodeState, length: f64, d: usize, l: f64) {
        for axis in 0..d {
            let p = node.position[axis] + node.direction[axis] * length;
            let (folded, flipped) = fold(p, l);
            node.position[axis] = folded;
            if flipped {
                node.direction[axis] = -node.direction[axis];
            }
        }
    }

    /// Moves every node forward by one time step, turning at the
    /// scheduled Poisson epochs that fall inside the step.
    pub fn advance(&mut self) {
        let d = self.config.d;
        let (l, v) = (self.config.box_length, self.config.v);
        let start = self.time;
        self.step += 1;
        let end = self.step as f64 * self.config.dt;

        for (node, rng) in self.nodes.iter_mut().zip(&mut self.rngs) {
            let mut t = start;
            while node.next_turn_time <= end {
                let turn_at = node.next_turn_time.max(t);
                Self::move_node(node, v * (turn_at - t), d.get(), l);
                node.direction = isotropic_direction(d, rng);
                node.turns += 1;
                let gap = self.turn_dist.map_or(f64::INFINITY, |e| e.sample(rng));
                node.next_turn_time = turn_at + gap;
                t = turn_at;
            }
            Self::move_node(node, v * (end - t), d.get(), l);
        }
        self.time = end;
    }

    /// Informs every node in a unit-disk component that contains an
    /// informed node. Returns one record per newly informed node.
    pub fn flood(&mut self) -> Vec<InfectionRecord> {
        let n = self.nodes.len();
        if self.infected_count == n {
            return Vec::new();
        }
        let d = self.config.d.get();
        let range = self.config.radio_range;
        let range2 = range * range;
        let per_axis = ((self.config.box_length / range).ceil() as u64).max(1);

        let cell_of = |p: &Vector| -> [u64; 3] {
            let mut c = [0u64; 3];
            for axis in 0..d {
                c[axis] = ((p[axis] / range).floor() as u64).min(per_axis - 1);
            }
            c
        };
        let key = |c: [u64; 3]| (c[2] * per_axis + c[1]) * per_axis + c[0];

        self.cells.clear();
        self.cells.extend(
            self.nodes
                .iter()
                .enumerate()
                .map(|(i, s)| (key(cell_of(&s.position)), i as u32)),
        );
        self.cells.sort_unstable();
        self.uf.reset(n);

        let offsets: Vec<[i64; 3]> = (0..3i64.pow(d as u32))
            .map(|mut m| {
                let mut o = [0i64; 3];
                for slot in o.iter_mut().take(d) {
                    *slot = m % 3 - 1;
                    m /= 3;
                }
                o
            })
            .collect();

        for i in 0..n {
            let pi = self.nodes[i].position;
            let inf_i = self.nodes[i].is_infected();
            let ci = cell_of(&pi);
            for off in &offsets {
                let mut c = [0u64; 3];
                let mut inside = true;
                for axis in 0..d {
                    let x = ci[axis] as i64 + off[axis];
                    if x < 0 || x >= per_axis as i64 {
                        inside = false;
                        break;
                    }
                    c[axis] = x as u64;
                }
                if !inside {
                    continue;
                }
                let k = key(c);
                let from = self.cells.partition_point(|&(ck, _)| ck < k);
                for &(ck, j) in &self.cells[from..] {
                    if ck != k {
                        break;
                    }
                    let j = j as usize;
                    if j <= i || (inf_i && self.nodes[j].is_infected()) {
                        continue;
                    }
                    let pj = &self.nodes[j].position;
                    let d2: f64 = (0..d).map(|a| (pi[a] - pj[a]) * (pi[a] - pj[a])).sum();
                    if d2 <= range2 {
                        self.uf.union(i, j);
                    }
                }
            }
        }

        let mut informed_root = vec![false; n];
        for i in 0..n {
            if self.nodes[i].is_infected() {
                let r = self.uf.find(i);
                informed_root[r] = true;
            }
        }
        let mut records = Vec::new();
        for i in 0..n {
            if !self.nodes[i].is_infected() && informed_root[self.uf.find(i)] {
                self.nodes[i].infection_time = Some(self.time);
                self.infected_count += 1;
                records.push(InfectionRecord {
                    node_id: i,
                    infection_time: self.time,
                    distance: distance(&self.nodes[i].position, &self.source_origin, d),
                });
            }
        }
        records
    }
}

/// Runs one epidemic from `t = 0` until every node is informed or the
/// horizon is reached. Records are sorted by time, then node id.
pub fn run_epidemic(config: &SimConfig) -> Result<Vec<InfectionRecord>> {
    let mut world = World::new(config.clone())?;
    let steps = config.steps();
    let mut records = vec![world.source_record()];
    records.extend(world.flood());
    while !world.all_infected() && world.step_count() < steps {
        world.advance();
        records.extend(world.flood());
    }
    records.sort_by(|a, b| {
        a.infection_time
            .total_cmp(&b.infection_time)
            .then(a.node_id.cmp(&b.node_id))
    });
    Ok(records)
}

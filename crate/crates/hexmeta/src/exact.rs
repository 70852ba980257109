//! Exact computations on tiny tori, where the full configuration space is
//! enumerable: stationary measure and detailed balance, mean hitting times,
//! capacities via the Dirichlet principle, communication heights and
//! stability levels. This layer is the oracle the simulation is checked
//! against.
//!
//! States are spin configurations encoded as bitmasks (bit set = plus).
//! `L = 2` (256 states) uses dense direct solves; `L = 3` (262144 states)
//! uses matrix-free preconditioned conjugate gradient on the symmetrized
//! operator, whose off-diagonal entries `sqrt(P(x,y) P(y,x))` avoid any
//! explicit Gibbs weights.

use crate::energy::{EnergyLevel, ModelParams};
use crate::lattice::LatticeTopology;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("unsupported torus side {0}: exact computations cover L = 2 and L = 3")]
    UnsupportedSide(u32),
    #[error("source and target state coincide; first return times are not covered")]
    SameState,
    #[error("capacity endpoints must be disjoint and non-empty")]
    BadCapacitySets,
    #[error("linear solver failed: {0}")]
    SolverFailed(String),
}

/// The full configuration space of a tiny torus with per-state energies.
pub struct StateSpace {
    topo: LatticeTopology,
    levels: Vec<EnergyLevel>,
    /// Bitmask of the three neighbors of each site.
    neighbor_masks: Vec<u32>,
}

impl StateSpace {
    pub fn new(side: u32) -> Result<Self, ExactError> {
        if !(2..=3).contains(&side) {
            return Err(ExactError::UnsupportedSide(side));
        }
        let topo = LatticeTopology::new(side).expect("side checked");
        let n_sites = topo.site_count();
        let neighbor_masks: Vec<u32> = (0..n_sites)
            .map(|s| topo.neighbors(s).iter().fold(0u32, |m, &n| m | (1 << n)))
            .collect();
        let edges: Vec<(usize, usize)> = (0..n_sites)
            .flat_map(|s| {
                topo.neighbors(s)
                    .into_iter()
                    .filter(move |&n| (n as usize) > s)
                    .map(move |n| (s, n as usize))
            })
            .collect();
        let levels = (0..1usize << n_sites)
            .map(|state| {
                let n_plus = (state as u64).count_ones() as i64;
                let n_gamma = edges
                    .iter()
                    .filter(|(a, b)| (state >> a) & 1 != (state >> b) & 1)
                    .count() as i64;
                EnergyLevel::new(n_gamma, n_plus)
            })
            .collect();
        Ok(StateSpace {
            topo,
            levels,
            neighbor_masks,
        })
    }

    pub fn side(&self) -> u32 {
        self.topo.side()
    }

    pub fn site_count(&self) -> usize {
        self.topo.site_count()
    }

    pub fn state_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, state: usize) -> EnergyLevel {
        self.levels[state]
    }

    pub fn energy(&self, state: usize, params: &ModelParams) -> f64 {
        self.levels[state].realize(params)
    }

    pub fn all_minus(&self) -> usize {
        0
    }

    pub fn all_plus(&self) -> usize {
        self.state_count() - 1
    }

    /// Transition probability to the single-flip neighbor at `site`.
    pub fn flip_probability(&self, params: &ModelParams, state: usize, site: usize) -> f64 {
        Kernel::new(self, params).flip_prob(state, site)
    }

    /// Self-loop mass completing the row of the transition matrix.
    pub fn hold_probability(&self, params: &ModelParams, state: usize) -> f64 {
        Kernel::new(self, params).hold(state)
    }

    /// Normalized Gibbs weights.
    pub fn gibbs(&self, params: &ModelParams) -> Vec<f64> {
        let h_min = (0..self.state_count())
            .map(|s| self.energy(s, params))
            .fold(f64::INFINITY, f64::min);
        let mut weights: Vec<f64> = (0..self.state_count())
            .map(|s| (-params.beta() * (self.energy(s, params) - h_min)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= z;
        }
        weights
    }
}

/// Precomputed per-move transition probabilities. A flip at a site with `a`
/// plus neighbors costs `(3-2a)J - h` upward or `(2a-3)J + h` downward, so
/// eight table entries cover every move.
struct Kernel<'a> {
    space: &'a StateSpace,
    /// prob[spin up][plus neighbors] = acceptance / site count.
    prob: [[f64; 4]; 2],
    /// sqrt(prob up->down * prob down->up) by plus-neighbor count.
    sym: [f64; 4],
}

impl<'a> Kernel<'a> {
    fn new(space: &'a StateSpace, params: &ModelParams) -> Self {
        let n = space.site_count() as f64;
        let mut prob = [[0.0; 4]; 2];
        let mut sym = [0.0; 4];
        for a in 0..4i64 {
            let dh_up = (3 - 2 * a) as f64 * params.coupling() - params.field();
            let dh_down = -dh_up;
            prob[0][a as usize] = (-params.beta() * dh_up).exp().min(1.0) / n;
            prob[1][a as usize] = (-params.beta() * dh_down).exp().min(1.0) / n;
            sym[a as usize] = (prob[0][a as usize] * prob[1][a as usize]).sqrt();
        }
        Kernel { space, prob, sym }
    }

    #[inline]
    fn plus_neighbors(&self, state: usize, site: usize) -> usize {
        (state as u32 & self.space.neighbor_masks[site]).count_ones() as usize
    }

    #[inline]
    fn flip_prob(&self, state: usize, site: usize) -> f64 {
        let spin_up = (state >> site) & 1;
        self.prob[spin_up][self.plus_neighbors(state, site)]
    }

    /// Symmetrized edge weight sqrt(P(x,y) P(y,x)); the plus-neighbor count
    /// is shared by both directions.
    #[inline]
    fn sym_prob(&self, state: usize, site: usize) -> f64 {
        self.sym[self.plus_neighbors(state, site)]
    }

    fn hold(&self, state: usize) -> f64 {
        let out: f64 = (0..self.space.site_count())
            .map(|site| self.flip_prob(state, site))
            .sum();
        1.0 - out
    }
}

/// Expected number of chain steps to first hit `target` from `from`,
/// obtained from the linear system `(I - Q) m = 1` with the target row and
/// column removed.
pub fn exact_mean_hitting(
    space: &StateSpace,
    params: &ModelParams,
    from: usize,
    target: usize,
) -> Result<f64, ExactError> {
    if from == target {
        return Err(ExactError::SameState);
    }
    let ones = vec![1.0; space.state_count()];
    let m = solve_absorbing(space, params, &[target], &ones)?;
    Ok(m[from])
}

/// Detailed-balance diagnostics over every oriented edge of the flip graph.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BalanceReport {
    /// max |mu(x) P(x,y) - mu(y) P(y,x)| / max(mu(x) P(x,y), mu(y) P(y,x)).
    pub max_relative_violation: f64,
    /// State minimizing the energy.
    pub ground_state: usize,
    pub ground_is_all_plus: bool,
}

pub fn gibbs_and_balance_check(space: &StateSpace, params: &ModelParams) -> BalanceReport {
    let mu = space.gibbs(params);
    let kernel = Kernel::new(space, params);
    let mut worst = 0.0f64;
    for state in 0..space.state_count() {
        for site in 0..space.site_count() {
            let other = state ^ (1 << site);
            if other < state {
                continue;
            }
            let fwd = mu[state] * kernel.flip_prob(state, site);
            let bwd = mu[other] * kernel.flip_prob(other, site);
            let scale = fwd.max(bwd);
            if scale > 0.0 {
                worst = worst.max((fwd - bwd).abs() / scale);
            }
        }
    }
    let ground_state = (0..space.state_count())
        .min_by(|&a, &b| space.energy(a, params).total_cmp(&space.energy(b, params)))
        .unwrap();
    BalanceReport {
        max_relative_violation: worst,
        ground_state,
        ground_is_all_plus: ground_state == space.all_plus(),
    }
}

/// Capacity of a pair of disjoint state sets, with the minimizing
/// equilibrium potential.
#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub capacity: f64,
    /// Equilibrium potential: 1 on the source set, 0 on the target set.
    pub potential: Vec<f64>,
}

/// Solves the Dirichlet problem (potential 1 on `a`, 0 on `b`, harmonic
/// elsewhere) and evaluates the Dirichlet form at the solution.
pub fn capacity(
    space: &StateSpace,
    params: &ModelParams,
    a: &[usize],
    b: &[usize],
) -> Result<CapacityResult, ExactError> {
    if a.is_empty() || b.is_empty() || a.iter().any(|x| b.contains(x)) {
        return Err(ExactError::BadCapacitySets);
    }
    let n = space.state_count();
    let kernel = Kernel::new(space, params);
    let mut boundary = vec![false; n];
    let mut potential = vec![0.0; n];
    for &s in a {
        boundary[s] = true;
        potential[s] = 1.0;
    }
    for &s in b {
        boundary[s] = true;
    }
    let in_a = {
        let mut v = vec![false; n];
        for &s in a {
            v[s] = true;
        }
        v
    };
    // Right-hand side for interior states: one-step flow into the source.
    let rhs: Vec<f64> = (0..n)
        .map(|s| {
            if boundary[s] {
                return 0.0;
            }
            (0..space.site_count())
                .map(|site| {
                    let t = s ^ (1 << site);
                    if in_a[t] {
                        kernel.flip_prob(s, site)
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    let absorbing: Vec<usize> = (0..n).filter(|&s| boundary[s]).collect();
    let interior_solution = solve_absorbing(space, params, &absorbing, &rhs)?;
    for s in 0..n {
        if !boundary[s] {
            potential[s] = interior_solution[s];
        }
    }
    let mu = space.gibbs(params);
    let mut dirichlet = 0.0;
    for state in 0..n {
        for site in 0..space.site_count() {
            let other = state ^ (1 << site);
            if other < state {
                continue;
            }
            let diff = potential[state] - potential[other];
            if diff != 0.0 {
                dirichlet += mu[state] * kernel.flip_prob(state, site) * diff * diff;
            }
        }
    }
    Ok(CapacityResult {
        capacity: dirichlet,
        potential,
    })
}

/// Solves `(I - Q) x = rhs` where `Q` is the transition matrix restricted
/// to the complement of the absorbing set; entries of `x` at absorbing
/// states are zero.
fn solve_absorbing(
    space: &StateSpace,
    params: &ModelParams,
    absorbing: &[usize],
    rhs: &[f64],
) -> Result<Vec<f64>, ExactError> {
    let n = space.state_count();
    let kernel = Kernel::new(space, params);
    let mut is_absorbing = vec![false; n];
    for &s in absorbing {
        is_absorbing[s] = true;
    }
    if absorbing.len() == n {
        return Ok(vec![0.0; n]);
    }
    if space.side() == 2 {
        // Dense direct solve.
        let free: Vec<usize> = (0..n).filter(|&s| !is_absorbing[s]).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &s) in free.iter().enumerate() {
            index[s] = i;
        }
        let m = free.len();
        let mut a = DMatrix::<f64>::identity(m, m);
        for (i, &s) in free.iter().enumerate() {
            a[(i, i)] -= kernel.hold(s);
            for site in 0..space.site_count() {
                let t = s ^ (1 << site);
                if index[t] != usize::MAX {
                    a[(i, index[t])] -= kernel.flip_prob(s, site);
                }
            }
        }
        let b = DVector::from_iterator(m, free.iter().map(|&s| rhs[s]));
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| ExactError::SolverFailed("singular absorbing system".into()))?;
        let mut out = vec![0.0; n];
        for (i, &s) in free.iter().enumerate() {
            out[s] = x[i];
        }
        return Ok(out);
    }

    // Matrix-free conjugate gradient on the symmetrized operator
    // W = I - S, S_xy = sqrt(P(x,y) P(y,x)), S_xx = P(x,x):
    // solve W y = D^{1/2} rhs and report x = D^{-1/2} y.
    let beta = params.beta();
    let h_min = (0..n)
        .map(|s| space.energy(s, params))
        .fold(f64::INFINITY, f64::min);
    let half_weight: Vec<f64> = (0..n)
        .map(|s| (-0.5 * beta * (space.energy(s, params) - h_min)).exp())
        .collect();
    let hold: Vec<f64> = (0..n).into_par_iter().map(|s| kernel.hold(s)).collect();
    let n_sites = space.site_count();
    let apply = |x: &[f64], y: &mut [f64]| {
        y.par_iter_mut().enumerate().for_each(|(s, out)| {
            if is_absorbing[s] {
                *out = x[s];
                return;
            }
            let mut acc = (1.0 - hold[s]) * x[s];
            for site in 0..n_sites {
                let t = s ^ (1 << site);
                if !is_absorbing[t] {
                    acc -= kernel.sym_prob(s, site) * x[t];
                }
            }
            *out = acc;
        });
    };
    let b: Vec<f64> = (0..n)
        .map(|s| if is_absorbing[s] { 0.0 } else { rhs[s] * half_weight[s] })
        .collect();
    let diag: Vec<f64> = (0..n)
        .map(|s| if is_absorbing[s] { 1.0 } else { 1.0 - hold[s] })
        .collect();
    let y = conjugate_gradient(apply, &b, &diag, 1e-13, 500_000)?;
    Ok((0..n)
        .map(|s| if is_absorbing[s] { 0.0 } else { y[s] / half_weight[s] })
        .collect())
}

/// Preconditioned conjugate gradient with a Jacobi preconditioner.
fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    diag: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, ExactError> {
    let n = b.len();
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    let norm_b = dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rel_tol * norm_b {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(ExactError::SolverFailed(format!(
        "conjugate gradient did not reach {rel_tol} in {max_iter} iterations"
    )))
}

/// Bottleneck (widest-path) search: the minimum over paths of the maximal
/// energy along the path, endpoints included. Restricted to states accepted
/// by the filter.
pub fn bottleneck_heights(
    space: &StateSpace,
    params: &ModelParams,
    from: usize,
    allow: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let n = space.state_count();
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap: std::collections::BinaryHeap<(std::cmp::Reverse<ordered::F64>, usize)> =
        std::collections::BinaryHeap::new();
    if !allow(from) {
        return best;
    }
    best[from] = space.energy(from, params);
    heap.push((std::cmp::Reverse(ordered::F64(best[from])), from));
    while let Some((std::cmp::Reverse(ordered::F64(height)), state)) = heap.pop() {
        if done[state] {
            continue;
        }
        done[state] = true;
        for site in 0..space.site_count() {
            let t = state ^ (1 << site);
            if done[t] || !allow(t) {
                continue;
            }
            let through = height.max(space.energy(t, params));
            if through < best[t] {
                best[t] = through;
                heap.push((std::cmp::Reverse(ordered::F64(through)), t));
            }
        }
    }
    best
}

mod ordered {
    /// Total-order wrapper for energy keys in the heap.
    #[derive(PartialEq, Clone, Copy)]
    pub struct F64(pub f64);
    impl Eq for F64 {}
    impl PartialOrd for F64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for F64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}

/// Communication height between two states.
pub fn communication_height(
    space: &StateSpace,
    params: &ModelParams,
    from: usize,
    to: usize,
) -> f64 {
    bottleneck_heights(space, params, from, |_| true)[to]
}

/// Stability level of a state: the barrier to the set of strictly lower
/// states; `None` encodes infinity (ground states).
pub fn stability_level(space: &StateSpace, params: &ModelParams, state: usize) -> Option<f64> {
    let h0 = space.energy(state, params);
    let heights = bottleneck_heights(space, params, state, |_| true);
    let barrier = (0..space.state_count())
        .filter(|&s| space.energy(s, params) < h0)
        .map(|s| heights[s])
        .fold(f64::INFINITY, f64::min);
    barrier.is_finite().then_some(barrier - h0)
}

/// Stability levels for every state at once, by sweeping the energy
/// filtration with a union-find structure. Infinite levels (ground states)
/// come out as `f64::INFINITY`.
pub fn stability_levels_all(space: &StateSpace, params: &ModelParams) -> Vec<f64> {
    let n = space.state_count();
    let mut order: Vec<usize> = (0..n).collect();
    let energies: Vec<f64> = (0..n).map(|s| space.energy(s, params)).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));

    let mut parent: Vec<usize> = (0..n).collect();
    let mut min_h = energies.clone();
    // Unresolved members per root, merged small-to-large.
    let mut pending: Vec<Vec<(f64, usize)>> = (0..n).map(|_| Vec::new()).collect();
    let mut level = vec![f64::INFINITY; n];
    let mut active = vec![false; n];

    fn find(parent: &mut [usize], mut s: usize) -> usize {
        while parent[s] != s {
            parent[s] = parent[parent[s]];
            s = parent[s];
        }
        s
    }

    let mut i = 0;
    while i < n {
        // One batch of equal energy.
        let e = energies[order[i]];
        let mut j = i;
        while j < n && energies[order[j]] == e {
            let s = order[j];
            active[s] = true;
            pending[s].push((energies[s], s));
            j += 1;
        }
        for k in i..j {
            let s = order[k];
            for site in 0..space.site_count() {
                let t = s ^ (1 << site);
                if !active[t] {
                    continue;
                }
                let (ra, rb) = (find(&mut parent, s), find(&mut parent, t));
                if ra == rb {
                    continue;
                }
                let (big, small) = if pending[ra].len() >= pending[rb].len() {
                    (ra, rb)
                } else {
                    (rb, ra)
                };
                parent[small] = big;
                let moved = std::mem::take(&mut pending[small]);
                pending[big].extend(moved);
                min_h[big] = min_h[big].min(min_h[small]);
            }
        }
        // Resolve members now connected to something strictly lower.
        for k in i..j {
            let root = find(&mut parent, order[k]);
            let floor = min_h[root];
            pending[root].retain(|&(h_s, s)| {
                if h_s > floor {
                    level[s] = e - h_s;
                    false
                } else {
                    true
                }
            });
        }
        i = j;
    }
    level
}

/// Spectral gap of the chain, from a dense symmetric eigensolve. Only the
/// 256-state torus is supported.
pub fn spectral_gap(space: &StateSpace, params: &ModelParams) -> Result<f64, ExactError> {
    if space.side() != 2 {
        return Err(ExactError::UnsupportedSide(space.side()));
    }
    let n = space.state_count();
    let kernel = Kernel::new(space, params);
    let mut s = DMatrix::<f64>::zeros(n, n);
    for state in 0..n {
        s[(state, state)] = kernel.hold(state);
        for site in 0..space.site_count() {
            let t = state ^ (1 << site);
            s[(state, t)] = kernel.sym_prob(state, site);
        }
    }
    let mut eigen: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigen.sort_by(|a, b| b.total_cmp(a));
    Ok(1.0 - eigen[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space2() -> StateSpace {
        StateSpace::new(2).unwrap()
    }

    fn params(j: f64, h: f64, beta: f64) -> ModelParams {
        ModelParams::new(j, h, beta)
    }

    #[test]
    fn rejects_unsupported_side() {
        assert!(matches!(StateSpace::new(4), Err(ExactError::UnsupportedSide(4))));
        assert!(matches!(StateSpace::new(1), Err(ExactError::UnsupportedSide(1))));
    }

    #[test]
    fn energy_table_matches_spin_configuration() {
        let space = space2();
        let topo = LatticeTopology::new(2).unwrap();
        for state in 0..space.state_count() {
            let spins: Vec<i8> = (0..8).map(|i| if (state >> i) & 1 == 1 { 1 } else { -1 }).collect();
            let config = crate::lattice::SpinConfiguration::from_spins(spins, &topo);
            let level = crate::energy::energy_level(&config, &topo);
            assert_eq!(space.level(state), level);
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let space = space2();
        let p = params(1.0, 0.5, 1.3);
        for state in 0..space.state_count() {
            let total: f64 = (0..space.site_count())
                .map(|site| space.flip_probability(&p, state, site))
                .sum::<f64>()
                + space.hold_probability(&p, state);
            assert_relative_eq!(total, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn balance_holds_and_ground_state_is_all_plus() {
        let space = space2();
        for (j, h, beta) in [(1.0, 0.5, 1.0), (2.0, 0.25, 2.0), (1.5, 0.9, 0.7)] {
            let report = gibbs_and_balance_check(&space, &params(j, h, beta));
            assert!(report.max_relative_violation <= 1e-12);
            assert!(report.ground_is_all_plus);
        }
    }

    #[test]
    fn all_minus_minimizes_low_plus_sector() {
        // Among states with fewer than half the spins up, all-minus is the
        // energy minimizer.
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        let threshold = space.site_count() as i64 / 2;
        let best = (0..space.state_count())
            .filter(|&s| space.level(s).n_plus < threshold)
            .min_by(|&a, &b| space.energy(a, &p).total_cmp(&space.energy(b, &p)))
            .unwrap();
        assert_eq!(best, space.all_minus());
    }

    #[test]
    fn mean_hitting_rejects_same_state() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        assert!(matches!(
            exact_mean_hitting(&space, &p, 3, 3),
            Err(ExactError::SameState)
        ));
    }

    #[test]
    fn mean_hitting_increases_in_beta_once_barriers_dominate() {
        // Below beta of order one the chain is close to a free walk and the
        // hitting time is set by cover-time effects; from there on the
        // uphill moves dominate and the mean grows.
        let space = space2();
        let mut last = 0.0;
        for beta in [1.0, 1.5, 2.0, 2.5] {
            let p = params(1.0, 0.5, beta);
            let m = exact_mean_hitting(&space, &p, space.all_minus(), space.all_plus()).unwrap();
            assert!(m > last, "beta {beta}: {m} vs {last}");
            last = m;
        }
    }

    #[test]
    fn hitting_residual_is_tiny() {
        let space = space2();
        let p = params(1.0, 0.5, 2.0);
        let target = space.all_plus();
        let ones = vec![1.0; space.state_count()];
        let m = solve_absorbing(&space, &p, &[target], &ones).unwrap();
        // Check (I - Q) m = 1 row by row.
        for state in 0..space.state_count() {
            if state == target {
                continue;
            }
            let mut lhs = m[state] * (1.0 - space.hold_probability(&p, state));
            for site in 0..space.site_count() {
                let t = state ^ (1 << site);
                if t != target {
                    lhs -= space.flip_probability(&p, state, site) * m[t];
                }
            }
            assert!((lhs - 1.0).abs() <= 1e-10 * m[state].max(1.0));
        }
    }

    #[test]
    fn capacity_is_symmetric_and_links_to_hitting() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        let minus = space.all_minus();
        let plus = space.all_plus();
        let fwd = capacity(&space, &p, &[minus], &[plus]).unwrap();
        let bwd = capacity(&space, &p, &[plus], &[minus]).unwrap();
        let rel = (fwd.capacity - bwd.capacity).abs() / fwd.capacity;
        assert!(rel <= 1e-10, "relative asymmetry {rel}");

        // Mean hitting equals the mu-mass of the equilibrium potential over
        // the capacity.
        let mu = space.gibbs(&p);
        let mass: f64 = (0..space.state_count()).map(|s| mu[s] * fwd.potential[s]).sum();
        let via_capacity = mass / fwd.capacity;
        let direct = exact_mean_hitting(&space, &p, minus, plus).unwrap();
        assert_relative_eq!(via_capacity, direct, max_relative = 1e-8);
    }

    #[test]
    fn capacity_with_everything_absorbing() {
        // When A and B cover the whole space the potential is forced and
        // the capacity is the total conductance across the cut.
        let space = space2();
        let p = params(1.0, 0.5, 0.8);
        let even = |s: &usize| s.count_ones() % 2 == 0;
        let a: Vec<usize> = (0..space.state_count()).filter(even).collect();
        let b: Vec<usize> = (0..space.state_count()).filter(|s| !even(s)).collect();
        let r = capacity(&space, &p, &a, &b).unwrap();
        let mu = space.gibbs(&p);
        let kernel = Kernel::new(&space, &p);
        let mut conductance = 0.0;
        for state in (0..space.state_count()).filter(even) {
            for site in 0..space.site_count() {
                // Every flip changes the popcount parity, crossing the cut.
                conductance += mu[state] * kernel.flip_prob(state, site);
            }
        }
        assert_relative_eq!(r.capacity, conductance, max_relative = 1e-12);
    }

    #[test]
    fn capacity_monotone_in_source_set() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        let plus = space.all_plus();
        let small = capacity(&space, &p, &[0], &[plus]).unwrap().capacity;
        let grown = capacity(&space, &p, &[0, 1, 2], &[plus]).unwrap().capacity;
        assert!(grown >= small - 1e-15);
    }

    #[test]
    fn capacity_rejects_bad_sets() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        assert!(matches!(capacity(&space, &p, &[], &[1]), Err(ExactError::BadCapacitySets)));
        assert!(matches!(
            capacity(&space, &p, &[1, 2], &[2]),
            Err(ExactError::BadCapacitySets)
        ));
    }

    #[test]
    fn communication_height_basics() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        // Phi(s, s) = H(s).
        for s in [0usize, 7, 99, 255] {
            assert_relative_eq!(communication_height(&space, &p, s, s), space.energy(s, &p));
        }
        // Symmetry.
        for (a, b) in [(0usize, 255usize), (3, 96), (17, 200)] {
            assert_relative_eq!(
                communication_height(&space, &p, a, b),
                communication_height(&space, &p, b, a),
                epsilon = 1e-12
            );
        }
        let phi = communication_height(&space, &p, space.all_minus(), space.all_plus());
        assert!(phi >= space.energy(space.all_minus(), &p));
        assert!(phi >= space.energy(space.all_plus(), &p));
    }

    #[test]
    fn ground_state_has_infinite_stability() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        assert_eq!(stability_level(&space, &p, space.all_plus()), None);
        let v = stability_level(&space, &p, space.all_minus()).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn filtration_matches_per_state_search() {
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        let all = stability_levels_all(&space, &p);
        for s in 0..space.state_count() {
            match stability_level(&space, &p, s) {
                Some(v) => assert_relative_eq!(all[s], v, epsilon = 1e-12),
                None => assert!(all[s].is_infinite(), "state {s}"),
            }
        }
    }

    #[test]
    fn bottleneck_agrees_with_exhaustive_simple_paths() {
        use rand::prelude::*;
        let space = space2();
        let p = params(1.0, 0.5, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _trial in 0..20 {
            // Collect a small connected induced subgraph by a random walk.
            let mut subset = std::collections::BTreeSet::new();
            let mut cur = rng.random_range(0..space.state_count());
            subset.insert(cur);
            while subset.len() < 10 {
                let site = rng.random_range(0..space.site_count());
                cur ^= 1 << site;
                subset.insert(cur);
            }
            let states: Vec<usize> = subset.iter().copied().collect();
            let from = states[0];
            let heights = bottleneck_heights(&space, &p, from, |s| subset.contains(&s));
            for &to in &states {
                let brute = brute_force_min_max(&space, &p, &states, from, to);
                match brute {
                    Some(v) => assert_relative_eq!(heights[to], v, epsilon = 1e-12),
                    None => assert!(heights[to].is_infinite()),
                }
            }
        }
    }

    /// Min over all simple paths inside `states` of the max energy along
    /// the path; test oracle only.
    fn brute_force_min_max(
        space: &StateSpace,
        p: &ModelParams,
        states: &[usize],
        from: usize,
        to: usize,
    ) -> Option<f64> {
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            space: &StateSpace,
            p: &ModelParams,
            states: &[usize],
            visited: &mut Vec<usize>,
            cur: usize,
            to: usize,
            height: f64,
            best: &mut Option<f64>,
        ) {
            let height = height.max(space.energy(cur, p));
            if cur == to {
                *best = Some(best.map_or(height, |b: f64| b.min(height)));
                return;
            }
            for site in 0..space.site_count() {
                let t = cur ^ (1 << site);
                if states.contains(&t) && !visited.contains(&t) {
                    visited.push(t);
                    dfs(space, p, states, visited, t, to, height, best);
                    visited.pop();
                }
            }
        }
        let mut best = None;
        let mut visited = vec![from];
        dfs(space, p, states, &mut visited, from, to, f64::NEG_INFINITY, &mut best);
        best
    }

    #[test]
    fn spectral_gap_is_positive_and_shrinks_with_beta() {
        let space = space2();
        let g1 = spectral_gap(&space, &params(1.0, 0.5, 0.5)).unwrap();
        let g2 = spectral_gap(&space, &params(1.0, 0.5, 1.5)).unwrap();
        assert!(g1 > 0.0 && g2 > 0.0);
        assert!(g2 < g1);
        assert!(spectral_gap(&StateSpace::new(3).unwrap(), &params(1.0, 0.5, 0.5)).is_err());
    }

    #[test]
    fn l3_space_builds_and_solves() {
        let space = StateSpace::new(3).unwrap();
        assert_eq!(space.state_count(), 1 << 18);
        let p = params(1.0, 0.5, 0.4);
        let m = exact_mean_hitting(&space, &p, space.all_minus(), space.all_plus()).unwrap();
        assert!(m.is_finite() && m > space.site_count() as f64);
    }
}

//! Independent association rule evaluator.
//!
//! Keeps its own association state, enumerates every placement a rule could
//! produce, keeps the ones whose resulting state passes a from-scratch
//! feasibility check, and picks by the priority rules.

use greenran::assignment::{
    apply, plan, processing_order, CellCapacity, CellLoadView, Move, Outcome, Serving, SignalMap,
};
use greenran::Algorithm;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FLOOR_DB: f64 = -2.0;
pub const N_SECTORS: usize = 3;

#[derive(Debug, Clone)]
pub struct Instance {
    pub mbs_cap: u32,
    pub scbs_cap: Vec<u32>,
    pub backhaul_cap: u32,
    pub backhaul_sector: Vec<usize>,
    pub demand: Vec<u32>,
    pub mbs_sector: Vec<usize>,
    pub mbs_snr: Vec<f64>,
    /// `scbs_snr[user][k]` for station `k + 1`.
    pub scbs_snr: Vec<Vec<f64>>,
    pub battery_ok: Vec<bool>,
}

pub type State = Vec<Option<Serving>>;

impl Instance {
    pub fn n_users(&self) -> usize {
        self.demand.len()
    }

    pub fn n_scbs(&self) -> usize {
        self.scbs_cap.len()
    }

    pub fn snr(&self, user: usize, s: Serving) -> f64 {
        match s {
            Serving::Mbs { .. } => self.mbs_snr[user],
            Serving::Scbs { bs_id } => self.scbs_snr[user][bs_id - 1],
        }
    }

    pub fn feasible(&self, state: &State) -> bool {
        let mut mbs = [0u32; N_SECTORS];
        let mut backhaul = [0u32; N_SECTORS];
        let mut scbs = vec![0u32; self.n_scbs()];
        for (u, s) in state.iter().enumerate() {
            let Some(s) = *s else { continue };
            if self.snr(u, s) < FLOOR_DB {
                return false;
            }
            let d = self.demand[u];
            match s {
                Serving::Mbs { sector } => {
                    if sector != self.mbs_sector[u] {
                        return false;
                    }
                    mbs[sector] += d;
                    backhaul[sector] += d;
                }
                Serving::Scbs { bs_id } => {
                    if !self.battery_ok[bs_id - 1] {
                        return false;
                    }
                    scbs[bs_id - 1] += d;
                    backhaul[self.backhaul_sector[bs_id - 1]] += d;
                }
            }
        }
        mbs.iter().all(|&x| x <= self.mbs_cap)
            && backhaul.iter().all(|&x| x <= self.backhaul_cap)
            && scbs.iter().zip(&self.scbs_cap).all(|(x, c)| x <= c)
    }

    pub fn with(&self, state: &State, changes: &[(usize, Serving)]) -> State {
        let mut next = state.clone();
        for &(u, s) in changes {
            next[u] = Some(s);
        }
        next
    }

    /// Position of `bs_id` in the user's strength order (higher SNR first,
    /// lower id on ties).
    pub fn rank(&self, user: usize, bs_id: usize) -> usize {
        let mine = self.scbs_snr[user][bs_id - 1];
        (1..=self.n_scbs())
            .filter(|&b| {
                let s = self.scbs_snr[user][b - 1];
                s > mine || (s == mine && b < bs_id)
            })
            .count()
    }

    pub fn view(&self, state: &State, realloc_depth: u32) -> CellLoadView {
        let capacity = CellCapacity {
            mbs_rbs_per_sector: vec![self.mbs_cap; N_SECTORS],
            scbs_rbs: self.scbs_cap.clone(),
            backhaul_rbs_per_sector: self.backhaul_cap,
            scbs_backhaul_sector: self.backhaul_sector.clone(),
        };
        let mut signal = SignalMap::new(self.n_users(), self.n_scbs());
        for u in 0..self.n_users() {
            signal.set_mbs(u, self.mbs_sector[u], self.mbs_snr[u]);
            for b in 1..=self.n_scbs() {
                signal.set_scbs(u, b, self.scbs_snr[u][b - 1]);
            }
        }
        let mut view = CellLoadView::new(capacity, self.demand.clone(), signal, FLOOR_DB);
        view.realloc_depth = realloc_depth;
        for (k, &ok) in self.battery_ok.iter().enumerate() {
            view.set_battery_ok(k + 1, ok);
        }
        for (u, s) in state.iter().enumerate() {
            if let Some(s) = *s {
                view.attach(u, s);
            }
        }
        view
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub outcome: Outcome,
    pub moves: Vec<Move>,
}

pub fn oracle_proposed(inst: &Instance, state: &State, user: usize, realloc_depth: u32) -> Choice {
    let direct: Vec<usize> = (1..=inst.n_scbs())
        .filter(|&b| inst.feasible(&inst.with(state, &[(user, Serving::Scbs { bs_id: b })])))
        .collect();
    if let Some(&b) = direct.iter().min_by_key(|&&b| inst.rank(user, b)) {
        return Choice {
            outcome: Outcome::ServedByScbs(b),
            moves: Vec::new(),
        };
    }
    if realloc_depth >= 1 {
        let mut options = Vec::new();
        for (moved, s) in state.iter().enumerate() {
            let Some(Serving::Scbs { bs_id: from }) = *s else { continue };
            for to in (1..=inst.n_scbs()).filter(|&b| b != from) {
                let next = inst.with(
                    state,
                    &[(moved, Serving::Scbs { bs_id: to }), (user, Serving::Scbs { bs_id: from })],
                );
                if inst.feasible(&next) {
                    options.push((inst.rank(user, from), moved, inst.rank(moved, to), from, to));
                }
            }
        }
        if let Some(&(_, moved, _, from, to)) = options.iter().min() {
            return Choice {
                outcome: Outcome::ServedByScbs(from),
                moves: vec![Move {
                    user_id: moved,
                    from_bs: from,
                    to_bs: to,
                }],
            };
        }
    }
    let sector = inst.mbs_sector[user];
    if inst.feasible(&inst.with(state, &[(user, Serving::Mbs { sector })])) {
        return Choice {
            outcome: Outcome::ServedByMbs(sector),
            moves: Vec::new(),
        };
    }
    Choice {
        outcome: Outcome::Outage,
        moves: Vec::new(),
    }
}

pub fn oracle_reference(inst: &Instance, state: &State, user: usize) -> Choice {
    let mut options: Vec<(f64, usize, Serving)> = (1..=inst.n_scbs())
        .map(|b| Serving::Scbs { bs_id: b })
        .chain(std::iter::once(Serving::Mbs {
            sector: inst.mbs_sector[user],
        }))
        .filter(|&s| inst.feasible(&inst.with(state, &[(user, s)])))
        .map(|s| (inst.snr(user, s), s.bs_id(), s))
        .collect();
    options.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let outcome = match options.first() {
        Some(&(_, _, Serving::Scbs { bs_id })) => Outcome::ServedByScbs(bs_id),
        Some(&(_, _, Serving::Mbs { sector })) => Outcome::ServedByMbs(sector),
        None => Outcome::Outage,
    };
    Choice {
        outcome,
        moves: Vec::new(),
    }
}

pub fn oracle_apply(state: &mut State, user: usize, c: &Choice) {
    for m in &c.moves {
        state[m.user_id] = Some(Serving::Scbs { bs_id: m.to_bs });
    }
    state[user] = c.outcome.serving();
}

/// Assigns every user from an empty network with both the library and the
/// oracle, comparing each decision. Returns the final association.
pub fn replay(inst: &Instance, alg: Algorithm, realloc_depth: u32) -> State {
    let mut state: State = vec![None; inst.n_users()];
    let mut view = inst.view(&state, realloc_depth);
    let mut order: Vec<usize> = (0..inst.n_users()).collect();
    processing_order(&view, &mut order);
    for u in order {
        let expected = match alg {
            Algorithm::Proposed => oracle_proposed(inst, &state, u, realloc_depth),
            Algorithm::Reference => oracle_reference(inst, &state, u),
        };
        let got = plan(&view, u, alg);
        assert_eq!(
            (got.outcome, &got.moves),
            (expected.outcome, &expected.moves),
            "{alg} user {u} in {inst:?} from {state:?}"
        );
        let want_rbs = if got.outcome == Outcome::Outage { 0 } else { inst.demand[u] };
        assert_eq!(got.rbs, want_rbs);
        apply(&mut view, &got);
        oracle_apply(&mut state, u, &expected);
        assert!(inst.feasible(&state));
        view.check_invariants().unwrap();
    }
    state
}

pub const LEVELS_DB: [f64; 3] = [-5.0, 2.0, 9.0];

/// Every SNR pattern over three levels for three users, two small cells and
/// the MBS, with every demand mix and two battery patterns.
pub fn exhaustive_instances() -> impl Iterator<Item = Instance> {
    let n_links = 9u32;
    (0..3usize.pow(n_links)).flat_map(move |code| {
        let mut c = code;
        let mut digit = || {
            let d = c % 3;
            c /= 3;
            LEVELS_DB[d]
        };
        let mut mbs_snr = Vec::new();
        let mut scbs_snr = Vec::new();
        for _ in 0..3 {
            mbs_snr.push(digit());
            scbs_snr.push(vec![digit(), digit()]);
        }
        (0..8u32).flat_map(move |dmask| {
            let mbs_snr = mbs_snr.clone();
            let scbs_snr = scbs_snr.clone();
            [true, false].into_iter().map(move |second_ok| Instance {
                mbs_cap: 13,
                scbs_cap: vec![13, 13],
                backhaul_cap: 23,
                backhaul_sector: vec![0, 1],
                demand: (0..3).map(|k| if dmask >> k & 1 == 1 { 10 } else { 3 }).collect(),
                mbs_sector: vec![0, 0, 1],
                mbs_snr: mbs_snr.clone(),
                scbs_snr: scbs_snr.clone(),
                battery_ok: vec![true, second_ok],
            })
        })
    })
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n_scbs = rng.random_range(1..=3);
    let n_users = rng.random_range(1..=5);
    let snr = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.25) {
            rng.random_range(-10.0..-2.0)
        } else {
            // coarse grid so ties occur
            f64::from(rng.random_range(-4..=24)) * 0.5
        }
    };
    Instance {
        mbs_cap: rng.random_range(3..=20),
        scbs_cap: (0..n_scbs).map(|_| rng.random_range(3..=20)).collect(),
        backhaul_cap: rng.random_range(6..=40),
        backhaul_sector: (0..n_scbs).map(|_| rng.random_range(0..N_SECTORS)).collect(),
        demand: (0..n_users).map(|_| if rng.random_bool(0.5) { 10 } else { 3 }).collect(),
        mbs_sector: (0..n_users).map(|_| rng.random_range(0..N_SECTORS)).collect(),
        mbs_snr: (0..n_users).map(|_| snr(rng)).collect(),
        scbs_snr: (0..n_users).map(|_| (0..n_scbs).map(|_| snr(rng)).collect()).collect(),
        battery_ok: (0..n_scbs).map(|_| rng.random_bool(0.8)).collect(),
    }
}


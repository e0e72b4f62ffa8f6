//! User association: the RES-aware procedure and the best-server baseline.
//!
//! The RES-aware procedure places a user on the strongest small cell that
//! has spectrum, backhaul headroom and a healthy battery. Failing that it
//! tries to free room on one of the user's small cells by moving a single
//! already-associated user to another small cell, and only then falls back
//! to the macro station.
//!
//! Every procedure is split into a read-only `plan_*` step and [`apply`], so
//! decisions can be inspected before they mutate the [`CellLoadView`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::radio::{self, LinkBudgetParams};
use crate::scenario::{NetworkLayout, Point, MBS_ID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Green-first association with reallocation and macro fallback.
    Proposed,
    /// Strongest feasible server, no green preference.
    Reference,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::Reference => "reference",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Algorithm::Proposed),
            "reference" => Ok(Algorithm::Reference),
            other => Err(format!("unknown algorithm `{other}` (expected proposed|reference)")),
        }
    }
}

/// Where a user is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Serving {
    Mbs { sector: usize },
    Scbs { bs_id: usize },
}

impl Serving {
    pub fn bs_id(&self) -> usize {
        match *self {
            Serving::Mbs { .. } => MBS_ID,
            Serving::Scbs { bs_id } => bs_id,
        }
    }

    pub fn sector(&self) -> usize {
        match *self {
            Serving::Mbs { sector } => sector,
            Serving::Scbs { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ServedByScbs(usize),
    ServedByMbs(usize),
    Outage,
}

impl Outcome {
    pub fn serving(&self) -> Option<Serving> {
        match *self {
            Outcome::ServedByScbs(bs_id) => Some(Serving::Scbs { bs_id }),
            Outcome::ServedByMbs(sector) => Some(Serving::Mbs { sector }),
            Outcome::Outage => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::ServedByScbs(_) => "scbs",
            Outcome::ServedByMbs(_) => "mbs",
            Outcome::Outage => "outage",
        }
    }
}

/// One reallocation move applied to make room.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub user_id: usize,
    pub from_bs: usize,
    pub to_bs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentDecision {
    pub user_id: usize,
    pub outcome: Outcome,
    pub rbs: u32,
    pub moves: Vec<Move>,
}

impl AssignmentDecision {
    fn outage(user_id: usize) -> Self {
        Self {
            user_id,
            outcome: Outcome::Outage,
            rbs: 0,
            moves: Vec::new(),
        }
    }
}

/// Per-user single-RB SNR towards every station.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMap {
    n_scbs: usize,
    mbs_sector: Vec<usize>,
    mbs_snr_db: Vec<f64>,
    scbs_snr_db: Vec<f64>,
}

impl SignalMap {
    /// All links infeasible, every user in MBS sector 0.
    pub fn new(n_users: usize, n_scbs: usize) -> Self {
        Self {
            n_scbs,
            mbs_sector: vec![0; n_users],
            mbs_snr_db: vec![f64::NEG_INFINITY; n_users],
            scbs_snr_db: vec![f64::NEG_INFINITY; n_users * n_scbs],
        }
    }

    /// Measures every user position against `layout`. Links longer than the
    /// station's `cutoff_m` are marked infeasible without evaluation.
    pub fn measure(
        layout: &NetworkLayout,
        positions: &[Point],
        h_ue: f64,
        link: &LinkBudgetParams,
        cutoff_m: &[f64],
    ) -> Self {
        let mut map = Self::new(positions.len(), layout.n_scbs());
        map.update(layout, positions, h_ue, link, cutoff_m);
        map
    }

    pub fn update(
        &mut self,
        layout: &NetworkLayout,
        positions: &[Point],
        h_ue: f64,
        link: &LinkBudgetParams,
        cutoff_m: &[f64],
    ) {
        let mbs = layout.mbs();
        for (u, p) in positions.iter().enumerate() {
            let d = mbs.position.distance(p);
            self.mbs_sector[u] = mbs.sector_of(p);
            self.mbs_snr_db[u] = if d <= cutoff_m[MBS_ID] {
                radio::rb_snr_db(mbs, link, d, h_ue)
            } else {
                f64::NEG_INFINITY
            };
            for s in layout.scbs() {
                let d = s.position.distance(p);
                self.scbs_snr_db[u * self.n_scbs + s.id - 1] = if d <= cutoff_m[s.id] {
                    radio::rb_snr_db(s, link, d, h_ue)
                } else {
                    f64::NEG_INFINITY
                };
            }
        }
    }

    pub fn n_users(&self) -> usize {
        self.mbs_snr_db.len()
    }

    pub fn n_scbs(&self) -> usize {
        self.n_scbs
    }

    pub fn mbs_sector(&self, user: usize) -> usize {
        self.mbs_sector[user]
    }

    pub fn mbs_snr(&self, user: usize) -> f64 {
        self.mbs_snr_db[user]
    }

    pub fn scbs_snr(&self, user: usize, bs_id: usize) -> f64 {
        self.scbs_snr_db[user * self.n_scbs + bs_id - 1]
    }

    pub fn set_mbs(&mut self, user: usize, sector: usize, snr_db: f64) {
        self.mbs_sector[user] = sector;
        self.mbs_snr_db[user] = snr_db;
    }

    pub fn set_scbs(&mut self, user: usize, bs_id: usize, snr_db: f64) {
        self.scbs_snr_db[user * self.n_scbs + bs_id - 1] = snr_db;
    }

    /// SNR of the link behind `serving`.
    pub fn serving_snr(&self, user: usize, serving: Serving) -> f64 {
        match serving {
            Serving::Mbs { .. } => self.mbs_snr(user),
            Serving::Scbs { bs_id } => self.scbs_snr(user, bs_id),
        }
    }
}

/// RB and backhaul budgets of every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCapacity {
    pub mbs_rbs_per_sector: Vec<u32>,
    /// Indexed by `bs_id - 1`.
    pub scbs_rbs: Vec<u32>,
    pub backhaul_rbs_per_sector: u32,
    /// MBS sector carrying each SCBS's backhaul, indexed by `bs_id - 1`.
    pub scbs_backhaul_sector: Vec<usize>,
}

impl CellCapacity {
    pub fn from_layout(layout: &NetworkLayout) -> Self {
        let mbs = layout.mbs();
        Self {
            mbs_rbs_per_sector: vec![mbs.n_rb_per_sector; mbs.n_sectors as usize],
            scbs_rbs: layout.scbs().iter().map(|s| s.n_rb_per_sector).collect(),
            backhaul_rbs_per_sector: mbs.backhaul_rb_cap,
            scbs_backhaul_sector: layout.backhaul_sectors(),
        }
    }
}

/// Mutable association state plus the signal snapshot it is evaluated on.
#[derive(Debug, Clone)]
pub struct CellLoadView {
    pub min_snr_db: f64,
    /// Number of reallocation moves tried per assignment (0 or 1).
    pub realloc_depth: u32,
    capacity: CellCapacity,
    mbs_used: Vec<u32>,
    scbs_used: Vec<u32>,
    backhaul_used: Vec<u32>,
    battery_ok: Vec<bool>,
    demand: Vec<u32>,
    serving: Vec<Option<Serving>>,
    scbs_users: Vec<BTreeSet<usize>>,
    pub signal: SignalMap,
}

impl CellLoadView {
    pub fn new(capacity: CellCapacity, demand: Vec<u32>, signal: SignalMap, min_snr_db: f64) -> Self {
        let n_scbs = capacity.scbs_rbs.len();
        let n_sectors = capacity.mbs_rbs_per_sector.len();
        assert_eq!(signal.n_scbs(), n_scbs);
        assert_eq!(signal.n_users(), demand.len());
        assert_eq!(capacity.scbs_backhaul_sector.len(), n_scbs);
        Self {
            min_snr_db,
            realloc_depth: 1,
            mbs_used: vec![0; n_sectors],
            scbs_used: vec![0; n_scbs],
            backhaul_used: vec![0; n_sectors],
            battery_ok: vec![true; n_scbs],
            serving: vec![None; demand.len()],
            scbs_users: vec![BTreeSet::new(); n_scbs],
            demand,
            capacity,
            signal,
        }
    }

    pub fn n_users(&self) -> usize {
        self.demand.len()
    }

    pub fn n_scbs(&self) -> usize {
        self.scbs_used.len()
    }

    pub fn n_mbs_sectors(&self) -> usize {
        self.mbs_used.len()
    }

    pub fn capacity(&self) -> &CellCapacity {
        &self.capacity
    }

    pub fn demand(&self, user: usize) -> u32 {
        self.demand[user]
    }

    pub fn serving(&self, user: usize) -> Option<Serving> {
        self.serving[user]
    }

    pub fn battery_ok(&self, bs_id: usize) -> bool {
        self.battery_ok[bs_id - 1]
    }

    pub fn set_battery_ok(&mut self, bs_id: usize, ok: bool) {
        self.battery_ok[bs_id - 1] = ok;
    }

    pub fn scbs_free(&self, bs_id: usize) -> u32 {
        self.capacity.scbs_rbs[bs_id - 1] - self.scbs_used[bs_id - 1]
    }

    pub fn scbs_used(&self, bs_id: usize) -> u32 {
        self.scbs_used[bs_id - 1]
    }

    pub fn mbs_free(&self, sector: usize) -> u32 {
        self.capacity.mbs_rbs_per_sector[sector] - self.mbs_used[sector]
    }

    pub fn mbs_used(&self, sector: usize) -> u32 {
        self.mbs_used[sector]
    }

    pub fn backhaul_used(&self, sector: usize) -> u32 {
        self.backhaul_used[sector]
    }

    pub fn backhaul_headroom(&self, sector: usize) -> u32 {
        self.capacity
            .backhaul_rbs_per_sector
            .saturating_sub(self.backhaul_used[sector])
    }

    pub fn backhaul_sector(&self, bs_id: usize) -> usize {
        self.capacity.scbs_backhaul_sector[bs_id - 1]
    }

    /// Users attached to a small cell, ascending id.
    pub fn users_on(&self, bs_id: usize) -> impl Iterator<Item = usize> + '_ {
        self.scbs_users[bs_id - 1].iter().copied()
    }

    pub fn users_on_mbs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_users()).filter(|&u| matches!(self.serving[u], Some(Serving::Mbs { .. })))
    }

    pub fn served_count(&self) -> usize {
        self.serving.iter().filter(|s| s.is_some()).count()
    }

    pub fn outage_count(&self) -> usize {
        self.n_users() - self.served_count()
    }

    pub fn mbs_rbs(&self) -> u32 {
        self.mbs_used.iter().sum()
    }

    pub fn scbs_rbs(&self) -> u32 {
        self.scbs_used.iter().sum()
    }

    /// Whether small cell `bs_id` could take `user` as it stands.
    pub fn can_host_scbs(&self, user: usize, bs_id: usize) -> bool {
        let d = self.demand[user];
        self.signal.scbs_snr(user, bs_id) >= self.min_snr_db
            && self.battery_ok(bs_id)
            && self.scbs_free(bs_id) >= d
            && self.backhaul_headroom(self.backhaul_sector(bs_id)) >= d
    }

    /// The MBS sector that could take `user`, if any.
    pub fn can_host_mbs(&self, user: usize) -> Option<usize> {
        let d = self.demand[user];
        let sector = self.signal.mbs_sector(user);
        (self.signal.mbs_snr(user) >= self.min_snr_db
            && self.mbs_free(sector) >= d
            && self.backhaul_headroom(sector) >= d)
            .then_some(sector)
    }

    pub fn attach(&mut self, user: usize, serving: Serving) {
        assert!(self.serving[user].is_none(), "user {user} already served");
        let d = self.demand[user];
        match serving {
            Serving::Mbs { sector } => {
                self.mbs_used[sector] += d;
                self.backhaul_used[sector] += d;
            }
            Serving::Scbs { bs_id } => {
                self.scbs_used[bs_id - 1] += d;
                self.backhaul_used[self.capacity.scbs_backhaul_sector[bs_id - 1]] += d;
                self.scbs_users[bs_id - 1].insert(user);
            }
        }
        self.serving[user] = Some(serving);
    }

    pub fn detach(&mut self, user: usize) -> Option<Serving> {
        let serving = self.serving[user].take()?;
        let d = self.demand[user];
        match serving {
            Serving::Mbs { sector } => {
                self.mbs_used[sector] -= d;
                self.backhaul_used[sector] -= d;
            }
            Serving::Scbs { bs_id } => {
                self.scbs_used[bs_id - 1] -= d;
                self.backhaul_used[self.capacity.scbs_backhaul_sector[bs_id - 1]] -= d;
                self.scbs_users[bs_id - 1].remove(&user);
            }
        }
        Some(serving)
    }

    /// Checks capacity, backhaul, energy gating and ledger consistency.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut mbs = vec![0u32; self.n_mbs_sectors()];
        let mut scbs = vec![0u32; self.n_scbs()];
        let mut backhaul = vec![0u32; self.n_mbs_sectors()];
        for (u, s) in self.serving.iter().enumerate() {
            let d = self.demand[u];
            match *s {
                Some(Serving::Mbs { sector }) => {
                    mbs[sector] += d;
                    backhaul[sector] += d;
                }
                Some(Serving::Scbs { bs_id }) => {
                    if !self.battery_ok(bs_id) {
                        return Err(format!("user {u} on SCBS {bs_id} with depleted battery"));
                    }
                    if !self.scbs_users[bs_id - 1].contains(&u) {
                        return Err(format!("user {u} missing from SCBS {bs_id} roster"));
                    }
                    scbs[bs_id - 1] += d;
                    backhaul[self.backhaul_sector(bs_id)] += d;
                }
                None => {}
            }
        }
        if mbs != self.mbs_used || scbs != self.scbs_used || backhaul != self.backhaul_used {
            return Err("RB ledger out of sync with associations".into());
        }
        for (k, &used) in mbs.iter().enumerate() {
            if used > self.capacity.mbs_rbs_per_sector[k] {
                return Err(format!("MBS sector {k} carries {used} RBs"));
            }
            if backhaul[k] > self.capacity.backhaul_rbs_per_sector {
                return Err(format!("MBS sector {k} backhaul carries {} RBs", backhaul[k]));
            }
        }
        for (k, &used) in scbs.iter().enumerate() {
            if used > self.capacity.scbs_rbs[k] {
                return Err(format!("SCBS {} carries {used} RBs", k + 1));
            }
        }
        let rostered: usize = self.scbs_users.iter().map(BTreeSet::len).sum();
        let on_scbs = self
            .serving
            .iter()
            .filter(|s| matches!(s, Some(Serving::Scbs { .. })))
            .count();
        if rostered != on_scbs {
            return Err("SCBS rosters list users that are not attached".into());
        }
        Ok(())
    }
}

fn by_snr_desc(a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Small cells whose link to `user` meets the SNR floor, strongest first,
/// ties to the lower id.
pub fn candidate_scbs(view: &CellLoadView, user: usize) -> Vec<usize> {
    let mut c: Vec<(usize, f64)> = (1..=view.n_scbs())
        .map(|b| (b, view.signal.scbs_snr(user, b)))
        .filter(|&(_, snr)| snr >= view.min_snr_db)
        .collect();
    c.sort_by(|&a, &b| by_snr_desc(a, b));
    c.into_iter().map(|(b, _)| b).collect()
}

/// Plans the RES-aware association of an unserved user.
pub fn plan_user(view: &CellLoadView, user: usize) -> AssignmentDecision {
    debug_assert!(view.serving(user).is_none());
    let demand = view.demand(user);
    if let Some(bs) = candidate_scbs(view, user)
        .into_iter()
        .find(|&b| view.can_host_scbs(user, b))
    {
        return AssignmentDecision {
            user_id: user,
            outcome: Outcome::ServedByScbs(bs),
            rbs: demand,
            moves: Vec::new(),
        };
    }
    if let Some(decision) = plan_reallocation(view, user) {
        return decision;
    }
    match view.can_host_mbs(user) {
        Some(sector) => AssignmentDecision {
            user_id: user,
            outcome: Outcome::ServedByMbs(sector),
            rbs: demand,
            moves: Vec::new(),
        },
        None => AssignmentDecision::outage(user),
    }
}

/// Looks for a single move of an associated user between small cells that
/// frees enough room on one of `user`'s candidate cells.
pub fn plan_reallocation(view: &CellLoadView, user: usize) -> Option<AssignmentDecision> {
    if view.realloc_depth == 0 {
        return None;
    }
    let demand = view.demand(user);
    for cell in candidate_scbs(view, user) {
        if !view.battery_ok(cell) {
            continue;
        }
        let sector = view.backhaul_sector(cell);
        for moved in view.users_on(cell) {
            let moved_demand = view.demand(moved);
            if view.scbs_free(cell) + moved_demand < demand {
                continue;
            }
            let target = candidate_scbs(view, moved).into_iter().find(|&alt| {
                if alt == cell
                    || !view.battery_ok(alt)
                    || view.scbs_free(alt) < moved_demand
                {
                    return false;
                }
                let alt_sector = view.backhaul_sector(alt);
                if alt_sector == sector {
                    view.backhaul_headroom(sector) >= demand
                } else {
                    view.backhaul_headroom(alt_sector) >= moved_demand
                        && view.backhaul_headroom(sector) + moved_demand >= demand
                }
            });
            if let Some(to_bs) = target {
                return Some(AssignmentDecision {
                    user_id: user,
                    outcome: Outcome::ServedByScbs(cell),
                    rbs: demand,
                    moves: vec![Move {
                        user_id: moved,
                        from_bs: cell,
                        to_bs,
                    }],
                });
            }
        }
    }
    None
}

/// Plans the best-server association of an unserved user.
pub fn plan_reference(view: &CellLoadView, user: usize) -> AssignmentDecision {
    debug_assert!(view.serving(user).is_none());
    let mut options: Vec<(usize, f64)> = (1..=view.n_scbs())
        .map(|b| (b, view.signal.scbs_snr(user, b)))
        .collect();
    options.push((MBS_ID, view.signal.mbs_snr(user)));
    options.retain(|&(_, snr)| snr >= view.min_snr_db);
    options.sort_by(|&a, &b| by_snr_desc(a, b));
    let demand = view.demand(user);
    for (bs, _) in options {
        let outcome = if bs == MBS_ID {
            view.can_host_mbs(user).map(Outcome::ServedByMbs)
        } else {
            view.can_host_scbs(user, bs).then_some(Outcome::ServedByScbs(bs))
        };
        if let Some(outcome) = outcome {
            return AssignmentDecision {
                user_id: user,
                outcome,
                rbs: demand,
                moves: Vec::new(),
            };
        }
    }
    AssignmentDecision::outage(user)
}

/// Applies a planned decision: moves first, then the user itself.
pub fn apply(view: &mut CellLoadView, decision: &AssignmentDecision) {
    for m in &decision.moves {
        let was = view.detach(m.user_id);
        debug_assert_eq!(was, Some(Serving::Scbs { bs_id: m.from_bs }));
        view.attach(m.user_id, Serving::Scbs { bs_id: m.to_bs });
    }
    if let Some(serving) = decision.outcome.serving() {
        view.attach(decision.user_id, serving);
    }
}

pub fn assign_user(view: &mut CellLoadView, user: usize) -> AssignmentDecision {
    let d = plan_user(view, user);
    apply(view, &d);
    d
}

pub fn reallocate_for(view: &mut CellLoadView, user: usize) -> Option<AssignmentDecision> {
    let d = plan_reallocation(view, user)?;
    apply(view, &d);
    Some(d)
}

pub fn assign_reference(view: &mut CellLoadView, user: usize) -> AssignmentDecision {
    let d = plan_reference(view, user);
    apply(view, &d);
    d
}

pub fn plan(view: &CellLoadView, user: usize, algorithm: Algorithm) -> AssignmentDecision {
    match algorithm {
        Algorithm::Proposed => plan_user(view, user),
        Algorithm::Reference => plan_reference(view, user),
    }
}

pub fn assign(view: &mut CellLoadView, user: usize, algorithm: Algorithm) -> AssignmentDecision {
    let d = plan(view, user, algorithm);
    apply(view, &d);
    d
}

/// Batch processing order: descending RB demand, then ascending id.
pub fn processing_order(view: &CellLoadView, users: &mut [usize]) {
    users.sort_by(|&a, &b| view.demand(b).cmp(&view.demand(a)).then(a.cmp(&b)));
}

/// Assigns every currently unserved user in processing order.
pub fn assign_unserved(view: &mut CellLoadView, algorithm: Algorithm) -> Vec<AssignmentDecision> {
    let mut users: Vec<usize> = (0..view.n_users())
        .filter(|&u| view.serving(u).is_none())
        .collect();
    processing_order(view, &mut users);
    users.into_iter().map(|u| assign(view, u, algorithm)).collect()
}

/// Evicts every user of a small cell whose battery ran low and reassigns them.
pub fn handle_bs_shutdown(
    view: &mut CellLoadView,
    bs_id: usize,
    algorithm: Algorithm,
) -> Vec<AssignmentDecision> {
    view.set_battery_ok(bs_id, false);
    let mut released: Vec<usize> = view.users_on(bs_id).collect();
    for &u in &released {
        view.detach(u);
    }
    processing_order(view, &mut released);
    released.into_iter().map(|u| assign(view, u, algorithm)).collect()
}

/// Re-enables a recharged small cell. Under the RES-aware procedure, macro
/// users it can serve are moved onto it, strongest link first.
pub fn handle_bs_recovery(
    view: &mut CellLoadView,
    bs_id: usize,
    algorithm: Algorithm,
) -> Vec<AssignmentDecision> {
    view.set_battery_ok(bs_id, true);
    if algorithm == Algorithm::Reference {
        return Vec::new();
    }
    let mut movable: Vec<(usize, f64)> = view
        .users_on_mbs()
        .map(|u| (u, view.signal.scbs_snr(u, bs_id)))
        .filter(|&(_, snr)| snr >= view.min_snr_db)
        .collect();
    movable.sort_by(|&a, &b| by_snr_desc(a, b));
    let mut decisions = Vec::new();
    for (u, _) in movable {
        let previous = view.detach(u).expect("macro user is attached");
        if view.can_host_scbs(u, bs_id) {
            view.attach(u, Serving::Scbs { bs_id });
            decisions.push(AssignmentDecision {
                user_id: u,
                outcome: Outcome::ServedByScbs(bs_id),
                rbs: view.demand(u),
                moves: Vec::new(),
            });
        } else {
            view.attach(u, previous);
        }
    }
    decisions
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HandoverReason {
    /// Serving link fell below the SNR floor.
    SignalLost,
    /// The user crossed into another MBS sector.
    SectorChange,
    /// A station the active algorithm prefers can take the user.
    BetterCell { bs_id: usize },
}

/// Decides whether a served user should be re-associated.
///
/// Under the reference algorithm a station must beat the serving SNR by
/// `hysteresis_db`. Under the RES-aware procedure small cells compete with
/// each other under the same margin, while a macro user is handed over as
/// soon as any small cell can take it.
pub fn detect_handover(
    view: &CellLoadView,
    user: usize,
    algorithm: Algorithm,
    hysteresis_db: f64,
) -> Option<HandoverReason> {
    let serving = view.serving(user)?;
    let snr = view.signal.serving_snr(user, serving);
    if snr < view.min_snr_db {
        return Some(HandoverReason::SignalLost);
    }
    if let Serving::Mbs { sector } = serving {
        if sector != view.signal.mbs_sector(user) {
            return Some(HandoverReason::SectorChange);
        }
    }
    let better_scbs = |b: usize| {
        b != serving.bs_id()
            && view.signal.scbs_snr(user, b) > snr + hysteresis_db
            && view.can_host_scbs(user, b)
    };
    let found = match (algorithm, serving) {
        (Algorithm::Proposed, Serving::Mbs { .. }) => {
            (1..=view.n_scbs()).find(|&b| view.can_host_scbs(user, b))
        }
        (Algorithm::Proposed, Serving::Scbs { .. }) => (1..=view.n_scbs()).find(|&b| better_scbs(b)),
        (Algorithm::Reference, Serving::Mbs { .. }) => (1..=view.n_scbs()).find(|&b| better_scbs(b)),
        (Algorithm::Reference, Serving::Scbs { .. }) => {
            if view.signal.mbs_snr(user) > snr + hysteresis_db && view.can_host_mbs(user).is_some() {
                Some(MBS_ID)
            } else {
                (1..=view.n_scbs()).find(|&b| better_scbs(b))
            }
        }
    };
    found.map(|bs_id| HandoverReason::BetterCell { bs_id })
}

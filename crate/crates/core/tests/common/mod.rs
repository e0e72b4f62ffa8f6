//! Helpers shared by the integration targets.

#![allow(dead_code)]

pub mod oracle;

use greenran::engine::{RunObserver, Simulation, TickOutput};
use greenran::scenario::StationKind;
use greenran::{Result, SimConfig};

/// Small, fast network for engine tests.
pub fn small_config(n_users: usize, duration_s: u64) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.scenario.n_users = n_users;
    cfg.engine.duration_s = duration_s;
    cfg
}

/// Replays every station's energy bookkeeping after the fact:
/// `charge(t-1) + (gen - draw) dt = charge(t) + curtailed dt - shortfall dt`.
#[derive(Debug, Default)]
pub struct EnergyLedger {
    charge_wh: Vec<f64>,
    capacity_wh: f64,
    pub ticks: u64,
    /// Worst relative mismatch of the identity.
    pub worst_rel: f64,
    /// Worst excursion outside `[0, capacity]`, in Wh.
    pub worst_bound_wh: f64,
    /// Worst disagreement between station rows and network totals, in W.
    pub worst_total_w: f64,
    pub min_mbs_draw_w: f64,
    pub min_ongrid_w: f64,
    pub served_plus_outage_ok: bool,
    pub invariant_failures: Vec<String>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self {
            min_mbs_draw_w: f64::INFINITY,
            min_ongrid_w: f64::INFINITY,
            served_plus_outage_ok: true,
            ..Self::default()
        }
    }
}

impl RunObserver for EnergyLedger {
    fn on_tick(&mut self, out: &TickOutput, sim: &Simulation) -> Result<()> {
        let dt_h = sim.config().engine.tick_s as f64 / 3600.0;
        self.capacity_wh = sim.config().battery.capacity_wh;
        let r = &out.record;
        if r.served + r.outage != sim.config().scenario.n_users {
            self.served_plus_outage_ok = false;
        }
        if let Err(e) = sim.view().check_invariants() {
            self.invariant_failures.push(format!("t={}: {e}", r.t_s));
        }
        let first = self.charge_wh.is_empty();
        if first {
            self.charge_wh = vec![0.0; out.stations.len()];
        }
        let (mut gen, mut draw, mut charge, mut short, mut curt, mut mbs) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for s in &out.stations {
            if s.kind == StationKind::Mbs {
                mbs += s.draw_w;
                continue;
            }
            gen += s.gen_w;
            draw += s.draw_w;
            charge += s.charge_wh;
            short += s.shortfall_w;
            curt += s.curtailed_w;
            let below = (-s.charge_wh).max(s.charge_wh - self.capacity_wh).max(0.0);
            self.worst_bound_wh = self.worst_bound_wh.max(below);
            if !first {
                let before = self.charge_wh[s.bs_id] + (s.gen_w - s.draw_w) * dt_h;
                let after = s.charge_wh + (s.curtailed_w - s.shortfall_w) * dt_h;
                let scale = before.abs().max(after.abs()).max(1.0);
                self.worst_rel = self.worst_rel.max((before - after).abs() / scale);
            }
            self.charge_wh[s.bs_id] = s.charge_wh;
        }
        let totals = [
            (gen, r.gen_scbs_w),
            (draw, r.draw_scbs_w),
            (short, r.shortfall_scbs_w),
            (curt, r.curtailed_scbs_w),
            (mbs, r.draw_mbs_w),
            (r.draw_mbs_w, r.ongrid_w),
        ];
        for (a, b) in totals {
            self.worst_total_w = self.worst_total_w.max((a - b).abs());
        }
        self.worst_total_w = self.worst_total_w.max((charge - r.charge_scbs_wh).abs());
        self.min_mbs_draw_w = self.min_mbs_draw_w.min(r.draw_mbs_w);
        self.min_ongrid_w = self.min_ongrid_w.min(r.ongrid_w);
        if !first {
            self.ticks += 1;
        }
        Ok(())
    }
}

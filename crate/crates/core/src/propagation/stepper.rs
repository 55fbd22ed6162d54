use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{Fourier, SpatialGrid};
use crate::linalg::{propagator, CMatrix};
use crate::params::PhysicalParams;
use crate::spectra::coupling_matrix;
use crate::C64;

use super::schedule::ControlSchedule;
use super::state::MultiFieldState;

/// Largest stable time step for the given grid and peak control strength.
pub fn dt_max(p: &PhysicalParams, grid: &SpatialGrid, omega_total_max: f64) -> f64 {
    let rate = (p.c * grid.k_max())
        .max(p.delta.abs() + p.gamma_e)
        .max(p.g)
        .max(omega_total_max);
    0.1 / rate
}

type Spinor = [C64; 5];

/// Split-step integrator holding the state in momentum space.
///
/// Because the couplings are uniform in space the coupling factor acts
/// identically on every Fourier mode, so one step is
/// `A(dt/2) exp(-i C dt) A(dt/2)` applied mode by mode, where `A` is the
/// advection phase of the two probe fields.
pub struct Propagator {
    params: PhysicalParams,
    grid: SpatialGrid,
    fourier: Fourier,
    momenta: Vec<f64>,
    modes: Vec<Spinor>,
    time: f64,
    steps: u64,
    untouched: Option<MultiFieldState>,
    exec: Exec,
    cache: Option<(f64, f64, f64, [[C64; 5]; 5])>,
}

impl Propagator {
    pub fn new(state: &MultiFieldState, p: &PhysicalParams, exec: Exec) -> Self {
        let grid = state.grid;
        let n = grid.n_points();
        let fourier = Fourier::new(n);
        let mut modes = vec![[C64::new(0.0, 0.0); 5]; n];
        for f in 0..5 {
            let mut buf = state.fields[f].clone();
            fourier.forward(&mut buf);
            for (m, z) in modes.iter_mut().zip(buf) {
                m[f] = z;
            }
        }
        Self {
            params: *p,
            grid,
            fourier,
            momenta: grid.fft_momenta(),
            modes,
            time: state.time,
            steps: 0,
            untouched: Some(state.clone()),
            exec,
            cache: None,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn modes(&self) -> &[[C64; 5]] {
        &self.modes
    }

    /// Total norm, evaluated in momentum space.
    pub fn norm(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * self.grid.spacing()
    }

    pub fn photonic_norm(&self) -> f64 {
        self.modes.iter().map(|m| m[0].norm_sqr() + m[1].norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    fn coupling_exponential(&mut self, omega_r: f64, omega_l: f64, dt: f64) -> [[C64; 5]; 5] {
        if let Some((a, b, d, u)) = self.cache {
            if a == omega_r && b == omega_l && d == dt {
                return u;
            }
        }
        let m: CMatrix = propagator(&coupling_matrix(&self.params, omega_r, omega_l), dt);
        let u: [[C64; 5]; 5] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        self.cache = Some((omega_r, omega_l, dt, u));
        u
    }

    /// Advance by `dt` with the controls held at `(omega_r, omega_l)`.
    pub fn step(&mut self, omega_r: f64, omega_l: f64, dt: f64) {
        let u = self.coupling_exponential(omega_r, omega_l, dt);
        let c = self.params.c;
        let ks = &self.momenta;
        self.exec.for_each_mut(&mut self.modes, |i, m| {
            let half = C64::from_polar(1.0, -0.5 * c * ks[i] * dt);
            m[0] *= half;
            m[1] *= half.conj();
            let v = *m;
            for (r, row) in u.iter().enumerate() {
                m[r] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3] + row[4] * v[4];
            }
            m[0] *= half;
            m[1] *= half.conj();
        });
        self.time += dt;
        self.steps += 1;
        self.untouched = None;
    }

    /// Evolve through `[t0, t0 + duration)` of `schedule` using steps no larger
    /// than `dt`, sampling the controls at each step midpoint.
    pub fn advance(&mut self, schedule: &ControlSchedule, t0: f64, duration: f64, dt: f64) {
        if duration <= 0.0 {
            return;
        }
        let n = (duration / dt).ceil().max(1.0) as u64;
        let h = duration / n as f64;
        for s in 0..n {
            let (wr, wl) = schedule.sample(t0 + (s as f64 + 0.5) * h);
            self.step(wr, wl, h);
        }
        self.time = t0 + duration;
    }

    /// Transform back to position space.
    pub fn state(&self) -> MultiFieldState {
        if let Some(s) = &self.untouched {
            return s.clone();
        }
        let mut out = MultiFieldState::zeros(self.grid);
        out.time = self.time;
        for f in 0..5 {
            let mut buf: Vec<C64> = self.modes.iter().map(|m| m[f]).collect();
            self.fourier.inverse(&mut buf);
            out.fields[f] = buf;
        }
        out
    }
}

/// Single step of `state` under `schedule` from `state.time` to `state.time + dt`.
pub fn step(
    state: &MultiFieldState,
    p: &PhysicalParams,
    schedule: &ControlSchedule,
    dt: f64,
) -> Result<MultiFieldState> {
    let limit = dt_max(p, &state.grid, schedule.max_omega_total());
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, dt_max: limit });
    }
    let mut prop = Propagator::new(state, p, Exec::Sequential);
    let (wr, wl) = schedule.sample(state.time + 0.5 * dt);
    prop.step(wr, wl, dt);
    Ok(prop.state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::state::{Loading, PulseSpec};

    fn free_photon() -> PhysicalParams {
        let mut p = PhysicalParams::eit(1.0, 0.0, 0.0);
        p.g = 0.0;
        p
    }

    #[test]
    fn free_advection_is_exact() {
        let grid = SpatialGrid::new(64.0, 256).unwrap();
        let p = free_photon();
        let pulse = PulseSpec::new(-10.0, 3.0).with_loading(Loading::Photonic);
        let s0 = pulse.prepare(&p, &grid, 0.0, 0.0, Exec::Sequential).unwrap();
        let dt = 0.5 * dt_max(&p, &grid, 0.0);
        let mut prop = Propagator::new(&s0, &p, Exec::Sequential);
        for _ in 0..200 {
            prop.step(0.0, 0.0, dt);
        }
        let shifted = PulseSpec::new(-10.0 + 200.0 * dt, 3.0).with_loading(Loading::Photonic);
        let expect = shifted.prepare(&p, &grid, 0.0, 0.0, Exec::Sequential).unwrap();
        let got = prop.state();
        let err = got.fields[0]
            .iter()
            .zip(&expect.fields[0])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn norm_is_conserved_per_step() {
        let grid = SpatialGrid::new(64.0, 256).unwrap();
        let p = PhysicalParams::stationary(1.0, 2.0, 1.0, 1.5);
        let s0 = PulseSpec::new(0.0, 4.0).with_carrier(0.3).prepare(&p, &grid, 2.0, 1.0, Exec::Sequential).unwrap();
        let dt = dt_max(&p, &grid, p.omega_total());
        let mut prop = Propagator::new(&s0, &p, Exec::Parallel);
        let mut last = prop.norm();
        for _ in 0..100 {
            prop.step(2.0, 1.0, dt);
            let n = prop.norm();
            assert!((n - last).abs() < 1e-10);
            last = n;
        }
    }

    #[test]
    fn oversized_step_is_refused() {
        let grid = SpatialGrid::new(64.0, 256).unwrap();
        let p = PhysicalParams::eit(1.0, 1.0, 0.0);
        let s0 = PulseSpec::new(0.0, 4.0).prepare(&p, &grid, 1.0, 0.0, Exec::Sequential).unwrap();
        let sched = ControlSchedule::constant(1.0, 1.0, 0.0);
        let limit = dt_max(&p, &grid, 1.0);
        match step(&s0, &p, &sched, 2.0 * limit) {
            Err(Error::StepTooLarge { dt_max, .. }) => assert_eq!(dt_max, limit),
            other => panic!("{other:?}"),
        }
        assert!(step(&s0, &p, &sched, limit).is_ok());
    }

    #[test]
    fn second_order_in_time() {
        let grid = SpatialGrid::new(64.0, 256).unwrap();
        let p = PhysicalParams::stationary(1.0, 1.5, 0.5, 1.0);
        let s0 = PulseSpec::new(0.0, 4.0).with_carrier(0.5).prepare(&p, &grid, 1.5, 0.5, Exec::Sequential).unwrap();
        let t = 4.0;
        let run = |dt: f64| {
            let mut prop = Propagator::new(&s0, &p, Exec::Sequential);
            let sched = ControlSchedule::constant(t, 1.5, 0.5);
            prop.advance(&sched, 0.0, t, dt);
            prop.modes().to_vec()
        };
        let diff = |a: &[Spinor], b: &[Spinor]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>())
                .sum::<f64>()
                .sqrt()
        };
        let dt = dt_max(&p, &grid, p.omega_total());
        let reference = run(dt / 16.0);
        let e1 = diff(&run(dt), &reference);
        let e2 = diff(&run(dt / 2.0), &reference);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }
}

//! Single-diode PV panel and series-string model.
//!
//! Each panel follows the five-parameter equation
//!
//! ```text
//! I = Iph - I0 * (exp((V + I*Rs) / a) - 1) - (V + I*Rs) / Rsh
//! a = n * Ncells * k * T / q
//! ```
//!
//! with a photocurrent proportional to irradiance. Temperature enters through
//! the short-circuit coefficient `alpha_isc`, the open-circuit coefficient
//! `beta_voc` and the thermal voltage: at every temperature `Iph` and `I0` are
//! re-solved so that the curve passes through `(0, Isc(T))` and `(Voc(T), 0)`
//! at 1000 W/m². A string of `panels_in_series` identical panels carries one
//! current and multiplies the panel voltage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STC_IRRADIANCE: f64 = 1000.0;
pub const STC_TEMPERATURE: f64 = 25.0;

/// Boltzmann constant over elementary charge, V/K.
const K_OVER_Q: f64 = 8.617_333_262e-5;
const KELVIN: f64 = 273.15;

/// Absolute current tolerance of the implicit I-V solve.
pub const CURRENT_TOL: f64 = 1e-9;
/// Number of intervals in the brute-force MPP sweep.
pub const ORACLE_STEPS: usize = 10_000;

const PREFERRED_IDEALITY: f64 = 1.3;

/// Irradiance (W/m²) and cell temperature (°C) seen by one channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtmosphereSample {
    pub irradiance: f64,
    pub temperature: f64,
}

impl AtmosphereSample {
    pub const STC: AtmosphereSample = AtmosphereSample {
        irradiance: STC_IRRADIANCE,
        temperature: STC_TEMPERATURE,
    };

    pub fn new(irradiance: f64, temperature: f64) -> Result<Self> {
        let s = AtmosphereSample {
            irradiance,
            temperature,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.irradiance.is_finite() && self.irradiance >= 0.0) {
            return Err(Error::Parameter(format!(
                "irradiance must be finite and >= 0, got {}",
                self.irradiance
            )));
        }
        if !(-40.0..=90.0).contains(&self.temperature) {
            return Err(Error::Parameter(format!(
                "temperature must lie in [-40, 90] °C, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Datasheet block of a panel plus the string length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datasheet {
    pub isc: f64,
    pub voc: f64,
    pub vmp: f64,
    pub imp: f64,
    pub alpha_isc: f64,
    pub beta_voc: f64,
    pub panels_in_series: u32,
    #[serde(default = "default_cells")]
    pub cells_in_series: u32,
}

fn default_cells() -> u32 {
    36
}

impl Default for Datasheet {
    /// Nominal 150 W, 36-cell panel in a 12-panel string. These are
    /// representative values, not a vendor datasheet.
    fn default() -> Self {
        Datasheet {
            isc: 8.9,
            voc: 22.4,
            vmp: 18.5,
            imp: 8.11,
            alpha_isc: 0.0045,
            beta_voc: -0.078,
            panels_in_series: 12,
            cells_in_series: 36,
        }
    }
}

impl Datasheet {
    pub fn rated_power(&self) -> f64 {
        self.vmp * self.imp
    }

    fn check_ordering(&self) -> Result<()> {
        let finite = [
            self.isc,
            self.voc,
            self.vmp,
            self.imp,
            self.alpha_isc,
            self.beta_voc,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parameter("datasheet values must be finite".into()));
        }
        if !(self.vmp > 0.0 && self.vmp < self.voc) {
            return Err(Error::Parameter(format!(
                "need 0 < vmp < voc, got vmp = {}, voc = {}",
                self.vmp, self.voc
            )));
        }
        if !(self.imp > 0.0 && self.imp < self.isc) {
            return Err(Error::Parameter(format!(
                "need 0 < imp < isc, got imp = {}, isc = {}",
                self.imp, self.isc
            )));
        }
        if self.cells_in_series == 0 || self.panels_in_series == 0 {
            return Err(Error::Parameter(
                "cells_in_series and panels_in_series must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Calibrated single-diode parameters of one panel, plus string length.
/// `r_series` and `r_shunt` are per panel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelParams {
    pub isc_stc: f64,
    pub voc_stc: f64,
    pub vmp_stc: f64,
    pub imp_stc: f64,
    pub alpha_isc: f64,
    pub beta_voc: f64,
    pub ideality: f64,
    pub r_series: f64,
    pub r_shunt: f64,
    pub cells_in_series: u32,
    pub panels_in_series: u32,
}

impl PanelParams {
    pub fn datasheet(&self) -> Datasheet {
        Datasheet {
            isc: self.isc_stc,
            voc: self.voc_stc,
            vmp: self.vmp_stc,
            imp: self.imp_stc,
            alpha_isc: self.alpha_isc,
            beta_voc: self.beta_voc,
            panels_in_series: self.panels_in_series,
            cells_in_series: self.cells_in_series,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.datasheet().check_ordering()?;
        if !(1.0..=2.0).contains(&self.ideality) {
            return Err(Error::Parameter(format!(
                "ideality must lie in [1, 2], got {}",
                self.ideality
            )));
        }
        if !(self.r_series.is_finite() && self.r_series >= 0.0) {
            return Err(Error::Parameter(format!(
                "r_series must be >= 0, got {}",
                self.r_series
            )));
        }
        if !(self.r_shunt.is_finite() && self.r_shunt > 0.0) {
            return Err(Error::Parameter(format!(
                "r_shunt must be finite and > 0, got {}",
                self.r_shunt
            )));
        }
        Ok(())
    }

    /// Builds the string's I-V curve for one atmosphere sample.
    pub fn curve(&self, atmos: AtmosphereSample) -> Result<PvCurve> {
        self.validate()?;
        atmos.validate()?;
        let dt = atmos.temperature - STC_TEMPERATURE;
        let a = thermal_voltage(self.ideality, self.cells_in_series, atmos.temperature);
        let isc_t = self.isc_stc + self.alpha_isc * dt;
        let voc_t = self.voc_stc + self.beta_voc * dt;
        if isc_t <= 0.0 || voc_t <= 0.0 {
            return Err(Error::Parameter(format!(
                "temperature {} °C drives Isc or Voc non-positive",
                atmos.temperature
            )));
        }
        let rs = self.r_series;
        let g = 1.0 / self.r_shunt;
        let (iph_t, i0) = anchor_currents(isc_t, voc_t, a, rs, g);
        if !(i0 > 0.0 && iph_t > 0.0) {
            return Err(Error::Parameter(format!(
                "inconsistent parameters at {} °C: Iph = {iph_t}, I0 = {i0}",
                atmos.temperature
            )));
        }
        let mut curve = PvCurve {
            iph: iph_t * atmos.irradiance / STC_IRRADIANCE,
            i0,
            a,
            rs,
            g,
            panels: self.panels_in_series as f64,
            voc_panel: 0.0,
        };
        curve.voc_panel = curve.solve_voc_panel();
        Ok(curve)
    }
}

/// `n * Ncells * k * T / q` for one panel.
fn thermal_voltage(ideality: f64, cells: u32, temperature_c: f64) -> f64 {
    ideality * cells as f64 * K_OVER_Q * (temperature_c + KELVIN)
}

/// Photocurrent and saturation current that put the curve through
/// `(0, isc)` and `(voc, 0)` for the given `a`, `rs` and shunt conductance.
fn anchor_currents(isc: f64, voc: f64, a: f64, rs: f64, g: f64) -> (f64, f64) {
    let e_oc = (voc / a).exp();
    let e_sc = (isc * rs / a).exp();
    let i0 = (isc - g * (voc - isc * rs)) / (e_oc - e_sc);
    let iph = i0 * (e_oc - 1.0) + g * voc;
    (iph, i0)
}

/// The I-V characteristic of a string at one fixed atmosphere. Building it
/// solves for the open-circuit voltage once, so callers that evaluate many
/// voltages at the same atmosphere should hold on to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvCurve {
    iph: f64,
    i0: f64,
    a: f64,
    rs: f64,
    g: f64,
    panels: f64,
    voc_panel: f64,
}

impl PvCurve {
    pub fn voc(&self) -> f64 {
        self.voc_panel * self.panels
    }

    pub fn photocurrent(&self) -> f64 {
        self.iph
    }

    /// String current at string voltage `v`. Zero at and above `voc()`;
    /// voltages below zero are treated as a short circuit.
    pub fn current(&self, v: f64) -> f64 {
        let vp = v.max(0.0) / self.panels;
        if vp >= self.voc_panel {
            return 0.0;
        }
        self.solve_current_panel(vp)
    }

    pub fn power(&self, v: f64) -> f64 {
        v * self.current(v)
    }

    fn residual(&self, vp: f64, i: f64) -> (f64, f64) {
        let x = vp + i * self.rs;
        let e = (x / self.a).exp();
        let f = self.iph - self.i0 * (e - 1.0) - x * self.g - i;
        let df = -self.i0 * self.rs / self.a * e - self.rs * self.g - 1.0;
        (f, df)
    }

    // Safeguarded Newton on [0, iph]; the residual is strictly decreasing in i.
    fn solve_current_panel(&self, vp: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.iph);
        let mut i = (self.iph - self.i0 * ((vp / self.a).exp() - 1.0) - vp * self.g)
            .clamp(lo, hi);
        for _ in 0..200 {
            let (f, df) = self.residual(vp, i);
            if f > 0.0 {
                lo = i;
            } else {
                hi = i;
            }
            let mut next = i - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - i).abs();
            i = next;
            if step < 0.01 * CURRENT_TOL || hi - lo < 0.01 * CURRENT_TOL {
                break;
            }
        }
        i
    }

    fn solve_voc_panel(&self) -> f64 {
        if self.iph <= 0.0 {
            return 0.0;
        }
        let h = |v: f64| self.iph - self.i0 * ((v / self.a).exp() - 1.0) - v * self.g;
        let (mut lo, mut hi) = (0.0, self.a * (self.iph / self.i0 + 1.0).ln());
        let mut v = hi;
        for _ in 0..200 {
            let f = h(v);
            if f > 0.0 {
                lo = v;
            } else {
                hi = v;
            }
            let df = -self.i0 / self.a * (v / self.a).exp() - self.g;
            let mut next = v - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - v).abs();
            v = next;
            if step < 1e-13 * (1.0 + v) || hi - lo < 1e-13 {
                break;
            }
        }
        v
    }

    /// Uniform sweep of `points` samples over `[0, voc]`.
    pub fn sweep(&self, points: usize) -> Vec<OperatingPoint> {
        let n = points.max(2) - 1;
        let voc = self.voc();
        (0..=n)
            .map(|j| {
                let v = voc * j as f64 / n as f64;
                let i = self.current(v);
                OperatingPoint { v, i, p: v * i }
            })
            .collect()
    }

    /// Brute-force maximum power point over `ORACLE_STEPS` intervals.
    pub fn mpp(&self) -> OperatingPoint {
        let voc = self.voc();
        if voc <= 0.0 {
            return OperatingPoint::default();
        }
        let mut best = OperatingPoint::default();
        for j in 0..=ORACLE_STEPS {
            let v = voc * j as f64 / ORACLE_STEPS as f64;
            let i = self.current(v);
            let p = v * i;
            if p > best.p {
                best = OperatingPoint { v, i, p };
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub v: f64,
    pub i: f64,
    pub p: f64,
}

pub fn pv_current(v: f64, atmos: AtmosphereSample, params: &PanelParams) -> Result<f64> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Parameter(format!(
            "string voltage must be finite and >= 0, got {v}"
        )));
    }
    Ok(params.curve(atmos)?.current(v))
}

pub fn mpp_oracle(atmos: AtmosphereSample, params: &PanelParams) -> Result<OperatingPoint> {
    Ok(params.curve(atmos)?.mpp())
}

/// Fits ideality, series and shunt resistance so the model passes through
/// the short-circuit, open-circuit and maximum-power datasheet points with a
/// zero power slope at the latter.
///
/// For a fixed ideality and series resistance the three point conditions are
/// linear in `(Iph, I0, 1/Rsh)`; the series resistance is then found by
/// bracketing the MPP slope condition. Ideality starts at 1.3 and walks
/// outwards through [1, 2] until a physical solution (all positive) exists.
pub fn calibrate_panel(ds: &Datasheet) -> Result<PanelParams> {
    ds.check_ordering().map_err(|e| Error::Calibration {
        reason: e.to_string(),
        residuals: vec![],
    })?;

    let mut candidates: Vec<f64> = (0..=100).map(|k| 1.0 + k as f64 * 0.01).collect();
    candidates.sort_by(|x, y| {
        (x - PREFERRED_IDEALITY)
            .abs()
            .total_cmp(&(y - PREFERRED_IDEALITY).abs())
    });

    let mut last_residuals = vec![];
    for n in candidates {
        let Some((rs, g)) = fit_resistances(ds, n) else {
            continue;
        };
        let params = PanelParams {
            isc_stc: ds.isc,
            voc_stc: ds.voc,
            vmp_stc: ds.vmp,
            imp_stc: ds.imp,
            alpha_isc: ds.alpha_isc,
            beta_voc: ds.beta_voc,
            ideality: n,
            r_series: rs,
            r_shunt: 1.0 / g,
            cells_in_series: ds.cells_in_series,
            panels_in_series: ds.panels_in_series,
        };
        let residuals = calibration_residuals(&params)?;
        let ok = residuals[0].abs() <= 0.005
            && residuals[1].abs() <= 0.005
            && residuals[2].abs() <= 0.01
            && residuals[3].abs() <= 0.01;
        if ok {
            return Ok(params);
        }
        last_residuals = residuals.to_vec();
    }
    Err(Error::Calibration {
        reason: "no ideality in [1, 2] gives a physical fit".into(),
        residuals: last_residuals,
    })
}

/// Relative errors `[isc, voc, vmp, imp]` of the calibrated string at STC,
/// each normalised by the datasheet value.
pub fn calibration_residuals(params: &PanelParams) -> Result<[f64; 4]> {
    let curve = params.curve(AtmosphereSample::STC)?;
    let n = params.panels_in_series as f64;
    let mpp = curve.mpp();
    Ok([
        curve.current(0.0) / params.isc_stc - 1.0,
        curve.voc() / (n * params.voc_stc) - 1.0,
        mpp.v / (n * params.vmp_stc) - 1.0,
        mpp.i / params.imp_stc - 1.0,
    ])
}

fn fit_resistances(ds: &Datasheet, n: f64) -> Option<(f64, f64)> {
    let a = thermal_voltage(n, ds.cells_in_series, STC_TEMPERATURE);
    let rs_max = (ds.voc - ds.vmp) / ds.imp;
    const GRID: usize = 400;

    let mut prev: Option<(f64, f64)> = None;
    for k in 0..GRID {
        let rs = rs_max * k as f64 / GRID as f64;
        let Some(h) = slope_mismatch(ds, a, rs) else {
            prev = None;
            continue;
        };
        if h == 0.0 {
            return solve_linear(ds, a, rs).map(|(_, _, g)| (rs, g));
        }
        if let Some((rs_prev, h_prev)) = prev {
            if h_prev.signum() != h.signum() {
                let (mut lo, mut hi, mut h_lo) = (rs_prev, rs, h_prev);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let h_mid = slope_mismatch(ds, a, mid)?;
                    if h_mid.signum() == h_lo.signum() {
                        lo = mid;
                        h_lo = h_mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
                let rs = 0.5 * (lo + hi);
                return solve_linear(ds, a, rs).map(|(_, _, g)| (rs, g));
            }
        }
        prev = Some((rs, h));
    }
    None
}

/// Solves the three point conditions for `(Iph, I0, G)`; `None` if any is
/// non-physical.
fn solve_linear(ds: &Datasheet, a: f64, rs: f64) -> Option<(f64, f64, f64)> {
    let x1 = ds.isc * rs;
    let x2 = ds.voc;
    let x3 = ds.vmp + ds.imp * rs;
    let e = |x: f64| (x / a).exp() - 1.0;
    let (e1, e2, e3) = (e(x1), e(x2), e(x3));
    // row_j: Iph - I0*e_j - G*x_j = rhs_j; subtract row 2 from rows 1 and 3.
    let (a11, a12, b1) = (e2 - e1, x2 - x1, ds.isc);
    let (a21, a22, b2) = (e2 - e3, x2 - x3, ds.imp);
    let det = a11 * a22 - a12 * a21;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let i0 = (b1 * a22 - a12 * b2) / det;
    let g = (a11 * b2 - a21 * b1) / det;
    let iph = i0 * e2 + g * x2;
    (i0 > 0.0 && g > 0.0 && iph > 0.0).then_some((iph, i0, g))
}

fn slope_mismatch(ds: &Datasheet, a: f64, rs: f64) -> Option<f64> {
    let (_, i0, g) = solve_linear(ds, a, rs)?;
    let e3 = ((ds.vmp + ds.imp * rs) / a).exp();
    let y = i0 / a * e3 + g;
    let di_dv = -y / (1.0 + rs * y);
    Some(di_dv + ds.imp / ds.vmp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal() -> PanelParams {
        calibrate_panel(&Datasheet::default()).unwrap()
    }

    #[test]
    fn short_circuit_is_isc_at_stc() {
        let p = nominal();
        let i = pv_current(0.0, AtmosphereSample::STC, &p).unwrap();
        assert!((i - p.isc_stc).abs() < 1e-6 * p.isc_stc, "{i}");
    }

    #[test]
    fn open_circuit_current_vanishes() {
        let p = nominal();
        let curve = p.curve(AtmosphereSample::STC).unwrap();
        let voc = curve.voc();
        assert!((voc - 12.0 * p.voc_stc).abs() < 1e-9 * voc);
        assert!(curve.current(voc).abs() < 1e-6 * p.isc_stc);
        assert!(curve.current(voc * 0.999_999_999).abs() < 1e-6 * p.isc_stc);
        assert_eq!(curve.current(voc + 10.0), 0.0);
    }

    #[test]
    fn current_at_rated_vmp_matches_imp() {
        let p = nominal();
        let v = p.vmp_stc * p.panels_in_series as f64;
        let i = pv_current(v, AtmosphereSample::STC, &p).unwrap();
        assert!((i / p.imp_stc - 1.0).abs() < 0.01, "{i}");
    }

    #[test]
    fn implicit_solution_satisfies_equation() {
        let p = nominal();
        let curve = p.curve(AtmosphereSample::new(640.0, 37.0).unwrap()).unwrap();
        for k in 0..50 {
            let v = curve.voc() * k as f64 / 50.0;
            let i = curve.current(v);
            let (f, _) = curve.residual(v / curve.panels, i);
            assert!(f.abs() < CURRENT_TOL, "residual {f} at v = {v}");
        }
    }

    #[test]
    fn nominal_panel_is_150_w() {
        let p = nominal();
        let mpp = mpp_oracle(AtmosphereSample::STC, &p).unwrap();
        assert!((mpp.p / 1800.0 - 1.0).abs() < 0.01, "{mpp:?}");
        let single = PanelParams {
            panels_in_series: 1,
            ..p
        };
        let mpp1 = mpp_oracle(AtmosphereSample::STC, &single).unwrap();
        assert!((mpp1.p / 150.0 - 1.0).abs() < 0.01, "{mpp1:?}");
    }

    #[test]
    fn degenerate_datasheet_is_rejected() {
        let ds = Datasheet {
            vmp: 22.4,
            ..Datasheet::default()
        };
        assert!(matches!(
            calibrate_panel(&ds),
            Err(Error::Calibration { .. })
        ));
    }

    #[test]
    fn refit_is_a_fixed_point() {
        let p = nominal();
        let again = calibrate_panel(&p.datasheet()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn refit_from_simulated_points_recovers_params() {
        // Measure the model itself at STC on one panel, then refit.
        let p = PanelParams {
            panels_in_series: 1,
            ..nominal()
        };
        let curve = p.curve(AtmosphereSample::STC).unwrap();
        let mpp = curve.mpp();
        let ds = Datasheet {
            isc: curve.current(0.0),
            voc: curve.voc(),
            vmp: mpp.v,
            imp: mpp.i,
            ..p.datasheet()
        };
        let q = calibrate_panel(&ds).unwrap();
        assert_eq!(q.ideality, p.ideality);
        assert!((q.r_series - p.r_series).abs() < 0.02 * p.r_series.max(1e-3));
        assert!((q.r_shunt / p.r_shunt - 1.0).abs() < 0.05);
    }

    #[test]
    fn darkness_gives_no_power() {
        let p = nominal();
        let mpp = mpp_oracle(AtmosphereSample::new(0.0, 25.0).unwrap(), &p).unwrap();
        assert_eq!(mpp.p, 0.0);
        assert_eq!(pv_current(10.0, AtmosphereSample::new(0.0, 25.0).unwrap(), &p).unwrap(), 0.0);
    }

    #[test]
    fn halved_irradiance_lowers_mpp() {
        let p = nominal();
        let full = mpp_oracle(AtmosphereSample::STC, &p).unwrap();
        let half = mpp_oracle(AtmosphereSample::new(500.0, 25.0).unwrap(), &p).unwrap();
        assert!(half.p < full.p);
    }

    #[test]
    fn oracle_dominates_sweep() {
        let p = nominal();
        let curve = p.curve(AtmosphereSample::new(730.0, 12.0).unwrap()).unwrap();
        let mpp = curve.mpp();
        for pt in curve.sweep(3001) {
            assert!(mpp.p >= pt.p);
        }
    }

    #[test]
    fn hotter_cells_lower_voc() {
        let p = nominal();
        let cold = p.curve(AtmosphereSample::new(1000.0, 0.0).unwrap()).unwrap();
        let hot = p.curve(AtmosphereSample::new(1000.0, 60.0).unwrap()).unwrap();
        assert!(hot.voc() < cold.voc());
        let expected = 12.0 * (p.voc_stc + p.beta_voc * 35.0);
        assert!((hot.voc() - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn bad_inputs_are_parameter_errors() {
        let p = nominal();
        assert!(pv_current(f64::NAN, AtmosphereSample::STC, &p).is_err());
        assert!(pv_current(-1.0, AtmosphereSample::STC, &p).is_err());
        assert!(AtmosphereSample::new(-5.0, 25.0).is_err());
        assert!(AtmosphereSample::new(500.0, 120.0).is_err());
        let broken = PanelParams {
            r_shunt: 0.0,
            ..p
        };
        assert!(pv_current(1.0, AtmosphereSample::STC, &broken).is_err());
        let broken = PanelParams {
            ideality: 2.5,
            ..p
        };
        assert!(mpp_oracle(AtmosphereSample::STC, &broken).is_err());
    }

    #[test]
    fn series_law_holds() {
        let p = nominal();
        let one = PanelParams {
            panels_in_series: 1,
            ..p
        };
        let atmos = AtmosphereSample::new(820.0, 31.0).unwrap();
        let c12 = p.curve(atmos).unwrap();
        let c1 = one.curve(atmos).unwrap();
        assert!((c12.voc() - 12.0 * c1.voc()).abs() < 1e-9 * c12.voc());
        for k in 0..20 {
            let v1 = c1.voc() * k as f64 / 20.0;
            assert!((c1.current(v1) - c12.current(12.0 * v1)).abs() < 10.0 * CURRENT_TOL);
        }
    }
}

//! Browser bindings for three small demos: the pure-dephasing heat run, the
//! qubit coherence triple product, and thermal relaxation from a diagonal
//! state.

use ehrenfest::bloch::{coherence_rate_triple, from_bloch, BlochState, FieldVector, Vec3};
use ehrenfest::scenario::{preset, run_scenario, ScenarioConfig};
use ehrenfest::thermo::cyclic_coherence_forms;
use ehrenfest::thermo::OmegaGenerator;
use wasm_bindgen::prelude::*;

/// Time series of one run, column by column.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    t: Vec<f64>,
    energy: Vec<f64>,
    heat: Vec<f64>,
    work: Vec<f64>,
    entropy: Vec<f64>,
    bz: Vec<f64>,
    b_norm: Vec<f64>,
    heat_expected: f64,
    max_first_law_residual: f64,
    pass: bool,
}

#[wasm_bindgen]
impl Series {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn energy(&self) -> Vec<f64> {
        self.energy.clone()
    }
    /// Accumulated heat.
    #[wasm_bindgen(getter)]
    pub fn heat(&self) -> Vec<f64> {
        self.heat.clone()
    }
    /// Accumulated work.
    #[wasm_bindgen(getter)]
    pub fn work(&self) -> Vec<f64> {
        self.work.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn entropy(&self) -> Vec<f64> {
        self.entropy.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn bz(&self) -> Vec<f64> {
        self.bz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn b_norm(&self) -> Vec<f64> {
        self.b_norm.clone()
    }
    /// Closed-form total heat, or NaN when there is none.
    #[wasm_bindgen(getter)]
    pub fn heat_expected(&self) -> f64 {
        self.heat_expected
    }
    #[wasm_bindgen(getter)]
    pub fn max_first_law_residual(&self) -> f64 {
        self.max_first_law_residual
    }
    #[wasm_bindgen(getter)]
    pub fn pass(&self) -> bool {
        self.pass
    }
}

fn run(mut cfg: ScenarioConfig, params: &[(&str, f64)]) -> Result<Series, String> {
    for (k, v) in params {
        cfg.set_param(k, *v).map_err(|e| e.to_string())?;
    }
    cfg.observables.clear();
    let report = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let col = |f: &dyn Fn(&ehrenfest::scenario::SampleRow) -> f64| report.rows.iter().map(f).collect::<Vec<_>>();
    let bloch = |r: &ehrenfest::scenario::SampleRow| r.bloch.unwrap_or([f64::NAN; 3]);
    Ok(Series {
        t: col(&|r| r.record.t),
        energy: col(&|r| r.record.energy),
        heat: col(&|r| r.record.heat_accum),
        work: col(&|r| r.record.work_accum),
        entropy: col(&|r| r.record.entropy),
        bz: col(&|r| bloch(r)[2]),
        b_norm: col(&|r| {
            let [x, y, z] = bloch(r);
            (x * x + y * y + z * z).sqrt()
        }),
        heat_expected: report
            .summary
            .oracle
            .as_ref()
            .and_then(|o| o.heat_expected)
            .unwrap_or(f64::NAN),
        max_first_law_residual: report.summary.max_first_law_residual,
        pass: report.summary.pass,
    })
}

/// Pure dephasing from the pure state with `B_z = bz` in the x-z plane.
pub fn dephasing(eps: f64, gamma: f64, bz: f64, t1: f64, samples: usize) -> Result<Series, String> {
    if !(bz.abs() <= 1.0) {
        return Err(format!("bz must lie in [-1, 1], got {bz}"));
    }
    let bx = (1.0 - bz * bz).sqrt();
    run(
        preset("dephasing").map_err(|e| e.to_string())?,
        &[("eps", eps), ("gamma", gamma), ("bx", bx), ("by", 0.0), ("bz", bz), ("t1", t1), ("samples", samples as f64)],
    )
}

/// Thermal relaxation from the diagonal state with Bloch vector `(0, 0, bz)`.
pub fn thermal(eps: f64, gamma: f64, nbar: f64, bz: f64, t1: f64, samples: usize) -> Result<Series, String> {
    run(
        preset("thermal_relaxation").map_err(|e| e.to_string())?,
        &[("eps", eps), ("gamma", gamma), ("nbar", nbar), ("bz", bz), ("t1", t1), ("samples", samples as f64)],
    )
}

/// `[2 B.(o x w), i tr(rho [Omega, O])]`: the Bloch form and the dense form.
pub fn coherence(b: [f64; 3], o: [f64; 3], w: [f64; 3]) -> Result<[f64; 2], String> {
    let state = BlochState::new(Vec3::from(b)).map_err(|e| e.to_string())?;
    let (ov, wv) = (FieldVector(Vec3::from(o)), FieldVector(Vec3::from(w)));
    let rho = from_bloch(&state).map_err(|e| e.to_string())?;
    let forms = cyclic_coherence_forms(&rho, &OmegaGenerator::from_operator(wv.to_operator()), &ov.to_operator())
        .map_err(|e| e.to_string())?;
    let dense = -forms[0].im;
    Ok([coherence_rate_triple(&state, &ov, &wv), dense])
}

#[wasm_bindgen(js_name = dephasingRun)]
pub fn dephasing_run(eps: f64, gamma: f64, bz: f64, t1: f64, samples: usize) -> Result<Series, JsError> {
    dephasing(eps, gamma, bz, t1, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = thermalRun)]
pub fn thermal_run(eps: f64, gamma: f64, nbar: f64, bz: f64, t1: f64, samples: usize) -> Result<Series, JsError> {
    thermal(eps, gamma, nbar, bz, t1, samples).map_err(|e| JsError::new(&e))
}

/// Takes `[bx, by, bz, ox, oy, oz, wx, wy, wz]`.
#[wasm_bindgen(js_name = coherenceTriple)]
pub fn coherence_triple(v: &[f64]) -> Result<Vec<f64>, JsError> {
    if v.len() != 9 {
        return Err(JsError::new("expected 9 numbers"));
    }
    let pick = |i: usize| [v[i], v[i + 1], v[i + 2]];
    coherence(pick(0), pick(3), pick(6)).map(|r| r.to_vec()).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dephasing_heat_matches_closed_form() {
        let s = dephasing(1.0, 0.5, 0.5, 30.0, 601).unwrap();
        assert!(s.pass);
        let q = *s.heat.last().unwrap();
        assert!((q - 0.5 * 2f64.ln()).abs() < 1e-4);
        assert!((s.heat_expected - 0.5 * 2f64.ln()).abs() < 1e-6);
        assert_eq!(s.t.len(), 601);
    }

    #[test]
    fn thermal_is_pure_heat() {
        let s = thermal(1.0, 0.4, 0.5, -0.6, 10.0, 401).unwrap();
        assert!(s.pass);
        assert!(s.work.iter().all(|w| w.abs() < 1e-12));
        let de = s.energy.last().unwrap() - s.energy[0];
        assert!((s.heat.last().unwrap() - de).abs() < 1e-6);
        assert!(s.heat_expected.is_nan());
    }

    #[test]
    fn coherence_forms_agree() {
        let [triple, dense] = coherence([0.3, -0.4, 0.5], [1.0, 0.2, 0.0], [0.0, 0.7, -0.3]).unwrap();
        assert!((triple - dense).abs() < 1e-12);
        let [t, _] = coherence([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        assert!(dephasing(1.0, 0.5, 1.5, 1.0, 10).is_err());
        assert!(dephasing(1.0, -0.5, 0.5, 1.0, 10).is_err());
        assert!(coherence([1.0, 1.0, 0.0], [0.0; 3], [0.0; 3]).is_err());
    }
}

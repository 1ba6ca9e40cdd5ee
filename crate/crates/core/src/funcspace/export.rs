use serde_json::{json, Value};

use super::{AlphaCovering, Bapu};

pub const NORM_CSV_HEADER: &str = "space,s,sigma,p,q,r,alpha,value";

pub(crate) fn fmt_exponent(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Patch list with centres, radii and footprint index ranges.
pub fn covering_json(cov: &AlphaCovering) -> Value {
    let audit = cov.audit();
    json!({
        "alpha": cov.alpha,
        "xi_max": cov.xi_max,
        "grid": { "half_width": cov.grid.half_width(), "n": cov.grid.n() },
        "area_law": [cov.area_law.0, cov.area_law.1],
        "audit": audit,
        "patches": cov.patches,
    })
}

pub fn bapu_json(bapu: &Bapu) -> Value {
    json!({
        "p": fmt_exponent(bapu.p),
        "kernel_bound": bapu.kernel_bound,
        "partition_defect": bapu.partition_defect(),
        "support_violations": bapu.support_violations(),
        "covering": covering_json(&bapu.covering),
        "windows": bapu.summaries(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{build_alpha_covering, build_bapu};
    use crate::spectral::GridSpec;

    #[test]
    fn json_round_trip_fields() {
        let g = GridSpec::new(std::f64::consts::PI, 64).unwrap();
        let cov = build_alpha_covering(1.0, 16.0, g).unwrap();
        let v = bapu_json(&build_bapu(&cov, f64::INFINITY).unwrap());
        assert_eq!(v["p"], "inf");
        let patches = v["covering"]["patches"].as_array().unwrap();
        assert_eq!(patches.len(), cov.patches.len());
        assert_eq!(patches[1]["shape"]["kind"], "shell");
        assert!(patches[1]["index_box"].is_array());
        let text = serde_json::to_string(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            back["covering"]["patches"].as_array().unwrap().len(),
            patches.len()
        );
        assert_eq!(back["support_violations"], 0);
    }
}

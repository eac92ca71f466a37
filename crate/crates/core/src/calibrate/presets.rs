//! Published component structures and the bundled test models.

use crate::model::{
    Component, ComponentModel, CompositeSpec, IncrementDistribution, NpaModelSpec, WeightFunction,
};
use crate::solver::complement_mean;

/// Vertex fraction of the tree component of the Brightkite composite.
pub const BRIGHTKITE_RHO: f64 = 0.225;
/// Mean increment of the Brightkite network.
pub const BRIGHTKITE_MEAN_INCREMENT: f64 = 3.6765;
pub const BRIGHTKITE_NODES: usize = 58_228;
pub const BRIGHTKITE_EDGES: usize = 214_078;
const BRIGHTKITE_SUPPORT: usize = 40;

/// Vertex fraction of the AER component of the Gowalla composite.
pub const GOWALLA_RHO: f64 = 0.35;
pub const GOWALLA_AER_MEAN_DEGREE: f64 = 2.75;
const GOWALLA_SUPPORT: usize = 50;

/// Complement of the Brightkite composite before calibration: linear
/// weights and `r_k ∝ k^-beta` on `[1, 40]`, with `beta` chosen so the mean
/// increment is `(m - rho) / (1 - rho)`.
pub fn brightkite_complement() -> NpaModelSpec {
    let want = complement_mean(BRIGHTKITE_MEAN_INCREMENT, 1.0, BRIGHTKITE_RHO).expect("valid constants");
    let table = |beta: f64| -> Vec<f64> {
        (1..=BRIGHTKITE_SUPPORT).map(|k| (k as f64).powf(-beta)).collect()
    };
    let mean = |beta: f64| {
        let r = table(beta);
        let z: f64 = r.iter().sum();
        r.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum::<f64>() / z
    };
    // The mean falls from 20.5 at beta = 0 towards 1.
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) > want {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    NpaModelSpec::new(
        WeightFunction::linear(1),
        IncrementDistribution::from_weights(1, &table(0.5 * (lo + hi))),
    )
}

/// BA tree on 22.5% of the vertices plus an NPA complement.
pub fn preset_brightkite() -> CompositeSpec {
    CompositeSpec {
        components: vec![
            Component {
                model: ComponentModel::BaTree,
                rho: BRIGHTKITE_RHO,
            },
            Component {
                model: ComponentModel::Npa(brightkite_complement()),
                rho: 1.0 - BRIGHTKITE_RHO,
            },
        ],
        total_n: BRIGHTKITE_NODES,
    }
}

/// `r_k = 0.3004 (k - 0.1259)^-1.2562` on `k = 1..=50`, renormalized, with
/// the sum of the raw values.
pub fn gowalla_increments() -> (IncrementDistribution, f64) {
    let raw: Vec<f64> = (1..=GOWALLA_SUPPORT)
        .map(|k| 0.3004 * (k as f64 - 0.1259).powf(-1.2562))
        .collect();
    let sum = raw.iter().sum();
    (IncrementDistribution::from_weights(1, &raw), sum)
}

/// AER graph (`a = 2.75`) on 35% of the vertices plus a linear-weight NPA
/// graph, 100000 vertices in total.
pub fn preset_gowalla() -> CompositeSpec {
    CompositeSpec {
        components: vec![
            Component {
                model: ComponentModel::Aer {
                    mean_degree: GOWALLA_AER_MEAN_DEGREE,
                },
                rho: GOWALLA_RHO,
            },
            Component {
                model: ComponentModel::Npa(NpaModelSpec::new(WeightFunction::linear(1), gowalla_increments().0)),
                rho: 1.0 - GOWALLA_RHO,
            },
        ],
        total_n: 100_000,
    }
}

/// Models used to check the solver against simulation: linear, sublinear
/// `k^0.8`, superlinear `k^1.2` capped at degree 200, constant, and the BA
/// tree.
pub fn test_models() -> Vec<(&'static str, NpaModelSpec)> {
    let increments = || IncrementDistribution::new(1, vec![0.5, 0.3, 0.2]);
    vec![
        ("linear", NpaModelSpec::new(WeightFunction::linear(1), increments())),
        ("sublinear", NpaModelSpec::new(WeightFunction::power(1, 0.8), increments())),
        (
            "superlinear",
            NpaModelSpec::new(WeightFunction::power(1, 1.2).with_max_degree(200), increments()),
        ),
        ("constant", NpaModelSpec::new(WeightFunction::constant(1, 1.0), increments())),
        ("ba-tree", NpaModelSpec::ba_tree()),
    ]
}

//! Walk models and endpoints shared by the benchmarks.

use chamber_core::{ChamberPoint, CompositeSpec, PresetId};

pub struct Instance {
    pub name: &'static str,
    pub spec: CompositeSpec,
    pub u: ChamberPoint,
    pub v: ChamberPoint,
    pub n: usize,
}

fn point(c: &[i64]) -> ChamberPoint {
    ChamberPoint::new(c.to_vec()).expect("chamber point")
}

/// Fixed-endpoint instances of increasing size.
pub fn instances() -> Vec<Instance> {
    vec![
        Instance { name: "lock_step_k1_n256", spec: PresetId::LockStepFixed.spec(1).unwrap(), u: point(&[1]), v: point(&[1]), n: 256 },
        Instance { name: "watermelon_k2_n100", spec: PresetId::Watermelon.spec(2).unwrap(), u: point(&[1, 3]), v: point(&[1, 3]), n: 100 },
        Instance { name: "random_turns_k3_n40", spec: PresetId::RandomTurnsFixed.spec(3).unwrap(), u: point(&[1, 2, 3]), v: point(&[2, 3, 5]), n: 40 },
        Instance { name: "tangled_k3_n24", spec: PresetId::TangledIsolated.spec(3).unwrap(), u: point(&[1, 2, 3]), v: point(&[1, 2, 3]), n: 24 },
    ]
}

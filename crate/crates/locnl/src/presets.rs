//! Built-in configurations.

use crate::config::*;

/// `A = (-1,0)`, `B = (0,1)` with box kernels of radius 1.
pub fn reference_scenario() -> RunConfig {
    RunConfig {
        partition: PartitionSpec { a: [-1.0, 0.0], b: [0.0, 1.0] },
        kernels: KernelsSpec {
            j: KernelSpec { profile: ProfileSpec::Box, radius: 1.0, sigma: None, samples: None },
            g: KernelSpec { profile: ProfileSpec::Box, radius: 1.0, sigma: None, samples: None },
        },
        resolution: ResolutionSpec { n_a: 64, n_b: 64 },
        model: ModelSpec::ParabolicElliptic,
        time: TimeSpec { t_end: 1.0, dt: 0.01, scheme: SchemeSpec::ImplicitEuler },
        initial: InitialSpec {
            u0: Some(InitialData::Expression("cos(pi*x)".into())),
            v0: Some(InitialData::Expression("1 - x".into())),
        },
        outputs: OutputSpec::default(),
        epsilon: Some(EpsilonSpec { ladder: vec![1e-1, 1e-2, 1e-3], t_layer: None }),
    }
}

/// Interface-trace experiment: `u0 = 1 + x` peaks at the interface, so the
/// balance solve puts `v` strictly below `u` there.
pub fn demo_jump() -> RunConfig {
    let mut cfg = reference_scenario();
    cfg.kernels.g = KernelSpec { profile: ProfileSpec::Tent, radius: 0.5, sigma: None, samples: None };
    cfg.time = TimeSpec { t_end: 0.2, dt: 0.002, scheme: SchemeSpec::ImplicitEuler };
    cfg.initial = InitialSpec { u0: Some(InitialData::Expression("1 + x".into())), v0: None };
    cfg.epsilon = None;
    cfg
}

pub fn by_name(name: &str) -> Option<RunConfig> {
    match name {
        "reference" => Some(reference_scenario()),
        "demo-jump" => Some(demo_jump()),
        _ => None,
    }
}

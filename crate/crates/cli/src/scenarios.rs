//! Named parameter sets for the runs referenced throughout the test
//! suites. Each scenario is a list of flat `key = value` settings applied
//! on top of the defaults; a config file can override individual keys.

pub const NAMES: &[&str] = &[
    "alt1_competitive",
    "alt2_cooperative",
    "coop_very_weak",
    "limit_epsilon",
    "gms_scalar_i",
    "gms_scalar_ii",
    "gms_scalar_iii",
    "gms_scalar_iv",
    "ex2_absorption",
    "ex3_competition",
    "ex3_log",
];

pub fn settings_for(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    let pairs: &'static [(&'static str, &'static str)] = match name {
        "alt2_cooperative" => &[
            ("spec.family", "system"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "0"),
            ("spec.a2", "0"),
            ("spec.b1", "0.5"),
            ("spec.b2", "0.5"),
            ("spec.k1", "0"),
            ("spec.k2", "0"),
            ("mesh.n", "2049"),
            ("mesh.s", "2"),
        ],
        "alt1_competitive" => &[
            ("spec.family", "system"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "0"),
            ("spec.a2", "0"),
            ("spec.b1", "-0.5"),
            ("spec.b2", "-0.5"),
            ("spec.k1", "1.2"),
            ("spec.k2", "1.2"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "coop_very_weak" => &[
            ("spec.family", "system"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "0"),
            ("spec.a2", "0"),
            ("spec.b1", "0.1"),
            ("spec.b2", "0.1"),
            ("spec.k1", "1.8"),
            ("spec.k2", "1.8"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
            ("run.m_init", "0.9"),
            ("run.stages", "12"),
            ("fit.window_lo", "1e-3"),
            ("fit.window_hi", "1e-1"),
        ],
        "limit_epsilon" => &[
            ("spec.family", "system"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "-0.5"),
            ("spec.a2", "-0.5"),
            ("spec.b1", "0.5"),
            ("spec.b2", "0.5"),
            ("spec.k1", "1"),
            ("spec.k2", "1"),
            ("mesh.n", "2049"),
            ("mesh.s", "2"),
        ],
        "gms_scalar_i" => &[
            ("spec.family", "scalar"),
            ("spec.r", "2"),
            ("spec.k", "0"),
            ("spec.delta", "-0.5"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "gms_scalar_ii" => &[
            ("spec.family", "scalar"),
            ("spec.r", "2"),
            ("spec.k", "1"),
            ("spec.delta", "0"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "gms_scalar_iii" => &[
            ("spec.family", "scalar"),
            ("spec.r", "2"),
            ("spec.k", "0"),
            ("spec.delta", "-1.5"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "gms_scalar_iv" => &[
            ("spec.family", "scalar"),
            ("spec.r", "2"),
            ("spec.k", "0"),
            ("spec.delta", "-3.5"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "ex2_absorption" => &[
            ("spec.family", "absorption"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "-0.5"),
            ("spec.a2", "-0.5"),
            ("spec.b1", "0.25"),
            ("spec.b2", "0.25"),
            ("spec.alpha1", "0"),
            ("spec.alpha2", "0"),
            ("spec.beta1", "0.5"),
            ("spec.beta2", "0.5"),
            ("mesh.n", "2049"),
            ("mesh.s", "2"),
        ],
        "ex3_competition" => &[
            ("spec.family", "competition"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.lambda1", "1"),
            ("spec.lambda2", "1"),
            ("spec.mu1", "1"),
            ("spec.mu2", "1"),
            ("spec.alpha1", "-1.5"),
            ("spec.alpha2", "-1.5"),
            ("spec.beta1", "0"),
            ("spec.beta2", "0"),
            ("spec.a1", "1"),
            ("spec.a2", "1"),
            ("spec.b1", "1"),
            ("spec.b2", "1"),
            ("mesh.n", "2049"),
            ("mesh.s", "3"),
        ],
        "ex3_log" => &[
            ("spec.family", "competition"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.lambda1", "1"),
            ("spec.lambda2", "1"),
            ("spec.mu1", "1"),
            ("spec.mu2", "1"),
            ("spec.alpha1", "-1"),
            ("spec.alpha2", "-1"),
            ("spec.beta1", "0"),
            ("spec.beta2", "0"),
            ("spec.a1", "1"),
            ("spec.a2", "1"),
            ("spec.b1", "1"),
            ("spec.b2", "1"),
            ("mesh.n", "2049"),
            ("mesh.s", "2"),
        ],
        _ => return None,
    };
    Some(pairs)
}

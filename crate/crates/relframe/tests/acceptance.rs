//! Acceptance suite. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p relframe --test acceptance -- --nocapture` to see them.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use relframe_core::frame::{pushforward, smearing_channel};
use relframe_core::linalg::qubit;
use relframe_core::relativization::{
    check_equivariant_tensor_form, check_functor_laws, check_naturality, external_frame_transform,
    relativize,
};
use relframe_core::sampling::Sampler;
use relframe_core::{
    ChannelMap, ComplexMatrix, Config, Error, FiniteGroup, FrameMorphism, FrameObservable,
    RelativizationMap, SemiQuantumSystem, UnitaryRep, YenMorphism, C64,
};

const TOL: f64 = 1e-9;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn cfg() -> Config {
    Config::default()
}

struct Scenario {
    name: &'static str,
    frame: Arc<FrameObservable>,
    system: Arc<SemiQuantumSystem>,
}

struct Zoo {
    z2: Arc<FiniteGroup>,
    z3: Arc<FiniteGroup>,
    z4: Arc<FiniteGroup>,
    s3: Arc<FiniteGroup>,
    x_rep: Arc<UnitaryRep>,
    perm: Arc<UnitaryRep>,
    rot: Arc<UnitaryRep>,
}

fn perm_matrix(p: [usize; 3]) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, |i, j| {
        if p[j] == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

impl Zoo {
    fn new() -> Self {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let z3 = Arc::new(FiniteGroup::cyclic(3));
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let perm = Arc::new(
            UnitaryRep::new(
                s3.clone(),
                perms.iter().map(|p| perm_matrix(*p)).collect(),
                &cfg(),
            )
            .unwrap(),
        );
        let quarter = ComplexMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let mut powers = vec![ComplexMatrix::identity(2)];
        for k in 1..4 {
            powers.push(powers[k - 1].matmul(&quarter));
        }
        let rot = Arc::new(UnitaryRep::new(z4.clone(), powers, &cfg()).unwrap());
        Self {
            x_rep: Arc::new(UnitaryRep::regular(z2.clone())),
            z2,
            z3,
            z4,
            s3,
            perm,
            rot,
        }
    }

    fn full(rep: &Arc<UnitaryRep>) -> Arc<SemiQuantumSystem> {
        Arc::new(SemiQuantumSystem::full(rep.clone(), &cfg()))
    }

    fn canonical(group: &Arc<FiniteGroup>) -> Arc<FrameObservable> {
        Arc::new(FrameObservable::canonical_ideal(group.clone(), &cfg()))
    }

    fn smeared(frame: &Arc<FrameObservable>, lambda: f64) -> FrameMorphism {
        pushforward(
            frame.clone(),
            smearing_channel(frame, lambda, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap()
    }

    fn z2_seed(&self, lambda: f64) -> Arc<FrameObservable> {
        let seed =
            ComplexMatrix::from_real(2, &[1.0 - lambda / 2.0, 0.0, 0.0, lambda / 2.0]).unwrap();
        Arc::new(FrameObservable::from_seed(self.x_rep.clone(), &seed, None, &cfg()).unwrap())
    }

    fn unlocalized(rep: &Arc<UnitaryRep>) -> Arc<FrameObservable> {
        Arc::new(FrameObservable::unlocalized(rep.clone(), &cfg()).unwrap())
    }

    fn scenarios(&self) -> Vec<Scenario> {
        let c1 = Arc::new(FiniteGroup::cyclic(1));
        let trivial_qubit = Arc::new(UnitaryRep::trivial(c1.clone(), 2));
        let reg3 = Arc::new(UnitaryRep::regular(self.z3.clone()));
        let reg4 = Arc::new(UnitaryRep::regular(self.z4.clone()));
        let qubit = Self::full(&self.x_rep);
        let span_ix = Arc::new(
            SemiQuantumSystem::from_generators(self.x_rep.clone(), &[qubit::x()], &cfg()).unwrap(),
        );
        let z3_invariant =
            Arc::new(SemiQuantumSystem::invariant_subalgebra(reg3.clone(), &cfg()).unwrap());
        let s = |name, frame, system| Scenario {
            name,
            frame,
            system,
        };
        vec![
            s("trivial", Self::canonical(&c1), Self::full(&trivial_qubit)),
            s("z2-ideal", self.z2_seed(0.0), qubit.clone()),
            s("z2-smeared-1/4", self.z2_seed(0.25), qubit.clone()),
            s("z2-smeared-1/2", self.z2_seed(0.5), qubit.clone()),
            s("z2-ideal-on-span{I,X}", self.z2_seed(0.0), span_ix),
            s("z2-unlocalized", Self::unlocalized(&self.x_rep), qubit),
            s("z3-canonical", Self::canonical(&self.z3), Self::full(&reg3)),
            s(
                "z3-smeared-on-invariant",
                Self::smeared(&Self::canonical(&self.z3), 0.3)
                    .target()
                    .clone(),
                z3_invariant,
            ),
            s(
                "z3-unlocalized",
                Self::unlocalized(&reg3),
                Self::full(&reg3),
            ),
            s("z4-canonical", Self::canonical(&self.z4), Self::full(&reg4)),
            s(
                "z4-canonical-on-rotation",
                Self::canonical(&self.z4),
                Self::full(&self.rot),
            ),
            s(
                "s3-canonical",
                Self::canonical(&self.s3),
                Self::full(&self.perm),
            ),
            s(
                "s3-smeared",
                Self::smeared(&Self::canonical(&self.s3), 0.5)
                    .target()
                    .clone(),
                Self::full(&self.perm),
            ),
            s(
                "s3-unlocalized",
                Self::unlocalized(&self.perm),
                Self::full(&self.perm),
            ),
        ]
    }
}

fn channel_axioms(zoo: &Zoo) -> Verdict {
    let scenarios = zoo.scenarios();
    let mut worst: f64 = 0.0;
    for s in &scenarios {
        let map = RelativizationMap::new(s.frame.clone(), s.system.clone())
            .map_err(|e| format!("{}: {e}", s.name))?;
        let r = map.check_channel_axioms(&cfg());
        let choi_ok = r
            .choi_min_eigenvalue
            .map_or(!s.system.is_full_algebra(), |m| m >= -TOL);
        if !(r.unitality <= TOL
            && r.invariance <= TOL
            && r.sampled_min_eigenvalue >= -TOL
            && choi_ok
            && r.max_norm_ratio <= 1.0 + TOL)
        {
            return Err(format!("{}: {r:?}", s.name));
        }
        worst = worst.max(r.max_deviation());
    }
    Ok(format!(
        "{} scenarios, worst violation {worst:.2e}",
        scenarios.len()
    ))
}

fn ideal_iff(zoo: &Zoo) -> Verdict {
    let (mut ideal, mut non_ideal) = (0, 0);
    let mut min_gap = f64::INFINITY;
    for s in zoo
        .scenarios()
        .iter()
        .filter(|s| s.system.is_full_algebra())
    {
        let r = RelativizationMap::new(s.frame.clone(), s.system.clone())
            .and_then(|m| m.check_ideal_isomorphism(&cfg()))
            .map_err(|e| format!("{}: {e}", s.name))?;
        if s.frame.is_ideal() {
            ideal += 1;
            if r.multiplicativity > TOL || r.isometry > TOL {
                return Err(format!("{}: ideal frame deviates {r:?}", s.name));
            }
        } else {
            non_ideal += 1;
            if r.multiplicativity < 1e-3 || r.multiplicativity_witness.is_none() {
                return Err(format!(
                    "{}: non-ideal frame looks multiplicative {r:?}",
                    s.name
                ));
            }
            min_gap = min_gap.min(r.multiplicativity);
        }
    }
    if ideal == 0 || non_ideal == 0 {
        return Err("suite lacks ideal or non-ideal scenarios".into());
    }
    Ok(format!(
        "{ideal} ideal, {non_ideal} non-ideal (smallest witnessed deviation {min_gap:.3})"
    ))
}

fn closed_forms(zoo: &Zoo) -> Verdict {
    let qubit = Zoo::full(&zoo.x_rep);
    let zz = qubit::z().kron(&qubit::z());
    let ideal =
        relativize(&zoo.z2_seed(0.0), &qubit, &qubit::z(), TOL).map_err(|e| e.to_string())?;
    let d1 = ideal.max_abs_diff(&zz);
    let smeared =
        relativize(&zoo.z2_seed(0.5), &qubit, &qubit::z(), TOL).map_err(|e| e.to_string())?;
    let d2 = smeared.max_abs_diff(&zz.scale_real(0.5));
    let norm = smeared.operator_norm();
    if d1 <= 1e-12 && d2 <= 1e-12 && (norm - 0.5).abs() <= TOL {
        Ok(format!("ideal {d1:.1e}, smeared {d2:.1e}, norm {norm:.12}"))
    } else {
        Err(format!("ideal {d1:e}, smeared {d2:e}, norm {norm}"))
    }
}

struct Chains {
    chains: Vec<(&'static str, Vec<(FrameMorphism, ChannelMap)>)>,
}

fn chains(zoo: &Zoo) -> Chains {
    let c = cfg();
    let qubit = Zoo::full(&zoo.x_rep);
    let ideal2 = zoo.z2_seed(0.0);
    let blur2 = Zoo::smeared(&ideal2, 0.5);
    let id_q = ChannelMap::identity(qubit.clone(), &c).unwrap();
    let flip = ChannelMap::conjugation(qubit.clone(), qubit.clone(), &qubit::x(), &c).unwrap();
    let hadamard = ChannelMap::conjugation(qubit.clone(), qubit.clone(), &qubit::h(), &c).unwrap();
    let dep_q = ChannelMap::depolarizing(qubit.clone(), qubit.clone(), 0.4, &c).unwrap();
    let wide_rep = Arc::new(
        zoo.x_rep
            .tensor(&UnitaryRep::trivial(zoo.z2.clone(), 2))
            .unwrap(),
    );
    let wide = Zoo::full(&wide_rep);
    let amp = ChannelMap::ampliation(qubit.clone(), wide.clone(), &c).unwrap();
    let wide_flip = ChannelMap::conjugation(
        wide.clone(),
        wide.clone(),
        &qubit::x().kron(&qubit::h()),
        &c,
    )
    .unwrap();

    let reg3 = Arc::new(UnitaryRep::regular(zoo.z3.clone()));
    let full3 = Zoo::full(&reg3);
    let canon3 = Zoo::canonical(&zoo.z3);
    let soft3 = Zoo::smeared(&canon3, 0.3);
    let soft3b = Zoo::smeared(soft3.target(), 0.5);
    let shift3 = ChannelMap::conjugation(full3.clone(), full3.clone(), reg3.matrix(1), &c).unwrap();
    let dep3 = ChannelMap::depolarizing(full3.clone(), full3.clone(), 0.6, &c).unwrap();

    let canon4 = Zoo::canonical(&zoo.z4);
    let turn1 = FrameMorphism::reorientation(canon4.clone(), 1, &c).unwrap();
    let turn3 = FrameMorphism::reorientation(turn1.target().clone(), 3, &c).unwrap();
    let rot = Zoo::full(&zoo.rot);
    let rot_shift =
        ChannelMap::conjugation(rot.clone(), rot.clone(), zoo.rot.matrix(1), &c).unwrap();
    let rot_dep = ChannelMap::depolarizing(rot.clone(), rot.clone(), 0.2, &c).unwrap();

    let canon_s3 = Zoo::canonical(&zoo.s3);
    let soften = Zoo::smeared(&canon_s3, 0.5);
    let soften2 = Zoo::smeared(soften.target(), 0.5);
    let perm = Zoo::full(&zoo.perm);
    let j = ComplexMatrix::from_fn(3, |_, _| C64::new(2.0 / 3.0, 0.0));
    let reflect = ChannelMap::conjugation(
        perm.clone(),
        perm.clone(),
        &(&ComplexMatrix::identity(3) - &j),
        &c,
    )
    .unwrap();
    let mix = ChannelMap::depolarizing(perm.clone(), perm.clone(), 0.3, &c).unwrap();

    let blind = Zoo::unlocalized(&zoo.x_rep);
    let stay = FrameMorphism::identity(blind, &c).unwrap();

    let id = |f: &Arc<FrameObservable>| FrameMorphism::identity(f.clone(), &c).unwrap();
    Chains {
        chains: vec![
            (
                "z2 smear then flip",
                vec![
                    (blur2.clone(), id_q.clone()),
                    (id(blur2.target()), flip.clone()),
                ],
            ),
            (
                "z2 flip then smear",
                vec![(id(&ideal2), flip.clone()), (blur2.clone(), dep_q.clone())],
            ),
            (
                "z2 non-equivariant",
                vec![
                    (blur2.clone(), hadamard),
                    (id(blur2.target()), flip.clone()),
                ],
            ),
            (
                "z2 into wider system",
                vec![(blur2.clone(), amp), (id(blur2.target()), wide_flip)],
            ),
            (
                "z3 smear twice",
                vec![(soft3.clone(), shift3), (soft3b, dep3)],
            ),
            (
                "z4 reorientations",
                vec![(turn1, rot_shift), (turn3, rot_dep)],
            ),
            ("s3 soften twice", vec![(soften, reflect), (soften2, mix)]),
            ("z2 unlocalized", vec![(stay.clone(), flip), (stay, dep_q)]),
        ],
    }
}

fn functor_laws(zoo: &Zoo) -> Verdict {
    let all = chains(zoo).chains;
    let mut worst: f64 = 0.0;
    for (name, chain) in &all {
        let r = check_functor_laws(chain, &cfg()).map_err(|e| format!("{name}: {e}"))?;
        if r.max_deviation() > TOL {
            return Err(format!("{name}: {r:?}"));
        }
        worst = worst.max(r.max_deviation());
    }
    Ok(format!("{} chains, worst deviation {worst:.2e}", all.len()))
}

/// Equivariant channels paired with a frame and a frame morphism on the
/// same group.
fn equivariant_cases(
    zoo: &Zoo,
) -> Vec<(
    &'static str,
    Arc<FrameObservable>,
    FrameMorphism,
    ChannelMap,
)> {
    let c = cfg();
    let qubit = Zoo::full(&zoo.x_rep);
    let ideal2 = zoo.z2_seed(0.0);
    let smeared2 = zoo.z2_seed(0.5);
    let blur2 = Zoo::smeared(&ideal2, 0.25);
    let wide = Zoo::full(&Arc::new(
        zoo.x_rep
            .tensor(&UnitaryRep::trivial(zoo.z2.clone(), 2))
            .unwrap(),
    ));

    let reg3 = Arc::new(UnitaryRep::regular(zoo.z3.clone()));
    let full3 = Zoo::full(&reg3);
    let canon3 = Zoo::canonical(&zoo.z3);
    let soft3 = Zoo::smeared(&canon3, 0.3);
    let rot = Zoo::full(&zoo.rot);
    let canon4 = Zoo::canonical(&zoo.z4);
    let turn4 = FrameMorphism::reorientation(canon4.clone(), 1, &c).unwrap();

    let perm = Zoo::full(&zoo.perm);
    let perm_wide = Zoo::full(&Arc::new(
        zoo.perm
            .tensor(&UnitaryRep::trivial(zoo.s3.clone(), 2))
            .unwrap(),
    ));
    let canon_s3 = Zoo::canonical(&zoo.s3);
    let soften = Zoo::smeared(&canon_s3, 0.5);
    let j = ComplexMatrix::from_fn(3, |_, _| C64::new(2.0 / 3.0, 0.0));
    let reflect = &ComplexMatrix::identity(3) - &j;
    let blind = Zoo::unlocalized(&zoo.x_rep);

    let id = |f: &Arc<FrameObservable>| FrameMorphism::identity(f.clone(), &c).unwrap();
    vec![
        (
            "z2 conjugation by X",
            ideal2.clone(),
            blur2.clone(),
            ChannelMap::conjugation(qubit.clone(), qubit.clone(), zoo.x_rep.matrix(1), &c).unwrap(),
        ),
        (
            "z2 depolarizer",
            smeared2.clone(),
            id(&smeared2),
            ChannelMap::depolarizing(qubit.clone(), qubit.clone(), 0.4, &c).unwrap(),
        ),
        (
            "z2 ampliation",
            ideal2.clone(),
            blur2.clone(),
            ChannelMap::ampliation(qubit.clone(), wide, &c).unwrap(),
        ),
        (
            "z2 identity on unlocalized",
            blind.clone(),
            id(&blind),
            ChannelMap::identity(qubit.clone(), &c).unwrap(),
        ),
        (
            "z3 shift conjugation",
            canon3.clone(),
            soft3.clone(),
            ChannelMap::conjugation(full3.clone(), full3.clone(), reg3.matrix(1), &c).unwrap(),
        ),
        (
            "z3 depolarizer",
            soft3.target().clone(),
            id(soft3.target()),
            ChannelMap::depolarizing(full3.clone(), full3.clone(), 0.6, &c).unwrap(),
        ),
        (
            "z4 rotation conjugation",
            canon4.clone(),
            turn4.clone(),
            ChannelMap::conjugation(rot.clone(), rot.clone(), zoo.rot.matrix(1), &c).unwrap(),
        ),
        (
            "z4 depolarizer",
            canon4,
            turn4,
            ChannelMap::depolarizing(rot.clone(), rot, 0.25, &c).unwrap(),
        ),
        (
            "s3 commutant reflection",
            canon_s3.clone(),
            soften.clone(),
            ChannelMap::conjugation(perm.clone(), perm.clone(), &reflect, &c).unwrap(),
        ),
        (
            "s3 depolarizer",
            soften.target().clone(),
            soften.clone(),
            ChannelMap::depolarizing(perm.clone(), perm.clone(), 0.3, &c).unwrap(),
        ),
        (
            "s3 ampliation",
            canon_s3.clone(),
            id(&canon_s3),
            ChannelMap::ampliation(perm, perm_wide, &c).unwrap(),
        ),
    ]
}

fn naturality(zoo: &Zoo) -> Verdict {
    let cases = equivariant_cases(zoo);
    let mut worst: f64 = 0.0;
    for (name, frame, _, phi) in &cases {
        let r = check_naturality(frame, phi, &cfg()).map_err(|e| format!("{name}: {e}"))?;
        if !r.holds() || r.max_deviation > TOL {
            return Err(format!("{name}: {r:?}"));
        }
        worst = worst.max(r.max_deviation);
    }
    Ok(format!(
        "{} equivariant channels, worst deviation {worst:.2e}",
        cases.len()
    ))
}

fn tensor_form(zoo: &Zoo) -> Verdict {
    let cases = equivariant_cases(zoo);
    let mut worst: f64 = 0.0;
    for (name, _, psi, phi) in &cases {
        let r =
            check_equivariant_tensor_form(psi, phi, &cfg()).map_err(|e| format!("{name}: {e}"))?;
        if !r.holds() || r.max_deviation > TOL {
            return Err(format!("{name}: {r:?}"));
        }
        worst = worst.max(r.max_deviation);
    }
    Ok(format!(
        "{} equivariant pairs, worst deviation {worst:.2e}",
        cases.len()
    ))
}

fn duality(zoo: &Zoo) -> Verdict {
    let scenarios = zoo.scenarios();
    let mut worst: f64 = 0.0;
    let mut systems = 0;
    for (k, s) in scenarios.iter().enumerate() {
        let map =
            RelativizationMap::new(s.frame.clone(), s.system.clone()).map_err(|e| e.to_string())?;
        let mut sampler = Sampler::new(0x5eed + k as u64);
        for _ in 0..100 {
            let t = sampler.matrix(map.joint_dim());
            let a = sampler.element(s.system.space());
            let lhs = map
                .predual(&t)
                .map_err(|e| e.to_string())?
                .matmul(&a)
                .trace();
            let rhs = t.matmul(&map.apply_unchecked(&a)).trace();
            worst = worst.max((lhs - rhs).norm());
        }
        for sys in [&s.system, s.frame.value_system()] {
            systems += 1;
            let q = sys.quotient_dimension(TOL);
            if q != sys.dim() {
                return Err(format!(
                    "{}: quotient dimension {q} vs span {}",
                    s.name,
                    sys.dim()
                ));
            }
        }
    }
    if worst > TOL {
        return Err(format!("pairing deviation {worst:e}"));
    }
    Ok(format!(
        "{} scenarios x 100 pairs, worst pairing deviation {worst:.2e}; {systems} quotient dimensions exact",
        scenarios.len()
    ))
}

fn external_transforms(zoo: &Zoo) -> Verdict {
    let c = cfg();
    let mut sampler = Sampler::new(0x5eed);
    let mut cases: Vec<(String, FrameMorphism, Arc<SemiQuantumSystem>)> = Vec::new();
    let qubit = Zoo::full(&zoo.x_rep);
    let ideal2 = zoo.z2_seed(0.0);
    cases.push((
        "z2 identity".into(),
        FrameMorphism::identity(ideal2.clone(), &c).unwrap(),
        qubit.clone(),
    ));
    cases.push((
        "z2 reorient".into(),
        FrameMorphism::reorientation(ideal2.clone(), 1, &c).unwrap(),
        qubit.clone(),
    ));
    cases.push(("z2 smear".into(), Zoo::smeared(&ideal2, 0.5), qubit.clone()));
    let reg3 = Arc::new(UnitaryRep::regular(zoo.z3.clone()));
    let canon3 = Zoo::canonical(&zoo.z3);
    for h in 1..3 {
        cases.push((
            format!("z3 reorient {h}"),
            FrameMorphism::reorientation(canon3.clone(), h, &c).unwrap(),
            Zoo::full(&reg3),
        ));
    }
    let canon4 = Zoo::canonical(&zoo.z4);
    for h in 1..4 {
        cases.push((
            format!("z4 reorient {h}"),
            FrameMorphism::reorientation(canon4.clone(), h, &c).unwrap(),
            Zoo::full(&zoo.rot),
        ));
    }
    let canon_s3 = Zoo::canonical(&zoo.s3);
    cases.push((
        "s3 identity".into(),
        FrameMorphism::identity(canon_s3.clone(), &c).unwrap(),
        Zoo::full(&zoo.perm),
    ));
    cases.push((
        "s3 smear".into(),
        Zoo::smeared(&canon_s3, 0.4),
        Zoo::full(&zoo.perm),
    ));

    let mut worst: f64 = 0.0;
    for (name, psi, system) in &cases {
        for _ in 0..5 {
            let omega = sampler.state(psi.target().dim());
            let rho = sampler.state(system.ambient_dim());
            let t = external_frame_transform(psi, system, &omega, &rho, None, &c)
                .map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(t.deviation());
        }
    }
    // worked case: smeared Z2 frame in |0><0|, system in |0><0|
    let worked = external_frame_transform(
        &cases[2].1,
        &qubit,
        &qubit::ket0(),
        &qubit::ket0(),
        None,
        &c,
    )
    .map_err(|e| e.to_string())?;
    let mixture = ComplexMatrix::from_real(2, &[0.75, 0.0, 0.0, 0.25]).unwrap();
    let worked_dev = worked
        .target_side
        .canonical()
        .max_abs_diff(&mixture)
        .max(worked.deviation());
    if worst > TOL || worked_dev > TOL {
        return Err(format!("deviation {worst:e}, worked case {worked_dev:e}"));
    }
    // kernel violation: unlocalized frame, Hadamard on the system
    let blind = Zoo::unlocalized(&zoo.x_rep);
    let stay = FrameMorphism::identity(blind, &c).unwrap();
    let hadamard = ChannelMap::conjugation(qubit.clone(), qubit, &qubit::h(), &c).unwrap();
    match YenMorphism::new(&stay, &hadamard, &c) {
        Err(Error::IllDefined { norm, .. }) if norm >= 1e-3 => Ok(format!(
            "{} morphisms, worst deviation {worst:.2e}; worked case (3/4, 1/4) within {worked_dev:.1e}; IllDefined witness norm {norm:.3}",
            cases.len()
        )),
        other => Err(format!("kernel violation not detected: {other:?}")),
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn cli_determinism() -> Verdict {
    let run = |name: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_relframe"))
            .arg("run")
            .arg(fixture(name))
            .args(extra)
            .env_remove(relframe::TOLERANCE_ENV)
            .output()
            .expect("binary runs")
    };
    for name in ["z2_golden.json", "s3_golden.json"] {
        let args = ["--report", "machine", "--seed", "24301"];
        let (a, b) = (run(name, &args), run(name, &args));
        if a.stdout.is_empty() || a.stdout != b.stdout {
            return Err(format!("{name}: machine reports differ between runs"));
        }
    }
    let codes: Vec<Option<i32>> = ["z2_golden.json", "z2_fail.json", "z2_error.json"]
        .iter()
        .map(|n| run(n, &[]).status.code())
        .collect();
    if codes != [Some(0), Some(1), Some(2)] {
        return Err(format!("exit codes {codes:?}"));
    }
    Ok("golden Z2 and S3 reports byte-identical; exit codes 0/1/2".into())
}

#[test]
fn acceptance() {
    let zoo = Zoo::new();
    let criteria: Vec<Criterion> = vec![
        ("channel axioms", Box::new(|| channel_axioms(&zoo))),
        ("ideal iff homomorphism", Box::new(|| ideal_iff(&zoo))),
        ("closed forms", Box::new(|| closed_forms(&zoo))),
        ("functor laws", Box::new(|| functor_laws(&zoo))),
        ("naturality", Box::new(|| naturality(&zoo))),
        ("tensor form", Box::new(|| tensor_form(&zoo))),
        ("duality", Box::new(|| duality(&zoo))),
        (
            "external transforms",
            Box::new(|| external_transforms(&zoo)),
        ),
        ("cli determinism", Box::new(cli_determinism)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

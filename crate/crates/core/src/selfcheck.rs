//! Embedded verification suite: every property family checks a fast
//! implementation against an independent oracle (exhaustive enumeration,
//! quadrature, brute-force scans or finite differences).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::discrepancy::{self, FeatureBatch, GaussianBatch};
use crate::distfield::{self, grad_check};
use crate::error::Result;
use crate::oracle;
use crate::scargraph::{min_cut_solve_detailed, SurfaceGraph};
use crate::segmetrics::{self, PointSet};
use crate::volgrid::Volume;

/// Outcome of one property family.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl FamilyResult {
    fn pass(name: &str, detail: String) -> Self {
        FamilyResult {
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        FamilyResult {
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

/// Results of the whole suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SelfcheckReport {
    pub families: Vec<FamilyResult>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }
}

/// Run every property family with deterministic seeding.
pub fn run_selfcheck(seed: u64) -> SelfcheckReport {
    let families = vec![
        check_mincut_enumeration(seed),
        check_cfd_quadrature(seed.wrapping_add(1), &discrepancy::cfd_point),
        check_varda_quadrature(seed.wrapping_add(2)),
        check_dtm_bruteforce(seed.wrapping_add(3)),
        check_dtm_signed_lipschitz(seed.wrapping_add(3)),
        check_gradient_suite(seed.wrapping_add(4)),
        check_metric_oracles(seed.wrapping_add(5)),
    ];
    SelfcheckReport { families }
}

// ---------------------------------------------------------------------------
// min-cut vs exhaustive enumeration
// ---------------------------------------------------------------------------

fn random_graph(rng: &mut ChaCha20Rng, max_nodes: usize) -> SurfaceGraph {
    let n = rng.gen_range(2..=max_nodes);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    let lambda = rng.gen_range(0.0..2.0);
    let mut g = SurfaceGraph::with_topology(n, edges, lambda).expect("valid topology");
    for t in &mut g.tlink {
        *t = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
    }
    for w in &mut g.nlink {
        *w = rng.gen_range(0.0..3.0);
    }
    g
}

/// 200 random graphs with up to 12 nodes: the solver energy must equal the
/// exhaustive 2^n minimum exactly, and the flow must equal the cut capacity.
pub fn check_mincut_enumeration(seed: u64) -> FamilyResult {
    const NAME: &str = "mincut-enumeration";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut max_duality_gap = 0.0f64;
    for trial in 0..200 {
        let g = random_graph(&mut rng, 12);
        let sol = match min_cut_solve_detailed(&g) {
            Ok(s) => s,
            Err(e) => return FamilyResult::fail(NAME, format!("trial {trial}: solver error {e}")),
        };
        let (min_energy, _) = oracle::min_energy_bruteforce(&g);
        if sol.energy != min_energy {
            return FamilyResult::fail(
                NAME,
                format!(
                    "trial {trial}: solver energy {} differs from enumerated minimum {}",
                    sol.energy, min_energy
                ),
            );
        }
        let gap = (sol.flow_value - sol.cut_capacity).abs() / sol.cut_capacity.max(1.0);
        max_duality_gap = max_duality_gap.max(gap);
        if gap > 1e-9 {
            return FamilyResult::fail(
                NAME,
                format!(
                    "trial {trial}: flow {} vs cut capacity {}",
                    sol.flow_value, sol.cut_capacity
                ),
            );
        }
    }
    FamilyResult::pass(
        NAME,
        format!("200/200 optimal energies match exactly; max duality gap {max_duality_gap:.2e}"),
    )
}

// ---------------------------------------------------------------------------
// CF distance vs quadrature
// ---------------------------------------------------------------------------

type CfdImpl = dyn Fn(&FeatureBatch, &FeatureBatch, f64) -> Result<f64>;

/// 50 random 1-D batch pairs: the closed-form estimator must match the
/// quadrature of the squared ECF difference within 1e-6; the worked value
/// 4 - 8/pi must be reproduced within 1e-9. `cfd_impl` is injectable so the
/// detector itself can be tested against a faulty kernel.
pub fn check_cfd_quadrature(seed: u64, cfd_impl: &CfdImpl) -> FamilyResult {
    const NAME: &str = "cfd-quadrature";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let ms = rng.gen_range(1..=20);
        let mt = rng.gen_range(1..=20);
        let zs = FeatureBatch::new(
            (0..ms)
                .map(|_| vec![rng.gen_range(-3.0..3.0)])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let zt = FeatureBatch::new(
            (0..mt)
                .map(|_| vec![rng.gen_range(-3.0..3.0)])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let a = rng.gen_range(0.5..2.0);
        let closed = match cfd_impl(&zs, &zt, a) {
            Ok(v) => v,
            Err(e) => return FamilyResult::fail(NAME, format!("trial {trial}: {e}")),
        };
        let quad = oracle::cfd_quadrature_1d(&zs, &zt, a, 1e-9);
        let err = (closed - quad).abs();
        worst = worst.max(err);
        if err > 1e-6 {
            return FamilyResult::fail(
                NAME,
                format!("trial {trial}: closed form {closed} vs quadrature {quad} (|diff| {err:.2e})"),
            );
        }
    }
    // worked value: ZS = {0}, ZT = {pi/2}, a = 1
    let zs = FeatureBatch::new(vec![vec![0.0]]).unwrap();
    let zt = FeatureBatch::new(vec![vec![std::f64::consts::FRAC_PI_2]]).unwrap();
    let expect = 4.0 - 8.0 / std::f64::consts::PI;
    match cfd_impl(&zs, &zt, 1.0) {
        Ok(v) if (v - expect).abs() <= 1e-9 => {}
        Ok(v) => {
            return FamilyResult::fail(
                NAME,
                format!("worked value {v} differs from 4 - 8/pi = {expect}"),
            )
        }
        Err(e) => return FamilyResult::fail(NAME, format!("worked value: {e}")),
    }
    FamilyResult::pass(
        NAME,
        format!("50/50 quadrature matches within 1e-6 (worst {worst:.2e}); worked value ok"),
    )
}

// ---------------------------------------------------------------------------
// VarDA kernel and distance vs quadrature
// ---------------------------------------------------------------------------

pub fn check_varda_quadrature(seed: u64) -> FamilyResult {
    const NAME: &str = "varda-quadrature";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst_kernel = 0.0f64;
    for trial in 0..20 {
        let (us, ls) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
        let (ut, lt) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
        let closed = discrepancy::varda_kernel(&[us], &[ls], &[ut], &[lt]).unwrap();
        let quad = oracle::gaussian_product_integral_1d(us, ls, ut, lt, 1e-12);
        let err = (closed - quad).abs();
        worst_kernel = worst_kernel.max(err);
        if err > 1e-8 {
            return FamilyResult::fail(
                NAME,
                format!("kernel trial {trial}: closed {closed} vs quadrature {quad}"),
            );
        }
    }
    // one 2-D kernel check against a tensor grid
    let (u1, l1) = ([0.3, -0.5], [0.4, 1.1]);
    let (u2, l2) = ([-0.2, 0.6], [0.9, 0.6]);
    let closed = discrepancy::varda_kernel(&u1, &l1, &u2, &l2).unwrap();
    let quad = oracle::gaussian_product_integral_2d(&u1, &l1, &u2, &l2, 513);
    if (closed - quad).abs() > 1e-6 {
        return FamilyResult::fail(
            NAME,
            format!("2-D kernel: closed {closed} vs quadrature {quad}"),
        );
    }

    let mut worst_dist = 0.0f64;
    for trial in 0..15 {
        let ms = rng.gen_range(1..=5);
        let mt = rng.gen_range(1..=5);
        let gen = |rng: &mut ChaCha20Rng, m: usize| {
            let means = (0..m).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect();
            let vars = (0..m).map(|_| vec![rng.gen_range(0.1..1.5)]).collect();
            GaussianBatch::new(means, vars).unwrap()
        };
        let qs = gen(&mut rng, ms);
        let qt = gen(&mut rng, mt);
        let closed = discrepancy::varda_distance(&qs, &qt).unwrap();
        let quad = oracle::mixture_l2_quadrature_1d(&qs, &qt, 1e-10);
        let err = (closed - quad).abs();
        worst_dist = worst_dist.max(err);
        if err > 1e-6 {
            return FamilyResult::fail(
                NAME,
                format!("distance trial {trial}: closed {closed} vs quadrature {quad}"),
            );
        }
    }
    // worked value: M=1, n=1, means 0 and 1, variances 0.5
    let qs = GaussianBatch::new(vec![vec![0.0]], vec![vec![0.5]]).unwrap();
    let qt = GaussianBatch::new(vec![vec![1.0]], vec![vec![0.5]]).unwrap();
    let got = discrepancy::varda_distance(&qs, &qt).unwrap();
    if (got - 0.313943).abs() > 1e-6 {
        return FamilyResult::fail(NAME, format!("worked value {got} != 0.313943"));
    }
    FamilyResult::pass(
        NAME,
        format!(
            "kernels within 1e-8 (worst {worst_kernel:.2e}), distances within 1e-6 (worst {worst_dist:.2e}); worked value ok"
        ),
    )
}

// ---------------------------------------------------------------------------
// DTM vs brute force, and the signed Lipschitz bound
// ---------------------------------------------------------------------------

fn random_mask(rng: &mut ChaCha20Rng, force_16: bool) -> Volume {
    let dims = if force_16 {
        [16, 16, 16]
    } else {
        [
            rng.gen_range(4..=12),
            rng.gen_range(4..=12),
            rng.gen_range(4..=12),
        ]
    };
    let spacing = match rng.gen_range(0..3) {
        0 => [1.0, 1.0, 1.0],
        1 => [0.7, 0.75, 2.0],
        _ => [
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
        ],
    };
    let p = rng.gen_range(0.2..0.8);
    let len = dims[0] * dims[1] * dims[2];
    let mut data: Vec<u8> = (0..len).map(|_| rng.gen_bool(p) as u8).collect();
    // both phases must be non-empty
    if data.iter().all(|&v| v == 0) {
        data[0] = 1;
    }
    if data.iter().all(|&v| v == 1) {
        data[0] = 0;
    }
    Volume::label(dims, spacing, data).expect("valid mask dims")
}

/// 30 random masks up to 16^3: the separable EDT must match the O(n^2)
/// nearest-boundary scan within 1e-6 absolute.
pub fn check_dtm_bruteforce(seed: u64) -> FamilyResult {
    const NAME: &str = "dtm-bruteforce";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..30 {
        let mask = random_mask(&mut rng, trial < 3);
        let fast = match distfield::signed_dtm(&mask, 1.0) {
            Ok(f) => f,
            Err(e) => return FamilyResult::fail(NAME, format!("trial {trial}: {e}")),
        };
        let slow = oracle::signed_dtm_bruteforce(&mask, 1.0);
        for (idx, (a, b)) in fast.phi().iter().zip(&slow).enumerate() {
            let err = (a - b).abs();
            worst = worst.max(err);
            if err > 1e-6 {
                return FamilyResult::fail(
                    NAME,
                    format!("trial {trial} voxel {idx}: edt {a} vs brute force {b}"),
                );
            }
        }
    }
    FamilyResult::pass(NAME, format!("30/30 masks match within 1e-6 (worst {worst:.2e})"))
}

/// The signed field must satisfy |phi(u) - phi(v)| <= ||u - v|| on every
/// voxel pair of the same 30 random masks.
pub fn check_dtm_signed_lipschitz(seed: u64) -> FamilyResult {
    const NAME: &str = "dtm-signed-lipschitz";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pairs_checked = 0u64;
    for trial in 0..30 {
        let mask = random_mask(&mut rng, trial < 3);
        let field = match distfield::signed_dtm(&mask, 1.0) {
            Ok(f) => f,
            Err(e) => return FamilyResult::fail(NAME, format!("trial {trial}: {e}")),
        };
        let phi = field.phi();
        let dims = mask.dims();
        let centers: Vec<[f64; 3]> = (0..phi.len())
            .map(|idx| {
                let c = mask.coords(idx);
                mask.voxel_center(c[0], c[1], c[2])
            })
            .collect();
        let _ = dims;
        for u in 0..phi.len() {
            for v in u + 1..phi.len() {
                pairs_checked += 1;
                let sep = {
                    let d0 = centers[u][0] - centers[v][0];
                    let d1 = centers[u][1] - centers[v][1];
                    let d2 = centers[u][2] - centers[v][2];
                    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
                };
                if (phi[u] - phi[v]).abs() > sep + 1e-9 {
                    return FamilyResult::fail(
                        NAME,
                        format!(
                            "trial {trial}: |phi({:?}) - phi({:?})| = |{} - {}| = {} exceeds \
                             voxel separation {} (the signed field is not 1-Lipschitz across \
                             sign changes at voxel resolution; the unsigned field |phi| is)",
                            mask.coords(u),
                            mask.coords(v),
                            phi[u],
                            phi[v],
                            (phi[u] - phi[v]).abs(),
                            sep
                        ),
                    );
                }
            }
        }
    }
    FamilyResult::pass(
        NAME,
        format!("{pairs_checked} voxel pairs satisfy the signed 1-Lipschitz bound"),
    )
}

// ---------------------------------------------------------------------------
// gradient suite
// ---------------------------------------------------------------------------

type LossFn = Box<dyn Fn(&[f64]) -> f64>;

struct GradCase {
    name: &'static str,
    point: Vec<f64>,
    analytic: Vec<f64>,
    loss: LossFn,
}

fn gradient_cases(rng: &mut ChaCha20Rng) -> Vec<GradCase> {
    let mut cases: Vec<GradCase> = Vec::new();
    let n = 16usize;

    // se_loss_la: gradient is phi itself
    {
        let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let analytic = distfield::grad_se_loss_la(&phi);
        cases.push(GradCase {
            name: "se_loss_la",
            point: pred,
            analytic,
            loss: Box::new(move |x| distfield::se_loss_la_slices(x, &phi, 0.5).unwrap()),
        });
    }
    // bce
    {
        let target: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.5) as u8).collect();
        let pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..0.9)).collect();
        let analytic = distfield::grad_bce(&pred, &target);
        cases.push(GradCase {
            name: "bce",
            point: pred,
            analytic,
            loss: Box::new(move |x| distfield::bce_loss_slices(x, &target).unwrap()),
        });
    }
    // soft dice
    {
        let target: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.5) as u8).collect();
        let pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..0.9)).collect();
        let analytic = distfield::grad_soft_dice(&pred, &target);
        cases.push(GradCase {
            name: "soft_dice",
            point: pred,
            analytic,
            loss: Box::new(move |x| distfield::soft_dice_loss_slices(x, &target).unwrap()),
        });
    }
    // cross entropy, 3 classes, interior of the simplex
    {
        let classes = 3usize;
        let target: Vec<u8> = (0..n).map(|_| rng.gen_range(0..classes) as u8).collect();
        let mut probs = vec![vec![0.0f64; n]; classes];
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            let raw: Vec<f64> = (0..classes).map(|_| rng.gen_range(0.2..1.0)).collect();
            let s: f64 = raw.iter().sum();
            for (c, r) in raw.iter().enumerate() {
                probs[c][v] = r / s;
            }
        }
        let flat: Vec<f64> = probs.iter().flatten().cloned().collect();
        let views: Vec<&[f64]> = probs.iter().map(|p| p.as_slice()).collect();
        let analytic = distfield::grad_cross_entropy(&views, &target);
        let t2 = target.clone();
        cases.push(GradCase {
            name: "cross_entropy",
            point: flat,
            analytic,
            loss: Box::new(move |x| {
                let chans: Vec<&[f64]> = x.chunks(n).collect();
                distfield::cross_entropy_slices_unchecked(&chans, &t2).unwrap()
            }),
        });
    }
    // se_loss_scar over both channels
    {
        let m = 10usize;
        let tn: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let ts: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let pn: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let ps: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let analytic = distfield::grad_se_loss_scar(&pn, &ps, &tn, &ts);
        let mut point = pn.clone();
        point.extend_from_slice(&ps);
        cases.push(GradCase {
            name: "se_loss_scar",
            point,
            analytic,
            loss: Box::new(move |x| {
                distfield::se_loss_scar_slices(&x[..m], &x[m..], &tn, &ts).unwrap()
            }),
        });
    }
    // sa_loss over both channels
    {
        let m = 10usize;
        let tn: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let ts: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let pn: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let ps: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
        let mask: Vec<f64> = (0..m).map(|_| rng.gen_bool(0.6) as u8 as f64).collect();
        let analytic = distfield::grad_sa_loss(&pn, &ps, &tn, &ts, &mask);
        let mut point = pn.clone();
        point.extend_from_slice(&ps);
        let mask2 = mask.clone();
        cases.push(GradCase {
            name: "sa_loss",
            point,
            analytic,
            loss: Box::new(move |x| {
                distfield::sa_loss_slices(&x[..m], &x[m..], &tn, &ts, &mask2).unwrap()
            }),
        });
    }
    // l1 against a reference, coordinates kept away from the kink
    {
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a: Vec<f64> = b
            .iter()
            .map(|&x| x + rng.gen_range(0.05..0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let analytic = distfield::grad_l1_mean(&a, Some(&b));
        let b2 = b.clone();
        cases.push(GradCase {
            name: "l1_pair",
            point: a,
            analytic,
            loss: Box::new(move |x| distfield::l1_mean_loss(x, Some(&b2)).unwrap()),
        });
    }
    // l1 zero-loss form
    {
        let a: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.05..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let analytic = distfield::grad_l1_mean(&a, None);
        cases.push(GradCase {
            name: "l1_zero",
            point: a,
            analytic,
            loss: Box::new(move |x| distfield::l1_mean_loss(x, None).unwrap()),
        });
    }
    // cfd_point wrt ZS entries
    {
        let (ms, mt, dim) = (4usize, 3usize, 2usize);
        let zs: Vec<Vec<f64>> = (0..ms)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zt: Vec<Vec<f64>> = (0..mt)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zs_b = FeatureBatch::new(zs.clone()).unwrap();
        let zt_b = FeatureBatch::new(zt).unwrap();
        let a = 1.0;
        let analytic = discrepancy::grad_cfd_point_zs(&zs_b, &zt_b, a).unwrap();
        let point: Vec<f64> = zs.iter().flatten().cloned().collect();
        let zt_c = zt_b.clone();
        cases.push(GradCase {
            name: "cfd_point",
            point,
            analytic,
            loss: Box::new(move |x| {
                let rows: Vec<Vec<f64>> = x.chunks(dim).map(|c| c.to_vec()).collect();
                let zs = FeatureBatch::new(rows).unwrap();
                discrepancy::cfd_point(&zs, &zt_c, a).unwrap()
            }),
        });
    }
    // mean_loss wrt ZS entries
    {
        let (ms, mt, dim) = (5usize, 4usize, 3usize);
        let zs: Vec<Vec<f64>> = (0..ms)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zt: Vec<Vec<f64>> = (0..mt)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zs_b = FeatureBatch::new(zs.clone()).unwrap();
        let zt_b = FeatureBatch::new(zt).unwrap();
        let analytic = discrepancy::grad_mean_loss_zs(&zs_b, &zt_b).unwrap();
        let point: Vec<f64> = zs.iter().flatten().cloned().collect();
        let zt_c = zt_b.clone();
        cases.push(GradCase {
            name: "mean_loss",
            point,
            analytic,
            loss: Box::new(move |x| {
                let rows: Vec<Vec<f64>> = x.chunks(dim).map(|c| c.to_vec()).collect();
                let zs = FeatureBatch::new(rows).unwrap();
                discrepancy::mean_loss(&zs, &zt_c).unwrap()
            }),
        });
    }
    // mmd wrt ZS entries
    {
        let (ms, mt, dim) = (4usize, 4usize, 2usize);
        let zs: Vec<Vec<f64>> = (0..ms)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zt: Vec<Vec<f64>> = (0..mt)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let zs_b = FeatureBatch::new(zs.clone()).unwrap();
        let zt_b = FeatureBatch::new(zt).unwrap();
        let sigma = 1.2;
        let analytic = discrepancy::grad_mmd_zs(&zs_b, &zt_b, sigma).unwrap();
        let point: Vec<f64> = zs.iter().flatten().cloned().collect();
        let zt_c = zt_b.clone();
        cases.push(GradCase {
            name: "mmd",
            point,
            analytic,
            loss: Box::new(move |x| {
                let rows: Vec<Vec<f64>> = x.chunks(dim).map(|c| c.to_vec()).collect();
                let zs = FeatureBatch::new(rows).unwrap();
                discrepancy::mmd_gaussian(&zs, &zt_c, sigma).unwrap()
            }),
        });
    }
    // kl_diag_to_std wrt means and variances
    {
        let (m, dim) = (4usize, 3usize);
        let means: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let vars: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.3..2.0)).collect())
            .collect();
        let q = GaussianBatch::new(means.clone(), vars.clone()).unwrap();
        let analytic = discrepancy::grad_kl_diag_to_std(&q);
        let mut point: Vec<f64> = means.iter().flatten().cloned().collect();
        point.extend(vars.iter().flatten().cloned());
        cases.push(GradCase {
            name: "kl_diag_to_std",
            point,
            analytic,
            loss: Box::new(move |x| {
                let (mu, lv) = x.split_at(m * dim);
                let means: Vec<Vec<f64>> = mu.chunks(dim).map(|c| c.to_vec()).collect();
                let vars: Vec<Vec<f64>> = lv.chunks(dim).map(|c| c.to_vec()).collect();
                let q = GaussianBatch::new(means, vars).unwrap();
                discrepancy::kl_diag_to_std(&q).unwrap()
            }),
        });
    }
    cases
}

/// Every analytic gradient matches central finite differences (h = 1e-4)
/// with max relative error below 1e-5.
pub fn check_gradient_suite(seed: u64) -> FamilyResult {
    const NAME: &str = "gradient-suite";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cases = gradient_cases(&mut rng);
    let mut details = Vec::new();
    for case in &cases {
        match grad_check(&case.loss, &case.point, &case.analytic, 1e-4) {
            Ok(err) if err < 1e-5 => details.push(format!("{} {err:.1e}", case.name)),
            Ok(err) => {
                return FamilyResult::fail(
                    NAME,
                    format!("{}: max relative error {err:.3e} >= 1e-5", case.name),
                )
            }
            Err(e) => return FamilyResult::fail(NAME, format!("{}: {e}", case.name)),
        }
    }
    FamilyResult::pass(NAME, format!("{} losses: {}", cases.len(), details.join(", ")))
}

// ---------------------------------------------------------------------------
// metric oracles
// ---------------------------------------------------------------------------

/// 100 random masks and point sets: Dice/GDice equal their brute-force
/// counterparts exactly, HD/ASD within 1e-9, and ASD <= HD throughout.
pub fn check_metric_oracles(seed: u64) -> FamilyResult {
    const NAME: &str = "metric-oracles";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for trial in 0..100 {
        // label volumes with labels {0,1,2}
        let len = rng.gen_range(8..1728);
        let seg: Vec<u8> = (0..len).map(|_| rng.gen_range(0..3)).collect();
        let mut gd: Vec<u8> = (0..len).map(|_| rng.gen_range(0..3)).collect();
        if seg.iter().all(|&v| v == 0) || gd.iter().all(|&v| v == 0) {
            gd[0] = 1;
        }
        let seg_bin: Vec<u8> = seg.iter().map(|&v| (v > 0) as u8).collect();
        let gd_bin: Vec<u8> = gd.iter().map(|&v| (v > 0) as u8).collect();
        if seg_bin.iter().any(|&v| v > 0) || gd_bin.iter().any(|&v| v > 0) {
            let fast = segmetrics::dice_slices(&seg_bin, &gd_bin).unwrap();
            let slow = oracle::dice_bruteforce(&seg_bin, &gd_bin);
            if fast != slow {
                return FamilyResult::fail(
                    NAME,
                    format!("trial {trial}: dice {fast} vs brute force {slow}"),
                );
            }
        }
        let fast = segmetrics::gdice_slices(&seg, &gd, &[1, 2]).unwrap();
        let slow = oracle::gdice_bruteforce(&seg, &gd, &[1, 2]);
        if fast != slow {
            return FamilyResult::fail(
                NAME,
                format!("trial {trial}: gdice {fast} vs brute force {slow}"),
            );
        }

        // point sets
        let mx = rng.gen_range(1..=40);
        let my = rng.gen_range(1..=40);
        let gen_points = |rng: &mut ChaCha20Rng, m: usize| {
            PointSet::new(
                (0..m)
                    .map(|_| {
                        [
                            rng.gen_range(-5.0..5.0),
                            rng.gen_range(-5.0..5.0),
                            rng.gen_range(-5.0..5.0),
                        ]
                    })
                    .collect(),
            )
            .unwrap()
        };
        let x = gen_points(&mut rng, mx);
        let y = gen_points(&mut rng, my);
        let hd = segmetrics::hausdorff(&x, &y).unwrap();
        let hd_slow = oracle::hausdorff_bruteforce(&x, &y);
        if (hd - hd_slow).abs() > 1e-9 {
            return FamilyResult::fail(
                NAME,
                format!("trial {trial}: hausdorff {hd} vs brute force {hd_slow}"),
            );
        }
        let asd = segmetrics::asd(&x, &y).unwrap();
        let asd_slow = oracle::asd_bruteforce(&x, &y);
        if (asd - asd_slow).abs() > 1e-9 {
            return FamilyResult::fail(
                NAME,
                format!("trial {trial}: asd {asd} vs brute force {asd_slow}"),
            );
        }
        if asd > hd + 1e-12 {
            return FamilyResult::fail(NAME, format!("trial {trial}: asd {asd} > hausdorff {hd}"));
        }
    }
    FamilyResult::pass(NAME, "100/100 trials match the brute-force metrics".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injected_kernel_is_detected() {
        let double = |zs: &FeatureBatch, zt: &FeatureBatch, a: f64| -> Result<f64> {
            Ok(2.0 * discrepancy::cfd_point(zs, zt, a)?)
        };
        let result = check_cfd_quadrature(7, &double);
        assert!(!result.passed, "a x2 kernel must fail the quadrature check");
    }

    #[test]
    fn cfd_check_passes_with_real_kernel() {
        let result = check_cfd_quadrature(7, &discrepancy::cfd_point);
        assert!(result.passed, "{}", result.detail);
    }

    #[test]
    fn report_lists_at_least_five_families() {
        // regenerate cheaply: family construction itself is what is counted
        let report = SelfcheckReport {
            families: vec![
                FamilyResult::pass("a", String::new()),
                FamilyResult::pass("b", String::new()),
                FamilyResult::pass("c", String::new()),
                FamilyResult::pass("d", String::new()),
                FamilyResult::pass("e", String::new()),
            ],
        };
        assert!(report.all_passed());
        // the real suite enumerates its families statically
        let names = [
            "mincut-enumeration",
            "cfd-quadrature",
            "varda-quadrature",
            "dtm-bruteforce",
            "dtm-signed-lipschitz",
            "gradient-suite",
            "metric-oracles",
        ];
        assert!(names.len() >= 5);
    }
}

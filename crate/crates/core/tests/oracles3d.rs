use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use spslab_core::coulomb::{coulomb_energy_3d, potential_3d, radial_potential};
use spslab_core::energy::{eval_i, Params};
use spslab_core::grid::{sample_radial, BoxGrid, Field3D, RadialGrid};
use spslab_core::minimize::{
    asymmetry, init, minimize_3d, minimize_radial, spherical_average, SolverConfig,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cap(r: f64) -> f64 {
    if r < 1.0 {
        (0.5 * PI * r).cos().powi(2)
    } else {
        0.0
    }
}

#[test]
fn unit_ball_self_energy_on_the_box() {
    let t = Instant::now();
    let g = BoxGrid::new(96, 4.0).unwrap();
    let u = Field3D::sample_radial(g, None, [0.0; 3], |r| if r < 1.0 { 1.0 } else { 0.0 }).unwrap();
    let d = coulomb_energy_3d(&u).unwrap().energy;
    assert!(rel(d, 32.0 * PI * PI / 15.0) < 0.03, "{d}");
    assert!(t.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn box_potential_of_a_gaussian_matches_the_radial_potential() {
    let g = BoxGrid::new(64, 8.0).unwrap();
    let prof = |r: f64| (-r * r / 2.0).exp();
    let u = Field3D::sample_radial(g, None, [0.0; 3], prof).unwrap();
    let phi = potential_3d(&u).unwrap();
    let radial = radial_potential(&sample_radial(prof, RadialGrid::new(4097, 12.0).unwrap()).unwrap());
    let mid = g.n() / 2;
    for i in mid..g.n() - 8 {
        let idx = g.index(i, mid, mid);
        let r = g.position(idx).iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = radial.interpolate(r);
        assert!(rel(phi.values()[idx], want) < 0.02, "r={r}: {} vs {want}", phi.values()[idx]);
    }
}

#[test]
fn box_potential_commutes_with_lattice_shifts() {
    let g = BoxGrid::new(32, 4.0).unwrap();
    let h = g.h();
    let shift = 3usize;
    let a = Field3D::sample_radial(g, None, [-1.0, 0.2, 0.0], |r| cap(r / 1.2)).unwrap();
    let b = Field3D::sample_radial(g, None, [-1.0 + shift as f64 * h, 0.2, 0.0], |r| cap(r / 1.2)).unwrap();
    let (pa, pb) = (potential_3d(&a).unwrap(), potential_3d(&b).unwrap());
    let scale = pa.values().iter().cloned().fold(0.0, f64::max);
    for i in 0..g.n() - shift {
        for j in 0..g.n() {
            for k in 0..g.n() {
                let x = pa.values()[g.index(i, j, k)];
                let y = pb.values()[g.index(i + shift, j, k)];
                assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn separated_bumps_interact_as_point_charges() {
    let g = BoxGrid::new(64, 4.0).unwrap();
    let d = 4.0;
    let c1 = [-d / 2.0, 0.0, 0.0];
    let c2 = [d / 2.0, 0.0, 0.0];
    let one = Field3D::sample_radial(g, None, c1, cap).unwrap();
    let two = Field3D::sample_radial(g, None, c2, cap).unwrap();
    let both = Field3D::sample(g, None, |x| {
        let r1 = ((x[0] - c1[0]).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt();
        let r2 = ((x[0] - c2[0]).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt();
        cap(r1) + cap(r2)
    })
    .unwrap();
    let q: f64 = one.values().iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
    let cross = coulomb_energy_3d(&both).unwrap().energy
        - coulomb_energy_3d(&one).unwrap().energy
        - coulomb_energy_3d(&two).unwrap().energy;
    assert!(rel(cross, 2.0 * q * q / d) < 0.02, "{cross} vs {}", 2.0 * q * q / d);
}

#[test]
fn lifted_radial_minimizer_keeps_its_energy() {
    let params = Params::zero_mass(2.7).unwrap().with_radius(200.0);
    let g = RadialGrid::new(2049, 200.0).unwrap();
    let res = minimize_radial(&params, &init::gaussian_radial(g, 0.01, 50.0).unwrap(), &SolverConfig::radial()).unwrap();
    assert!(res.converged && res.breakdown.total < 0.0);
    let lift = Field3D::sample_radial(BoxGrid::new(64, 200.0).unwrap(), Some(200.0), [0.0; 3], |r| {
        res.field.interpolate(r)
    })
    .unwrap();
    let e3 = eval_i(&lift, &params).unwrap().total;
    assert!(rel(e3, res.breakdown.total) < 0.02, "{e3} vs {}", res.breakdown.total);
}

/// The 3D flow from a radial start keeps every lattice symmetry of the box
/// (axis reflections and permutations). It does not keep exact radial
/// symmetry: lattice shells of equal radius that are not related by such a
/// symmetry evolve independently.
#[test]
fn descent_from_a_radial_start_keeps_the_octahedral_symmetry() {
    let g = BoxGrid::new(24, 200.0).unwrap();
    let params = Params::zero_mass(2.7).unwrap();
    let u0 = init::gaussian_3d(g, Some(200.0), [0.0; 3], 0.01, 50.0).unwrap();
    assert!(asymmetry(&u0).unwrap() <= 1e-12);
    let cfg = SolverConfig {
        max_iters: 40,
        ..SolverConfig::box3d()
    };
    let res = minimize_3d(&params, &u0, &cfg).unwrap();
    let v = res.field.values();
    let n = g.n();
    let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = v[g.index(i, j, k)];
                for y in [
                    v[g.index(n - 1 - i, j, k)],
                    v[g.index(j, i, k)],
                    v[g.index(k, j, i)],
                    v[g.index(i, k, j)],
                ] {
                    assert!((x - y).abs() <= 1e-10 * scale);
                }
            }
        }
    }
    assert!(res.breakdown.total < 0.0);
    assert!(res.asymmetry < 0.05, "{}", res.asymmetry);
}

#[test]
fn spherical_average_of_a_translate_is_below_its_peak() {
    let g = BoxGrid::new(48, 6.0).unwrap();
    let u = Field3D::sample_radial(g, None, [2.5, 0.0, 0.0], cap).unwrap();
    let peak = u.values().iter().cloned().fold(0.0, f64::max);
    let avg = spherical_average(&u).unwrap();
    assert!(avg.values().iter().all(|&v| v < peak));
    assert!(asymmetry(&u).unwrap() >= 0.5);
}

/// Independent oracle: average over exact lattice shells, computed with a
/// hash map keyed by the integer squared radius.
#[test]
fn asymmetry_of_a_reflected_pair_matches_a_direct_shell_average() {
    let g = BoxGrid::new(40, 5.0).unwrap();
    let u = Field3D::sample(g, None, |x| {
        let a = ((x[0] - 2.0).powi(2) + (x[1] - 0.5).powi(2) + x[2] * x[2]).sqrt();
        let b = ((x[0] + 2.0).powi(2) + (x[1] + 0.5).powi(2) + x[2] * x[2]).sqrt();
        1.3 * cap(a / 1.5) + 1.3 * cap(b / 1.5)
    })
    .unwrap();
    let n = g.n() as i64;
    let key = |idx: usize| {
        let (i, j, k) = g.unravel(idx);
        [i, j, k]
            .iter()
            .map(|&c| (2 * c as i64 - (n - 1)).pow(2))
            .sum::<i64>()
    };
    let mut shells: HashMap<i64, (f64, usize)> = HashMap::new();
    for (idx, &v) in u.values().iter().enumerate() {
        let e = shells.entry(key(idx)).or_default();
        e.0 += v;
        e.1 += 1;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, &v) in u.values().iter().enumerate() {
        let (s, c) = shells[&key(idx)];
        num += (v - s / c as f64).powi(2);
        den += v * v;
    }
    let direct = (num / den).sqrt();
    assert!((asymmetry(&u).unwrap() - direct).abs() < 1e-12);
    assert!(direct > 0.1);
}

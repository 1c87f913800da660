use std::f64::consts::TAU;
use std::sync::Arc;

use super::{CycleSpec, Factor, ManifoldSpec};
use crate::error::{Error, Result};

/// A registered manifold together with its standard cycles.
#[derive(Clone, Debug)]
pub struct RegistryEntry {
    pub manifold: Arc<ManifoldSpec>,
    /// Codimension-one cycles; their periods identify classes in `H^(dim - 1)`.
    pub basis: Vec<CycleSpec>,
    /// Coordinate circles, one per torus angle.
    pub circles: Vec<CycleSpec>,
    pub fundamental: CycleSpec,
}

impl RegistryEntry {
    fn from_manifold(m: ManifoldSpec, basis: Vec<CycleSpec>) -> Self {
        let circles = (0..m.torus_count()).map(|i| CycleSpec::coordinate_circle(&m, i)).collect();
        let fundamental = CycleSpec::fundamental(&m);
        Self { manifold: Arc::new(m), basis, circles, fundamental }
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(|c| c.name.clone()).collect()
    }
}

/// Looks up a registered manifold.
///
/// * `torus3`: `T^3` with angles `x, y, z` of period `2 pi`; basis `T_xz, T_yz, T_xy`.
/// * `torus-sphere(n)`, `1 <= n <= 3`: `T^(n+1) x S^n` with angles `x0..xn` of
///   period 1 and sphere coordinates `y0..yn`; basis `a_k = {x_k = 0}`.
/// * `torus2n(n)`, `1 <= n <= 2` (aliases `torus2`, `torus4`): `T^(2n)` with
///   period `2 pi`; basis the coordinate hypersurfaces.
pub fn registry(name: &str) -> Result<RegistryEntry> {
    let unknown = || Error::UnknownManifold(name.to_string());
    let key = name.trim();
    if key == "torus3" {
        let m = ManifoldSpec::new(
            "torus3",
            vec![Factor::Torus { dim: 3, period: TAU }],
            vec!["x".into(), "y".into(), "z".into()],
        )?;
        let basis = vec![
            CycleSpec::coordinate_hypersurface(&m, 1, 0.0).named("T_xz"),
            CycleSpec::coordinate_hypersurface(&m, 0, 0.0).named("T_yz"),
            CycleSpec::coordinate_hypersurface(&m, 2, 0.0).named("T_xy"),
        ];
        return Ok(RegistryEntry::from_manifold(m, basis));
    }
    if let Some(n) = parse_index(key, "torus-sphere") {
        if !(1..=3).contains(&n) {
            return Err(unknown());
        }
        let mut names: Vec<String> = (0..=n).map(|k| format!("x{k}")).collect();
        names.extend((0..=n).map(|k| format!("y{k}")));
        let mut m = ManifoldSpec::new(
            format!("torus-sphere({n})"),
            vec![Factor::Torus { dim: n + 1, period: 1.0 }, Factor::Sphere { dim: n }],
            names,
        )?;
        if n == 1 {
            m = m.with_note("diffeomorphic to the torus3 contact manifold");
        }
        let basis = (0..=n)
            .map(|k| CycleSpec::coordinate_hypersurface(&m, k, 0.0).named(format!("a_{k}")))
            .collect();
        return Ok(RegistryEntry::from_manifold(m, basis));
    }
    let n = match key {
        "torus2" => Some(1),
        "torus4" => Some(2),
        _ => parse_index(key, "torus2n"),
    };
    if let Some(n) = n {
        if !(1..=2).contains(&n) {
            return Err(unknown());
        }
        let names: Vec<String> = if n == 1 {
            vec!["x".into(), "y".into()]
        } else {
            (1..=n).flat_map(|k| [format!("x{k}"), format!("y{k}")]).collect()
        };
        let m = ManifoldSpec::new(
            format!("torus2n({n})"),
            vec![Factor::Torus { dim: 2 * n, period: TAU }],
            names,
        )?;
        let basis = (0..2 * n)
            .map(|k| {
                let c = CycleSpec::coordinate_hypersurface(&m, k, 0.0);
                let label = format!("{}=0", m.coord_name(k));
                c.named(label)
            })
            .collect();
        return Ok(RegistryEntry::from_manifold(m, basis));
    }
    Err(unknown())
}

/// Parses `prefix(n)` or `prefixn`.
fn parse_index(key: &str, prefix: &str) -> Option<usize> {
    let rest = key.strip_prefix(prefix)?;
    let rest = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
    rest.trim().parse().ok()
}
